"""Evaluators for the uncertainty inequalities.

Every evaluator returns a :class:`BoundValue` with ``margin = lhs - rhs``.
Whether a bound is a theorem or a conjecture is fixed per identifier in
:data:`STATUS` and never depends on the data.
"""
from dataclasses import asdict, dataclass, field
import math

from . import config
from .errors import DegenerateCommutator, NonpositiveEnergy, UnknownInequality, ZeroMomentum
from .moments import MomentSet, extract_moments

PROVEN = "proven"
CONJECTURED = "conjectured"

STATUS = {
    "robertson": PROVEN,
    "aux_a": PROVEN,
    "aux_b": PROVEN,
    "refined": CONJECTURED,
    "triple": CONJECTURED,
    "root": CONJECTURED,
    "kinetic_position": CONJECTURED,
    "effective_time_printed": CONJECTURED,
    "effective_time_derived": CONJECTURED,
}
INEQUALITIES = tuple(STATUS)
OSCILLATOR_ONLY = ("kinetic_position", "effective_time_printed", "effective_time_derived")


@dataclass(frozen=True)
class BoundValue:
    id: str
    lhs: float
    rhs: float
    margin: float
    saturated: bool
    status: str

    def as_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(
            id=data["id"],
            lhs=float(data["lhs"]),
            rhs=float(data["rhs"]),
            margin=float(data["margin"]),
            saturated=bool(data["saturated"]),
            status=data["status"],
        )


@dataclass(frozen=True)
class OscillatorMoments:
    """Single-mode quantities needed by the kinetic-energy/coordinate bounds."""

    var_e: float   # Var(E_kin)
    var_x: float   # Var(x)
    mean_p: float  # <p>
    mean_e: float  # <E_kin>
    var_p: float   # Var(p)

    def as_dict(self):
        return asdict(self)


@dataclass
class BoundReport:
    moments: MomentSet
    bounds: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def get(self, ident):
        for bv in self.bounds:
            if bv.id == ident:
                return bv
        raise KeyError(ident)

    def ids(self):
        return [bv.id for bv in self.bounds]

    def as_dict(self):
        return {
            "moments": self.moments.as_dict(),
            "bounds": [bv.as_dict() for bv in self.bounds],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            moments=MomentSet.from_dict(data["moments"]),
            bounds=[BoundValue.from_dict(b) for b in data["bounds"]],
            notes=list(data["notes"]),
        )


def make_bound(ident, lhs, rhs, tolerances=None):
    if ident not in STATUS:
        raise UnknownInequality(ident)
    lhs, rhs = float(lhs), float(rhs)
    margin = lhs - rhs
    # saturation is judged relative to the size of the two sides
    saturated = abs(margin) <= config.tol("saturation", tolerances) * max(abs(lhs), abs(rhs))
    return BoundValue(ident, lhs, rhs, margin, bool(saturated), STATUS[ident])


def _degenerate(m, tolerances=None):
    return m.f <= config.tol("degenerate_f", tolerances) * m.scale


def robertson(m, tolerances=None):
    return make_bound("robertson", m.a * m.b, m.c**2 / 4, tolerances)


def aux_bounds(m, tolerances=None):
    """The two third-order Robertson bounds: f*a >= d^2/4 and f*b >= e^2/4."""
    return (
        make_bound("aux_a", m.f * m.a, m.d**2 / 4, tolerances),
        make_bound("aux_b", m.f * m.b, m.e**2 / 4, tolerances),
    )


def refined_rhs(m, tolerances=None):
    if _degenerate(m, tolerances):
        return m.c**2 / 4
    return (m.c**2 + m.a * m.e**2 / m.f + m.b * m.d**2 / m.f) / 4


def refined(m, tolerances=None, notes=None):
    """Refined product bound; falls back to Robertson when <C^2> vanishes."""
    if _degenerate(m, tolerances) and notes is not None:
        notes.append("refined: <C^2> is zero to tolerance; right side falls back to <C>^2/4")
    return make_bound("refined", m.a * m.b, refined_rhs(m, tolerances), tolerances)


def triple_parts(m):
    return m.a * m.b * m.f, (m.c**2 * m.f + m.a * m.e**2 + m.b * m.d**2) / 4


def triple_margin(m):
    """a*b*f - (c^2 f + a e^2 + b d^2)/4, the determinant of the 3x3 reduced matrix."""
    lhs, rhs = triple_parts(m)
    return lhs - rhs


def triple(m, tolerances=None):
    lhs, rhs = triple_parts(m)
    return make_bound("triple", lhs, rhs, tolerances)


def root_rhs(m):
    de = abs(m.d * m.e)
    return (de + math.sqrt(de**2 + 4 * m.f**2 * m.c**2)) / (4 * m.f)


def root_form(m, tolerances=None):
    if _degenerate(m, tolerances):
        raise DegenerateCommutator("root form needs <C^2> > 0")
    return make_bound("root", math.sqrt(m.a * m.b), root_rhs(m), tolerances)


def kinetic_mapping(osc, hbar):
    """MomentSet for the pair (E_kin, x) expressed through oscillator moments."""
    return MomentSet(
        a=osc.var_e,
        b=osc.var_x,
        c=hbar * osc.mean_p,
        f=2 * hbar**2 * osc.mean_e,
        e=-(hbar**2),
        d=0.0,
    )


def kinetic_position_bound(osc, hbar, tolerances=None):
    if not osc.mean_e > 0:
        raise NonpositiveEnergy(f"<E_kin> = {osc.mean_e!r} must be positive")
    lhs = osc.var_e * osc.var_x
    rhs = hbar**2 / 4 * osc.mean_p**2 + hbar**2 / 8 * osc.var_e / osc.mean_e
    return make_bound("kinetic_position", lhs, rhs, tolerances)


def effective_time_bound(osc, hbar, mode=None, tolerances=None):
    """Energy / effective-time bound in the printed and the derived form.

    ``mode`` is ``"as_printed"``, ``"as_derived"`` or None for both (returned
    as a ``(printed, derived)`` tuple).
    """
    if mode not in (None, "as_printed", "as_derived"):
        raise ValueError(f"unknown mode {mode!r}")
    p2 = osc.mean_p**2
    if p2 == 0 or p2 <= 1e-24 * max(1.0, osc.var_p):
        raise ZeroMomentum("effective time needs <p> != 0")
    lhs = osc.var_e * osc.var_x / p2
    printed = derived = None
    if mode in (None, "as_printed"):
        if not osc.var_p > 0:
            raise ZeroMomentum("printed form needs Var(p) > 0")
        rhs = hbar**2 / 4 + hbar**2 / 4 * osc.var_e / (osc.var_p * p2)
        printed = make_bound("effective_time_printed", lhs, rhs, tolerances)
    if mode in (None, "as_derived"):
        if not osc.mean_e > 0:
            raise NonpositiveEnergy("derived form needs <E_kin> > 0")
        rhs = hbar**2 / 4 + hbar**2 / 8 * osc.var_e / (osc.mean_e * p2)
        derived = make_bound("effective_time_derived", lhs, rhs, tolerances)
    if mode == "as_printed":
        return printed
    if mode == "as_derived":
        return derived
    return printed, derived


@dataclass(frozen=True)
class ReportOptions:
    evaluate: tuple = None          # inequality ids; None means every applicable one
    oscillator: OscillatorMoments = None
    hbar: float = 1.0
    notes: tuple = ()               # pre-computed notes (truncation, model choices)
    tolerances: dict = None


def full_report(A, B, psi, options=None):
    options = options or ReportOptions()
    tols = options.tolerances
    wanted = INEQUALITIES if options.evaluate is None else tuple(options.evaluate)
    for ident in wanted:
        if ident not in STATUS:
            raise UnknownInequality(ident)
    explicit = options.evaluate is not None

    m = extract_moments(A, B, psi)
    report = BoundReport(moments=m, notes=list(options.notes))
    notes = report.notes
    osc = options.oscillator
    values = {}

    if "robertson" in wanted:
        values["robertson"] = robertson(m, tols)
    if "aux_a" in wanted or "aux_b" in wanted:
        values["aux_a"], values["aux_b"] = aux_bounds(m, tols)
    if "refined" in wanted:
        values["refined"] = refined(m, tols, notes)
    if "triple" in wanted:
        values["triple"] = triple(m, tols)
    if "root" in wanted:
        try:
            values["root"] = root_form(m, tols)
        except DegenerateCommutator:
            notes.append("root: skipped, <C^2> is zero to tolerance")
    if any(i in wanted for i in OSCILLATOR_ONLY):
        if osc is None:
            if explicit:
                notes.append("kinetic/effective-time bounds need the oscillator (e_kin, x) pair; skipped")
        else:
            if "kinetic_position" in wanted:
                try:
                    values["kinetic_position"] = kinetic_position_bound(osc, options.hbar, tols)
                except NonpositiveEnergy as exc:
                    notes.append(f"kinetic_position: skipped, {exc}")
            if "effective_time_printed" in wanted or "effective_time_derived" in wanted:
                try:
                    printed, derived = effective_time_bound(osc, options.hbar, None, tols)
                    values["effective_time_printed"] = printed
                    values["effective_time_derived"] = derived
                    notes.append(
                        "effective_time: printed denominator Var(p)<p>^2 differs from direct "
                        "substitution 2<E_kin><p>^2; both forms reported"
                    )
                except (ZeroMomentum, NonpositiveEnergy) as exc:
                    notes.append(f"effective_time: skipped, {exc}")

    report.bounds = [values[i] for i in INEQUALITIES if i in values and i in wanted]
    return report
