"""Concrete operator families: truncated harmonic oscillator and spin-j."""
from dataclasses import dataclass, field
import math

import numpy as np
import scipy.linalg

from . import config
from .bounds import OscillatorMoments
from .errors import (
    BadSpin,
    ExcessiveLeakage,
    IndexOutOfRange,
    InputError,
    TruncationTooSmall,
    UnknownModel,
    UnknownPair,
    UnknownState,
)
from .operators import expectation, make_hermitian, make_state, variance


@dataclass(frozen=True, eq=False)
class OscillatorModel:
    """Unit-mass, unit-frequency oscillator in a Fock basis of size ``n_trunc``."""

    n_trunc: int
    hbar: float
    operators: dict = field(repr=False)

    @property
    def dim(self):
        return self.n_trunc

    @property
    def x(self):
        return self.operators["x"]

    @property
    def p(self):
        return self.operators["p"]

    @property
    def e_kin(self):
        return self.operators["e_kin"]

    @property
    def number(self):
        return self.operators["number"]


@dataclass(frozen=True, eq=False)
class SpinModel:
    j: float
    operators: dict = field(repr=False)

    @property
    def dim(self):
        return int(round(2 * self.j)) + 1

    @property
    def l_x(self):
        return self.operators["l_x"]

    @property
    def l_y(self):
        return self.operators["l_y"]

    @property
    def l_z(self):
        return self.operators["l_z"]


@dataclass(frozen=True)
class LeakageMetric:
    top_weight: float


def annihilation(n):
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


def oscillator(n_trunc, hbar=1.0):
    if int(n_trunc) != n_trunc or n_trunc < 4:
        raise TruncationTooSmall(f"n_trunc must be an integer >= 4, got {n_trunc!r}")
    if not hbar > 0 or not math.isfinite(hbar):
        raise InputError(f"hbar must be positive, got {hbar!r}")
    n = int(n_trunc)
    hbar = float(hbar)
    a = annihilation(n)
    ad = a.T
    s = math.sqrt(hbar / 2)
    x = make_hermitian(s * (a + ad), unit="length")
    p = make_hermitian(1j * s * (ad - a), unit="momentum")
    # square after truncation: E_kin stays consistent with the p used in commutators
    e_kin = make_hermitian(p.mat @ p.mat / 2, unit="energy")
    number = make_hermitian(ad @ a)
    ops = {"x": x, "p": p, "e_kin": e_kin, "number": number}
    return OscillatorModel(n, hbar, ops)


def fock_state(model, k):
    if int(k) != k or not 0 <= k < model.n_trunc:
        raise IndexOutOfRange(f"Fock index {k!r} outside 0..{model.n_trunc - 1}")
    v = np.zeros(model.n_trunc, dtype=complex)
    v[int(k)] = 1.0
    return make_state(v)


def leakage(psi, levels=2):
    """Probability on the top ``levels`` basis vectors."""
    amps = psi.amplitudes if hasattr(psi, "amplitudes") else np.asarray(psi)
    return LeakageMetric(float(np.sum(np.abs(amps[-levels:]) ** 2)))


def coherent_state(model, alpha, max_leakage=None):
    """Truncated coherent state and the weight it had on the top two levels.

    The weight is measured before renormalization; above ``max_leakage``
    (default 1e-10) the state is rejected.
    """
    alpha = complex(alpha)
    n = model.n_trunc
    amps = np.empty(n, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, n):
        amps[k] = amps[k - 1] * alpha / math.sqrt(k)
    metric = leakage(amps)
    limit = config.tol("leakage") if max_leakage is None else max_leakage
    if metric.top_weight > limit:
        raise ExcessiveLeakage(
            f"coherent state alpha={alpha} leaks {metric.top_weight:.3e} onto the top levels "
            f"of an N={n} basis"
        )
    return make_state(amps, normalize=True), metric


def oscillator_moments(model, psi):
    return OscillatorMoments(
        var_e=variance(model.e_kin, psi),
        var_x=variance(model.x, psi),
        mean_p=expectation(model.p, psi),
        mean_e=expectation(model.e_kin, psi),
        var_p=variance(model.p, psi),
    )


def spin(j):
    two_j = 2 * float(j)
    if two_j != round(two_j) or two_j < 1:
        raise BadSpin(f"j must be a positive half-integer, got {j!r}")
    j = round(two_j) / 2
    m = np.arange(j, -j - 1, -1)
    # <m+1|J+|m> on the superdiagonal, basis ordered m = j, j-1, ..., -j
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1)
    jm = jp.T
    ops = {
        "l_x": make_hermitian((jp + jm) / 2),
        "l_y": make_hermitian((jp - jm) / 2j),
        "l_z": make_hermitian(np.diag(m)),
    }
    return SpinModel(j, ops)


def bloch_state(model, theta, phi=0.0):
    """Highest-weight state rotated by exp(-i phi Lz) exp(-i theta Ly).

    The global phase is fixed so the m = j amplitude is real; for j = 1/2
    this gives (cos(theta/2), e^{i phi} sin(theta/2)).
    """
    dim = model.dim
    top = np.zeros(dim, dtype=complex)
    top[0] = 1.0
    v = scipy.linalg.expm(-1j * theta * model.l_y.mat) @ top
    m = np.diag(model.l_z.mat).real
    v = np.exp(1j * (model.j - m) * phi) * v
    return make_state(v, normalize=True)


MODELS = ("oscillator", "spin")
STATE_KINDS = {"oscillator": ("fock", "coherent"), "spin": ("bloch",)}


def pair_names(model_name):
    if model_name == "oscillator":
        return ("x", "p", "e_kin", "number")
    if model_name == "spin":
        return ("l_x", "l_y", "l_z")
    raise UnknownModel(model_name)


@dataclass(frozen=True, eq=False)
class Scenario:
    A: object
    B: object
    psi: object
    model: object
    metadata: dict


def build_model(name, params):
    params = dict(params or {})
    if name == "oscillator":
        return oscillator(params.get("n_trunc", 40), params.get("hbar", 1.0))
    if name == "spin":
        return spin(params.get("j", 0.5))
    raise UnknownModel(name)


def build_state(model_name, model, state):
    kind = state.get("kind")
    if kind not in STATE_KINDS.get(model_name, ()):
        raise UnknownState(f"state kind {kind!r} not available for model {model_name!r}")
    meta = {}
    if kind == "fock":
        psi = fock_state(model, state.get("k", 0))
        meta["top_weight"] = leakage(psi).top_weight
    elif kind == "coherent":
        psi, metric = coherent_state(model, complex(state.get("re", 0.0), state.get("im", 0.0)))
        meta["top_weight"] = metric.top_weight
    else:
        psi = bloch_state(model, state.get("theta", 0.0), state.get("phi", 0.0))
    return psi, meta


def scenario(spec):
    """Build (A, B, psi) plus metadata from a ScenarioSpec (or a dict of its fields)."""
    get = spec.get if isinstance(spec, dict) else lambda k, d=None: getattr(spec, k, d)
    name = get("model")
    if name not in MODELS:
        raise UnknownModel(f"unknown model {name!r}")
    model = build_model(name, get("params"))
    pair = tuple(get("pair") or ())
    if len(pair) != 2:
        raise UnknownPair(f"pair must name two operators, got {pair!r}")
    for op in pair:
        if op not in model.operators:
            raise UnknownPair(f"unknown operator {op!r} for model {name!r}")
    psi, meta = build_state(name, model, dict(get("state") or {}))
    meta = {"model": name, "dim": model.dim, **meta}
    notes = []
    if name == "oscillator":
        meta["n_trunc"] = model.n_trunc
        meta["hbar"] = model.hbar
        notes.append(
            f"truncated Fock basis N={model.n_trunc}; top-two-level weight {meta['top_weight']:.3e}"
        )
        if pair == ("e_kin", "x"):
            meta["oscillator_moments"] = oscillator_moments(model, psi)
            if get("state", {}).get("kind") == "coherent":
                notes.append("coherent states are this workbench's choice of moving test states")
    meta["notes"] = notes
    A, B = model.operators[pair[0]], model.operators[pair[1]]
    return Scenario(A, B, psi, model, meta)
