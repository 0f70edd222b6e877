"""Deterministic searches for saturating states and for violations of the
conjectured bounds.

Both searches follow the same recipe: a coarse grid scan followed by local
refinement from the best cells and from seeded random starts. Every objective
evaluation is a pure function of its parameters, so results depend only on the
options and the seed.
"""
from dataclasses import dataclass, field
import math

import numpy as np
import scipy.linalg
import scipy.optimize

from . import bounds, config
from .errors import DegenerateVariance, InputError, UnknownFamily, UnknownInequality
from .gram import GammaVector, build_f, spin_matrix_n
from .moments import extract_moments
from .models import scenario
from .operators import Spinor, _as_array, _check_dims, deviation, make_state, max_norm


@dataclass
class SearchResult:
    kind: str
    param_names: tuple
    best_params: tuple
    best_state: object
    best_value: float
    iterations: int
    seed: int
    status: str
    converged: bool = True
    spinor: Spinor = None
    gamma: GammaVector = None
    details: dict = field(default_factory=dict)

    def as_dict(self):
        psi = self.best_state.amplitudes if self.best_state is not None else np.zeros(0)
        out = {
            "kind": self.kind,
            "status": self.status,
            "converged": self.converged,
            "seed": self.seed,
            "iterations": self.iterations,
            "param_names": list(self.param_names),
            "best_params": [float(x) for x in self.best_params],
            "best_value": float(self.best_value),
            "best_state": {"re": psi.real.tolist(), "im": psi.imag.tolist()},
            "spinor": None,
            "gamma": None,
            "details": self.details,
        }
        if self.spinor is not None:
            s = self.spinor.amplitudes
            out["spinor"] = {"re": s.real.tolist(), "im": s.imag.tolist()}
        if self.gamma is not None:
            out["gamma"] = list(self.gamma.as_tuple())
        return out


def eq2_residual(A, B, psi):
    """Norm of ((dA)^2/Var A + (dB)^2/Var B - 2) psi."""
    _check_dims(A, B, psi)
    v = psi.amplitudes
    dav = deviation(A, psi).mat @ v
    dbv = deviation(B, psi).mat @ v
    a = float(np.vdot(dav, dav).real)
    b = float(np.vdot(dbv, dbv).real)
    floor = 1e-12 * max(1.0, max_norm(_as_array(A)) ** 2, max_norm(_as_array(B)) ** 2)
    if a <= floor or b <= floor:
        raise DegenerateVariance("both variances must be non-zero")
    r = deviation(A, psi).mat @ dav / a + deviation(B, psi).mat @ dbv / b - 2 * v
    return float(np.linalg.norm(r))


def haar_state(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return make_state(v, normalize=True)


def _fix_phase(v):
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


@dataclass(frozen=True)
class SaturationOptions:
    seed: int = 0
    starts: int = 3
    gamma_resolution: int = 4   # polar steps over [0, pi]; azimuth gets twice as many
    max_inner: int = 20
    max_outer: int = 300
    tol: float = 1e-14
    exclude_trivial: bool = True  # penalize states where Var A or Var B vanishes
    trivial_floor: float = 1e-3   # relative to max(|A|, |B|)^2
    edge_levels: int = 0          # > 0: penalize weight on the top basis levels (truncated models)


def _kernel_fixed_point(A, B, psi0, gamma, max_inner):
    """Alternate between the near-kernel eigenvector of F and its product projection."""
    psi = psi0
    n = psi.dim
    steps = 0
    for steps in range(1, max_inner + 1):
        F = build_f(A, B, psi, gamma).mat
        w, V = scipy.linalg.eigh(F)
        # smallest |eigenvalue| of F is the smallest eigenvalue of F^2
        vec = V[:, int(np.argmin(np.abs(w)))].reshape(n, 2)
        U, _, _ = np.linalg.svd(vec)
        new = make_state(_fix_phase(U[:, 0]), normalize=True)
        overlap = abs(np.vdot(new.amplitudes, psi.amplitudes))
        psi = new
        if overlap > 1 - 1e-15:
            break
    return psi, steps


def _saturation_objective(A, B, psi0, angles, opts):
    gamma = GammaVector.from_angles(*angles)
    psi, steps = _kernel_fixed_point(A, B, psi0, gamma, opts.max_inner)
    m = extract_moments(A, B, psi)
    n_mat = spin_matrix_n(m, gamma)
    value, chi = scipy.linalg.eigh(n_mat)
    # lambda_min / (trace / 2) lies in [0, 1] and does not depend on the scale of A, B
    half_trace = float(n_mat.trace().real) / 2
    norm2 = max(max_norm(_as_array(A)), max_norm(_as_array(B)), 1e-300) ** 2
    if half_trace > 1e-12 * norm2:
        ratio = min(1.0, max(0.0, float(value[0])) / half_trace)
    else:
        ratio = 1.0
    return ratio + _penalty(A, B, psi, m, opts), psi, chi[:, 0], gamma, float(value[0])


def _penalty(A, B, psi, m, opts):
    out = 0.0
    if opts.exclude_trivial:
        # an eigenstate of A or B gives a kernel of F that says nothing about the bounds
        floor = opts.trivial_floor * max(max_norm(_as_array(A)), max_norm(_as_array(B))) ** 2
        out += max(0.0, floor - m.a) + max(0.0, floor - m.b)
    if opts.edge_levels > 0:
        amps = psi.amplitudes[-opts.edge_levels:]
        out += float(np.sum(np.abs(amps) ** 2)) * max(1.0, m.scale)
    return out


def product_residual(A, B, psi, chi, gamma):
    """||F (psi (x) chi)|| with F built around psi."""
    F = build_f(A, B, psi, gamma).mat
    return float(np.linalg.norm(F @ np.kron(psi.amplitudes, chi)))


def saturation_search(A, B, dim=None, opts=None):
    """Look for a product state psi (x) chi annihilated by F for some gamma.

    Outer search over the direction of gamma (its length is irrelevant to the
    kernel condition); inner self-consistent eigenproblem for the state.
    """
    opts = opts or SaturationOptions()
    _check_dims(A, B)
    n = A.dim if dim is None else int(dim)
    if n != A.dim:
        raise InputError(f"dim {n} does not match operator dimension {A.dim}")
    rng = np.random.default_rng(opts.seed)
    starts = [haar_state(rng, n) for _ in range(max(1, opts.starts))]

    res = opts.gamma_resolution
    thetas = np.linspace(0.0, math.pi, res + 1)
    phis = np.arange(2 * res) * (math.pi / res)
    evals = 0
    best = None
    for s_idx, psi0 in enumerate(starts):
        grid_best = None
        for th in thetas:
            for ph in phis:
                val = _saturation_objective(A, B, psi0, (th, ph), opts)[0]
                evals += 1
                if grid_best is None or val < grid_best[0]:
                    grid_best = (val, (float(th), float(ph)))

        def f(x, psi0=psi0):
            return _saturation_objective(A, B, psi0, tuple(x), opts)[0]

        out = scipy.optimize.minimize(
            f,
            np.array(grid_best[1]),
            method="Nelder-Mead",
            options={
                "xatol": 1e-12,
                "fatol": opts.tol * 1e-3,
                "maxfev": opts.max_outer,
                "initial_simplex": np.array(grid_best[1]) + np.array([[0, 0], [0.2, 0], [0, 0.2]]),
            },
        )
        evals += out.nfev
        cands = [(grid_best[0], grid_best[1]), (float(out.fun), (float(out.x[0]), float(out.x[1])))]
        for val, angles in cands:
            key = (val, angles, s_idx)
            if best is None or key < best[0]:
                best = (key, psi0)

    (val, angles, s_idx), psi0 = best
    value, psi, chi, gamma, lam = _saturation_objective(A, B, psi0, angles, opts)
    scale = max(1.0, extract_moments(A, B, psi).scale)
    converged = value <= 1e-12 and lam <= 1e-12 * scale
    residual = product_residual(A, B, psi, chi, gamma)
    details = {"residual": residual, "min_eig_n": lam, "start_index": s_idx,
               "gamma_angles": list(angles)}
    try:
        details["eq2_residual"] = eq2_residual(A, B, psi)
    except DegenerateVariance:
        details["eq2_residual"] = None
    return SearchResult(
        kind="saturation",
        param_names=("gamma_theta", "gamma_phi"),
        best_params=angles,
        best_state=psi,
        best_value=value,
        iterations=evals,
        seed=opts.seed,
        status="saturated" if converged else "not_converged",
        converged=converged,
        spinor=Spinor(_fix_phase(chi)),
        gamma=gamma,
        details=details,
    )


# ---- violation search -------------------------------------------------------

FAMILIES = {
    "spin_bloch": {
        "model": "spin",
        "coords": ("theta", "phi"),
        "defaults": {"params": {"j": 0.5}, "pair": ("l_x", "l_y"),
                     "ranges": {"theta": (0.0, math.pi), "phi": (0.0, 0.0)}},
    },
    "oscillator_coherent": {
        "model": "oscillator",
        "coords": ("re", "im"),
        "defaults": {"params": {"n_trunc": 48, "hbar": 1.0}, "pair": ("e_kin", "x"),
                     "ranges": {"re": (0.0, 0.0), "im": (0.0, 2.0)}},
    },
}


@dataclass(frozen=True)
class ViolationOptions:
    seed: int = 0
    resolution: int = 64
    starts: int = 2
    sweeps: int = 4
    xatol: float = 1e-12
    tolerances: dict = None


def family_spec(family):
    """Fill defaults for a family description ``{"id": ..., "params", "pair", "ranges"}``."""
    if isinstance(family, str):
        family = {"id": family}
    fid = family.get("id")
    if fid not in FAMILIES:
        raise UnknownFamily(f"unknown family {fid!r}")
    reg = FAMILIES[fid]
    d = reg["defaults"]
    params = {**d["params"], **dict(family.get("params") or {})}
    pair = tuple(family.get("pair") or d["pair"])
    ranges = dict(d["ranges"])
    for k, v in dict(family.get("ranges") or {}).items():
        if k not in reg["coords"]:
            raise InputError(f"family {fid!r} has no coordinate {k!r}")
        lo, hi = float(v[0]), float(v[1])
        if hi < lo:
            raise InputError(f"range for {k!r} is reversed")
        ranges[k] = (lo, hi)
    return {"id": fid, "model": reg["model"], "params": params, "pair": pair,
            "ranges": {k: ranges[k] for k in reg["coords"]}}


def family_scenario(fam, coords):
    state = {"kind": "bloch" if fam["model"] == "spin" else "coherent"}
    state.update(dict(zip(fam["ranges"], (float(x) for x in coords))))
    return scenario({"model": fam["model"], "params": fam["params"],
                     "pair": list(fam["pair"]), "state": state})


def _report_options(sc, inequality, tolerances):
    return bounds.ReportOptions(
        evaluate=(inequality,),
        oscillator=sc.metadata.get("oscillator_moments"),
        hbar=sc.metadata.get("hbar", 1.0),
        notes=tuple(sc.metadata.get("notes", ())),
        tolerances=tolerances,
    )


def margin_at(fam, inequality, coords, tolerances=None):
    """Margin of ``inequality`` at family coordinates, or +inf where it is undefined."""
    sc = family_scenario(fam, coords)
    report = bounds.full_report(sc.A, sc.B, sc.psi, _report_options(sc, inequality, tolerances))
    if not report.bounds:
        return math.inf, None
    return report.bounds[0].margin, report.bounds[0]


def violation_search(family, inequality, opts=None):
    """Minimize the margin of ``inequality`` over a state family.

    A negative minimum that survives re-evaluation from the raw state through
    the full report path is returned with status ``"violation_certified"``.
    """
    opts = opts or ViolationOptions()
    if inequality not in bounds.STATUS:
        raise UnknownInequality(f"unknown inequality {inequality!r}")
    fam = family_spec(family)
    names = tuple(fam["ranges"])
    lows = np.array([fam["ranges"][k][0] for k in names])
    highs = np.array([fam["ranges"][k][1] for k in names])
    free = [i for i in range(len(names)) if highs[i] > lows[i]]
    res = int(opts.resolution)
    if res < 1:
        raise InputError("resolution must be at least 1")
    axes = [np.linspace(lows[i], highs[i], res + 1) if i in free else np.array([lows[i]])
            for i in range(len(names))]
    evals = 0

    def objective(x):
        nonlocal evals
        evals += 1
        return margin_at(fam, inequality, x, opts.tolerances)[0]

    grid = []
    for point in np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(names), -1).T:
        grid.append((objective(point), tuple(float(x) for x in point)))
    grid.sort()
    step = np.where(highs > lows, (highs - lows) / res, 0.0)

    rng = np.random.default_rng(opts.seed)
    seeds = [tuple(float(x) for x in lows + rng.random(len(names)) * (highs - lows))
             for _ in range(opts.starts)]
    start_points = [p for _, p in grid[: max(1, opts.starts)]] + seeds

    best = grid[0]
    for x0 in start_points:
        x = np.array(x0)
        val = objective(x)
        for _ in range(opts.sweeps):
            prev = val
            for i in free:
                lo = max(lows[i], x[i] - step[i])
                hi = min(highs[i], x[i] + step[i])

                def along(t, i=i):
                    y = x.copy()
                    y[i] = t
                    return objective(y)

                out = scipy.optimize.minimize_scalar(
                    along, bounds=(lo, hi), method="bounded", options={"xatol": opts.xatol}
                )
                if out.fun < val:
                    x[i], val = out.x, float(out.fun)
            if not val < prev:
                break
        cand = (val, tuple(float(t) for t in x))
        if cand < best:
            best = cand

    value, params = best
    sc = family_scenario(fam, params)
    value_again = margin_at(fam, inequality, params, opts.tolerances)[0]
    details = {"family": {**fam, "pair": list(fam["pair"]),
                          "ranges": {k: list(v) for k, v in fam["ranges"].items()}},
               "inequality": inequality}
    status, converged = "no_violation", True
    if math.isfinite(value):
        # certificate: recompute from the raw amplitudes, not from family coordinates
        psi = make_state(sc.psi.amplitudes)
        report = bounds.full_report(sc.A, sc.B, psi, _report_options(sc, inequality, opts.tolerances))
        bv = report.bounds[0]
        magnitude = max(abs(bv.lhs), abs(bv.rhs))
        details["certificate"] = {"bound": bv.as_dict(), "moments": report.moments.as_dict()}
        reproduced = (abs(bv.margin - value) <= config.tol("certificate", opts.tolerances) * magnitude
                      and value == value_again)
        if value < 0 and not bv.saturated:
            if reproduced:
                status = "violation_certified"
            else:
                status, converged = "rejected", False
    else:
        status, converged = "not_applicable", False
    return SearchResult(
        kind="violation",
        param_names=names,
        best_params=params,
        best_state=sc.psi,
        best_value=value,
        iterations=evals,
        seed=opts.seed,
        status=status,
        converged=converged,
        details=details,
    )
