"""Self-test suite: acceptance scenarios plus randomized invariant checks.

Each check returns a :class:`Check`; :func:`run_selftest` runs them all and
:func:`format_table` renders a deterministic pass/fail table (no timings).
"""
from dataclasses import dataclass
import json
import math

import numpy as np

from . import bounds, gram, models, operators, search
from .moments import extract_moments


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def random_hermitian(rng, n, scale=1.0):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return operators.make_hermitian(scale * (g + g.conj().T) / 2)


def random_instance(rng, dims=(2, 8)):
    """Symmetrized-Gaussian A, B and a Haar-random state, dimension uniform in ``dims``."""
    n = int(rng.integers(dims[0], dims[1] + 1))
    return random_hermitian(rng, n), random_hermitian(rng, n), search.haar_state(rng, n)


def _g(x):
    return format(float(x), ".3e")


# ---- acceptance criteria ----------------------------------------------------

def acc_ground_state(seed=0):
    worst = 0.0
    ok = True
    for n in (8, 16):
        sc = models.scenario({"model": "oscillator", "params": {"n_trunc": n, "hbar": 1.0},
                              "pair": ["e_kin", "x"], "state": {"kind": "fock", "k": 0}})
        m = extract_moments(sc.A, sc.B, sc.psi)
        ref = bounds.refined(m)
        kp = bounds.kinetic_position_bound(sc.metadata["oscillator_moments"], 1.0)
        rob = bounds.robertson(m)
        errs = [abs(ref.lhs - 1 / 16), abs(ref.rhs - 1 / 16), abs(kp.lhs - 1 / 16), abs(kp.rhs - 1 / 16)]
        worst = max(worst, *errs)
        ok &= max(errs) <= 1e-9 and rob.rhs == 0.0 and ref.saturated and kp.saturated
    return Check("A1 ground-state equality (refined = kinetic_position = 1/16, robertson rhs = 0)",
                 ok, f"max |side - 1/16| = {_g(worst)}")


def acc_spin_up(seed=0):
    sp = models.spin(0.5)
    psi = models.bloch_state(sp, 0.0, 0.0)
    m = extract_moments(sp.l_x, sp.l_y, psi)
    t = bounds.triple_margin(m)
    abf = m.a * m.b * m.f
    ok = abs(t) <= 1e-12 and abs(abf - 1 / 64) <= 1e-12
    return Check("A2 spin-1/2 up: triple margin 0, a*b*f = 1/64", ok,
                 f"triple = {_g(t)}, abf - 1/64 = {_g(abf - 1 / 64)}")


def acc_proven_bounds(seed=0, count=10_000):
    rng = np.random.default_rng(seed)
    failures = 0
    worst = math.inf
    for _ in range(count):
        A, B, psi = random_instance(rng)
        m = extract_moments(A, B, psi)
        for bv in (bounds.robertson(m), *bounds.aux_bounds(m)):
            rel = bv.margin / max(abs(bv.lhs), abs(bv.rhs), 1e-300)
            worst = min(worst, rel)
            if bv.margin < -1e-10 * max(abs(bv.lhs), abs(bv.rhs)):
                failures += 1
    return Check(f"A3 proven bounds on {count} random instances", failures == 0,
                 f"failures = {failures}, min relative margin = {_g(worst)}")


def acc_product_positivity(seed=0, count=1000, gammas=100):
    rng = np.random.default_rng(seed + 1)
    failures = 0
    worst = math.inf
    for _ in range(count):
        A, B, psi = random_instance(rng)
        m = extract_moments(A, B, psi)
        g = rng.standard_normal((gammas, 3))
        stack = np.array([gram.spin_matrix_n(m, tuple(row)) for row in g])
        lam = np.linalg.eigvalsh(stack)[:, 0]
        rel = lam / (m.scale * np.sum(g**2, axis=1))
        worst = min(worst, float(rel.min()))
        failures += int(np.sum(rel < -1e-10))
    return Check(f"A4 N(gamma) positivity, {count} instances x {gammas} gammas", failures == 0,
                 f"failures = {failures}, min lambda/scale = {_g(worst)}")


def acc_expansion(seed=0, count=1000):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(count):
        A, B, psi = random_instance(rng)
        g = tuple(rng.standard_normal(3))
        F = gram.build_f(A, B, psi, g).mat
        lhs = F @ F
        rhs = gram.expansion_rhs(A, B, psi, g)
        scale = max(operators.max_norm(lhs), operators.max_norm(rhs))
        worst = max(worst, operators.max_norm(lhs - rhs) / scale)
    return Check(f"A5 expansion identity on {count} instances", worst <= 1e-11,
                 f"max residual / scale = {_g(worst)}")


def acc_sector(seed=0, count=1000):
    rng = np.random.default_rng(seed + 3)
    w_sec = w_sq = w_cf = 0.0
    for _ in range(count):
        A, B, psi = random_instance(rng)
        m = extract_moments(A, B, psi)
        ga = gram.assemble_m6(m)
        ref = max(abs(ga.det_m2), 1e-300)
        w_sec = max(w_sec, abs(ga.det_plus - ga.det_m2) / ref, abs(ga.det_minus - ga.det_m2) / ref)
        w_sq = max(w_sq, abs(ga.det_m6 - ga.det_m2**2) / ref**2)
        w_cf = max(w_cf, abs(ga.det_m2 - gram.det_m2_closed_form(m)) / m.scale**3)
    ok = w_sec <= 1e-11 and w_sq <= 1e-8 and w_cf <= 1e-12
    return Check(f"A6 sector/determinant identities on {count} moment sets", ok,
                 f"sector rel = {_g(w_sec)}, det6 vs det2^2 rel = {_g(w_sq)}, closed form = {_g(w_cf)}")


def acc_violation(seed=0):
    opts = search.ViolationOptions(seed=seed)
    tri = search.violation_search("spin_bloch", "triple", opts)
    rob = search.violation_search("spin_bloch", "robertson", opts)
    theta = tri.best_params[0]
    ok = (tri.status == "violation_certified"
          and abs(tri.best_value + 1 / 256) <= 1e-6
          and abs(theta - math.pi / 4) <= 1e-3
          and rob.status == "no_violation")
    return Check("A7 spin-1/2 Bloch family: triple violated at pi/4, robertson never", ok,
                 f"triple min = {_g(tri.best_value)} at theta = {theta:.6f}; robertson status = {rob.status}")


def acc_moving_coherent(seed=0):
    sc = models.scenario({"model": "oscillator", "params": {"n_trunc": 40, "hbar": 1.0},
                          "pair": ["e_kin", "x"], "state": {"kind": "coherent", "re": 0.0,
                                                            "im": 1 / math.sqrt(2)}})
    m = extract_moments(sc.A, sc.B, sc.psi)
    kp = bounds.kinetic_position_bound(sc.metadata["oscillator_moments"], 1.0)
    got = (m.a, m.b, m.c, m.f)
    want = (0.625, 0.5, 1.0, 1.5)
    err = max(abs(x - y) for x, y in zip(got, want))
    ok = (sc.metadata["top_weight"] <= 1e-10 and err <= 1e-8
          and abs(kp.margin + 1 / 24) <= 1e-6 and kp.status == bounds.CONJECTURED)
    return Check("A8 moving coherent state alpha = i/sqrt(2)", ok,
                 f"moment err = {_g(err)}, kinetic margin = {kp.margin:.9f}")


def acc_saturation(seed=0):
    osc = models.oscillator(32)
    res = search.saturation_search(osc.x, osc.p, opts=search.SaturationOptions(seed=seed, edge_levels=2))
    m = extract_moments(osc.x, osc.p, res.best_state)
    excess = m.a * m.b - 0.25
    eq2 = search.eq2_residual(osc.x, osc.p, res.best_state)
    r = res.details["residual"]
    ok = r <= 1e-6 and abs(excess) <= 1e-6 and eq2 <= 1e-6
    return Check("A9 saturation search for (x, p), N = 32", ok,
                 f"residual = {_g(r)}, VarX VarP - 1/4 = {_g(excess)}, eq2 = {_g(eq2)}")


def acc_covariance(seed=0, count=1000):
    rng = np.random.default_rng(seed + 4)
    w_shift = w_scale = 0.0
    for _ in range(count):
        A, B, psi = random_instance(rng)
        m = extract_moments(A, B, psi)
        s, t = rng.uniform(-5, 5, 2)
        ms = extract_moments(A.shifted(s), B.shifted(t), psi)
        for name in ("a", "b", "c", "f", "e", "d"):
            w_shift = max(w_shift, abs(getattr(ms, name) - getattr(m, name)) / m.scale)
        lam, mu = rng.uniform(0.2, 5, 2) * rng.choice([-1, 1], 2)
        ml = extract_moments(lam * A, mu * B, psi)
        for fn in (bounds.robertson, bounds.refined):
            b0, b1 = fn(m), fn(ml)
            mag = (lam * mu) ** 2 * max(abs(b0.lhs), abs(b0.rhs))
            w_scale = max(w_scale, abs(b1.margin - (lam * mu) ** 2 * b0.margin) / mag)
    ok = w_shift <= 1e-10 and w_scale <= 1e-10
    return Check(f"A10 shift invariance and lambda^2 mu^2 margin scaling, {count} instances", ok,
                 f"shift rel = {_g(w_shift)}, scaling rel = {_g(w_scale)}")


def acc_determinism(seed=0):
    from .runs import SearchSpec, SweepSpec, run_search, sweep_csv

    search_doc = SearchSpec.from_dict({"kind": "violation", "family": {"id": "spin_bloch"},
                                       "inequality": "triple", "resolution": 32})
    sweep_doc = SweepSpec.from_dict({
        "scenario": {"model": "spin", "params": {"j": 0.5}, "pair": ["l_x", "l_y"],
                     "state": {"kind": "bloch", "theta": 0.0, "phi": 0.0}, "evaluate": ["triple"]},
        "sweep": {"param": "state.theta", "start": 0.0, "stop": math.pi, "step": math.pi / 64},
    })
    outs = []
    for _ in range(2):
        outs.append((json.dumps(run_search(search_doc, seed), indent=2), sweep_csv(sweep_doc)))
    ok = outs[0] == outs[1]
    return Check("A11 search and sweep outputs identical across runs", ok,
                 "identical" if ok else "outputs differ")


ACCEPTANCE = (
    acc_ground_state,
    acc_spin_up,
    acc_proven_bounds,
    acc_product_positivity,
    acc_expansion,
    acc_sector,
    acc_violation,
    acc_moving_coherent,
    acc_saturation,
    acc_covariance,
    acc_determinism,
)


# ---- invariants -------------------------------------------------------------

def inv_operator_core(seed=0, count=200):
    rng = np.random.default_rng(seed + 10)
    w = w_phase = 0.0
    ok = True
    for _ in range(count):
        A, B, psi = random_instance(rng)
        c1 = operators.commutator_c(A, B).mat
        c2 = operators.commutator_c(B, A).mat
        ok &= bool(np.array_equal(c1, -c2))
        d = operators.deviation(A, psi).mat
        v2 = operators.expectation(d @ d, psi)
        w = max(w, abs(operators.variance(A, psi) - v2) / max(1.0, operators.max_norm(A.mat) ** 2))
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        rotated = operators.make_state(psi.amplitudes * phase)
        w_phase = max(w_phase, abs(operators.expectation(A, rotated) - operators.expectation(A, psi))
                      / max(1.0, operators.max_norm(A.mat)))
        # integer entries: float products are not associative bit-for-bit
        P, Q, R = (rng.integers(-9, 10, (2, 2)).astype(complex) for _ in range(3))
        ok &= bool(np.array_equal(operators.kron(operators.kron(P, Q), R),
                                  operators.kron(P, operators.kron(Q, R))))
    ok &= w <= 1e-12 and w_phase <= 1e-14
    return Check("I1 operator core: antisymmetry, variance, phase, kron associativity", ok,
                 f"variance err = {_g(w)}, phase err = {_g(w_phase)}")


def inv_moment_consistency(seed=0, count=200):
    rng = np.random.default_rng(seed + 11)
    w = 0.0
    for _ in range(count):
        A, B, psi = random_instance(rng)
        m = extract_moments(A, B, psi)
        C = operators.commutator_c(A, B)
        e_raw = operators.expectation(operators.commutator_c(B, C), psi)
        d_raw = operators.expectation(operators.commutator_c(A, C), psi)
        w = max(w, abs(m.e - e_raw) / m.scale, abs(m.d - d_raw) / m.scale)
    return Check("I2 third-order moments: deviation form equals raw commutator form", w <= 1e-12,
                 f"max rel = {_g(w)}")


def inv_scale_covariance(seed=0, count=200):
    rng = np.random.default_rng(seed + 12)
    w = 0.0
    for _ in range(count):
        A, B, psi = random_instance(rng)
        lam, mu = rng.uniform(-3, 3, 2)
        m = extract_moments(A, B, psi)
        ml = extract_moments(lam * A, mu * B, psi)
        want = {"a": lam**2 * m.a, "b": mu**2 * m.b, "c": lam * mu * m.c,
                "f": lam**2 * mu**2 * m.f, "e": lam * mu**2 * m.e, "d": lam**2 * mu * m.d}
        for k, v in want.items():
            w = max(w, abs(getattr(ml, k) - v) / max(ml.scale, 1e-300))
    return Check("I3 moment scale covariance", w <= 1e-10, f"max rel = {_g(w)}")


def inv_bound_algebra(seed=0, count=500):
    rng = np.random.default_rng(seed + 13)
    w_tri = 0.0
    ok = True
    for _ in range(count):
        A, B, psi = random_instance(rng)
        m = extract_moments(A, B, psi)
        ref = bounds.refined(m)
        w_tri = max(w_tri, abs(ref.margin * m.f - bounds.triple_margin(m)) / m.scale**3)
        # AM-GM step holds unconditionally
        ok &= m.a * m.e**2 + m.b * m.d**2 >= 2 * math.sqrt(m.a * m.b) * abs(m.d * m.e) - 1e-12 * m.scale**3
        if bounds.triple_margin(m) >= 0:
            root = bounds.root_form(m)
            ok &= root.lhs >= root.rhs - 1e-10 * m.scale
        m0 = type(m)(a=m.a, b=m.b, c=m.c, f=m.f, e=0.0, d=0.0)
        ok &= bounds.refined(m0).rhs == bounds.robertson(m0).rhs
    ok &= w_tri <= 1e-11
    return Check("I4 bound algebra: triple consistency, reduction, AM-GM, root implication", ok,
                 f"triple consistency = {_g(w_tri)}")


def inv_averaging_identity(seed=0, count=200):
    rng = np.random.default_rng(seed + 14)
    w = 0.0
    for _ in range(count):
        A, B, psi = random_instance(rng)
        g = tuple(rng.standard_normal(3))
        chi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        chi /= np.linalg.norm(chi)
        F = gram.build_f(A, B, psi, g).mat
        v = np.kron(psi.amplitudes, chi)
        lhs = float(np.vdot(F @ v, F @ v).real)
        m = extract_moments(A, B, psi)
        rhs = float(np.vdot(chi, gram.spin_matrix_n(m, g) @ chi).real)
        w = max(w, abs(lhs - rhs) / (m.scale * sum(x * x for x in g)))
        # lower-bound consistency of the saturation objective
        lam = gram.spin_matrix_n_min_eig(m, g)
        w = max(w, max(0.0, lam - rhs) / (m.scale * sum(x * x for x in g)))
    return Check("I5 averaging identity <psi chi|F^2|psi chi> = chi^H N chi", w <= 1e-11, f"max rel = {_g(w)}")


def inv_models(seed=0):
    ok = True
    w = 0.0
    for hbar in (1.0, 2.0):
        osc = models.oscillator(48, hbar)
        psi, metric = models.coherent_state(osc, 0.7 + 0.4j)
        m = extract_moments(osc.e_kin, osc.x, psi)
        p = operators.expectation(osc.p, psi)
        ek = operators.expectation(osc.e_kin, psi)
        for got, want in ((m.c, hbar * p), (m.f, 2 * hbar**2 * ek), (m.e, -(hbar**2)), (m.d, 0.0)):
            w = max(w, abs(got - want))
        ok &= metric.top_weight <= 1e-10
    for j in (0.5, 1.0, 1.5, 2.0, 3.5):
        sp = models.spin(j)
        psi = models.bloch_state(sp, 0.9, 0.4)
        m = extract_moments(sp.l_x, sp.l_y, psi)
        ex = [operators.expectation(o, psi) for o in (sp.l_x, sp.l_y, sp.l_z)]
        lz2 = operators.expectation(sp.l_z.mat @ sp.l_z.mat, psi)
        for got, want in ((m.c, -ex[2]), (m.e, ex[0]), (m.d, -ex[1]), (m.f, lz2)):
            w = max(w, abs(got - want))
        casimir = sum(o.mat @ o.mat for o in (sp.l_x, sp.l_y, sp.l_z))
        w = max(w, operators.max_norm(casimir - j * (j + 1) * np.eye(sp.dim)))
    ok &= w <= 1e-8
    return Check("I6 model identities: canonical moments, spin algebra, Casimir", ok, f"max err = {_g(w)}")


def inv_schema_roundtrip(seed=0):
    from .runs import ScenarioSpec

    docs = [
        {"model": "oscillator", "params": {"n_trunc": 16, "hbar": 1.0}, "pair": ["e_kin", "x"],
         "state": {"kind": "fock", "k": 0}},
        {"model": "oscillator", "params": {"n_trunc": 40}, "pair": ["x", "p"],
         "state": {"kind": "coherent", "re": 0.5, "im": -0.25}, "evaluate": ["robertson", "refined"]},
        {"model": "spin", "params": {"j": 1.5}, "pair": ["l_x", "l_y"],
         "state": {"kind": "bloch", "theta": 0.3, "phi": 1.1}, "tolerances": {"saturation": 1e-8}},
    ]
    ok = True
    for doc in docs:
        once = ScenarioSpec.from_dict(doc)
        twice = ScenarioSpec.from_dict(json.loads(json.dumps(once.to_dict())))
        ok &= once == twice and once.to_dict() == twice.to_dict()
    return Check("I7 scenario schema round trip", ok, f"{len(docs)} documents")


INVARIANTS = (
    inv_operator_core,
    inv_moment_consistency,
    inv_scale_covariance,
    inv_bound_algebra,
    inv_averaging_identity,
    inv_models,
    inv_schema_roundtrip,
)


def run_selftest(seed=0):
    results = []
    for fn in INVARIANTS + ACCEPTANCE:
        try:
            results.append(fn(seed))
        except Exception as exc:  # a crashing check is a failing check
            results.append(Check(fn.__name__, False, f"{type(exc).__name__}: {exc}"))
    return results


def format_table(results):
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  result  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
