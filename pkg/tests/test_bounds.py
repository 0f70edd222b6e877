import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from uncbench import (
    STATUS,
    DegenerateCommutator,
    MomentSet,
    NonpositiveEnergy,
    OscillatorMoments,
    ReportOptions,
    ZeroMomentum,
    aux_bounds,
    effective_time_bound,
    extract_moments,
    full_report,
    kinetic_position_bound,
    oscillator,
    refined,
    robertson,
    root_form,
    scenario,
    triple_margin,
)
from uncbench.bounds import kinetic_mapping, triple
from uncbench.models import coherent_state

from conftest import instance_from_seed

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def bloch_moments_oracle(theta):
    """Moments of (sx/2, sy/2) in (cos t/2, sin t/2), by explicit 2x2 arithmetic."""
    v = np.array([math.cos(theta / 2), math.sin(theta / 2)], dtype=complex)
    ev = lambda M: float((v.conj() @ M @ v).real)
    lx, ly = SX / 2, SY / 2
    C = 1j * (lx @ ly - ly @ lx)
    C2 = 1j * (ly @ C - C @ ly)
    C3 = 1j * (lx @ C - C @ lx)
    return MomentSet(a=ev(lx @ lx) - ev(lx) ** 2, b=ev(ly @ ly) - ev(ly) ** 2, c=ev(C),
                     f=ev(C @ C), e=ev(C2), d=ev(C3))


def coherent_kinetic_oracle(p0, hbar=1.0):
    """Gaussian moments for a coherent state with <p> = p0, sigma^2 = hbar/2."""
    s2 = hbar / 2
    p2 = p0**2 + s2
    p4 = p0**4 + 6 * p0**2 * s2 + 3 * s2**2
    return OscillatorMoments(var_e=(p4 - p2**2) / 4, var_x=s2, mean_p=p0, mean_e=p2 / 2, var_p=s2)


QUARTER = 1 / math.sqrt(2)


def test_status_table_is_fixed():
    assert {k for k, v in STATUS.items() if v == "proven"} == {"robertson", "aux_a", "aux_b"}
    assert all(STATUS[k] == "conjectured" for k in (
        "refined", "triple", "root", "kinetic_position",
        "effective_time_printed", "effective_time_derived"))


def test_robertson_coherent_canonical_pair():
    osc = oscillator(32)
    psi, _ = coherent_state(osc, 0.3 - 0.5j)
    bv = robertson(extract_moments(osc.x, osc.p, psi))
    assert bv.lhs == pytest.approx(0.25, abs=1e-12)
    assert bv.rhs == pytest.approx(0.25, abs=1e-12)
    assert bv.saturated and bv.status == "proven"


def test_robertson_spin_up_and_zero_commutator():
    bv = robertson(bloch_moments_oracle(0.0))
    assert bv.lhs == pytest.approx(1 / 16) and bv.rhs == pytest.approx(1 / 16) and bv.saturated
    bv = robertson(MomentSet(a=2, b=3, c=0, f=0, e=0, d=0))
    assert bv.rhs == 0 and bv.margin == 6


def test_aux_bounds_examples():
    m = MomentSet(a=0.125, b=0.5, c=0, f=0.5, e=-1, d=0)
    aux_a, aux_b = aux_bounds(m)
    assert aux_b.lhs == 0.25 and aux_b.rhs == 0.25 and aux_b.saturated
    assert aux_a.rhs == 0
    _, aux_b = aux_bounds(bloch_moments_oracle(math.pi / 4))
    assert aux_b.lhs == pytest.approx(1 / 16) and aux_b.rhs == pytest.approx(1 / 32)
    assert aux_b.margin == pytest.approx(1 / 32)


def test_refined_ground_state_saturates():
    bv = refined(MomentSet(a=0.125, b=0.5, c=0, f=0.5, e=-1, d=0))
    assert bv.lhs == bv.rhs == 1 / 16
    assert bv.saturated and bv.status == "conjectured"


def test_refined_reduces_to_robertson():
    m = MomentSet(a=0.3, b=0.7, c=0.4, f=0.5, e=0, d=0)
    assert refined(m).rhs == robertson(m).rhs


def test_refined_negative_margin_on_bloch_state():
    m = bloch_moments_oracle(math.pi / 4)
    bv = refined(m)
    assert bv.lhs == pytest.approx(1 / 32, abs=1e-15)
    assert bv.rhs == pytest.approx(3 / 64, abs=1e-15)
    assert bv.margin == pytest.approx(-1 / 64, abs=1e-15)


def test_refined_degenerate_fallback():
    notes = []
    bv = refined(MomentSet(a=1, b=1, c=0, f=0, e=0, d=0), notes=notes)
    assert bv.rhs == 0 and notes


def test_triple_margin_examples():
    assert triple_margin(bloch_moments_oracle(0.0)) == pytest.approx(0, abs=1e-15)
    assert triple_margin(bloch_moments_oracle(math.pi / 4)) == pytest.approx(-1 / 256, abs=1e-15)
    assert triple_margin(MomentSet(a=1, b=1, c=0, f=1, e=0, d=0)) == 1


def test_triple_margin_grid_oracle():
    thetas = np.linspace(0, math.pi, 257)
    vals = [triple_margin(bloch_moments_oracle(t)) for t in thetas]
    closed = -np.cos(thetas) ** 2 * np.sin(thetas) ** 2 / 64
    assert np.allclose(vals, closed, atol=1e-15)
    assert min(vals) == pytest.approx(-1 / 256, abs=1e-15)
    assert vals[64] == pytest.approx(-1 / 256, abs=1e-15)  # theta = pi/4


def test_root_form_examples():
    assert root_form(MomentSet(a=1, b=2, c=0.6, f=1, e=0.3, d=0)).rhs == pytest.approx(0.3)
    assert root_form(MomentSet(a=0.625, b=0.5, c=1, f=1.5, e=-1, d=0)).rhs == pytest.approx(0.5)
    assert root_form(MomentSet(a=1, b=1, c=0, f=1, e=0.5, d=0)).rhs == 0
    with pytest.raises(DegenerateCommutator):
        root_form(MomentSet(a=1, b=1, c=0, f=0, e=0, d=0))


def test_kinetic_position_ground_state():
    bv = kinetic_position_bound(coherent_kinetic_oracle(0.0), 1.0)
    assert bv.lhs == pytest.approx(1 / 16) and bv.rhs == pytest.approx(1 / 16) and bv.saturated


def test_kinetic_position_moving_coherent():
    osc_m = coherent_kinetic_oracle(1.0)
    assert osc_m.var_e == pytest.approx(0.625)
    bv = kinetic_position_bound(osc_m, 1.0)
    assert bv.lhs == pytest.approx(0.3125)
    assert bv.rhs == pytest.approx(0.25 + 0.125 * 0.625 / 0.75)
    assert bv.margin == pytest.approx(-1 / 24, abs=1e-12)


@pytest.mark.parametrize("p0", [0.0, 0.4, 1.0, 2.5])
def test_kinetic_position_matches_refined_mapping(p0):
    osc_m = coherent_kinetic_oracle(p0)
    kp = kinetic_position_bound(osc_m, 1.0)
    m = kinetic_mapping(osc_m, 1.0)
    ref = refined(m)
    assert abs(kp.rhs - ref.rhs) <= 1e-12 * m.scale
    assert abs(kp.lhs - ref.lhs) <= 1e-12 * m.scale
    # closed form of the margin along the coherent family
    assert kp.margin == pytest.approx(-(p0**2) / (p0**2 + 0.5) / 16, abs=1e-14)


def test_kinetic_position_nonpositive_energy():
    with pytest.raises(NonpositiveEnergy):
        kinetic_position_bound(OscillatorMoments(0, 1, 0, 0, 0), 1.0)


def test_effective_time_modes():
    osc_m = coherent_kinetic_oracle(1.0)
    printed, derived = effective_time_bound(osc_m, 1.0)
    assert derived.lhs == pytest.approx(0.3125)
    assert derived.rhs == pytest.approx(0.25 + 0.125 * 0.625 / 0.75)
    assert printed.rhs == pytest.approx(0.5625)
    assert effective_time_bound(osc_m, 1.0, "as_printed") == printed
    quiet = OscillatorMoments(var_e=0.0, var_x=0.5, mean_p=2.0, mean_e=1.0, var_p=0.5)
    p, d = effective_time_bound(quiet, 1.0)
    assert p.rhs == d.rhs == 0.25
    with pytest.raises(ZeroMomentum):
        effective_time_bound(coherent_kinetic_oracle(0.0), 1.0)


def test_full_report_ground_state():
    sc = scenario({"model": "oscillator", "params": {"n_trunc": 16}, "pair": ["e_kin", "x"],
                   "state": {"kind": "fock", "k": 0}})
    rep = full_report(sc.A, sc.B, sc.psi, ReportOptions(oscillator=sc.metadata["oscillator_moments"]))
    assert rep.get("robertson").margin == pytest.approx(1 / 16)
    assert rep.get("refined").saturated
    assert rep.get("kinetic_position").saturated
    # effective-time bounds need <p> != 0
    assert "effective_time_printed" not in rep.ids()
    assert len(rep.ids()) == len(set(rep.ids()))


def test_full_report_spin_up():
    sc = scenario({"model": "spin", "params": {"j": 0.5}, "pair": ["l_x", "l_y"],
                   "state": {"kind": "bloch", "theta": 0.0}})
    rep = full_report(sc.A, sc.B, sc.psi)
    assert rep.get("robertson").saturated and rep.get("triple").saturated
    assert rep.get("triple").lhs == pytest.approx(1 / 64)


def test_full_report_identical_pair(instance):
    A, _, psi = instance
    rep = full_report(A, A, psi)
    a = rep.moments.a
    for bv in rep.bounds:
        assert bv.rhs == 0
    assert rep.get("robertson").margin == pytest.approx(a * a)
    assert rep.get("refined").margin == pytest.approx(a * a)
    assert any("falls back" in n for n in rep.notes)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_proven_bounds_hold(seed):
    A, B, psi = instance_from_seed(seed)
    m = extract_moments(A, B, psi)
    for bv in (robertson(m), *aux_bounds(m)):
        assert bv.margin >= -1e-9 * max(abs(bv.lhs), abs(bv.rhs))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_refined_times_f_is_triple(seed):
    A, B, psi = instance_from_seed(seed)
    m = extract_moments(A, B, psi)
    assert abs(refined(m).margin * m.f - triple_margin(m)) <= 1e-11 * m.scale**3


moment_sets = st.builds(
    lambda a, b, f, cr, e, d: MomentSet(a=a, b=b, c=cr * math.sqrt(f), f=f, e=e, d=d),
    st.floats(0, 10), st.floats(0, 10), st.floats(1e-3, 10),
    st.floats(-1, 1), st.floats(-10, 10), st.floats(-10, 10),
)


@settings(max_examples=300, deadline=None)
@given(moment_sets)
def test_am_gm_step(m):
    assert m.a * m.e**2 + m.b * m.d**2 >= 2 * math.sqrt(m.a * m.b) * abs(m.d * m.e) - 1e-12 * m.scale**3


@settings(max_examples=300, deadline=None)
@given(moment_sets)
def test_root_form_follows_from_triple(m):
    # realizable moment sets obey the proven bounds; without them a*b = 0, c = 0
    # admits the trivial root sqrt(ab) = 0 of the quadratic
    assume(m.a * m.b >= m.c**2 / 4 and m.f * m.a >= m.d**2 / 4 and m.f * m.b >= m.e**2 / 4)
    assume(triple_margin(m) >= 0)
    bv = root_form(m)
    assert bv.lhs >= bv.rhs - 1e-10 * m.scale


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 5), st.floats(0.1, 5), st.booleans())
def test_margin_scale_covariance(seed, lam, mu, flip):
    A, B, psi = instance_from_seed(seed)
    if flip:
        lam = -lam
    m = extract_moments(A, B, psi)
    ml = extract_moments(lam * A, mu * B, psi)
    k = (lam * mu) ** 2
    for fn in (robertson, refined):
        b0, b1 = fn(m), fn(ml)
        assert abs(b1.margin - k * b0.margin) <= 1e-10 * k * max(abs(b0.lhs), abs(b0.rhs))


def test_triple_bound_value():
    bv = triple(bloch_moments_oracle(math.pi / 4))
    assert bv.margin == pytest.approx(-1 / 256) and bv.status == "conjectured"
