"""Pauli-extended operator F and the moment matrices built from it.

The doubled Hilbert space is ordered system-major: index ``2*i + s`` holds
spin component ``s`` (0 = up, 1 = down) of system basis vector ``i``. The same
convention orders the 6x6 moment matrix, whose three 2x2 slots are (A, B, C).
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import InputError
from .operators import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    HermitianOperator,
    _check_dims,
    _frozen,
    commutator_c,
    deviation,
    kron,
    max_norm,
)
from .moments import MomentSet

# slot-major positions (slot, spin) in the 6x6 matrix
SECTOR_PLUS = (0, 2, 5)   # A-up, B-up, C-down
SECTOR_MINUS = (1, 3, 4)  # A-down, B-down, C-up


@dataclass(frozen=True)
class GammaVector:
    g1: float
    g2: float
    g3: float

    def __post_init__(self):
        for name in ("g1", "g2", "g3"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InputError("gamma components must be finite reals")
            object.__setattr__(self, name, value)
        if self.g1 == 0 and self.g2 == 0 and self.g3 == 0:
            raise InputError("gamma vector must not be zero")

    @classmethod
    def from_angles(cls, theta, phi):
        """Unit vector with polar angle ``theta`` and azimuth ``phi``."""
        st = math.sin(theta)
        return cls(st * math.cos(phi), st * math.sin(phi), math.cos(theta))

    def as_tuple(self):
        return (self.g1, self.g2, self.g3)

    def normalized(self):
        n = math.sqrt(self.g1**2 + self.g2**2 + self.g3**2)
        return GammaVector(self.g1 / n, self.g2 / n, self.g3 / n)


def _as_gamma(gamma):
    if isinstance(gamma, GammaVector):
        return gamma
    return GammaVector(*gamma)


def build_f(A, B, psi, gamma):
    """F = g1 dA (x) sx + g2 dB (x) sy + g3 C (x) sz on the doubled space."""
    _check_dims(A, B, psi)
    g = _as_gamma(gamma)
    dA = deviation(A, psi).mat
    dB = deviation(B, psi).mat
    C = commutator_c(A, B).mat
    f = g.g1 * kron(dA, SIGMA_X) + g.g2 * kron(dB, SIGMA_Y) + g.g3 * kron(C, SIGMA_Z)
    return HermitianOperator(_frozen((f + f.conj().T) / 2))


def expansion_rhs(A, B, psi, gamma):
    """The expanded form of F^2 written with C, C2 and C3."""
    g = _as_gamma(gamma)
    dA = deviation(A, psi)
    dB = deviation(B, psi)
    C = commutator_c(A, B)
    C2 = commutator_c(dB, C).mat
    C3 = commutator_c(dA, C).mat
    dA, dB, C = dA.mat, dB.mat, C.mat
    diag = g.g1**2 * dA @ dA + g.g2**2 * dB @ dB + g.g3**2 * C @ C
    return (
        kron(diag, IDENTITY_2)
        + g.g1 * g.g2 * kron(C, SIGMA_Z)
        + g.g2 * g.g3 * kron(C2, SIGMA_X)
        - g.g1 * g.g3 * kron(C3, SIGMA_Y)
    )


def expansion_check(A, B, psi, gamma):
    """Max-norm difference between F @ F and its commutator expansion."""
    F = build_f(A, B, psi, gamma).mat
    return max_norm(F @ F - expansion_rhs(A, B, psi, gamma))


def spin_matrix_n(m, gamma):
    """State average of F^2 as a 2x2 matrix on the auxiliary spin."""
    g = _as_gamma(gamma)
    q = g.g1**2 * m.a + g.g2**2 * m.b + g.g3**2 * m.f
    return (
        q * IDENTITY_2
        + g.g1 * g.g2 * m.c * SIGMA_Z
        + g.g2 * g.g3 * m.e * SIGMA_X
        - g.g1 * g.g3 * m.d * SIGMA_Y
    )


def spin_matrix_n_min_eig(m, gamma):
    """Closed form: q - sqrt(g1^2 g2^2 c^2 + g2^2 g3^2 e^2 + g1^2 g3^2 d^2)."""
    g = _as_gamma(gamma)
    q = g.g1**2 * m.a + g.g2**2 * m.b + g.g3**2 * m.f
    r = math.sqrt((g.g1 * g.g2 * m.c) ** 2 + (g.g2 * g.g3 * m.e) ** 2 + (g.g1 * g.g3 * m.d) ** 2)
    return q - r


@dataclass(frozen=True, eq=False)
class GramAssembly:
    m6: np.ndarray
    sector_plus: np.ndarray
    sector_minus: np.ndarray
    m2: np.ndarray
    det_m6: float
    det_m2: float
    det_plus: float
    det_minus: float
    scale: float


def _real_det(mat):
    return float(np.linalg.det(mat).real)


def m6_matrix(m):
    a1, b1, f1 = m.a * IDENTITY_2, m.b * IDENTITY_2, m.f * IDENTITY_2
    ac = m.c / 2 * SIGMA_Z
    ad = -m.d / 2 * SIGMA_Y
    be = m.e / 2 * SIGMA_X
    return np.block([[a1, ac, ad], [ac, b1, be], [ad, be, f1]])


def m2_matrix(m):
    return np.array(
        [
            [m.a, -m.c / 2, -0.5j * m.d],
            [-m.c / 2, m.b, m.e / 2],
            [0.5j * m.d, m.e / 2, m.f],
        ],
        dtype=complex,
    )


def assemble_m6(m):
    m6 = m6_matrix(m)
    plus = m6[np.ix_(SECTOR_PLUS, SECTOR_PLUS)]
    minus = m6[np.ix_(SECTOR_MINUS, SECTOR_MINUS)]
    m2 = m2_matrix(m)
    return GramAssembly(
        m6=_frozen(m6),
        sector_plus=_frozen(plus),
        sector_minus=_frozen(minus),
        m2=_frozen(m2),
        det_m6=_real_det(m6),
        det_m2=_real_det(m2),
        det_plus=_real_det(plus),
        det_minus=_real_det(minus),
        scale=m.scale,
    )


def det_m2_closed_form(m):
    return m.a * m.b * m.f - m.a * m.e**2 / 4 - m.c**2 * m.f / 4 - m.b * m.d**2 / 4


def minor_report(ga):
    """Second-order principal minors (each a proven bound) and det of M2.

    The sign of ``det_m2`` is not asserted anywhere; it is the quantity whose
    non-negativity the refined inequality presumes.
    """
    m6 = ga.m6
    a, b, f = m6[0, 0].real, m6[2, 2].real, m6[4, 4].real
    c_half = m6[0, 2].real
    d_half = abs(m6[0, 5])
    e_half = m6[2, 5].real
    return [
        ("robertson_minor", a * b - c_half**2),
        ("aux_a_minor", a * f - d_half**2),
        ("aux_b_minor", b * f - e_half**2),
        ("det_m2", ga.det_m2),
    ]
