"""Scalar moments of an operator pair in a pure state."""
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InputError
from .operators import _check_dims, commutator_c, deviation, expectation, variance

FIELDS = ("a", "b", "c", "f", "e", "d")


@dataclass(frozen=True)
class MomentSet:
    """The six moments entering the inequalities plus diagnostics.

    a, b   variances of A and B
    c, f   <C> and <C^2> with C = i[A, B]
    e, d   <C2> and <C3> with C2 = i[dB, C], C3 = i[dA, C]
    var_c  variance of C
    s_ab, s_ac, s_bc  symmetrized covariances 1/2 <{dX, dY}>
    """

    a: float
    b: float
    c: float
    f: float
    e: float
    d: float
    var_c: float = float("nan")
    s_ab: float = float("nan")
    s_ac: float = float("nan")
    s_bc: float = float("nan")

    def __post_init__(self):
        for name in FIELDS:
            value = getattr(self, name)
            if not np.isfinite(value):
                raise InputError(f"moment {name} is not finite")
            object.__setattr__(self, name, float(value))
        tol = 1e-10 * self.scale
        if self.a < 0 or self.b < 0 or self.f < 0:
            raise InputError("variances and <C^2> must be non-negative")
        if self.f < self.c**2 - tol:
            raise InputError("<C^2> must be at least <C>^2")
        if np.isnan(self.var_c):
            object.__setattr__(self, "var_c", max(self.f - self.c**2, 0.0))

    @property
    def scale(self):
        return max(abs(getattr(self, name)) for name in FIELDS)

    def as_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**{k: float(v) for k, v in data.items()})


def extract_moments(A, B, psi):
    _check_dims(A, B, psi)
    v = psi.amplitudes
    dA = deviation(A, psi)
    dB = deviation(B, psi)
    C = commutator_c(A, B)
    # third-order commutators built from the deviation operators
    C2 = commutator_c(dB, C)
    C3 = commutator_c(dA, C)

    dav, dbv = dA.mat @ v, dB.mat @ v
    cv = C.mat @ v
    dcv = cv - expectation(C, psi) * v
    return MomentSet(
        a=variance(A, psi),
        b=variance(B, psi),
        c=expectation(C, psi),
        f=float(np.vdot(cv, cv).real),
        e=expectation(C2, psi),
        d=expectation(C3, psi),
        var_c=variance(C, psi),
        s_ab=float(np.vdot(dav, dbv).real),
        s_ac=float(np.vdot(dav, dcv).real),
        s_bc=float(np.vdot(dbv, dcv).real),
    )
