"""Dense Hermitian operators and pure states on finite Hilbert spaces.

Operators and states are immutable: their arrays are stored read-only, so the
same object can be shared freely between callers and threads.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import config
from .errors import ConvergenceFailure, DimMismatch, InputError, NonHermitian, NotNormalized

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY_2):
    _m.flags.writeable = False


def _frozen(arr):
    arr = np.array(arr, dtype=complex, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Self-adjoint matrix with a free-text unit tag.

    Build instances through :func:`make_hermitian`; the constructor itself
    does not validate.
    """

    mat: np.ndarray
    unit: str = ""

    @property
    def dim(self):
        return self.mat.shape[0]

    def __add__(self, other):
        if isinstance(other, HermitianOperator):
            _check_dims(self, other)
            return HermitianOperator(_frozen(self.mat + other.mat), self.unit)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, HermitianOperator):
            _check_dims(self, other)
            return HermitianOperator(_frozen(self.mat - other.mat), self.unit)
        return NotImplemented

    def __neg__(self):
        return HermitianOperator(_frozen(-self.mat), self.unit)

    def __mul__(self, scalar):
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise InputError("Hermitian operators can only be scaled by real numbers")
        return HermitianOperator(_frozen(float(np.real(scalar)) * self.mat), self.unit)

    __rmul__ = __mul__

    def shifted(self, s):
        """Return ``self + s * identity``."""
        return HermitianOperator(_frozen(self.mat + float(s) * np.eye(self.dim)), self.unit)

    def squared(self):
        return make_hermitian(self.mat @ self.mat, unit=f"({self.unit})^2" if self.unit else "")

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim}, unit={self.unit!r})"


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Unit-norm pure state; build with :func:`make_state`."""

    amplitudes: np.ndarray

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def __repr__(self):
        return f"QuantumState(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Spinor:
    """Two-component unit vector for the auxiliary Pauli space."""

    amplitudes: np.ndarray = field(default_factory=lambda: _frozen([1.0, 0.0]))

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2,):
            raise InputError("spinor must have exactly two components")
        _check_norm(amps)
        object.__setattr__(self, "amplitudes", _frozen(amps))


def _check_norm(amps):
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > config.tol("norm"):
        raise NotNormalized(f"state norm is {norm!r}, expected 1")


def _as_array(op):
    if isinstance(op, HermitianOperator):
        return op.mat
    return np.asarray(op)


def _check_dims(*objs):
    dims = {o.dim if hasattr(o, "dim") else np.asarray(o).shape[0] for o in objs}
    if len(dims) != 1:
        raise DimMismatch(f"incompatible dimensions {sorted(dims)}")


def max_norm(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def make_hermitian(entries, unit="", tol=None):
    """Validate ``entries`` as a Hermitian matrix and return it symmetrized.

    Raises NonHermitian when the defect ``max|M - M^H|`` exceeds
    ``tol * max(1, max|M|)``.
    """
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InputError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    if tol is None:
        tol = config.tol("hermitian")
    defect = max_norm(m - m.conj().T)
    if defect > tol * max(1.0, max_norm(m)):
        raise NonHermitian(f"Hermiticity defect {defect:.3e} exceeds tolerance")
    return HermitianOperator(_frozen((m + m.conj().T) / 2), unit)


def make_state(amplitudes, normalize=False):
    """Wrap an amplitude vector. With ``normalize=True`` the vector is rescaled first."""
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size < 1:
        raise InputError("state must have at least one amplitude")
    if normalize:
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InputError("cannot normalize the zero vector")
        v = v / norm
    _check_norm(v)
    return QuantumState(_frozen(v))


def identity(dim):
    return HermitianOperator(_frozen(np.eye(dim)))


def commutator_c(A, B):
    """``i [A, B]``, which is Hermitian whenever A and B are."""
    _check_dims(A, B)
    a, b = _as_array(A), _as_array(B)
    c = 1j * (a @ b - b @ a)
    # exact symmetrization keeps antisymmetry in A <-> B bitwise
    return HermitianOperator(_frozen((c + c.conj().T) / 2))


def expectation(O, psi):
    """Real expectation value <psi|O|psi>."""
    _check_dims(O, psi)
    o = _as_array(O)
    v = psi.amplitudes
    val = np.vdot(v, o @ v)
    scale = max(1.0, max_norm(o))
    if abs(val.imag) > 1e-12 * scale * o.shape[0]:
        raise NonHermitian(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def variance(O, psi, clamp=None):
    """<O^2> - <O>^2, computed as the norm of the deviation vector."""
    _check_dims(O, psi)
    o = _as_array(O)
    v = psi.amplitudes
    w = o @ v
    mean = float(np.vdot(v, w).real)
    # ||(O - <O>) psi||^2 avoids the cancellation in <O^2> - <O>^2
    dev = w - mean * v
    val = float(np.vdot(dev, dev).real)
    if clamp is None:
        clamp = config.tol("clamp")
    if -clamp <= val < 0:
        val = 0.0
    return val


def deviation(O, psi):
    """``O - <O> * identity``."""
    mean = expectation(O, psi)
    o = _as_array(O)
    unit = O.unit if isinstance(O, HermitianOperator) else ""
    return HermitianOperator(_frozen(o - mean * np.eye(o.shape[0])), unit)


def kron(P, Q):
    """Tensor product with block (i, j) equal to ``P[i, j] * Q``.

    Returns a HermitianOperator when both factors are, otherwise a plain array.
    """
    out = np.kron(_as_array(P), _as_array(Q))
    if isinstance(P, HermitianOperator) and isinstance(Q, HermitianOperator):
        return HermitianOperator(_frozen(out))
    return out


def min_eig(H):
    """Smallest eigenvalue via a full Hermitian decomposition."""
    return float(min_eigpair(H)[0])


def min_eigpair(H):
    h = _as_array(H)
    try:
        w, v = scipy.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    return float(w[0]), v[:, 0]
