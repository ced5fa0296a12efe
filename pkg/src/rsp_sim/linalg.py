"""Dense complex vector/matrix kernel.

Vectors are 1-D ``complex128`` arrays and matrices are 2-D ``complex128``
arrays. Everything returned from this module is marked read-only so values can
be shared freely between callers.
"""
from __future__ import annotations

import numpy as np

from .errors import CapacityError, ShapeError, ValidationError

# Upper bound on the number of entries in any dense object we build.
MAX_ENTRIES = 1 << 26

ALGEBRAIC_TOL = 1e-12
PHYSICAL_TOL = 1e-10

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
for _m in (SIGMA_I, SIGMA_X, SIGMA_Z, HADAMARD):
    _m.flags.writeable = False


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _check_capacity(n_entries: int, max_entries: int | None) -> None:
    cap = MAX_ENTRIES if max_entries is None else max_entries
    if n_entries > cap:
        raise CapacityError(f"{n_entries} entries exceeds the cap of {cap}")


def as_vector(values, max_entries: int | None = None) -> np.ndarray:
    """Validate ``values`` as a finite, non-empty complex vector."""
    v = np.array(values, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ShapeError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    _check_capacity(v.size, max_entries)
    if not np.all(np.isfinite(v)):
        raise ValidationError("vector has non-finite entries")
    return _frozen(v)


def as_matrix(values, max_entries: int | None = None) -> np.ndarray:
    """Validate ``values`` as a finite, non-empty complex matrix."""
    m = np.array(values, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    _check_capacity(m.size, max_entries)
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return _frozen(m)


def identity(n: int) -> np.ndarray:
    return _frozen(np.eye(n, dtype=complex))


def mat_vec(M, v) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if M.ndim != 2 or v.ndim != 1 or M.shape[1] != v.shape[0]:
        raise ShapeError(f"cannot multiply {M.shape} by {v.shape}")
    return _frozen(M @ v)


def kron(A, B, max_entries: int | None = None) -> np.ndarray:
    """Kronecker product; ``A`` owns the most significant index bits.

    Two 1-D inputs give a 1-D result, matching how column vectors combine.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim not in (1, 2) or B.ndim not in (1, 2):
        raise ShapeError("kron operands must be vectors or matrices")
    _check_capacity(A.size * B.size, max_entries)
    return _frozen(np.kron(A, B))


def kron_all(factors, max_entries: int | None = None) -> np.ndarray:
    out = np.ones(1, dtype=complex) if factors[0].ndim == 1 else np.ones((1, 1), dtype=complex)
    for f in factors:
        out = kron(out, f, max_entries)
    return out


def adjoint(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ShapeError("adjoint needs a matrix")
    return _frozen(M.conj().T.copy())


def norm(v) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=complex)))


def is_unitary(M, tol: float = ALGEBRAIC_TOL) -> bool:
    """True iff the max-entry magnitude of ``M M^dagger - I`` is below ``tol``."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"unitarity check needs a square matrix, got {M.shape}")
    err = M @ M.conj().T - np.eye(M.shape[0])
    return bool(np.max(np.abs(err)) < tol)
