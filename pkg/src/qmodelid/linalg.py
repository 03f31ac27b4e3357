"""Low-level matrix helpers shared by every module.

Vectorization convention: ``|a><b|`` maps to ``|a> (x) |b>``, i.e. row-major
flattening. Under it the superoperator of ``X -> A X B`` is ``kron(A, B.T)``
and a unitary conjugation ``u X u^dag`` has superoperator ``kron(u, u.conj())``.
"""

from __future__ import annotations

import numpy as np

from ._config import tol
from .errors import DimensionMismatch, InvalidArgument, NotUnitary


def as_matrix(a, name: str = "matrix", square: bool = True) -> np.ndarray:
    """Coerce ``a`` to a finite complex 2-D array."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgument(f"{name} has non-finite entries")
    return m


def dim_of_superop(s: np.ndarray) -> int:
    n = s.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n or s.shape != (n, n):
        raise DimensionMismatch(f"superoperator shape {s.shape} is not d^2 x d^2")
    return d


def vectorize(mat) -> np.ndarray:
    """Row-major vectorization ``|rho>>`` (length d^2)."""
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m.reshape(-1).copy()


def devectorize(vec) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise DimensionMismatch(f"vector length {v.size} is not a perfect square")
    return v.reshape(d, d).copy()


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^dag b)``."""
    return complex(np.vdot(np.asarray(a).reshape(-1), np.asarray(b).reshape(-1)))


def choi_from_superop(s: np.ndarray) -> np.ndarray:
    """``C = sum_ab |a><b| (x) M(|a><b|)``; C[(a,c),(b,d)] = S[(c,d),(a,b)]."""
    d = dim_of_superop(s)
    return s.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d * d, d * d)


def superop_from_choi(c: np.ndarray) -> np.ndarray:
    d = dim_of_superop(c)
    return c.reshape(d, d, d, d).transpose(1, 3, 0, 2).reshape(d * d, d * d)


def partial_trace_second(c: np.ndarray) -> np.ndarray:
    """Trace out the second tensor factor of a d^2 x d^2 matrix."""
    d = dim_of_superop(c)
    return np.einsum("acbc->ab", c.reshape(d, d, d, d))


def swap_operator(d: int) -> np.ndarray:
    """Permutation ``|a>|b> -> |b>|a>``; also the transpose-map superoperator."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            s[b * d + a, a * d + b] = 1.0
    return s


def unitary_superop(u: np.ndarray) -> np.ndarray:
    return np.kron(u, u.conj())


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def herm_deviation(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def herm_eigvalsh(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of the Hermitian part, ascending."""
    return np.linalg.eigvalsh(hermitian_part(a))


def herm_eigh(a: np.ndarray):
    return np.linalg.eigh(hermitian_part(a))


def numerical_rank(a: np.ndarray, rel: float | None = None) -> int:
    """Rank with singular values above ``rel * s_max`` counted."""
    rel = tol().rank if rel is None else rel
    s = np.linalg.svd(np.asarray(a), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel * s[0]))


def condition_number(a: np.ndarray) -> float:
    s = np.linalg.svd(np.asarray(a), compute_uv=False)
    if s[-1] == 0:
        return float("inf")
    return float(s[0] / s[-1])


def unitarity_deviation(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def check_unitary(u, name: str = "u") -> np.ndarray:
    m = as_matrix(u, name)
    dev = unitarity_deviation(m)
    if dev > tol().unitary:
        raise NotUnitary(f"{name} is not unitary (|u^dag u - 1| = {dev:.3e})")
    return m


def fix_global_phase(u: np.ndarray, cutoff: float = 1e-8) -> np.ndarray:
    """Rotate ``u`` so its first nonzero entry in column-major order is real positive."""
    flat = u.reshape(-1, order="F")
    for x in flat:
        if abs(x) > cutoff:
            return u * (abs(x) / x)
    return u


def kraus_from_choi_vector(v: np.ndarray, d: int) -> np.ndarray:
    """Operator K with ``K . K^dag`` having Choi ``|v><v|``."""
    return v.reshape(d, d).T.copy()


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float) -> bool:
    """True if ``a = e^{i phi} b`` for some phase, to ``atol`` in max-abs."""
    inner = np.vdot(b.reshape(-1), a.reshape(-1))
    if abs(inner) == 0:
        return bool(np.max(np.abs(a)) <= atol and np.max(np.abs(b)) <= atol)
    phase = inner / abs(inner)
    return bool(np.max(np.abs(a - phase * b)) <= atol)


def eigenphases(u: np.ndarray) -> np.ndarray:
    """Eigenphases of a unitary in [0, 2 pi)."""
    return np.mod(np.angle(np.linalg.eigvals(u)), 2 * np.pi)


def circular_distance(x, y):
    """Distance between angles on the circle, in [0, pi]."""
    diff = np.mod(np.asarray(x) - np.asarray(y) + np.pi, 2 * np.pi) - np.pi
    return np.abs(diff)
