"""Probability vectors and stochastic matrices.

Values are plain read-only numpy arrays. The constructors here validate the
simplex/stochasticity invariants and freeze the result; every operation is a
pure function returning a fresh frozen array.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike

SIMPLEX_TOL = 1e-12
SPECTRAL_TOL = 1e-10
UNITARY_TOL = 1e-10


class InvariantError(ValueError):
    """A value violates one of its type invariants.

    ``invariant`` names the violated rule so front ends can report it.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def is_prob_vector(x: ArrayLike, tol: float = SIMPLEX_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return (
        x.ndim == 1
        and x.size > 0
        and bool(np.all(x >= -tol))
        and bool(np.all(x <= 1 + tol))
        and abs(x.sum() - 1.0) <= tol
    )


def prob_vector(x: ArrayLike, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate a point on the probability simplex and return it frozen."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvariantError("shape", f"expected a non-empty 1-d vector, got shape {x.shape}")
    if np.any(x < -tol) or np.any(x > 1 + tol):
        raise InvariantError("entry range", f"entries outside [0, 1]: {x}")
    if abs(x.sum() - 1.0) > tol:
        raise InvariantError("normalization", f"entries sum to {x.sum()!r}, not 1")
    return _frozen(x)


def is_stochastic(m: ArrayLike, tol: float = SIMPLEX_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return all(is_prob_vector(col, tol) for col in m.T)


def is_bistochastic(m: ArrayLike, tol: float = SIMPLEX_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    return is_stochastic(m, tol) and bool(np.all(np.abs(m.sum(axis=1) - 1.0) <= tol))


def stochastic_matrix(m: ArrayLike, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate a square matrix whose columns are probability vectors."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvariantError("shape", f"expected a square matrix, got shape {m.shape}")
    for j, col in enumerate(m.T):
        try:
            prob_vector(col, tol)
        except InvariantError as exc:
            raise InvariantError("column", f"column {j} is not a probability vector ({exc})") from None
    return _frozen(m)


def bistochastic_matrix(m: ArrayLike, tol: float = SIMPLEX_TOL) -> np.ndarray:
    m = stochastic_matrix(m, tol)
    rows = m.sum(axis=1)
    if np.any(np.abs(rows - 1.0) > tol):
        raise InvariantError("row sums", f"row sums {rows} are not all 1")
    return m


def two_state(p: float, q: float) -> np.ndarray:
    """The 2x2 stochastic matrix [[p, q], [1-p, 1-q]]."""
    return stochastic_matrix([[p, q], [1.0 - p, 1.0 - q]])


def symmetric_two_state(p: float) -> np.ndarray:
    """The 2x2 bistochastic matrix [[p, 1-p], [1-p, p]]."""
    return bistochastic_matrix([[p, 1.0 - p], [1.0 - p, p]])


def compose(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Semigroup product of two stochastic matrices (ordinary matrix product)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return stochastic_matrix(a @ b)


def circulant(w: ArrayLike) -> np.ndarray:
    """Bistochastic circulant embedding of a probability vector.

    Column ``j`` is ``w`` cyclically shifted down by ``j``; for N=2 this is
    [[w1, w2], [w2, w1]].
    """
    w = prob_vector(w)
    n = w.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return bistochastic_matrix(w[idx])


def star_product(w: ArrayLike, v: ArrayLike) -> np.ndarray:
    """Associative product of two probability vectors of equal length.

    Defined through the circulant embedding: ``w * v`` is the first column of
    ``circulant(w) @ circulant(v)``, i.e. the cyclic convolution
    ``p_m = sum_k w[(m - k) mod N] v[k]``. For N=2 this gives
    ``(w1 v1 + w2 v2, w2 v1 + w1 v2)``.
    """
    w = prob_vector(w)
    v = prob_vector(v)
    if w.size != v.size:
        raise ValueError(f"length mismatch: {w.size} vs {v.size}")
    n = w.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return prob_vector(w[idx] @ v)


def unistochastic(u: ArrayLike, tol: float = UNITARY_TOL) -> np.ndarray:
    """Entrywise squared moduli of a unitary matrix."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=tol):
        raise InvariantError("unitarity", "input matrix is not unitary")
    return bistochastic_matrix(np.abs(u) ** 2)


def _two_state_params(m: ArrayLike) -> tuple[float, float]:
    m = stochastic_matrix(m)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return float(m[0, 0]), float(m[0, 1])


def eigensystem_2x2(m: ArrayLike) -> tuple[tuple[float, float], np.ndarray]:
    """Eigenvalues ``(1, p - q)`` and eigenvector columns of a 2x2 stochastic matrix.

    The first eigenvector is the stationary distribution ``(q, 1-p)/(1-p+q)``;
    the second is ``(1, -1)/sqrt(2)``. When ``M`` is the identity both
    eigenvalues are 1 and the standard basis is returned.
    """
    p, q = _two_state_params(m)
    lam = (1.0, p - q)
    norm = 1.0 - p + q
    if norm <= SIMPLEX_TOL:
        vecs = np.eye(2)
    else:
        vecs = np.array([[q / norm, 1.0 / np.sqrt(2.0)], [(1.0 - p) / norm, -1.0 / np.sqrt(2.0)]])
    return lam, _frozen(vecs)


def stationary_2x2(m: ArrayLike) -> np.ndarray:
    """Fixed-point distribution of a 2x2 stochastic matrix other than the identity."""
    p, q = _two_state_params(m)
    norm = 1.0 - p + q
    if norm <= SIMPLEX_TOL:
        raise ValueError("every distribution is stationary under the identity")
    return prob_vector([q / norm, (1.0 - p) / norm])


def power(m: ArrayLike, n: int) -> np.ndarray:
    """``n``-fold composition of a 2x2 stochastic matrix; ``n == 0`` is the identity."""
    _two_state_params(m)
    if n < 0:
        raise ValueError("n must be non-negative")
    return stochastic_matrix(np.linalg.matrix_power(np.asarray(m, dtype=float), n))


def spectral_radius(m: ArrayLike) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(m, dtype=float)))))


def vectorize(m: ArrayLike) -> np.ndarray:
    """Row-major flattening: [[a, b], [c, d]] -> (a, b, c, d)."""
    return _frozen(np.asarray(m, dtype=float).reshape(-1))


def dot(m1: ArrayLike, m2: ArrayLike) -> float:
    """Scalar product Tr(m1^T m2) of two equally shaped real matrices."""
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    if m1.shape != m2.shape:
        raise ValueError(f"shape mismatch: {m1.shape} vs {m2.shape}")
    return float(vectorize(m1) @ vectorize(m2))


def _permutation(sigma: Sequence[int], n: int) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=int)
    if sigma.shape != (n,) or sorted(sigma.tolist()) != list(range(n)):
        raise ValueError(f"{sigma.tolist()} is not a permutation of 0..{n - 1}")
    return sigma


def permute_columns(m: ArrayLike, sigma: Sequence[int]) -> np.ndarray:
    """Column ``j`` of the result is column ``sigma[j]`` of ``m`` (0-based)."""
    m = stochastic_matrix(m)
    return stochastic_matrix(m[:, _permutation(sigma, m.shape[1])])


def permute_rows(m: ArrayLike, sigma: Sequence[int]) -> np.ndarray:
    """Row ``i`` of the result is row ``sigma[i]`` of ``m`` (0-based)."""
    m = stochastic_matrix(m)
    return stochastic_matrix(m[_permutation(sigma, m.shape[0]), :])


def random_prob_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample from the simplex via normalized exponentials."""
    e = rng.exponential(size=n)
    return e / e.sum()


def random_stochastic(n: int, rng: np.random.Generator) -> np.ndarray:
    e = rng.exponential(size=(n, n))
    return e / e.sum(axis=0, keepdims=True)


def random_bistochastic(n: int, rng: np.random.Generator, terms: int | None = None) -> np.ndarray:
    """Random convex mixture of permutation matrices (Birkhoff polytope)."""
    terms = terms or n + 1
    weights = random_prob_vector(terms, rng)
    out = np.zeros((n, n))
    for wk in weights:
        out[rng.permutation(n), np.arange(n)] += wk
    return out
