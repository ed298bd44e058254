"""Density matrices, measurement unitaries and spin tomograms.

Outcome index 0 is always the largest spin projection (m = +j), descending
from there, which matches the basis order of the state matrices below.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from tomoportrait.probcore import SIMPLEX_TOL, UNITARY_TOL, InvariantError, prob_vector

log = logging.getLogger(__name__)

HERMITIAN_WARN = 1e-9
PSD_FLOOR = -1e-10

# Qubit rotation conventions. "zyz" is the Euler-angle matrix with real
# off-diagonal rotation; "zxz" carries i on the off-diagonal, the spin-1/2
# partner of the qutrit matrix used by `qutrit_unitary`.
CONVENTIONS = ("zyz", "zxz")


@dataclass(frozen=True)
class Direction:
    """Measurement axis given by polar angle ``theta`` and azimuth ``phi`` (radians).

    ``psi`` is the third Euler angle; tomograms do not depend on it.
    """

    theta: float
    phi: float
    psi: float = 0.0

    @classmethod
    def from_degrees(cls, theta: float, phi: float, psi: float = 0.0) -> "Direction":
        return cls(math.radians(theta), math.radians(phi), math.radians(psi))

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def normalized(self) -> "Direction":
        """Same axis with theta folded into [0, pi] and phi into [0, 2 pi)."""
        theta = math.remainder(self.theta, 2 * math.pi)
        phi = self.phi
        if theta < 0:
            theta, phi = -theta, phi + math.pi
        return Direction(theta, phi % (2 * math.pi), self.psi)

    def as_list(self) -> list[float]:
        return [self.theta, self.phi]


IDENTITY_DIRECTION = Direction(0.0, 0.0)


def _check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=tol):
        raise InvariantError("unitarity", "measurement matrix is not unitary")


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    Input is symmetrized as (rho + rho^H)/2; a correction larger than 1e-9 is
    logged as a warning.
    """

    __slots__ = ("_data", "dims")

    def __init__(self, entries: ArrayLike, dims: Sequence[int] | None = None):
        rho = np.array(entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvariantError("shape", f"density matrix must be square, got shape {rho.shape}")
        d = rho.shape[0]
        dims = tuple(int(k) for k in dims) if dims is not None else (d,)
        if math.prod(dims) != d:
            raise InvariantError("dims", f"subsystem dims {dims} do not multiply to {d}")
        sym = (rho + rho.conj().T) / 2
        skew = float(np.max(np.abs(rho - sym))) if d else 0.0
        if skew > HERMITIAN_WARN:
            log.warning("input not Hermitian (max deviation %.3g); symmetrized", skew)
        tr = np.trace(sym).real
        if abs(tr - 1.0) > SIMPLEX_TOL:
            raise InvariantError("trace", f"trace is {tr!r}, not 1")
        lmin = float(np.linalg.eigvalsh(sym).min())
        if lmin < PSD_FLOOR:
            raise InvariantError("positivity", f"eigenvalue below tolerance: {lmin:.3g}")
        sym.setflags(write=False)
        self._data = sym
        self.dims = dims

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self.dims})"

    @classmethod
    def from_pure(cls, psi: ArrayLike, dims: Sequence[int] | None = None) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    def kron(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(self._data, other._data), self.dims + other.dims)


def qubit_unitary(d: Direction, convention: str = "zyz") -> np.ndarray:
    """2x2 measurement unitary for direction ``d``.

    ``zyz``::

        [[ cos(t/2) e^{i(f+s)/2},   sin(t/2) e^{i(f-s)/2}],
         [-sin(t/2) e^{-i(f-s)/2},  cos(t/2) e^{-i(f+s)/2}]]

    ``zxz`` (no psi)::

        [[  e^{if/2} cos(t/2),  i e^{if/2} sin(t/2)],
         [i e^{-if/2} sin(t/2),  e^{-if/2} cos(t/2)]]
    """
    c, s = math.cos(d.theta / 2), math.sin(d.theta / 2)
    if convention == "zyz":
        ep = np.exp(0.5j * (d.phi + d.psi))
        em = np.exp(0.5j * (d.phi - d.psi))
        return np.array([[c * ep, s * em], [-s / em, c / ep]])
    if convention == "zxz":
        e = np.exp(0.5j * d.phi)
        return np.array([[e * c, 1j * e * s], [1j * s / e, c / e]])
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def qutrit_unitary(d: Direction) -> np.ndarray:
    """3x3 spin-1 measurement unitary for direction ``d`` (psi unused)."""
    t = d.theta
    c2, s2 = math.cos(t / 2) ** 2, math.sin(t / 2) ** 2
    r = math.sin(t) / math.sqrt(2)
    e = np.exp(1j * d.phi)
    return np.array(
        [
            [e * c2, 1j * e * r, -e * s2],
            [1j * r, math.cos(t), 1j * r],
            [-s2 / e, 1j * r / e, c2 / e],
        ]
    )


def local_unitary(d: Direction, dim: int, convention: str = "zyz") -> np.ndarray:
    if dim == 2:
        return qubit_unitary(d, convention)
    if dim == 3:
        return qutrit_unitary(d)
    raise ValueError(f"no built-in measurement unitary for dimension {dim}; supply one explicitly")


def _matrix(rho: DensityMatrix | ArrayLike) -> np.ndarray:
    return rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def tomogram(rho: DensityMatrix | ArrayLike, u: ArrayLike) -> np.ndarray:
    """Outcome probabilities ``w(m) = (U^H rho U)_mm``."""
    r = _matrix(rho)
    u = np.asarray(u, dtype=complex)
    if u.shape != r.shape:
        raise ValueError(f"dimension mismatch: state {r.shape}, unitary {u.shape}")
    _check_unitary(u)
    diag = np.einsum("im,ij,jm->m", u.conj(), r, u)
    if np.max(np.abs(diag.imag)) > SIMPLEX_TOL:
        raise InvariantError("real diagonal", "tomogram has a non-negligible imaginary part")
    return prob_vector(diag.real)


@dataclass(frozen=True)
class Tomogram:
    """Joint outcome distribution of a (multi)partite measurement.

    ``probabilities`` is flattened in row-major order over ``outcome_dims``.
    """

    outcome_dims: tuple[int, ...]
    directions: tuple[Direction, ...]
    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self):
        if math.prod(self.outcome_dims) != self.probabilities.size:
            raise ValueError("probability count does not match outcome dims")

    def table(self) -> np.ndarray:
        return self.probabilities.reshape(self.outcome_dims)

    def marginal(self, subsystem: int) -> np.ndarray:
        axes = tuple(k for k in range(len(self.outcome_dims)) if k != subsystem)
        return prob_vector(self.table().sum(axis=axes))

    def to_dict(self) -> dict:
        out = {
            "outcome_dims": list(self.outcome_dims),
            "directions": [d.as_list() for d in self.directions],
            "probabilities": self.probabilities.tolist(),
        }
        if len(self.outcome_dims) == 2:
            out["marginals"] = [self.marginal(0).tolist(), self.marginal(1).tolist()]
        return out


def bipartite_tomogram(
    rho: DensityMatrix | ArrayLike,
    d1: Direction,
    d2: Direction,
    dims: Sequence[int] | None = None,
    *,
    unitaries: tuple[ArrayLike, ArrayLike] | None = None,
    convention: str = "zyz",
) -> Tomogram:
    """Two-party tomogram with measurement ``U1 (x) U2``.

    Built-in unitaries exist for subsystem dims 2 and 3; other dims need
    ``unitaries``.
    """
    r = _matrix(rho)
    if dims is None:
        if not isinstance(rho, DensityMatrix) or len(rho.dims) != 2:
            raise ValueError("subsystem dims are required")
        dims = rho.dims
    da, db = dims
    if da * db != r.shape[0]:
        raise ValueError(f"dims {tuple(dims)} do not match state dimension {r.shape[0]}")
    if unitaries is None:
        u1, u2 = local_unitary(d1, da, convention), local_unitary(d2, db, convention)
    else:
        u1, u2 = (np.asarray(u, dtype=complex) for u in unitaries)
    w = tomogram(r, np.kron(u1, u2))
    return Tomogram((da, db), (d1, d2), w)


def tomogram_table(
    rho: DensityMatrix | ArrayLike,
    dims: Sequence[int],
    us_a: np.ndarray,
    us_b: np.ndarray,
) -> np.ndarray:
    """Batched bipartite tomograms for every pair of local unitaries.

    ``us_a`` has shape (nA, dA, dA), ``us_b`` shape (nB, dB, dB). Returns an
    array of shape (nA, nB, dA, dB). No validation; used by the search grid.
    """
    da, db = dims
    r = _matrix(rho).reshape(da, db, da, db)
    # half[x, m, k, j', k'] = sum_j conj(U_x[j, m]) rho[j, k, j', k']
    half = np.einsum("xjm,jkab->xmkab", us_a.conj(), r)
    both = np.einsum("xmkab,xam->xmkb", half, us_a)
    w = np.einsum("ykn,xmkb,ybn->xymn", us_b.conj(), both, us_b)
    return w.real


def bell_state() -> DensityMatrix:
    """(|++> + |-->)/sqrt(2) as a two-qubit density matrix."""
    rho = np.zeros((4, 4))
    rho[np.ix_([0, 3], [0, 3])] = 0.5
    return DensityMatrix(rho, (2, 2))


def qubit_qutrit_state() -> DensityMatrix:
    """(|+1/2, +1> + |-1/2, -1>)/sqrt(2)."""
    rho = np.zeros((6, 6))
    rho[np.ix_([0, 5], [0, 5])] = 0.5
    return DensityMatrix(rho, (2, 3))


def two_qutrit_state() -> DensityMatrix:
    """(|+1,+1> + |0,0> + |-1,-1>)/sqrt(3)."""
    rho = np.zeros((9, 9))
    rho[np.ix_([0, 4, 8], [0, 4, 8])] = 1.0 / 3.0
    return DensityMatrix(rho, (3, 3))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = math.prod(dims)
    return DensityMatrix(np.eye(d) / d, dims)


def bell_state_tomogram_closed_form(d1: Direction, d2: Direction) -> np.ndarray:
    """Explicit trigonometric tomogram of `bell_state` under the zyz convention."""
    c1, s1 = math.cos(d1.theta / 2) ** 2, math.sin(d1.theta / 2) ** 2
    c2, s2 = math.cos(d2.theta / 2) ** 2, math.sin(d2.theta / 2) ** 2
    cross = 0.25 * math.sin(d1.theta) * math.sin(d2.theta) * math.cos(d1.phi + d2.phi)
    same = 0.5 * (c1 * c2 + s1 * s2) + cross
    diff = 0.5 * (c1 * s2 + s1 * c2) - cross
    return np.array([same, diff, diff, same])


def qubit_qutrit_tomogram_closed_form(d1: Direction, d2: Direction) -> np.ndarray:
    """Tomogram of `qubit_qutrit_state` written out from the matrix entries.

    Uses the zxz qubit unitary and the qutrit unitary. Entry (m1, m2) is
    ``|U[0, m1] V[0, m2] + U[1, m1] V[2, m2]|^2 / 2``.
    """
    u = qubit_unitary(d1, "zxz")
    v = qutrit_unitary(d2)
    return np.array(
        [0.5 * abs(u[0, m1] * v[0, m2] + u[1, m1] * v[2, m2]) ** 2 for m1 in range(2) for m2 in range(3)]
    )


def two_qutrit_tomogram_closed_form(d1: Direction, d2: Direction) -> np.ndarray:
    """Tomogram of `two_qutrit_state`: ``|sum_j U[j, m1] V[j, m2]|^2 / 3``."""
    u = qutrit_unitary(d1)
    v = qutrit_unitary(d2)
    return np.array(
        [abs(sum(u[j, m1] * v[j, m2] for j in range(3))) ** 2 / 3 for m1 in range(3) for m2 in range(3)]
    )


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed mixed state of the given rank (full rank by default)."""
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_density(d: int, rng: np.random.Generator) -> np.ndarray:
    return random_density_matrix(d, rng, rank=1)


def random_separable_state(
    dims: Sequence[int], rng: np.random.Generator, max_terms: int = 5
) -> DensityMatrix:
    """Convex mixture of 1..max_terms random product states."""
    da, db = dims
    k = int(rng.integers(1, max_terms + 1))
    weights = rng.dirichlet(np.ones(k))
    rho = sum(
        wk * np.kron(random_density_matrix(da, rng), random_density_matrix(db, rng)) for wk in weights
    )
    return DensityMatrix(rho, dims)


def random_direction(rng: np.random.Generator) -> Direction:
    return Direction(float(rng.uniform(0, math.pi)), float(rng.uniform(0, 2 * math.pi)))
