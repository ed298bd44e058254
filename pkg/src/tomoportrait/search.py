"""Derivative-free maximization of the CHSH value over measurement directions.

Two phases: an exhaustive grid over (theta, phi) for all four directions,
then Nelder-Mead refinement from the best grid point. The result is always a
lower bound on the true maximum.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from tomoportrait.bell import SIGN_MATRIX, build_chsh_matrix, chsh_value
from tomoportrait.portrait import bin_outcomes
from tomoportrait.quantum import DensityMatrix, Direction, local_unitary, tomogram_table

# Signs applied to every column of the CHSH matrix; the last column enters
# with the opposite overall sign (see SIGN_MATRIX).
_COLUMN_SIGNS = SIGN_MATRIX[0].astype(float)


@dataclass(frozen=True)
class SearchConfig:
    grid_resolution: int = 8
    refine_iterations: int = 200
    seed: int = 0
    tolerance: float = 1e-7

    def __post_init__(self):
        if self.grid_resolution < 2:
            raise ValueError("grid_resolution must be at least 2")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.refine_iterations < 0:
            raise ValueError("refine_iterations must be non-negative")


@dataclass(frozen=True)
class SearchResult:
    best_value: float
    best_angles: tuple[Direction, Direction, Direction, Direction]
    evaluations: int
    trace: tuple[tuple[int, float], ...] = field(repr=False)
    grid_value: float = 0.0

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_angles": [d.as_list() for d in self.best_angles],
            "evaluations": self.evaluations,
            "grid_value": self.grid_value,
            "trace": [list(t) for t in self.trace],
        }


def grid_directions(resolution: int) -> list[Direction]:
    """theta in [0, pi] (endpoints included) times phi in [0, 2 pi), theta-major."""
    thetas = np.linspace(0.0, math.pi, resolution)
    phis = 2 * math.pi * np.arange(resolution) / resolution
    return [Direction(float(t), float(p)) for t in thetas for p in phis]


def correlation_table(
    state: DensityMatrix,
    dims: Sequence[int],
    dirs: Sequence[Direction],
    *,
    convention: str = "zyz",
    isolate: Sequence[int] = (0, 0),
) -> np.ndarray:
    """``S[x, y]``: signed sum of the reduced tomogram at directions (x on A, y on B).

    For a quadruple of grid indices the CHSH trace is
    ``S[a,b] + S[a,c] + S[d,b] - S[d,c]``.
    """
    da, db = dims
    us_a = np.stack([local_unitary(d, da, convention) for d in dirs])
    us_b = np.stack([local_unitary(d, db, convention) for d in dirs])
    w = tomogram_table(state, dims, us_a, us_b)
    n = len(dirs)
    reduced = bin_outcomes(w.reshape(n, n, da * db), dims, isolate)
    return reduced @ _COLUMN_SIGNS


def grid_argmax(s: np.ndarray) -> tuple[tuple[int, int, int, int], float]:
    """Exhaustive max of |S[a,b] + S[a,c] + S[d,b] - S[d,c]|.

    Ties resolve to the lexicographically smallest (a, b, c, d).
    """
    st = s.T
    # rest[b, c, d] = S[d, b] - S[d, c]
    rest = st[:, None, :] - st[None, :, :]
    best, best_idx = -1.0, (0, 0, 0, 0)
    for a in range(s.shape[0]):
        row = s[a]
        vals = np.abs(rest + row[:, None, None] + row[None, :, None])
        k = int(np.argmax(vals))
        v = float(vals.flat[k])
        if v > best:
            best = v
            best_idx = (a,) + tuple(int(i) for i in np.unravel_index(k, vals.shape))
    return best_idx, best


def _to_vector(quad: Sequence[Direction]) -> np.ndarray:
    return np.array([x for d in quad for x in (d.theta, d.phi)])


def _to_quad(x: np.ndarray) -> tuple[Direction, Direction, Direction, Direction]:
    return tuple(Direction(float(x[2 * k]), float(x[2 * k + 1])).normalized() for k in range(4))


def maximize_bell(
    state: DensityMatrix,
    dims: Sequence[int] | None = None,
    config: SearchConfig | None = None,
    *,
    convention: str = "zyz",
    isolate: Sequence[int] = (0, 0),
) -> SearchResult:
    """Search the four measurement directions for the largest ``|Tr(M I)|``."""
    config = config or SearchConfig()
    dims = tuple(dims) if dims is not None else state.dims
    rng = np.random.default_rng(config.seed)

    def value_at(quad) -> float:
        return chsh_value(build_chsh_matrix(state, dims, *quad, convention=convention, isolate=isolate))

    dirs = grid_directions(config.grid_resolution)
    s = correlation_table(state, dims, dirs, convention=convention, isolate=isolate)
    idx, _ = grid_argmax(s)
    best_quad = tuple(dirs[i] for i in idx)
    best = value_at(best_quad)
    grid_value = best
    evaluations = len(dirs) ** 4 + 1
    trace = [(0, best)]

    res = config.grid_resolution
    step = np.tile([0.5 * math.pi / (res - 1), math.pi / res], 4)
    iteration = 0
    budget = config.refine_iterations
    while budget > 0:
        x0 = _to_vector(best_quad)
        signs = rng.choice([-1.0, 1.0], size=x0.size)
        simplex = np.vstack([x0, x0 + np.diag(signs * step)])
        start = best

        def record(intermediate_result):
            nonlocal iteration
            iteration += 1
            trace.append((iteration, max(trace[-1][1], -float(intermediate_result.fun))))

        out = minimize(
            lambda x: -value_at(_to_quad(x)),
            x0,
            method="Nelder-Mead",
            callback=record,
            options={
                "initial_simplex": simplex,
                "maxiter": budget,
                "xatol": 1e-10,
                "fatol": config.tolerance * 1e-3,
            },
        )
        evaluations += int(out.nfev)
        budget -= max(int(out.nit), 1)
        cand = _to_quad(out.x)
        v = value_at(cand)
        evaluations += 1
        if v > best:
            best, best_quad = v, cand
        if best - start <= config.tolerance:
            break
        step = step * 0.5

    if trace[-1][1] != best:
        trace.append((iteration, max(trace[-1][1], best)))
    return SearchResult(best, best_quad, evaluations, tuple(trace), grid_value)
