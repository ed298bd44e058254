"""Bell-CHSH screening through tomogram-derived 4x4 stochastic matrices."""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from tomoportrait.portrait import reduce_bipartite
from tomoportrait.probcore import compose, stochastic_matrix
from tomoportrait.quantum import DensityMatrix, Direction, bipartite_tomogram

log = logging.getLogger(__name__)

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
WITNESS_MARGIN = 1e-9

SEPARABLE = "consistent-with-separable"
WITNESSED = "entanglement-witnessed"

SIGN_MATRIX = np.array(
    [
        [1, -1, -1, 1],
        [1, -1, -1, 1],
        [1, -1, -1, 1],
        [-1, 1, 1, -1],
    ]
)
SIGN_MATRIX.setflags(write=False)

# Column k of the CHSH matrix is measured at (party A, party B) directions
# PAIRS[k], indices into the quadruple (a, b, c, d).
PAIRS = ((0, 1), (0, 2), (3, 1), (3, 2))

Quadruple = tuple[Direction, Direction, Direction, Direction]


@dataclass(frozen=True)
class ChshMatrix:
    matrix: np.ndarray = field(repr=False)
    angles: Quadruple

    def __post_init__(self):
        stochastic_matrix(self.matrix)


@dataclass(frozen=True)
class BellReport:
    value: float
    angles: tuple[Direction, ...]
    verdict: str
    matrix: np.ndarray = field(repr=False)
    factors: tuple[int, ...] = ()
    warning: str | None = None

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "verdict": self.verdict,
            "angles": [d.as_list() for d in self.angles],
            "matrix": np.asarray(self.matrix).tolist(),
        }
        if self.factors:
            out["factors"] = list(self.factors)
        if self.warning:
            out["warning"] = self.warning
        return out


def build_chsh_matrix(
    state: DensityMatrix,
    dims: Sequence[int] | None,
    a: Direction,
    b: Direction,
    c: Direction,
    d: Direction,
    *,
    convention: str = "zyz",
    isolate: Sequence[int] = (0, 0),
) -> ChshMatrix:
    """4x4 matrix whose columns are the (reduced) tomograms at (a,b), (a,c), (d,b), (d,c)."""
    quad = (a, b, c, d)
    dims = tuple(dims) if dims is not None else state.dims
    cols = []
    for i, j in PAIRS:
        t = bipartite_tomogram(state, quad[i], quad[j], dims, convention=convention)
        cols.append(reduce_bipartite(t, isolate).probabilities)
    return ChshMatrix(stochastic_matrix(np.column_stack(cols)), quad)


def transformed_signs(c1: ArrayLike | None = None, c2: ArrayLike | None = None) -> np.ndarray:
    """Sign matrix right-multiplied by C1 (x) C2 for 2x2 stochastic C1, C2."""
    if c1 is None and c2 is None:
        return SIGN_MATRIX
    c1 = stochastic_matrix(np.eye(2) if c1 is None else c1)
    c2 = stochastic_matrix(np.eye(2) if c2 is None else c2)
    if c1.shape != (2, 2) or c2.shape != (2, 2):
        raise ValueError("transform factors must be 2x2")
    return SIGN_MATRIX @ np.kron(c1, c2)


def chsh_value(m: ChshMatrix | ArrayLike, signs: ArrayLike | None = None) -> float:
    """``|Tr(M I)|`` for the CHSH sign matrix ``I`` (or a transformed one)."""
    mat = m.matrix if isinstance(m, ChshMatrix) else np.asarray(m, dtype=float)
    signs = SIGN_MATRIX if signs is None else np.asarray(signs, dtype=float)
    return abs(float(np.trace(mat @ signs)))


def verdict_for(value: float) -> tuple[str, str | None]:
    if value > CLASSICAL_BOUND + WITNESS_MARGIN:
        return WITNESSED, None
    if value > CLASSICAL_BOUND:
        return SEPARABLE, f"value {value!r} exceeds 2 only within round-off margin"
    return SEPARABLE, None


def bell_report(m: ChshMatrix, signs: ArrayLike | None = None) -> BellReport:
    value = chsh_value(m, signs)
    verdict, warning = verdict_for(value)
    if warning:
        log.warning(warning)
    return BellReport(value, m.angles, verdict, m.matrix, warning=warning)


def qubit_qutrit_B(
    theta: Sequence[float],
    phi_ab: float,
    phi_ac: float,
    phi_db: float,
    phi_dc: float,
) -> float:
    """Closed-form CHSH value for the qubit-qutrit example state.

    ``theta`` is (theta_a, theta_b, theta_c, theta_d); each combined phase is
    phi_x + 2 phi_y. Holds with the zxz qubit unitary and the qutrit portrait
    that isolates the m = 0 outcome.
    """
    ta, tb, tc, td = theta
    sb2, sc2 = math.sin(tb) ** 2, math.sin(tc) ** 2
    return abs(
        math.sin(ta) * (sb2 * math.sin(phi_ab) + sc2 * math.sin(phi_ac))
        + math.sin(td) * (sb2 * math.sin(phi_db) - sc2 * math.sin(phi_dc))
    )


def combined_phases(phi: Sequence[float]) -> tuple[float, float, float, float]:
    """(phi_ab, phi_ac, phi_db, phi_dc) with phi_xy = phi_x + 2 phi_y."""
    pa, pb, pc, pd = phi
    return pa + 2 * pb, pa + 2 * pc, pd + 2 * pb, pd + 2 * pc


def two_qutrit_B(theta: Sequence[float], phi: Sequence[float]) -> float:
    """Reference closed-form B for the two-qutrit example, evaluated term by term.

    Known not to agree with the tomogram pipeline; kept for comparison only.
    """
    ta, tb, tc, td = theta
    p_ab, p_ac, p_db, p_dc = combined_phases(phi)
    ca, cd = math.cos(ta), math.cos(td)
    sa, sd = math.sin(ta), math.sin(td)
    return 0.5 * abs(
        ((math.cos(tb) + 1) ** 2 - 2) * (ca + cd)
        + ((math.cos(tc) + 1) ** 2 - 2) * (ca - cd)
        - math.sin(tb) ** 2 * (math.sin(p_ab) * sa + math.sin(p_db) * sd)
        - math.sin(tc) ** 2 * (math.sin(p_ac) * sa + math.sin(p_dc) * sd)
    )


def semigroup_separability_check(
    state: DensityMatrix,
    dims: Sequence[int] | None,
    quadruples: Sequence[Quadruple],
    *,
    convention: str = "zyz",
    isolate: Sequence[int] = (0, 0),
    workers: int = 1,
) -> list[BellReport]:
    """CHSH reports for every matrix and every ordered product ``M_i M_j``.

    A separable state keeps all of them at or below 2. The first
    ``len(quadruples)`` reports are the single matrices, then products in
    row-major (i, j) order.
    """
    if len(quadruples) < 2:
        raise ValueError("need at least two direction quadruples")
    mats = [
        build_chsh_matrix(state, dims, *q, convention=convention, isolate=isolate) for q in quadruples
    ]

    def single(i: int) -> BellReport:
        r = bell_report(mats[i])
        return BellReport(r.value, r.angles, r.verdict, r.matrix, (i,), r.warning)

    def product(ij: tuple[int, int]) -> BellReport:
        i, j = ij
        f = compose(mats[i].matrix, mats[j].matrix)
        value = chsh_value(f)
        verdict, warning = verdict_for(value)
        return BellReport(value, mats[i].angles + mats[j].angles, verdict, f, (i, j), warning)

    pairs = list(itertools.product(range(len(mats)), repeat=2))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            singles = list(pool.map(single, range(len(mats))))
            products = list(pool.map(product, pairs))
    else:
        singles = [single(i) for i in range(len(mats))]
        products = [product(p) for p in pairs]
    return singles + products


def any_witnessed(reports: Sequence[BellReport]) -> bool:
    return any(r.verdict == WITNESSED for r in reports)
