"""Qubit portraits: binning many-outcome distributions down to two outcomes per party."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike

from tomoportrait.probcore import SIMPLEX_TOL, InvariantError, prob_vector
from tomoportrait.quantum import Direction, Tomogram


class PortraitTriple(NamedTuple):
    first: np.ndarray  # (p1, p2 + p3)
    second: np.ndarray  # (p1 + p2, p3)
    third: np.ndarray  # (p1 + p3, p2)


def qutrit_portraits(p: ArrayLike) -> PortraitTriple:
    """The three two-outcome distributions induced by a three-outcome one."""
    p = prob_vector(p)
    if p.size != 3:
        raise ValueError(f"expected 3 outcomes, got {p.size}")
    p1, p2, p3 = p
    return PortraitTriple(
        prob_vector([p1, p2 + p3]),
        prob_vector([p1 + p2, p3]),
        prob_vector([p1 + p3, p2]),
    )


def portrait_invert(first: ArrayLike, second: ArrayLike) -> np.ndarray:
    """Recover ``(p1, p2, p3)`` from the first two portrait pairs."""
    first = prob_vector(first)
    second = prob_vector(second)
    middle = second[0] - first[0]
    if middle < -SIMPLEX_TOL:
        raise InvariantError("portrait consistency", f"second pair implies p2 = {middle:.3g} < 0")
    return prob_vector([first[0], max(middle, 0.0), second[1]])


def bin_outcomes(w: ArrayLike, dims: Sequence[int], isolate: Sequence[int] = (0, 0)) -> np.ndarray:
    """Reduce joint distributions over (dA, dB) outcomes to 4-vectors.

    Works on the trailing axis of ``w`` (length dA*dB), so batches are fine.
    Each party keeps outcome ``isolate[k]`` and lumps the rest; the result is
    ordered (kept, kept), (kept, rest), (rest, kept), (rest, rest).
    """
    da, db = dims
    ia, ib = isolate
    if not (0 <= ia < da and 0 <= ib < db):
        raise ValueError(f"isolated outcomes {tuple(isolate)} out of range for dims {tuple(dims)}")
    w = np.asarray(w, dtype=float)
    t = w.reshape(w.shape[:-1] + (da, db))
    others_a = [k for k in range(da) if k != ia]
    others_b = [k for k in range(db) if k != ib]
    kept_row = t[..., ia, :]
    rest_rows = t[..., others_a, :]
    kk = kept_row[..., ib]
    kr = kept_row[..., others_b].sum(axis=-1)
    rk = rest_rows[..., ib].sum(axis=-1)
    rr = rest_rows[..., others_b].sum(axis=(-2, -1))
    return np.stack([kk, kr, rk, rr], axis=-1)


@dataclass(frozen=True)
class ReducedTomogram:
    probabilities: np.ndarray = field(repr=False)
    directions: tuple[Direction, ...]
    isolate: tuple[int, int] = (0, 0)

    def to_dict(self) -> dict:
        return {
            "probabilities": self.probabilities.tolist(),
            "directions": [d.as_list() for d in self.directions],
            "isolate": list(self.isolate),
        }


def reduce_bipartite(t: Tomogram, isolate: Sequence[int] = (0, 0)) -> ReducedTomogram:
    """Two-qubit portrait of a bipartite tomogram.

    By default each party's top outcome (largest spin projection) is kept and
    the others are summed; a (2, 2) tomogram passes through unchanged.
    """
    if len(t.outcome_dims) != 2 or min(t.outcome_dims) < 2:
        raise ValueError(f"expected a bipartite tomogram with dims >= 2, got {t.outcome_dims}")
    p = prob_vector(t.probabilities)
    reduced = prob_vector(bin_outcomes(p, t.outcome_dims, isolate))
    return ReducedTomogram(reduced, t.directions, (int(isolate[0]), int(isolate[1])))
