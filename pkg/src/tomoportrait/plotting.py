"""Report figures written next to the JSON output. Uses the Agg backend only."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from tomoportrait.bell import CLASSICAL_BOUND, TSIRELSON_BOUND  # noqa: E402


def plot_search_trace(trace, path: str | Path, title: str = "CHSH search") -> Path:
    path = Path(path)
    it = [t[0] for t in trace]
    val = [t[1] for t in trace]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(it, val, where="post", color="k", lw=1.2, label="best value")
    ax.axhline(CLASSICAL_BOUND, color="tab:blue", ls="--", lw=1, label="separable bound 2")
    ax.axhline(TSIRELSON_BOUND, color="tab:red", ls=":", lw=1, label=r"$2\sqrt{2}$")
    ax.set_xlabel("refinement iteration")
    ax.set_ylabel(r"$|\mathrm{Tr}(MI)|$")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_chsh_matrix(matrix, path: str | Path, value: float | None = None) -> Path:
    path = Path(path)
    m = np.asarray(matrix, dtype=float)
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(m, vmin=0, vmax=max(0.5, float(m.max())), cmap="viridis")
    for (i, j), v in np.ndenumerate(m):
        ax.text(j, i, f"{v:.3f}", ha="center", va="center", color="w" if v < 0.3 else "k", fontsize=8)
    ax.set_xticks(range(4), ["(a,b)", "(a,c)", "(d,b)", "(d,c)"])
    ax.set_yticks(range(4), ["kk", "kr", "rk", "rr"])
    if value is not None and math.isfinite(value):
        ax.set_title(rf"$|\mathrm{{Tr}}(MI)|$ = {value:.6f}")
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
