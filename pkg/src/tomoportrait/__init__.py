"""Tomographic probability tools for qubits and qudits.

Spin tomograms, qubit portraits of qudit distributions, and Bell-CHSH
screening of bipartite states through tomogram-derived stochastic matrices.
"""

from tomoportrait.probcore import (
    InvariantError,
    bistochastic_matrix,
    compose,
    dot,
    eigensystem_2x2,
    permute_columns,
    permute_rows,
    power,
    prob_vector,
    star_product,
    stochastic_matrix,
    unistochastic,
    vectorize,
)
from tomoportrait.quantum import (
    DensityMatrix,
    Direction,
    Tomogram,
    bipartite_tomogram,
    qubit_unitary,
    qutrit_unitary,
    tomogram,
)
from tomoportrait.portrait import portrait_invert, qutrit_portraits, reduce_bipartite
from tomoportrait.bell import (
    BellReport,
    ChshMatrix,
    build_chsh_matrix,
    chsh_value,
    semigroup_separability_check,
)
from tomoportrait.search import SearchConfig, SearchResult, maximize_bell

__version__ = "0.1.0"

__all__ = [
    "BellReport",
    "ChshMatrix",
    "DensityMatrix",
    "Direction",
    "InvariantError",
    "SearchConfig",
    "SearchResult",
    "Tomogram",
    "bipartite_tomogram",
    "bistochastic_matrix",
    "build_chsh_matrix",
    "chsh_value",
    "compose",
    "dot",
    "eigensystem_2x2",
    "maximize_bell",
    "permute_columns",
    "permute_rows",
    "portrait_invert",
    "power",
    "prob_vector",
    "qubit_unitary",
    "qutrit_portraits",
    "qutrit_unitary",
    "reduce_bipartite",
    "semigroup_separability_check",
    "star_product",
    "stochastic_matrix",
    "tomogram",
    "unistochastic",
    "vectorize",
]
