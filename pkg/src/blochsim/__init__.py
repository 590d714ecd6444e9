"""Generalized Bloch representation of N-level systems.

The package maps density matrices to vectors of the (N^2 - 1)-dimensional
Bloch ball, represents observables as simplexes inside it and simulates
measurements as the random breaking of an elastic membrane stretched over
the simplex.
"""

__version__ = "0.1.0"

from .bloch import (
    compress_state,
    convex_mix,
    is_valid_state,
    is_vector_state,
    purity,
    state_to_vector,
    vector_to_state,
)
from .evolution import evolution_matrix, evolve_vector, precession_hamiltonian
from .exceptions import (
    BlochSimError,
    NotAStateError,
    ResourceCapError,
    ValidationError,
)
from .generators import (
    GeneratorBasis,
    build_generators,
    rotate_basis,
    star_product,
    wedge_product,
)
from .membrane import RngSpec, estimate_probabilities, run_measurement
from .observables import (
    Observable,
    decompose,
    degenerate_probability,
    luders_update,
    observable_from_basis,
    observable_from_matrix,
    transition_probability,
)
from .estimators import BlochTransformer, MembraneMeasurement

__all__ = [
    "BlochSimError", "BlochTransformer", "GeneratorBasis", "MembraneMeasurement",
    "NotAStateError", "Observable", "ResourceCapError", "RngSpec", "ValidationError",
    "build_generators", "compress_state", "convex_mix", "decompose",
    "degenerate_probability", "estimate_probabilities", "evolution_matrix",
    "evolve_vector", "is_valid_state", "is_vector_state", "luders_update",
    "observable_from_basis", "observable_from_matrix", "precession_hamiltonian",
    "purity", "rotate_basis", "run_measurement", "star_product", "state_to_vector",
    "transition_probability", "vector_to_state", "wedge_product",
]
