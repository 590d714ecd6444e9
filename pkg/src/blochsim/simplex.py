"""Volumes and distances for measurement simplexes.

The vertices of an N-outcome simplex are unit vectors with pairwise dot
product ``-1/(N-1)``, so every edge has length ``sqrt(2N/(N-1))``.
"""

import math

import numpy as np

from ._validation import check_dimension
from .exceptions import DegenerateSimplexError, ValidationError


def simplex_volume_closed(N):
    """(N-1)-dimensional volume of the measurement simplex."""
    N = check_dimension(N)
    return math.sqrt(N - 1) / math.factorial(N - 1) * (N / (N - 1)) ** (N / 2)


def face_volume_closed(N):
    """(N-2)-dimensional volume of one facet (a simplex with N-1 such vertices)."""
    N = check_dimension(N)
    return math.sqrt(N - 1) / math.factorial(N - 2) * (N / (N - 1)) ** ((N - 2) / 2)


def inradius(N):
    N = check_dimension(N)
    return 1.0 / (N - 1)


def cayley_menger_determinant(vertices):
    """Determinant of the bordered squared-distance matrix."""
    X = np.asarray(vertices, dtype=float)
    if X.ndim != 2:
        raise ValidationError("vertices must be a 2-D array, one vertex per row")
    n = X.shape[0]
    sq = np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=-1)
    B = np.ones((n + 1, n + 1))
    B[0, 0] = 0.0
    B[1:, 1:] = sq
    return float(np.linalg.det(B))


def simplex_volume_cayley_menger(vertices, allow_degenerate=False, rtol=1e-12):
    """Volume of the simplex spanned by ``n`` vertices, via Cayley-Menger.

    The simplex has dimension ``n - 1``.  Affinely dependent vertex sets raise
    :class:`DegenerateSimplexError` unless ``allow_degenerate`` is set, in
    which case the (numerically tiny) volume is returned.
    """
    X = np.asarray(vertices, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise ValidationError("need at least two vertices")
    k = n - 1
    det = cayley_menger_determinant(X)
    scale = float(np.max(np.sum((X - X[0]) ** 2, axis=-1))) ** k
    if abs(det) <= rtol * max(scale, 1e-300) and not allow_degenerate:
        raise DegenerateSimplexError("vertices are affinely dependent")
    return math.sqrt(abs(det) / 2 ** k) / math.factorial(k)


def height_to_face(decomposition, i):
    """Distance from ``r_par`` to the facet opposite vertex ``i``."""
    bary = decomposition.barycentric
    N = len(bary)
    return N / (N - 1) * float(bary[i])


def region_vertices(vertex_vectors, point, i):
    """Vertices of ``A_i``: the simplex with vertex ``i`` replaced by ``point``."""
    V = np.array(vertex_vectors, dtype=float)
    V[i] = point
    return V


def region_measure(decomposition, i):
    """Volume of ``A_i`` from the facet volume and the height of ``r_par``."""
    N = len(decomposition.barycentric)
    return face_volume_closed(N) * height_to_face(decomposition, i) / (N - 1)


def region_measure_cayley_menger(obs, decomposition, i):
    """Volume of ``A_i`` computed directly from its vertices."""
    V = region_vertices(obs.vertex_vectors, decomposition.r_parallel, i)
    return simplex_volume_cayley_menger(V, allow_degenerate=True)
