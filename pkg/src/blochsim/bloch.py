"""Map between density matrices and generalized Bloch vectors.

A state of an N-level system is written ``D = (I + c_N r . L) / N`` with
``c_N = sqrt(N (N - 1) / 2)``, so that pure states sit on the unit sphere of
``R^(N^2 - 1)``.  Not every vector in the unit ball is a state; positivity
is checked separately by :func:`is_valid_state`.
"""

import math

import numpy as np

from ._validation import (
    STATE_TOL,
    as_real_vector,
    as_square_matrix,
    check_dimension,
    check_state,
    dimension_from_bloch_length,
)
from .exceptions import DegenerateCompressionError, ValidationError
from .generators import build_generators, star_product


def _basis_for(N, basis):
    if basis is None:
        return build_generators(N)
    if basis.N != N:
        raise ValidationError(f"basis has N={basis.N} but the input needs N={N}")
    return basis


def vector_to_state(r, basis=None):
    """Return ``D = (I + c_N sum_i r_i L_i) / N``.

    The result is Hermitian with unit trace but need not be positive.
    """
    r = as_real_vector(r, "Bloch vector")
    N = dimension_from_bloch_length(r.size)
    basis = _basis_for(N, basis)
    return (np.eye(N) + basis.c * basis.combination(r)) / N


def state_to_vector(D, basis=None, validate=True, tol=STATE_TOL):
    """Return the Bloch vector ``r_j = sqrt(N / (2 (N - 1))) Tr(D L_j)``.

    Parameters
    ----------
    D : array_like, shape (N, N)
        Density matrix.
    validate : bool
        Reject inputs that are not unit-trace positive semidefinite.
    """
    D = check_state(D, tol) if validate else as_square_matrix(D, "density matrix")
    N = check_dimension(D.shape[0])
    basis = _basis_for(N, basis)
    tr = np.einsum("ab,iba->i", D, basis.matrices)
    return math.sqrt(N / (2 * (N - 1))) * tr.real


def min_eigenvalue(r, basis=None):
    return float(np.linalg.eigvalsh(vector_to_state(r, basis))[0])


def is_valid_state(r, basis=None, tol=STATE_TOL):
    """Return ``(valid, min_eigenvalue)`` for the operator of ``r``."""
    lam = min_eigenvalue(r, basis)
    return lam >= -tol, lam


def purity(r):
    """``Tr D^2`` expressed through the Bloch vector."""
    r = as_real_vector(r, "Bloch vector")
    N = dimension_from_bloch_length(r.size)
    return 1.0 - (N - 1) / N * (1.0 - float(r @ r))


def is_vector_state(r, basis=None, tol=1e-10):
    """Pure-state test: unit norm, plus ``r * r = r`` when ``N >= 3``."""
    r = as_real_vector(r, "Bloch vector")
    N = dimension_from_bloch_length(r.size)
    if abs(np.linalg.norm(r) - 1.0) > tol:
        return False
    if N == 2:
        return True
    return bool(np.max(np.abs(star_product(r, r, _basis_for(N, basis)) - r)) <= tol)


def convex_mix(terms, tol=1e-12):
    """Weighted sum of Bloch vectors.

    Parameters
    ----------
    terms : iterable of (weight, vector)
        Weights must be non-negative and sum to one within ``tol``.
    """
    terms = list(terms)
    if not terms:
        raise ValidationError("at least one term is required")
    weights = np.array([float(w) for w, _ in terms])
    if np.any(weights < 0):
        raise ValidationError("mixing weights must be non-negative")
    if abs(weights.sum() - 1.0) > tol:
        raise ValidationError(f"mixing weights sum to {weights.sum()!r}, not 1")
    vecs = [as_real_vector(v, "Bloch vector") for _, v in terms]
    if len({v.size for v in vecs}) != 1:
        raise ValidationError("all vectors must have the same dimension")
    return np.einsum("i,ij->j", weights, np.array(vecs))


def max_valid_radius(direction, basis=None, tol=1e-12):
    """Largest ``t`` such that ``t * direction`` is still a state.

    ``D(t u)`` is affine in ``t`` so its smallest eigenvalue is concave and
    the valid set along a ray is an interval; bisection on positivity gives
    its endpoint.  This is an empirical scan and makes no claim about a
    closed form.
    """
    u = as_real_vector(direction, "direction")
    u = u / np.linalg.norm(u)
    lo, hi = 0.0, 1.0
    if is_valid_state(u, basis, tol=0.0)[0]:
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_valid_state(mid * u, basis, tol=0.0)[0]:
            lo = mid
        else:
            hi = mid
    return lo


def _subspace_projector(N0, indices):
    P = np.zeros((N0, N0))
    P[indices, indices] = 1.0
    return P


def split_families(N0, split):
    """Return the ordered index families ``a`` (inside ``P``) and ``b``."""
    a = [int(i) for i in split]
    if len(set(a)) != len(a) or any(i < 0 or i >= N0 for i in a):
        raise ValidationError("split must list distinct indices in range")
    chosen = set(a)
    b = [i for i in range(N0) if i not in chosen]
    return a, b


def compress_state(D_ambient, split, M, N):
    """Return ``Tr(D_N P_M)`` for the truncated, renormalized state.

    The ambient basis is divided into the family ``a`` listed in ``split``
    (spanning the range of ``P``) and the remaining family ``b``.  ``P_M``
    projects onto the first ``M`` members of ``a`` and ``P_N`` onto those
    plus the first ``N - M`` members of ``b``; ``D_N = P_N D P_N / Tr(D P_N)``.
    """
    D = check_state(D_ambient)
    N0 = D.shape[0]
    a, b = split_families(N0, split)
    M, N = int(M), int(N)
    if not 0 <= M <= len(a) or not M <= N or N - M > len(b):
        raise ValidationError(f"need 0 <= M <= rank P and M <= N with N - M <= {len(b)}")
    PM = _subspace_projector(N0, a[:M])
    PN = _subspace_projector(N0, a[:M] + b[:N - M])
    norm = np.trace(D @ PN).real
    if norm < 1e-12:
        raise DegenerateCompressionError("Tr(D P_N) vanishes; the truncated state is undefined")
    DN = PN @ D @ PN / norm
    return float(np.trace(DN @ PM).real)


def decaying_random_state(N0, rng, scale=8.0):
    """Random full-rank state whose weight decays along the basis order.

    Amplitudes in basis direction ``k`` are damped by ``exp(-k / scale)``,
    which mimics a state that is well approximated by finite truncations.
    """
    G = rng.standard_normal((N0, N0)) + 1j * rng.standard_normal((N0, N0))
    A = np.exp(-np.arange(N0) / scale)[:, None] * G
    D = A @ A.conj().T
    return D / np.trace(D).real


def random_state(N, rng, rank=None):
    """Random density matrix from the induced (Ginibre) measure."""
    rank = N if rank is None else rank
    G = rng.standard_normal((N, rank)) + 1j * rng.standard_normal((N, rank))
    D = G @ G.conj().T
    return D / np.trace(D).real


def random_pure_state(N, rng):
    psi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())
