"""Observables as simplexes inside the Bloch ball.

The eigenprojectors of an observable map to ``N`` unit vectors ``n_i`` that
form a regular simplex.  Transition probabilities are the barycentric
coordinates of the orthogonal projection ``r_par`` of a state onto that
simplex.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_real_vector, check_hermitian, check_state
from .bloch import state_to_vector
from .exceptions import BranchImpossibleError, PartitionError, ValidationError
from .generators import build_generators

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Observable:
    """Spectral data of a Hermitian observable.

    Attributes
    ----------
    eigenvalues : ndarray, shape (N,)
        Sorted in descending order.
    vectors : ndarray, shape (N, N)
        Orthonormal eigenvectors as columns; ``vectors[:, i]`` spans ``P_{a_i}``.
    partition : tuple of tuple of int
        Disjoint index groups ``I_k`` of equal eigenvalues covering ``0..N-1``.
    vertex_vectors : ndarray, shape (N, N**2 - 1)
        Bloch vectors ``n_i`` of the rank-one projectors.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    partition: tuple
    vertex_vectors: np.ndarray = field(repr=False)

    @property
    def N(self):
        return self.vectors.shape[0]

    @property
    def M(self):
        return len(self.partition)

    @property
    def projectors(self):
        V = self.vectors
        return np.einsum("ai,bi->iab", V, V.conj())

    def group_projector(self, k):
        """``P_{I_k}``, the projector onto the ``k``-th eigenspace."""
        V = self.vectors[:, list(self.partition[self._check_k(k)])]
        return V @ V.conj().T

    def group_of(self, i):
        for k, group in enumerate(self.partition):
            if i in group:
                return k
        raise ValidationError(f"index {i} is not in the partition")

    def group_eigenvalue(self, k):
        return float(self.eigenvalues[self.partition[self._check_k(k)][0]])

    def matrix(self):
        V = self.vectors
        return (V * self.eigenvalues) @ V.conj().T

    def _check_k(self, k):
        if not 0 <= k < self.M:
            raise ValidationError(f"partition index {k} out of range 0..{self.M - 1}")
        return k

    def _check_i(self, i):
        if not 0 <= i < self.N:
            raise ValidationError(f"eigen-index {i} out of range 0..{self.N - 1}")
        return i


def _group_eigenvalues(eigenvalues, tol):
    groups = [[0]]
    for i in range(1, len(eigenvalues)):
        if abs(eigenvalues[groups[-1][-1]] - eigenvalues[i]) < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return tuple(tuple(g) for g in groups)


def _vertex_vectors(vectors, basis):
    return np.array([
        state_to_vector(np.outer(vectors[:, i], vectors[:, i].conj()), basis, validate=False)
        for i in range(vectors.shape[1])
    ])


def observable_from_matrix(A, degeneracy_tol=DEGENERACY_TOL, basis=None):
    """Diagonalize ``A`` and group eigenvalues closer than ``degeneracy_tol``."""
    A = check_hermitian(A, name="observable")
    N = A.shape[0]
    basis = basis or build_generators(N)
    w, V = np.linalg.eigh(A)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    partition = _group_eigenvalues(w, degeneracy_tol)
    for g in partition:
        w[list(g)] = np.mean(w[list(g)])
    return Observable(w, V, partition, _vertex_vectors(V, basis))


def observable_from_basis(vectors, eigenvalues=None, partition=None, basis=None, tol=1e-10):
    """Build an observable from an explicit orthonormal eigenbasis.

    Parameters
    ----------
    vectors : array_like, shape (N, N)
        Columns are the eigenvectors.
    eigenvalues : array_like, optional
        Defaults to ``N, N-1, ..., 1`` grouped by ``partition``.
    partition : sequence of sequences of int, optional
        Defaults to singletons (non-degenerate).
    """
    V = np.asarray(vectors, dtype=complex)
    N = V.shape[0]
    if V.shape != (N, N):
        raise ValidationError("eigenvectors must form a square matrix")
    if np.max(np.abs(V.conj().T @ V - np.eye(N))) > tol:
        raise ValidationError("eigenvectors are not orthonormal")
    if partition is None:
        partition = [[i] for i in range(N)]
    partition = tuple(tuple(int(i) for i in g) for g in partition)
    flat = sorted(i for g in partition for i in g)
    if flat != list(range(N)) or any(len(g) == 0 for g in partition):
        raise PartitionError("partition must split 0..N-1 into disjoint non-empty sets")
    if eigenvalues is None:
        eigenvalues = np.empty(N)
        for k, g in enumerate(partition):
            eigenvalues[list(g)] = len(partition) - k
    eigenvalues = as_real_vector(eigenvalues, "eigenvalues", N)
    for g in partition:
        if np.ptp(eigenvalues[list(g)]) > DEGENERACY_TOL:
            raise PartitionError("eigenvalues within a partition group must coincide")
    basis = basis or build_generators(N)
    return Observable(eigenvalues.copy(), V.copy(), partition, _vertex_vectors(V, basis))


def observable_from_projectors(projectors, eigenvalues=None, partition=None, basis=None, tol=1e-10):
    """Build an observable from ``N`` rank-one orthogonal projectors."""
    P = np.asarray(projectors, dtype=complex)
    if P.ndim != 3 or P.shape[1] != P.shape[2] or P.shape[0] != P.shape[1]:
        raise ValidationError("need N rank-one projectors of size N x N")
    N = P.shape[0]
    if np.max(np.abs(P.sum(axis=0) - np.eye(N))) > tol:
        raise ValidationError("projectors do not sum to the identity")
    cols = []
    for Pi in P:
        if np.max(np.abs(Pi @ Pi - Pi)) > tol or abs(np.trace(Pi) - 1) > tol:
            raise ValidationError("each projector must be idempotent with unit trace")
        w, v = np.linalg.eigh(0.5 * (Pi + Pi.conj().T))
        cols.append(v[:, -1])
    return observable_from_basis(np.array(cols).T, eigenvalues, partition, basis, tol)


@dataclass(frozen=True)
class SimplexDecomposition:
    """``r = r_parallel + r_perp`` with barycentric coordinates of ``r_parallel``."""

    r_parallel: np.ndarray
    r_perp: np.ndarray
    barycentric: np.ndarray


def _bloch(r, obs):
    return as_real_vector(r, "Bloch vector", obs.vertex_vectors.shape[1])


def transition_probabilities(r, obs):
    """All ``N`` probabilities ``(1 + (N - 1) r . n_i) / N``."""
    r = _bloch(r, obs)
    N = obs.N
    return (1.0 + (N - 1) * (obs.vertex_vectors @ r)) / N


def transition_probability(r, obs, i):
    return float(transition_probabilities(r, obs)[obs._check_i(i)])


def degenerate_probability(r, obs, k):
    """Probability of the ``k``-th (possibly degenerate) outcome."""
    p = transition_probabilities(r, obs)
    return float(p[list(obs.partition[obs._check_k(k)])].sum())


def outcome_probabilities(r, obs, clip=True):
    """Probabilities of the ``M`` partition outcomes."""
    p = transition_probabilities(r, obs)
    out = np.array([p[list(g)].sum() for g in obs.partition])
    return np.clip(out, 0.0, 1.0) if clip else out


def decompose(r, obs):
    """Split ``r`` into its projection on the simplex plane and the rest."""
    r = _bloch(r, obs)
    bary = transition_probabilities(r, obs)
    r_par = bary @ obs.vertex_vectors
    return SimplexDecomposition(r_par, r - r_par, bary)


def luders_update(D, obs, k, tol=1e-12):
    """Post-measurement state ``P D P / Tr(D P)`` for outcome group ``k``."""
    D = check_state(D)
    P = obs.group_projector(k)
    p = np.trace(D @ P).real
    if p <= tol:
        raise BranchImpossibleError(f"outcome {k} has probability {p:.3g}")
    out = P @ D @ P / p
    return 0.5 * (out + out.conj().T)


def vertex_gram(N):
    """Expected ``n_i . n_j`` for a regular measurement simplex."""
    return np.full((N, N), -1.0 / (N - 1)) + np.eye(N) * N / (N - 1)


def simplex_angle(N):
    """Angle ``theta_N`` between two vertex vectors."""
    return math.acos(-1.0 / (N - 1))


def forbidden_arc_vector(obs, i, j, alpha):
    """Unit vector in the plane of ``n_i`` and ``n_j`` at angle ``alpha`` from ``n_i``.

    For ``0 < alpha < theta_N`` its transition probability to ``P_{a_j}``
    is negative when ``N >= 3``, so it cannot describe a state.
    """
    N = obs.N
    if N < 3:
        raise ValidationError("the construction needs N >= 3")
    s = math.sqrt(N * (N - 2))
    ni, nj = obs.vertex_vectors[i], obs.vertex_vectors[j]
    return ((math.cos(alpha) + math.sin(alpha) / s) * ni
            + math.sin(alpha) * (N - 1) / s * nj)
