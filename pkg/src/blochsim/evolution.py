"""Unitary evolution as rotations of the Bloch ball."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_real_vector, check_hermitian
from .exceptions import NotUnitaryError, ValidationError
from .generators import build_generators


@dataclass(frozen=True, eq=False)
class EvolutionMatrix:
    """Real orthogonal matrix ``V`` with ``r(t) = V r(0)``."""

    N: int
    t: float
    V: np.ndarray
    U: np.ndarray

    def __matmul__(self, other):
        if isinstance(other, EvolutionMatrix):
            return EvolutionMatrix(self.N, self.t + other.t, self.V @ other.V, self.U @ other.U)
        return self.V @ other

    def orthogonality_error(self):
        return float(np.max(np.abs(self.V @ self.V.T - np.eye(len(self.V)))))

    def determinant(self):
        return float(np.linalg.det(self.V))


def propagator(H, t):
    """``exp(-i H t)`` through the eigendecomposition of ``H``."""
    H = check_hermitian(H, name="Hamiltonian")
    w, Q = np.linalg.eigh(H)
    return (Q * np.exp(-1j * w * t)) @ Q.conj().T


def adjoint_matrix(U, basis=None):
    """``V_kj = Tr(U^dagger L_k U L_j) / 2`` for a unitary ``U``."""
    U = np.asarray(U, dtype=complex)
    N = U.shape[0]
    if np.max(np.abs(U.conj().T @ U - np.eye(N))) > 1e-10:
        raise NotUnitaryError("U is not unitary")
    basis = basis or build_generators(N)
    L = basis.matrices
    Lt = np.einsum("ba,kbc,cd->kad", U.conj(), L, U)
    return np.einsum("kab,jba->kj", Lt, L).real / 2


def evolution_matrix(H, t, basis=None):
    """Evolution matrix of the time-independent Hamiltonian ``H`` at time ``t``."""
    U = propagator(H, t)
    V = adjoint_matrix(U, basis)
    return EvolutionMatrix(U.shape[0], float(t), V, U)


def evolve_vector(r, V):
    r = as_real_vector(r, "Bloch vector")
    if r.size != V.V.shape[0]:
        raise ValidationError(f"vector has {r.size} components, evolution acts on {V.V.shape[0]}")
    return V.V @ r


def spin_operators(N):
    """Spin ``j = (N-1)/2`` matrices ``(S_1, S_2, S_3)`` in the ``S_3`` eigenbasis
    ordered from ``m = j`` down to ``m = -j``."""
    j = (N - 1) / 2
    m = j - np.arange(N)
    # <m+1|S_+|m> = sqrt(j(j+1) - m(m+1))
    sp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
    sm = sp.conj().T
    return (sp + sm) / 2, (sp - sm) / 2j, np.diag(m).astype(complex)


def precession_hamiltonian(N, omega):
    """``H = omega S_3``: Larmor precession about the third axis.

    The sign makes the transverse components turn counter-clockwise,
    ``r_1 + i r_2 -> exp(i omega t) (r_1 + i r_2)`` for a spin one-half.
    """
    return omega * spin_operators(N)[2]
