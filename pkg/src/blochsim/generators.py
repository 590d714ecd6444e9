"""Generalized Gell-Mann generators of su(N) and their structure constants.

The generators are ordered level by level: for ``k = 2 .. N`` we emit the
symmetric and antisymmetric off-diagonal pair for every ``j < k`` followed by
the diagonal matrix ``W_{k-1}``.  With this order ``N = 2`` gives the Pauli
matrices and ``N = 3`` the usual eight Gell-Mann matrices.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_real_vector, check_dimension
from .exceptions import NotOrthonormalError, UnsupportedDimensionError, ValidationError

DENSE_LIMIT = 6
CONSTRUCTION_TOL = 1e-12


def bloch_constant(N):
    """Return ``c_N = sqrt(N (N - 1) / 2)``."""
    return math.sqrt(N * (N - 1) / 2)


def generator_labels(N):
    """Human readable labels in canonical order, e.g. ``U12, V12, W1``."""
    labels = []
    for k in range(2, N + 1):
        for j in range(1, k):
            labels += [f"U{j}{k}", f"V{j}{k}"]
        labels.append(f"W{k - 1}")
    return labels


def _generator_matrices(N):
    mats = []
    for k in range(1, N):
        for j in range(k):
            U = np.zeros((N, N), dtype=complex)
            U[j, k] = U[k, j] = 1.0
            V = np.zeros((N, N), dtype=complex)
            V[j, k] = -1j
            V[k, j] = 1j
            mats += [U, V]
        # W_l with l = k: -sqrt(2/(l(l+1))) (l |l+1><l+1| - sum_{j<=l} |j><j|)
        diag = np.zeros(N)
        diag[:k] = 1.0
        diag[k] = -k
        mats.append(np.diag(diag * math.sqrt(2.0 / (k * (k + 1)))).astype(complex))
    return np.array(mats)


class StructureTensor:
    """Rank-3 real tensor stored densely or as a sparse coordinate list.

    Parameters
    ----------
    dense : ndarray, shape (n, n, n)
        Full tensor.  Converted to coordinate form when ``sparse`` is true.
    sparse : bool
        Keep only entries whose magnitude exceeds ``tol``.
    """

    def __init__(self, dense, sparse=False, tol=1e-14):
        dense = np.asarray(dense, dtype=float)
        self.size = dense.shape[0]
        self.is_sparse = bool(sparse)
        if self.is_sparse:
            idx = np.argwhere(np.abs(dense) > tol)
            self.indices = idx.astype(np.int64)
            self.values = dense[tuple(idx.T)]
            self.indices.setflags(write=False)
            self.values.setflags(write=False)
            self._dense = None
        else:
            self._dense = dense.copy()
            self._dense.setflags(write=False)

    def todense(self):
        if not self.is_sparse:
            return self._dense
        out = np.zeros((self.size,) * 3)
        out[tuple(self.indices.T)] = self.values
        return out

    def entries(self, tol=1e-14):
        """Return ``(indices, values)`` of the non-zero entries (0-based)."""
        if self.is_sparse:
            return self.indices, self.values
        idx = np.argwhere(np.abs(self._dense) > tol)
        return idx, self._dense[tuple(idx.T)]

    def __getitem__(self, key):
        return self.todense()[key]

    def contract(self, u, v):
        """Return ``w_i = sum_jk t_ijk u_j v_k``."""
        if not self.is_sparse:
            return np.einsum("ijk,j,k->i", self._dense, u, v)
        i, j, k = self.indices.T
        out = np.zeros(self.size)
        np.add.at(out, i, self.values * u[j] * v[k])
        return out


def _structure_constants(mats):
    # f_ijk = Tr([L_i, L_j] L_k) / 4i ,  d_ijk = Tr({L_i, L_j} L_k) / 4
    prod = np.einsum("iab,jbc->ijac", mats, mats)
    t = np.einsum("ijac,kca->ijk", prod, mats)
    tt = np.transpose(t, (1, 0, 2))
    f = ((t - tt) / 4j).real
    d = ((t + tt) / 4).real
    return f, d


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    """Orthogonal generators of su(N) with their structure constants.

    Attributes
    ----------
    N : int
        Hilbert space dimension.
    matrices : ndarray, shape (N**2 - 1, N, N)
        Traceless Hermitian generators with ``Tr L_i L_j = 2 delta_ij``.
    f, d : StructureTensor
        Totally antisymmetric and totally symmetric structure constants.
    """

    N: int
    matrices: np.ndarray
    f: StructureTensor
    d: StructureTensor

    @property
    def size(self):
        return self.N * self.N - 1

    @property
    def c(self):
        return bloch_constant(self.N)

    def __len__(self):
        return self.size

    def __getitem__(self, i):
        return self.matrices[i]

    def combination(self, m):
        """Return ``sum_i m_i L_i``."""
        m = as_real_vector(m, "coefficients", self.size)
        return np.tensordot(m, self.matrices, axes=1)


def _make_basis(N, mats):
    f, d = _structure_constants(mats)
    sparse = N > DENSE_LIMIT
    mats = np.array(mats)
    mats.setflags(write=False)
    return GeneratorBasis(N, mats, StructureTensor(f, sparse), StructureTensor(d, sparse))


_CACHE = {}


def build_generators(N):
    """Return the canonical generalized Gell-Mann basis for dimension ``N``.

    Bases are immutable and cached, so repeated calls are cheap.

    Examples
    --------
    >>> b = build_generators(2)
    >>> b.matrices[1]
    array([[ 0.+0.j, -0.-1.j],
           [ 0.+1.j,  0.+0.j]])
    """
    N = check_dimension(N)
    if N not in _CACHE:
        _CACHE[N] = _make_basis(N, _generator_matrices(N))
    return _CACHE[N]


def check_basis(basis, tol=CONSTRUCTION_TOL):
    """Raise :class:`NotOrthonormalError` unless the generators are traceless,
    Hermitian and Hilbert-Schmidt orthogonal with norm squared 2."""
    L = basis.matrices
    if np.max(np.abs(L - np.conj(np.transpose(L, (0, 2, 1)))), initial=0.0) > tol:
        raise NotOrthonormalError("generators are not Hermitian")
    if np.max(np.abs(np.einsum("iaa->i", L)), initial=0.0) > tol:
        raise NotOrthonormalError("generators are not traceless")
    gram = np.einsum("iab,jba->ij", L, L)
    if np.max(np.abs(gram - 2 * np.eye(len(L))), initial=0.0) > tol:
        raise NotOrthonormalError("generators are not orthogonal with Tr L_i L_j = 2 delta_ij")
    return basis


def rotate_basis(basis, Q, tol=1e-10):
    """Return the basis ``L'_i = sum_j Q_ij L_j`` for a real orthogonal ``Q``."""
    Q = np.asarray(Q, dtype=float)
    n = basis.size
    if Q.shape != (n, n):
        raise ValidationError(f"rotation must be {n}x{n}, got {Q.shape}")
    if np.max(np.abs(Q @ Q.T - np.eye(n))) > tol:
        raise NotOrthonormalError("rotation matrix is not orthogonal")
    mats = np.tensordot(Q, basis.matrices, axes=1)
    return check_basis(_make_basis(basis.N, mats), tol)


def wedge_product(u, v, basis):
    """Antisymmetric product ``(u ^ v)_i = sum_jk f_ijk u_j v_k``."""
    u = as_real_vector(u, "u", basis.size)
    v = as_real_vector(v, "v", basis.size)
    return basis.f.contract(u, v)


def star_product(u, v, basis):
    """Symmetric product ``(u * v)_i = c_N/(N-2) sum_jk d_ijk u_j v_k``.

    Undefined for ``N = 2`` where the prefactor diverges.
    """
    if basis.N < 3:
        raise UnsupportedDimensionError("the star product needs N >= 3")
    u = as_real_vector(u, "u", basis.size)
    v = as_real_vector(v, "v", basis.size)
    return basis.c / (basis.N - 2) * basis.d.contract(u, v)


def basis_to_dict(basis):
    """JSON-ready representation with complex entries as ``[re, im]`` pairs."""
    mats = np.stack([basis.matrices.real, basis.matrices.imag], axis=-1)
    out = {"N": basis.N, "matrices": mats.tolist()}
    for name in ("f", "d"):
        t = getattr(basis, name)
        if t.is_sparse:
            idx, vals = t.entries()
            out[name] = [[int(i), int(j), int(k), float(x)] for (i, j, k), x in zip(idx, vals)]
        else:
            out[name] = t.todense().tolist()
    out["storage"] = "sparse" if basis.f.is_sparse else "dense"
    return out


def basis_from_dict(data):
    """Inverse of :func:`basis_to_dict`; structure constants are recomputed."""
    try:
        N = check_dimension(int(data["N"]))
        arr = np.asarray(data["matrices"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed basis document: {exc}") from exc
    if arr.shape != (N * N - 1, N, N, 2):
        raise ValidationError(f"matrices must have shape {(N * N - 1, N, N, 2)}, got {arr.shape}")
    return check_basis(_make_basis(N, arr[..., 0] + 1j * arr[..., 1]), 1e-10)
