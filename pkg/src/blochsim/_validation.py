"""Small input checks shared across modules."""

import math
from typing import NamedTuple

import numpy as np

from .exceptions import (
    InvalidDimensionError,
    NotAStateError,
    NotHermitianError,
    ValidationError,
)

STATE_TOL = 1e-9


def check_dimension(N, minimum=2):
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise InvalidDimensionError(f"dimension must be an integer, got {N!r}")
    if N < minimum:
        raise InvalidDimensionError(f"dimension must be >= {minimum}, got {N}")
    return int(N)


def dimension_from_bloch_length(length):
    """Return N such that N**2 - 1 == length."""
    N = math.isqrt(length + 1)
    if N * N != length + 1 or N < 2:
        raise InvalidDimensionError(f"a Bloch vector cannot have {length} components")
    return N


def as_square_matrix(A, name="matrix"):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"{name} must be a square 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} contains non-finite entries")
    return A


def as_real_vector(r, name="vector", length=None):
    r = np.asarray(r)
    if np.iscomplexobj(r):
        if np.max(np.abs(r.imag), initial=0.0) > 0:
            raise ValidationError(f"{name} must be real")
        r = r.real
    r = np.asarray(r, dtype=float)
    if r.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {r.shape}")
    if length is not None and r.shape[0] != length:
        raise ValidationError(f"{name} must have {length} components, got {r.shape[0]}")
    if not np.all(np.isfinite(r)):
        raise ValidationError(f"{name} contains non-finite entries")
    return r


def hermiticity_error(A):
    return float(np.max(np.abs(A - A.conj().T), initial=0.0))


def check_hermitian(A, tol=STATE_TOL, name="matrix"):
    A = as_square_matrix(A, name)
    err = hermiticity_error(A)
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    if err > tol * scale:
        raise NotHermitianError(f"{name} is not Hermitian (max |A - A^dagger| = {err:.3g})")
    return 0.5 * (A + A.conj().T)


class StateDiagnostics(NamedTuple):
    hermiticity_error: float
    trace_error: float
    min_eigenvalue: float

    def is_state(self, tol=STATE_TOL):
        return (self.hermiticity_error <= tol and self.trace_error <= tol
                and self.min_eigenvalue >= -tol)


def state_diagnostics(D):
    D = as_square_matrix(D, "density matrix")
    herm = hermiticity_error(D)
    H = 0.5 * (D + D.conj().T)
    return StateDiagnostics(
        hermiticity_error=herm,
        trace_error=float(abs(np.trace(H) - 1.0)),
        min_eigenvalue=float(np.linalg.eigvalsh(H)[0]),
    )


def check_state(D, tol=STATE_TOL):
    """Validate a density matrix and return its Hermitian part.

    Raises
    ------
    NotAStateError
        If ``D`` is not Hermitian, not unit-trace or not positive
        semidefinite within ``tol``.
    """
    D = as_square_matrix(D, "density matrix")
    diag = state_diagnostics(D)
    if not diag.is_state(tol):
        raise NotAStateError(
            "not a density matrix: hermiticity error {:.3g}, trace error {:.3g}, "
            "min eigenvalue {:.3g}".format(*diag),
            trace_error=diag.trace_error,
            min_eigenvalue=diag.min_eigenvalue,
            hermiticity_error=diag.hermiticity_error,
        )
    return 0.5 * (D + D.conj().T)


def check_probability_vector(p, tol=1e-12, name="weights"):
    p = as_real_vector(p, name)
    if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise ValidationError(f"{name} must be non-negative and sum to one")
    return np.clip(p, 0.0, None)
