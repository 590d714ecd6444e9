"""scikit-learn style wrappers around the functional core."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import STATE_TOL, check_dimension, check_state
from .bloch import state_to_vector, vector_to_state
from .exceptions import ValidationError
from .generators import build_generators
from .membrane import RngSpec, estimate_probabilities, run_measurement
from .observables import Observable, observable_from_matrix, outcome_probabilities


def _as_matrix_batch(X):
    X = np.asarray(X, dtype=complex)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[1] != X.shape[2]:
        raise ValidationError("expected an array of square matrices, shape (n_samples, N, N)")
    return X


class BlochTransformer(TransformerMixin, BaseEstimator):
    """Map density matrices ``(n_samples, N, N)`` to Bloch vectors.

    Parameters
    ----------
    n_levels : int, optional
        Expected dimension; inferred in :meth:`fit` when omitted.
    tol : float
        Tolerance for the density-matrix check.
    """

    def __init__(self, n_levels=None, tol=STATE_TOL):
        self.n_levels = n_levels
        self.tol = tol

    def fit(self, X, y=None):
        X = _as_matrix_batch(X)
        N = X.shape[1] if self.n_levels is None else check_dimension(self.n_levels)
        if X.shape[1] != N:
            raise ValidationError(f"matrices are {X.shape[1]}x{X.shape[1]}, expected {N}x{N}")
        self.n_levels_ = N
        self.basis_ = build_generators(N)
        self.n_features_out_ = N * N - 1
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = _as_matrix_batch(X)
        if X.shape[1] != self.n_levels_:
            raise ValidationError("matrix size differs from the fitted dimension")
        return np.array([state_to_vector(check_state(D, self.tol), self.basis_) for D in X])

    def inverse_transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_out_:
            raise ValidationError(f"expected {self.n_features_out_} Bloch components")
        return np.array([vector_to_state(r, self.basis_) for r in X])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "basis_")
        return np.array([f"r_{j + 1}" for j in range(self.n_features_out_)], dtype=object)


class MembraneMeasurement(BaseEstimator):
    """Hidden-measurement simulator with a classifier-like interface.

    Rows of ``X`` are Bloch vectors.  :meth:`predict_proba` returns Monte
    Carlo outcome frequencies, :meth:`born_proba` the exact probabilities
    and :meth:`predict` one simulated outcome per row.

    Parameters
    ----------
    observable : array_like or Observable
        Hermitian matrix or a prepared :class:`Observable`.
    n_samples : int
        Membrane breakings per row in :meth:`predict_proba`.
    seed, stream_id : int
        Randomness is a pure function of these and the row index.
    n_jobs : int, optional
        Worker threads; results do not depend on it.
    density : DisintegrationDensity, optional
        Non-uniform membrane (two-level systems only).
    """

    def __init__(self, observable=None, n_samples=10_000, seed=0, stream_id=0,
                 n_jobs=None, density=None):
        self.observable = observable
        self.n_samples = n_samples
        self.seed = seed
        self.stream_id = stream_id
        self.n_jobs = n_jobs
        self.density = density

    def fit(self, X=None, y=None):
        if self.observable is None:
            raise ValidationError("an observable is required")
        obs = self.observable
        if not isinstance(obs, Observable):
            obs = observable_from_matrix(obs)
        self.observable_ = obs
        self.classes_ = np.arange(obs.M)
        self.n_features_in_ = obs.N * obs.N - 1
        if X is not None:
            self._check_X(X)
        return self

    def _check_X(self, X):
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(f"expected {self.n_features_in_} Bloch components per row")
        return X

    def _rng(self, row):
        # one stream per row keeps rows independent and order-free
        return RngSpec(int(self.seed), int(self.stream_id) * 1_000_003 + row)

    def born_proba(self, X):
        check_is_fitted(self, "observable_")
        X = self._check_X(X)
        return np.array([outcome_probabilities(r, self.observable_) for r in X])

    def predict_proba(self, X):
        check_is_fitted(self, "observable_")
        X = self._check_X(X)
        return np.array([
            estimate_probabilities(r, self.observable_, self.n_samples, self._rng(i),
                                   self.n_jobs, self.density).frequencies
            for i, r in enumerate(X)
        ])

    def predict(self, X):
        check_is_fitted(self, "observable_")
        X = self._check_X(X)
        if self.density is not None:
            return np.array([
                int(np.argmax(estimate_probabilities(r, self.observable_, 1, self._rng(i), 1,
                                                     self.density).counts))
                for i, r in enumerate(X)
            ])
        return np.array([run_measurement(r, self.observable_, self._rng(i))[0]
                         for i, r in enumerate(X)])
