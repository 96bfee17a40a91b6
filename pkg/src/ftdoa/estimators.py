"""Scikit-learn style wrappers around the functional core.

These classes expose the completion and estimation routines through the
fit/transform/predict protocol with ``get_params``/``set_params`` from
``BaseEstimator``, so they clone, pipeline and grid-search like any other
estimator. Note the data is complex-valued, which rules out most stock
sklearn preprocessing steps.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .arraysim import ArrayConfig
from .exceptions import ShapeError
from .pencil import fault_tolerant_estimate, tls_matrix_pencil
from .svt import SvtParams, svt_complete


class SVTCompleter(TransformerMixin, BaseEstimator):
    """Impute missing entries of a low-rank complex matrix.

    Missing entries are marked NaN. ``transform`` runs the singular value
    thresholding iteration on each matrix independently; no state carries
    over between calls.

    Parameters
    ----------
    tau : float, optional
        Singular value threshold; defaults to 5 * sqrt(n_rows * n_cols).
    delta : float, optional
        Step size; defaults to 1.2 * n_rows * n_cols / n_observed.
    tol : float
        Relative-residual stopping tolerance on the observed entries.
    max_iter : int
        Iteration cap.

    Attributes
    ----------
    n_iter_ : int
        Iterations used by the most recent transform.
    final_residual_ : float
        Relative residual of the most recent transform.
    converged_ : bool
        Whether the most recent transform met ``tol``.
    """

    def __init__(self, tau=None, delta=None, tol=1e-2, max_iter=50):
        self.tau = tau
        self.delta = delta
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = np.asarray(X)
        if X.ndim != 2:
            raise ShapeError("SVTCompleter expects a 2-D matrix")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = np.asarray(X, dtype=np.complex128)
        if X.ndim != 2:
            raise ShapeError("SVTCompleter expects a 2-D matrix")
        observed = ~np.isnan(X)
        params = SvtParams(
            tau=self.tau, delta=self.delta, epsilon=self.tol, max_iters=self.max_iter
        )
        result = svt_complete(np.where(observed, X, 0.0), observed, params)
        self.n_iter_ = result.iterations
        self.final_residual_ = result.final_residual
        self.converged_ = result.converged
        return result.completed


class MatrixPencilDOA(BaseEstimator):
    """Single-snapshot DOA estimator using the rank-filtered matrix pencil.

    Parameters
    ----------
    n_sources : int
        Number of impinging sources N.
    pencil_length : int, optional
        Pencil parameter L; defaults to M//3 clamped into its admissible
        window.
    spacing, wavelength : float
        Array geometry, in common units.

    Attributes
    ----------
    angles_deg_ : np.ndarray
        Sorted arrival angles from the fitted snapshot.
    poles_ : np.ndarray
        Matching exponential poles.
    sv_gap_ : float
        s_N / s_{N+1} singular value gap of the data matrix.
    """

    def __init__(self, n_sources=1, pencil_length=None, spacing=0.5, wavelength=1.0):
        self.n_sources = n_sources
        self.pencil_length = pencil_length
        self.spacing = spacing
        self.wavelength = wavelength

    def _config(self, n_elements):
        return ArrayConfig(
            n_elements=n_elements, spacing=self.spacing, wavelength=self.wavelength
        )

    def fit(self, X, y=None):
        """Estimate angles from one snapshot (1-D complex vector)."""
        x = np.asarray(X)
        if x.ndim != 1:
            raise ShapeError("fit expects a single 1-D snapshot")
        est = tls_matrix_pencil(
            x, self.n_sources, self._config(x.size), self.pencil_length
        )
        self.n_features_in_ = x.size
        self.angles_deg_ = est.angles_deg
        self.poles_ = est.poles
        self.sv_gap_ = est.sv_gap
        return self

    def predict(self, X):
        """Angles for one snapshot (1-D) or a batch of snapshots (rows)."""
        x = np.asarray(X)
        if x.ndim == 1:
            return tls_matrix_pencil(
                x, self.n_sources, self._config(x.size), self.pencil_length
            ).angles_deg
        if x.ndim != 2:
            raise ShapeError("predict expects a 1-D snapshot or a 2-D batch")
        return np.vstack([self.predict(row) for row in x])


class FaultTolerantDOA(BaseEstimator):
    """DOA estimator that detects and rides through element failures.

    ``fit`` takes a (2, M) array whose rows are the reference snapshot
    (all elements healthy) and the current snapshot. Failed elements are
    detected, their Hankel anti-diagonals completed by singular value
    thresholding, and the pencil solve runs on the recovered snapshot.

    Parameters
    ----------
    n_sources : int
        Number of impinging sources N.
    pencil_length : int, optional
        Pencil parameter L.
    spacing, wavelength : float
        Array geometry.
    detect_epsilon : float
        Stuck-output detection threshold.
    dead_epsilon : float, optional
        Dead-output detection threshold (default detect_epsilon / 10).
    tau, delta, tol, max_iter :
        Completion controls, as in :class:`SVTCompleter`.
    force_completion : bool
        Run the completion stage even with no detected failures.

    Attributes
    ----------
    angles_deg_, poles_, sv_gap_ :
        As in :class:`MatrixPencilDOA`.
    n_failed_ : int
        Number of elements treated as failed.
    working_indices_ : np.ndarray
        Detected working element indices (0-based).
    svt_n_iter_ : int
        Completion iterations (0 when the stage was bypassed).
    """

    def __init__(
        self,
        n_sources=1,
        pencil_length=None,
        spacing=0.5,
        wavelength=1.0,
        detect_epsilon=1e-2,
        dead_epsilon=None,
        tau=None,
        delta=None,
        tol=1e-2,
        max_iter=50,
        force_completion=False,
    ):
        self.n_sources = n_sources
        self.pencil_length = pencil_length
        self.spacing = spacing
        self.wavelength = wavelength
        self.detect_epsilon = detect_epsilon
        self.dead_epsilon = dead_epsilon
        self.tau = tau
        self.delta = delta
        self.tol = tol
        self.max_iter = max_iter
        self.force_completion = force_completion

    def fit(self, X, y=None):
        x = np.asarray(X)
        if x.ndim != 2 or x.shape[0] != 2:
            raise ShapeError("fit expects a (2, M) array of [previous, current] rows")
        cfg = ArrayConfig(
            n_elements=x.shape[1], spacing=self.spacing, wavelength=self.wavelength
        )
        est = fault_tolerant_estimate(
            x[0],
            x[1],
            n_sources=self.n_sources,
            cfg=cfg,
            length=self.pencil_length,
            svt_params=SvtParams(
                tau=self.tau, delta=self.delta, epsilon=self.tol, max_iters=self.max_iter
            ),
            detect_epsilon=self.detect_epsilon,
            dead_epsilon=self.dead_epsilon,
            force_completion=self.force_completion,
        )
        self.n_features_in_ = x.shape[1]
        self.angles_deg_ = est.angles_deg
        self.poles_ = est.poles
        self.sv_gap_ = est.sv_gap
        self.n_failed_ = est.n_failed
        self.working_indices_ = est.location.working
        self.svt_n_iter_ = est.svt.iterations if est.svt is not None else 0
        return self
