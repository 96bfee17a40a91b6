"""Singular value thresholding for low-rank matrix completion.

Starting from Y = 0, the iteration alternates

    X_k = shrink(Y_{k-1}, tau)
    Y_k = Y_{k-1} + delta * P(obs - X_k)

where ``shrink`` soft-thresholds singular values at level tau and P zeroes
every unobserved entry. It stops once the relative residual on the
observed set drops to ``epsilon`` or the iteration cap is hit. For large
tau the iterates approach the minimum-nuclear-norm matrix consistent with
the observations.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DivergenceError, ParameterError, ShapeError
from .validation import as_complex_matrix


@dataclass(frozen=True)
class SvtParams:
    """Iteration controls; tau and delta default to shape-derived heuristics.

    tau : singular value threshold, default 5 * sqrt(n_rows * n_cols).
    delta : step size, default 1.2 * n_rows * n_cols / n_observed.
    epsilon : relative-residual stopping tolerance in (0, 1).
    max_iters : iteration cap.
    """

    tau: float | None = None
    delta: float | None = None
    epsilon: float = 1e-2
    max_iters: int = 50

    def __post_init__(self):
        if self.tau is not None and not self.tau > 0:
            raise ParameterError("tau must be positive")
        if self.delta is not None and not self.delta > 0:
            raise ParameterError("delta must be positive")
        if not 0 < self.epsilon < 1:
            raise ParameterError("epsilon must lie in (0, 1)")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be at least 1")

    def resolved(self, shape: tuple[int, int], n_observed: int) -> tuple[float, float]:
        """Concrete (tau, delta) for a given matrix shape and sample count."""
        n1, n2 = shape
        tau = self.tau if self.tau is not None else 5.0 * np.sqrt(n1 * n2)
        delta = self.delta if self.delta is not None else 1.2 * n1 * n2 / n_observed
        return tau, delta


@dataclass(frozen=True)
class SvtResult:
    """Completed matrix plus convergence diagnostics.

    ``residuals`` holds the relative residual after every iteration;
    ``converged`` implies ``final_residual <= epsilon``.
    """

    completed: np.ndarray
    iterations: int
    final_residual: float
    converged: bool
    residuals: np.ndarray


def _shrink_svd(y: np.ndarray, tau: float) -> tuple[np.ndarray, int]:
    u, s, vh = np.linalg.svd(y, full_matrices=False)
    kept = s - tau
    np.maximum(kept, 0.0, out=kept)
    rank = int(np.count_nonzero(kept))
    return (u * kept) @ vh, rank


def shrink(x_mat, tau: float) -> np.ndarray:
    """Soft-threshold the singular values of a matrix at level tau.

    Returns U diag(max(s - tau, 0)) V^H for the SVD (U, s, V) of the input.
    """
    x_mat = as_complex_matrix(x_mat, "x_mat")
    if tau < 0:
        raise ParameterError("tau must be nonnegative")
    out, _ = _shrink_svd(x_mat, tau)
    return out


def svt_complete(
    data,
    observed,
    params: SvtParams | None = None,
    trace_path=None,
) -> SvtResult:
    """Complete a partially observed matrix by singular value thresholding.

    Parameters
    ----------
    data : array-like
        Matrix values; entries outside the mask are never read.
    observed : array-like of bool
        Observation mask, same shape as ``data``, at least one True entry.
    params : SvtParams, optional
        Iteration controls; defaults resolve from the matrix shape.
    trace_path : path-like, optional
        When given, writes a per-iteration CSV ``iter,residual,rank_estimate``.

    Returns
    -------
    SvtResult

    Raises
    ------
    ParameterError
        If the mask is empty or shapes disagree.
    DivergenceError
        If an iterate turns non-finite (step size too large), reporting
        the iteration index.
    """
    data = as_complex_matrix(data, "data")
    observed = np.asarray(observed, dtype=bool)
    if observed.shape != data.shape:
        raise ShapeError(
            f"mask shape {observed.shape} does not match data shape {data.shape}"
        )
    n_observed = int(observed.sum())
    if n_observed == 0:
        raise ParameterError("observation mask selects no entries")
    params = params or SvtParams()
    tau, delta = params.resolved(data.shape, n_observed)

    obs = np.where(observed, data, 0.0)
    obs_norm = np.linalg.norm(obs)
    y = np.zeros_like(obs)
    residuals: list[float] = []
    trace_rows: list[tuple[int, float, int]] = []
    converged = False
    x_k = y
    k = 0
    for k in range(1, params.max_iters + 1):
        x_k, rank = _shrink_svd(y, tau)
        diff = np.where(observed, obs - x_k, 0.0)
        res = float(np.linalg.norm(diff) / obs_norm) if obs_norm > 0 else 0.0
        if not np.isfinite(res) or not np.all(np.isfinite(x_k)):
            raise DivergenceError(k)
        residuals.append(res)
        trace_rows.append((k, res, rank))
        if res <= params.epsilon:
            converged = True
            break
        y = y + delta * diff
        if not np.all(np.isfinite(y)):
            raise DivergenceError(k)

    if trace_path is not None:
        with open(trace_path, "w", newline="") as f:
            f.write("iter,residual,rank_estimate\n")
            for it, res, rank in trace_rows:
                f.write(f"{it},{res:.17g},{rank}\n")

    return SvtResult(
        completed=x_k,
        iterations=k,
        final_residual=residuals[-1],
        converged=converged,
        residuals=np.asarray(residuals),
    )
