"""Matrix pencil DOA estimation with rank filtering and failure recovery.

The snapshot of N narrowband sources is a sum of complex exponentials with
poles z_n = exp(+1j * (2*pi/wavelength) * spacing * sin(theta_n)). Lifting
the snapshot to its Hankel matrix, truncating to rank N (the total
least squares noise filter) and solving the shifted pencil recovers the
poles as the dominant eigenvalues of pinv(x0) @ x1; arcsin inversion of
their arguments yields the angles.

``fault_tolerant_estimate`` wraps the full pipeline: detect failed
elements, complete the masked Hankel lift by singular value thresholding,
project back to a snapshot and run the pencil solve.
"""

from dataclasses import dataclass, replace

import numpy as np

from .arraysim import ArrayConfig
from .detection import LocationSet, detect_failures
from .exceptions import (
    AmbiguityError,
    ParameterError,
    PipelineError,
    RankDeficiencyError,
    ShapeError,
)
from .hankel import (
    build_hankel,
    default_pencil_length,
    dehankel,
    hankel_mask,
    split_pencil,
    validate_pencil_length,
)
from .linalg import eig, pinv
from .svt import SvtParams, SvtResult, svt_complete
from .validation import as_complex_matrix, as_complex_vector

# eigenvalues below this fraction of the largest modulus count as zero
_EIG_RTOL = 1e-8
# slack for arcsin arguments that graze +-1 through rounding
_ARCSIN_SLACK = 1e-10


@dataclass(frozen=True)
class DoaEstimate:
    """Estimated arrival angles with the poles and diagnostics behind them.

    angles_deg is sorted ascending; poles is ordered to match. sv_gap is
    the ratio s_N / s_{N+1} of the raw data matrix's singular values, a
    conditioning indicator (inf when the matrix has no N+1-th value).
    n_failed, svt and location are populated by the fault-tolerant
    pipeline.
    """

    angles_deg: np.ndarray
    poles: np.ndarray
    sv_gap: float
    n_failed: int = 0
    svt: SvtResult | None = None
    location: LocationSet | None = None

    def __post_init__(self):
        angles = np.asarray(self.angles_deg, dtype=float)
        poles = np.asarray(self.poles, dtype=np.complex128)
        if np.any(np.diff(angles) < 0):
            raise ParameterError("angles_deg must be sorted ascending")
        if np.any(np.abs(angles) > 90.0):
            raise ParameterError("angles_deg must lie in [-90, 90]")
        object.__setattr__(self, "angles_deg", angles)
        object.__setattr__(self, "poles", poles)


def tls_filter(x_mat, n_sources: int) -> np.ndarray:
    """Best rank-N approximation (truncated SVD) of a data matrix.

    Keeps the N largest singular values with their singular vectors; this
    is the total-least-squares style noise filter applied before the
    pencil split. Full-rank requests return the input unchanged.
    """
    x_mat = as_complex_matrix(x_mat, "x_mat")
    if n_sources < 1:
        raise ParameterError("n_sources must be at least 1")
    if n_sources >= min(x_mat.shape):
        return x_mat.copy()
    u, s, vh = np.linalg.svd(x_mat, full_matrices=False)
    return (u[:, :n_sources] * s[:n_sources]) @ vh[:n_sources]


def pencil_poles(x0, x1, n_sources: int) -> np.ndarray:
    """Solve the shifted matrix pair for the N dominant exponential poles.

    Computes the eigenvalues of pinv(x0) @ x1, where x1 holds the same
    data windows as x0 advanced one sample, and returns the N of largest
    modulus. Raises RankDeficiencyError when fewer than N eigenvalues are
    numerically nonzero.
    """
    x0 = as_complex_matrix(x0, "x0")
    x1 = as_complex_matrix(x1, "x1")
    if x0.shape != x1.shape:
        raise ShapeError(f"pencil pair shapes differ: {x0.shape} vs {x1.shape}")
    if n_sources < 1:
        raise ParameterError("n_sources must be at least 1")
    if x0.shape[1] < n_sources:
        raise ParameterError(
            f"pencil width {x0.shape[1]} cannot resolve {n_sources} sources"
        )
    eigvals = eig(pinv(x0) @ x1)
    moduli = np.abs(eigvals)
    largest = moduli.max()
    n_nonzero = int(np.count_nonzero(moduli > _EIG_RTOL * largest)) if largest > 0 else 0
    if n_nonzero < n_sources:
        raise RankDeficiencyError(
            f"only {n_nonzero} numerically nonzero eigenvalues, need {n_sources}"
        )
    order = np.argsort(-moduli)
    return eigvals[order[:n_sources]]


def poles_to_angles(poles, cfg: ArrayConfig) -> np.ndarray:
    """Invert pole arguments to arrival angles in degrees, sorted ascending.

    theta = arcsin(arg(z) * wavelength / (2*pi*spacing)). A pole whose
    argument maps outside [-1, 1] (beyond rounding slack) raises
    AmbiguityError naming the pole; the boundary itself is accepted.
    """
    poles = np.asarray(poles, dtype=np.complex128).ravel()
    ratio = cfg.wavelength / (2.0 * np.pi * cfg.spacing)
    u = np.angle(poles) * ratio
    for pole, ui in zip(poles, u):
        if abs(ui) > 1.0 + _ARCSIN_SLACK:
            raise AmbiguityError(complex(pole))
    u = np.clip(u, -1.0, 1.0)
    return np.sort(np.rad2deg(np.arcsin(u)))


def tls_matrix_pencil(
    x,
    n_sources: int,
    cfg: ArrayConfig | None = None,
    length: int | None = None,
) -> DoaEstimate:
    """Estimate N arrival angles from one snapshot.

    Parameters
    ----------
    x : array-like
        Complex snapshot of the full array.
    n_sources : int
        Number of impinging sources N.
    cfg : ArrayConfig, optional
        Array geometry; defaults to half-wavelength spacing for len(x)
        elements.
    length : int, optional
        Pencil parameter L; defaults to M//3 clamped into the admissible
        window N <= L <= max_pencil_length(M).

    Returns
    -------
    DoaEstimate
        Sorted angles, matching poles, and the s_N/s_{N+1} gap of the raw
        Hankel matrix.
    """
    x = as_complex_vector(x, name="x")
    if cfg is None:
        cfg = ArrayConfig(n_elements=x.size)
    elif cfg.n_elements != x.size:
        raise ShapeError(
            f"snapshot length {x.size} does not match cfg.n_elements {cfg.n_elements}"
        )
    if n_sources < 1:
        raise ParameterError("n_sources must be at least 1")
    if length is None:
        length = default_pencil_length(x.size, n_sources)
    validate_pencil_length(x.size, length, n_sources)
    data = build_hankel(x, length)
    s = np.linalg.svd(data, compute_uv=False)
    sv_gap = float(s[n_sources - 1] / s[n_sources]) if n_sources < s.size else np.inf
    filtered = tls_filter(data, n_sources)
    x0, x1 = split_pencil(filtered)
    poles = pencil_poles(x0, x1, n_sources)
    angles = poles_to_angles(poles, cfg)
    # reorder poles to track the sorted angle list
    ratio = cfg.wavelength / (2.0 * np.pi * cfg.spacing)
    poles = poles[np.argsort(np.angle(poles) * ratio)]
    return DoaEstimate(angles_deg=angles, poles=poles, sv_gap=sv_gap)


def fault_tolerant_estimate(
    prev,
    curr,
    n_sources: int,
    cfg: ArrayConfig | None = None,
    length: int | None = None,
    svt_params: SvtParams | None = None,
    detect_epsilon: float = 1e-2,
    dead_epsilon: float | None = None,
    force_completion: bool = False,
) -> DoaEstimate:
    """Detect failures, complete the missing data, then estimate the DOAs.

    With no detected failures the pencil solve runs directly on ``curr``
    (set ``force_completion`` to push a fully observed snapshot through the
    completion stage anyway). Otherwise the failed elements' anti-diagonals
    are masked out of the Hankel lift, the matrix is completed by singular
    value thresholding, projected back to a snapshot and solved.

    Parameters
    ----------
    prev : array-like
        Snapshot taken while every element was healthy.
    curr : array-like
        Current snapshot, possibly carrying failed elements.
    n_sources : int
        Number of impinging sources N.
    cfg, length, svt_params, detect_epsilon, dead_epsilon :
        Forwarded to the respective stages.
    force_completion : bool
        Run the completion stage even when no element is flagged.

    Returns
    -------
    DoaEstimate
        With ``n_failed``, ``svt`` diagnostics and the detected
        ``location`` attached.

    Raises
    ------
    PipelineError
        Wrapping any stage failure with the stage name (``detection``,
        ``completion`` or ``estimation``).
    """
    prev = as_complex_vector(prev, name="prev")
    curr = as_complex_vector(curr, name="curr")
    if cfg is None:
        cfg = ArrayConfig(n_elements=curr.size)
    try:
        loc = detect_failures(prev, curr, epsilon=detect_epsilon, dead_epsilon=dead_epsilon)
    except ValueError as e:
        raise PipelineError("detection", e) from e
    n_failed = loc.n_elements - loc.n_working

    if loc.is_complete and not force_completion:
        try:
            est = tls_matrix_pencil(curr, n_sources, cfg, length)
        except (ValueError, RuntimeError) as e:
            raise PipelineError("estimation", e) from e
        return replace(est, n_failed=0, location=loc)

    if length is None:
        length = default_pencil_length(curr.size, n_sources)
    try:
        data = build_hankel(curr, length)
        mask = hankel_mask(loc, length)
        result = svt_complete(data, mask, svt_params)
        recovered = dehankel(result.completed)
    except (ValueError, RuntimeError) as e:
        raise PipelineError("completion", e) from e
    try:
        est = tls_matrix_pencil(recovered, n_sources, cfg, length)
    except (ValueError, RuntimeError) as e:
        raise PipelineError("estimation", e) from e
    return replace(est, n_failed=n_failed, svt=result, location=loc)
