"""Fault-tolerant direction-of-arrival estimation for uniform linear arrays.

The toolkit simulates ULA snapshots with element failures, detects the
failed elements, recovers the missing data by singular value thresholding
on the snapshot's Hankel lift, and estimates arrival angles with the
rank-filtered matrix pencil method. A CLI and Monte Carlo harness
reproduce the standard RMSE-versus-SNR and RMSE-versus-failures sweeps.
"""

from .arraysim import (
    ArrayConfig,
    FailureSpec,
    SourceSet,
    inject_failures,
    random_sources,
    read_snapshot,
    simulate_snapshot,
    steering_matrix,
    write_snapshot,
)
from .detection import LocationSet, detect_failures
from .estimators import FaultTolerantDOA, MatrixPencilDOA, SVTCompleter
from .exceptions import (
    AmbiguityError,
    DivergenceError,
    DomainError,
    InvalidInputError,
    ParameterError,
    PipelineError,
    RankDeficiencyError,
    ShapeError,
)
from .experiment import (
    ExperimentConfig,
    TrialRecord,
    load_config,
    rmse,
    run_experiment,
    write_reports,
)
from .hankel import (
    build_hankel,
    default_pencil_length,
    dehankel,
    hankel_mask,
    max_pencil_length,
    split_pencil,
    validate_pencil_length,
)
from .linalg import SvdFactors, eig, pinv, svd
from .pencil import (
    DoaEstimate,
    fault_tolerant_estimate,
    pencil_poles,
    poles_to_angles,
    tls_filter,
    tls_matrix_pencil,
)
from .svt import SvtParams, SvtResult, shrink, svt_complete

__version__ = "0.1.0"

__all__ = [
    "AmbiguityError",
    "ArrayConfig",
    "DivergenceError",
    "DoaEstimate",
    "DomainError",
    "ExperimentConfig",
    "FailureSpec",
    "FaultTolerantDOA",
    "InvalidInputError",
    "LocationSet",
    "MatrixPencilDOA",
    "ParameterError",
    "PipelineError",
    "RankDeficiencyError",
    "SVTCompleter",
    "ShapeError",
    "SourceSet",
    "SvdFactors",
    "SvtParams",
    "SvtResult",
    "TrialRecord",
    "build_hankel",
    "default_pencil_length",
    "dehankel",
    "detect_failures",
    "eig",
    "fault_tolerant_estimate",
    "hankel_mask",
    "inject_failures",
    "load_config",
    "max_pencil_length",
    "pencil_poles",
    "pinv",
    "poles_to_angles",
    "random_sources",
    "read_snapshot",
    "rmse",
    "run_experiment",
    "shrink",
    "simulate_snapshot",
    "split_pencil",
    "steering_matrix",
    "svd",
    "svt_complete",
    "tls_filter",
    "tls_matrix_pencil",
    "validate_pencil_length",
    "write_reports",
    "write_snapshot",
]
