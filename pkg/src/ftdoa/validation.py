"""Input validation helpers shared by all numerical routines."""

import numpy as np

from .exceptions import DomainError, InvalidInputError, ShapeError


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex128 array with at least one row and column.

    Raises ShapeError for wrong dimensionality and InvalidInputError for
    NaN/Inf entries.
    """
    a = np.asarray(a)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got {a.ndim}-D")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"{name} must have at least one row and column, got {a.shape}")
    a = a.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains NaN or infinite entries")
    return a


def as_complex_vector(x, n: int | None = None, name: str = "snapshot") -> np.ndarray:
    """Coerce to a 1-D complex128 array, optionally of fixed length."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got {x.ndim}-D")
    if x.size < 1:
        raise ShapeError(f"{name} must be nonempty")
    x = x.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} contains NaN or infinite entries")
    if n is not None and x.size != n:
        raise ShapeError(f"{name} has length {x.size}, expected {n}")
    return x


def as_angles_deg(doas_deg, name: str = "doas_deg") -> np.ndarray:
    """Coerce to a 1-D float array of angles inside the open (-90, 90) window."""
    doas = np.atleast_1d(np.asarray(doas_deg, dtype=float))
    if doas.ndim != 1 or doas.size < 1:
        raise ShapeError(f"{name} must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(doas)):
        raise InvalidInputError(f"{name} contains NaN or infinite entries")
    if np.any(doas <= -90.0) or np.any(doas >= 90.0):
        raise DomainError(f"{name} must lie strictly inside (-90, 90) degrees")
    return doas


def check_square(a: np.ndarray, name: str = "matrix") -> None:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got {a.shape}")
