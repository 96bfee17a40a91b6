"""Hankel lifting between snapshots and pencil data matrices.

A length-M snapshot x maps to the (M-L) x (L+1) Hankel matrix with entry
(i, j) = x[i + j]; the window size L is the pencil parameter. For N
exponential sources the lift has rank N, which is the structure both the
completion and the pencil solve exploit. Failed element k blanks the whole
anti-diagonal i + j = k of the lift.
"""

import numpy as np

from .detection import LocationSet
from .exceptions import ParameterError, ShapeError
from .validation import as_complex_matrix, as_complex_vector


def max_pencil_length(n_elements: int) -> int:
    """Largest admissible window: M//2 for even M, (M+1)//2 for odd M."""
    if n_elements % 2 == 0:
        return n_elements // 2
    return (n_elements + 1) // 2


def validate_pencil_length(
    n_elements: int, length: int, n_sources: int | None = None
) -> None:
    """Check N <= L <= max_pencil_length(M); raise ParameterError otherwise."""
    upper = max_pencil_length(n_elements)
    lower = 1 if n_sources is None else n_sources
    if not lower <= length <= upper:
        raise ParameterError(
            f"pencil length {length} outside [{lower}, {upper}] for "
            f"{n_elements} elements"
            + (f" and {n_sources} sources" if n_sources is not None else "")
        )


def default_pencil_length(n_elements: int, n_sources: int | None = None) -> int:
    """M//3, clamped into the admissible window (M/3..2M/3 is the sweet spot)."""
    upper = max_pencil_length(n_elements)
    lower = 1 if n_sources is None else n_sources
    if lower > upper:
        raise ParameterError(
            f"no admissible pencil length for {n_elements} elements "
            f"and {n_sources} sources"
        )
    return min(max(n_elements // 3, lower), upper)


def build_hankel(x, length: int) -> np.ndarray:
    """Lift a snapshot to its (M-L) x (L+1) Hankel data matrix."""
    x = as_complex_vector(x, name="x")
    validate_pencil_length(x.size, length)
    return np.lib.stride_tricks.sliding_window_view(x, length + 1).copy()


def split_pencil(x_mat) -> tuple[np.ndarray, np.ndarray]:
    """Drop the last / first column to form the shifted matrix pair.

    Returns (x0, x1) where x1 contains the same windows as x0 advanced by
    one sample; both have one column fewer than the input.
    """
    x_mat = as_complex_matrix(x_mat, "x_mat")
    if x_mat.shape[1] < 2:
        raise ShapeError("pencil split needs at least two columns")
    return x_mat[:, :-1], x_mat[:, 1:]


def hankel_mask(loc: LocationSet, length: int) -> np.ndarray:
    """Observation mask of the Hankel lift for a partially failed array.

    Entry (i, j) is True iff element i + j is working, so each failed
    element blanks one full anti-diagonal.
    """
    validate_pencil_length(loc.n_elements, length)
    ok = np.zeros(loc.n_elements, dtype=bool)
    ok[loc.working] = True
    return np.lib.stride_tricks.sliding_window_view(ok, length + 1).copy()


def dehankel(x_mat) -> np.ndarray:
    """Project a matrix back to a snapshot by anti-diagonal averaging.

    This is the Frobenius-orthogonal projection onto Hankel structure.
    Output entry k is the mean over {(i, j): i + j = k}; the mean is
    computed as first-element-plus-mean-of-deviations so exactly-Hankel
    input round-trips bit for bit.
    """
    x_mat = as_complex_matrix(x_mat, "x_mat")
    rows, cols = x_mat.shape
    n = rows + cols - 1
    # first element of each anti-diagonal: top row, then last column
    ref = np.concatenate([x_mat[0, :], x_mat[1:, -1]])
    idx = np.arange(rows)[:, None] + np.arange(cols)[None, :]
    dev = np.zeros(n, dtype=np.complex128)
    np.add.at(dev, idx, x_mat - ref[idx])
    counts = np.bincount(idx.ravel(), minlength=n)
    return ref + dev / counts
