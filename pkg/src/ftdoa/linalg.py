"""Dense complex linear-algebra kernels.

Thin wrappers over LAPACK (through numpy.linalg) that pin down the
conventions the rest of the toolkit relies on: descending singular values,
right singular vectors stored column-wise, and an explicit rank cutoff for
the pseudoinverse.
"""

from typing import NamedTuple

import numpy as np

from .validation import as_complex_matrix, check_square


class SvdFactors(NamedTuple):
    """Singular value decomposition a = u @ diag(s) @ v.conj().T.

    u and v hold orthonormal columns (left and right singular vectors);
    s is real, nonnegative and sorted descending.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def svd(a) -> SvdFactors:
    """Compact SVD with min(rows, cols) singular values.

    Parameters
    ----------
    a : array-like
        Complex matrix, all entries finite.

    Returns
    -------
    SvdFactors
        Factors such that ``u @ np.diag(s) @ v.conj().T`` reconstructs ``a``.
    """
    a = as_complex_matrix(a, "a")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return SvdFactors(u=u, s=s, v=vh.conj().T)


def pinv(a) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below ``s_max * max(rows, cols) * eps`` are treated as
    zero, so rank-deficient input is handled without amplifying noise.
    """
    a = as_complex_matrix(a, "a")
    u, s, v = svd(a)
    if s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=np.complex128)
    cutoff = s[0] * max(a.shape) * np.finfo(np.float64).eps
    inv_s = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    return (v * inv_s) @ u.conj().T


def eig(a) -> np.ndarray:
    """Eigenvalues of a square complex matrix, in no particular order."""
    a = as_complex_matrix(a, "a")
    check_square(a, "a")
    return np.linalg.eigvals(a)
