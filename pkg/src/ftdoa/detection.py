"""Failed-element detection by comparing consecutive snapshots.

The reference snapshot (all elements healthy) is compared element-wise
against the current one. A stuck element repeats its previous output, so
its inter-snapshot distance collapses to zero, while healthy elements are
redrawn with fresh source phases and move by O(1). A dead element is
caught separately by its near-zero output magnitude.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ParameterError, ShapeError
from .validation import as_complex_vector


@dataclass(frozen=True)
class LocationSet:
    """Indices of functioning elements within an M-element array."""

    working: np.ndarray
    n_elements: int

    def __post_init__(self):
        working = np.asarray(self.working, dtype=int).ravel()
        working = np.sort(working)
        if working.size and (working[0] < 0 or working[-1] >= self.n_elements):
            raise DomainError("working indices must lie in [0, n_elements)")
        if np.unique(working).size != working.size:
            raise DomainError("working indices must be unique")
        object.__setattr__(self, "working", working)

    @classmethod
    def from_failed(cls, failed, n_elements: int) -> "LocationSet":
        """Build from the complementary set of failed indices."""
        failed = np.asarray(sorted(set(int(i) for i in failed)), dtype=int)
        if failed.size and (failed[0] < 0 or failed[-1] >= n_elements):
            raise DomainError("failed indices must lie in [0, n_elements)")
        mask = np.ones(n_elements, dtype=bool)
        mask[failed] = False
        return cls(working=np.flatnonzero(mask), n_elements=n_elements)

    @property
    def n_working(self) -> int:
        return int(self.working.size)

    @property
    def failed(self) -> np.ndarray:
        mask = np.ones(self.n_elements, dtype=bool)
        mask[self.working] = False
        return np.flatnonzero(mask)

    @property
    def is_complete(self) -> bool:
        return self.n_working == self.n_elements

    def to_csv_line(self) -> str:
        """Working indices as a single CSV line, 1-based."""
        return ",".join(str(i + 1) for i in self.working)


def detect_failures(
    prev,
    curr,
    epsilon: float = 1e-2,
    dead_epsilon: float | None = None,
) -> LocationSet:
    """Classify each element as working or failed from two snapshots.

    Element i is flagged FAILED when either signature fires:

    * stuck output:  ``|prev[i] - curr[i]| < epsilon``
    * dead output:   ``|curr[i]| < dead_epsilon``

    Parameters
    ----------
    prev : array-like
        Snapshot taken while every element was healthy.
    curr : array-like
        Current snapshot, possibly with failures.
    epsilon : float
        Stuck-output threshold, default 1e-2.
    dead_epsilon : float, optional
        Dead-output threshold. Defaults to ``epsilon / 10``; the tighter
        default keeps the chance of a healthy element's output straying
        below it negligible while still catching exact zeros.

    Returns
    -------
    LocationSet
        Working indices, sorted ascending.
    """
    prev = as_complex_vector(prev, name="prev")
    curr = as_complex_vector(curr, name="curr")
    if prev.size != curr.size:
        raise ShapeError(f"snapshot lengths differ: {prev.size} vs {curr.size}")
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    if dead_epsilon is None:
        dead_epsilon = epsilon / 10.0
    elif dead_epsilon < 0:
        raise ParameterError("dead_epsilon must be nonnegative")
    failed = (np.abs(prev - curr) < epsilon) | (np.abs(curr) < dead_epsilon)
    return LocationSet(working=np.flatnonzero(~failed), n_elements=prev.size)
