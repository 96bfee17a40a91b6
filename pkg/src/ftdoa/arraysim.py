"""Uniform linear array snapshot simulation.

Narrowband plane waves impinge on an M-element uniform linear array (ULA).
The received snapshot is x = A(theta) s + w, where A is the steering matrix,
s holds one complex amplitude per source and w is circular complex Gaussian
noise. Element failures are injected by overwriting individual entries.

Conventions
-----------
* Element m (0-based) at angle theta contributes the phase factor
  exp(+1j * (2*pi/wavelength) * spacing * m * sin(theta)).
* Source power is 1 per source; the per-element noise power for a target
  SNR of q dB is 10**(-q/10).
* Element indices are 0-based in code and 1-based in all file formats.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ParameterError, ShapeError
from .validation import as_angles_deg, as_complex_vector

Seed = int | np.random.SeedSequence | np.random.Generator

FAILURE_MODELS = ("zero", "previous", "constant")


@dataclass(frozen=True)
class ArrayConfig:
    """Geometry and physics of a uniform linear array.

    Parameters
    ----------
    n_elements : int
        Number of array elements M, at least 2.
    spacing : float
        Inter-element spacing d, in the same units as ``wavelength``.
        Defaults to half a wavelength.
    wavelength : float
        Carrier wavelength, normalized to 1 by default.
    """

    n_elements: int
    spacing: float = 0.5
    wavelength: float = 1.0

    def __post_init__(self):
        if self.n_elements < 2:
            raise ParameterError("n_elements must be at least 2")
        if not self.spacing > 0:
            raise ParameterError("spacing must be positive")
        if not self.wavelength > 0:
            raise ParameterError("wavelength must be positive")


@dataclass(frozen=True)
class SourceSet:
    """Narrowband sources: angles off broadside, phases and amplitudes.

    All three arrays have one entry per source. Angles are degrees inside
    the open (-90, 90) window, phases radians in [-pi, pi], amplitudes
    nonnegative.
    """

    doas_deg: np.ndarray
    phases: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        doas = as_angles_deg(self.doas_deg)
        phases = np.asarray(self.phases, dtype=float)
        amps = np.asarray(self.amplitudes, dtype=float)
        if not (doas.shape == phases.shape == amps.shape):
            raise ShapeError("doas_deg, phases and amplitudes must have equal length")
        if np.any(np.abs(phases) > math.pi):
            raise DomainError("phases must lie in [-pi, pi]")
        if np.any(amps < 0):
            raise DomainError("amplitudes must be nonnegative")
        object.__setattr__(self, "doas_deg", doas)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sources(self) -> int:
        return self.doas_deg.size

    @property
    def signal(self) -> np.ndarray:
        """Complex source amplitudes s_n = a_n * exp(1j * phase_n)."""
        return self.amplitudes * np.exp(1j * self.phases)


@dataclass(frozen=True)
class FailureSpec:
    """Which elements fail and what a failed element outputs.

    model is one of ``zero`` (output clamps to 0), ``previous`` (output
    repeats the element's last healthy sample) or ``constant`` (output
    clamps to ``value``).
    """

    indices: tuple[int, ...] = ()
    model: str = "zero"
    value: complex = 0j

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if any(i < 0 for i in idx):
            raise DomainError("failure indices must be nonnegative")
        if len(set(idx)) != len(idx):
            raise DomainError("failure indices must be unique")
        if self.model not in FAILURE_MODELS:
            raise ParameterError(
                f"unknown failure model {self.model!r}, expected one of {FAILURE_MODELS}"
            )
        object.__setattr__(self, "indices", idx)


def steering_matrix(cfg: ArrayConfig, doas_deg) -> np.ndarray:
    """Steering matrix of the array for the given arrival angles.

    Parameters
    ----------
    cfg : ArrayConfig
        Array geometry.
    doas_deg : array-like
        Arrival angles in degrees, each strictly inside (-90, 90).

    Returns
    -------
    np.ndarray
        Complex matrix of shape (M, N); entry (m, n) equals
        ``exp(+1j * (2*pi/wavelength) * spacing * m * sin(theta_n))``,
        so every entry has unit modulus.
    """
    doas = as_angles_deg(doas_deg)
    spatial = (2.0 * np.pi / cfg.wavelength) * cfg.spacing * np.sin(np.deg2rad(doas))
    m = np.arange(cfg.n_elements)
    return np.exp(1j * np.outer(m, spatial))


def random_sources(doas_deg, seed: Seed) -> SourceSet:
    """Unit-amplitude sources with phases drawn i.i.d. uniform on [-pi, pi].

    Deterministic for a fixed seed. One source per entry of ``doas_deg``.
    """
    doas = as_angles_deg(doas_deg)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(-math.pi, math.pi, size=doas.size)
    return SourceSet(doas_deg=doas, phases=phases, amplitudes=np.ones(doas.size))


def simulate_snapshot(
    cfg: ArrayConfig, sources: SourceSet, snr_db: float, seed: Seed = 0
) -> np.ndarray:
    """One complex snapshot x = A s + w of the full array.

    Parameters
    ----------
    cfg : ArrayConfig
        Array geometry.
    sources : SourceSet
        Impinging sources.
    snr_db : float
        Per-element SNR in dB against unit source power; ``inf`` disables
        noise entirely.
    seed : int, SeedSequence or Generator
        Noise seed. Unused when ``snr_db`` is infinite.

    Returns
    -------
    np.ndarray
        Complex vector of length M. Noise is circular complex Gaussian
        with per-element power 10**(-snr_db/10), drawn as
        ``sqrt(p/2) * (randn + 1j*randn)``.
    """
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ParameterError("snr_db must be a real number or +inf")
    x = steering_matrix(cfg, sources.doas_deg) @ sources.signal
    if math.isinf(snr_db):
        return x
    noise_power = 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng(seed)
    scale = math.sqrt(noise_power / 2.0)
    w = scale * (
        rng.standard_normal(cfg.n_elements) + 1j * rng.standard_normal(cfg.n_elements)
    )
    return x + w


def inject_failures(
    x, spec: FailureSpec, prev=None
) -> np.ndarray:
    """Overwrite failed entries of a snapshot according to the failure model.

    ``prev`` (the element's last healthy snapshot) is required only for the
    ``previous`` model. Entries outside ``spec.indices`` are untouched.
    """
    x = as_complex_vector(x, name="x")
    out = x.copy()
    if not spec.indices:
        return out
    idx = np.asarray(spec.indices)
    if idx.max() >= x.size:
        raise DomainError(
            f"failure index {idx.max()} out of range for {x.size} elements"
        )
    if spec.model == "zero":
        out[idx] = 0.0
    elif spec.model == "constant":
        out[idx] = spec.value
    else:
        if prev is None:
            raise ParameterError("the 'previous' failure model requires prev")
        prev = as_complex_vector(prev, n=x.size, name="prev")
        out[idx] = prev[idx]
    return out


def write_snapshot(x, path) -> None:
    """Write a snapshot as CSV with header ``index,re,im``.

    Indices are 1-based; values carry 17 significant digits so the
    round trip through text is exact.
    """
    x = as_complex_vector(x, name="x")
    with open(path, "w", newline="") as f:
        f.write("index,re,im\n")
        for i, v in enumerate(x, start=1):
            f.write(f"{i},{v.real:.17g},{v.imag:.17g}\n")


def read_snapshot(path) -> np.ndarray:
    """Read a snapshot CSV produced by :func:`write_snapshot`."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["index", "re", "im"]:
            raise ParameterError(f"{path}: expected header 'index,re,im'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParameterError(f"{path}:{lineno}: expected 3 columns")
            try:
                rows.append((int(row[0]), float(row[1]), float(row[2])))
            except ValueError as e:
                raise ParameterError(f"{path}:{lineno}: {e}") from e
    if not rows:
        raise ParameterError(f"{path}: no data rows")
    indices = sorted(i for i, _, _ in rows)
    if indices != list(range(1, len(rows) + 1)):
        raise ParameterError(f"{path}: element indices must cover 1..{len(rows)}")
    x = np.empty(len(rows), dtype=np.complex128)
    for i, re, im in rows:
        x[i - 1] = complex(re, im)
    return x
