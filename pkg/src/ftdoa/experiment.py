"""Monte Carlo experiment runner and report writer.

Sweeps SNR and failure counts over seeded trials, runs the fault-tolerant
pipeline on each, and aggregates angle RMSE. Seeds derive from the master
seed by a fixed splitting rule so runs are reproducible: trial (i_snr,
i_fail, t) seeds a ``SeedSequence([seed, i_snr, i_fail, t])`` whose five
spawned children drive, in order, the reference-source phases, the
current-source phases, the reference noise, the current noise, and the
failure locations.
"""

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arraysim import (
    FAILURE_MODELS,
    ArrayConfig,
    FailureSpec,
    inject_failures,
    random_sources,
    simulate_snapshot,
)
from .detection import detect_failures
from .exceptions import ParameterError, ShapeError
from .pencil import fault_tolerant_estimate
from .svt import SvtParams


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment sweep."""

    array: ArrayConfig
    doas_deg: tuple[float, ...]
    snr_db_list: tuple[float, ...] = (24.0,)
    failure_counts: tuple[int, ...] = (0,)
    failure_model: str = "previous"
    failure_value: complex = 0j
    trials: int = 20
    seed: int = 0
    pencil_length: int | None = None
    svt: SvtParams = field(default_factory=SvtParams)
    detect_epsilon: float = 1e-2
    dead_epsilon: float | None = None

    def __post_init__(self):
        doas = tuple(float(a) for a in self.doas_deg)
        if len(set(doas)) != len(doas):
            raise ParameterError("doas_deg must be distinct")
        if not doas:
            raise ParameterError("doas_deg must be nonempty")
        if not self.snr_db_list:
            raise ParameterError("snr_db_list must be nonempty")
        if not self.failure_counts:
            raise ParameterError("failure_counts must be nonempty")
        if any(n < 0 or n >= self.array.n_elements for n in self.failure_counts):
            raise ParameterError("failure counts must lie in [0, n_elements)")
        if self.failure_model not in FAILURE_MODELS:
            raise ParameterError(f"unknown failure model {self.failure_model!r}")
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")
        if self.seed < 0:
            raise ParameterError("seed must be nonnegative")
        object.__setattr__(self, "doas_deg", doas)
        object.__setattr__(self, "snr_db_list", tuple(float(s) for s in self.snr_db_list))
        object.__setattr__(self, "failure_counts", tuple(int(n) for n in self.failure_counts))


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one Monte Carlo trial."""

    snr_db: float
    n_failed: int
    trial: int
    rmse_deg: float
    est_deg: tuple[float, ...]
    detection_exact: bool
    svt_iterations: int
    wall_time_s: float
    error: str | None = None


def rmse(truth_deg, est_deg) -> float:
    """Root mean square angular error after rank pairing.

    Both lists are sorted ascending and paired by rank; the result is
    sqrt(mean((truth - est)**2)) in degrees.
    """
    truth = np.sort(np.asarray(truth_deg, dtype=float).ravel())
    est = np.sort(np.asarray(est_deg, dtype=float).ravel())
    if truth.size != est.size:
        raise ShapeError(f"cannot pair {truth.size} truth angles with {est.size} estimates")
    if truth.size == 0:
        raise ShapeError("angle lists must be nonempty")
    return float(np.sqrt(np.mean((truth - est) ** 2)))


def _run_trial(cfg: ExperimentConfig, i_snr: int, i_fail: int, t: int) -> TrialRecord:
    snr = cfg.snr_db_list[i_snr]
    n_failed = cfg.failure_counts[i_fail]
    seq = np.random.SeedSequence([cfg.seed, i_snr, i_fail, t])
    s_src_prev, s_src_curr, s_noise_prev, s_noise_curr, s_loc = seq.spawn(5)

    prev = simulate_snapshot(
        cfg.array, random_sources(cfg.doas_deg, s_src_prev), snr, s_noise_prev
    )
    curr = simulate_snapshot(
        cfg.array, random_sources(cfg.doas_deg, s_src_curr), snr, s_noise_curr
    )
    if n_failed:
        chosen = np.random.default_rng(s_loc).choice(
            cfg.array.n_elements, size=n_failed, replace=False
        )
        spec = FailureSpec(
            indices=tuple(int(i) for i in chosen),
            model=cfg.failure_model,
            value=cfg.failure_value,
        )
        observed = inject_failures(curr, spec, prev=prev)
        injected = frozenset(spec.indices)
    else:
        observed = curr
        injected = frozenset()

    loc = detect_failures(
        prev, observed, epsilon=cfg.detect_epsilon, dead_epsilon=cfg.dead_epsilon
    )
    detection_exact = frozenset(int(i) for i in loc.failed) == injected

    start = time.perf_counter()
    try:
        est = fault_tolerant_estimate(
            prev,
            observed,
            n_sources=len(cfg.doas_deg),
            cfg=cfg.array,
            length=cfg.pencil_length,
            svt_params=cfg.svt,
            detect_epsilon=cfg.detect_epsilon,
            dead_epsilon=cfg.dead_epsilon,
        )
    except (ValueError, RuntimeError) as e:
        return TrialRecord(
            snr_db=snr,
            n_failed=n_failed,
            trial=t,
            rmse_deg=math.nan,
            est_deg=(),
            detection_exact=detection_exact,
            svt_iterations=0,
            wall_time_s=time.perf_counter() - start,
            error=str(e),
        )
    return TrialRecord(
        snr_db=snr,
        n_failed=n_failed,
        trial=t,
        rmse_deg=rmse(cfg.doas_deg, est.angles_deg),
        est_deg=tuple(float(a) for a in est.angles_deg),
        detection_exact=detection_exact,
        svt_iterations=est.svt.iterations if est.svt is not None else 0,
        wall_time_s=time.perf_counter() - start,
    )


def run_experiment(cfg: ExperimentConfig) -> list[TrialRecord]:
    """Run every (snr, failure count, trial) combination of the sweep.

    Trial failures (estimator errors) are captured in the record's
    ``error`` field rather than aborting the sweep. Output order is by
    (snr index, failure-count index, trial).
    """
    records = []
    for i_snr in range(len(cfg.snr_db_list)):
        for i_fail in range(len(cfg.failure_counts)):
            for t in range(cfg.trials):
                records.append(_run_trial(cfg, i_snr, i_fail, t))
    return records


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _aggregate(records):
    """Group records by (snr_db, n_failed) preserving first appearance order."""
    groups: dict[tuple[float, int], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.snr_db, r.n_failed), []).append(r)
    rows = []
    for (snr, n_failed), recs in groups.items():
        ok = [r.rmse_deg for r in recs if r.error is None]
        rows.append(
            {
                "snr_db": snr,
                "n_failed": n_failed,
                "n_trials": len(recs),
                "n_errors": len(recs) - len(ok),
                "mean_rmse_deg": float(np.mean(ok)) if ok else math.nan,
                "std_rmse_deg": float(np.std(ok)) if ok else math.nan,
            }
        )
    return rows


def write_reports(records, out_dir, n_elements: int) -> dict[str, Path]:
    """Write per-trial, aggregate and plot-data CSVs into ``out_dir``.

    Returns the paths keyed by report name: ``trials``, ``summary``,
    ``rmse_vs_snr`` and ``rmse_vs_working``.
    """
    if not records:
        raise ParameterError("no records to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_angles = max(len(r.est_deg) for r in records)

    trials_path = out / "trials.csv"
    with open(trials_path, "w", newline="") as f:
        est_cols = [f"est_deg_{i + 1}" for i in range(n_angles)]
        f.write(
            ",".join(
                ["snr_db", "n_failed", "trial", "rmse_deg", "detection_exact",
                 "svt_iterations", "wall_time_s", "error"] + est_cols
            )
            + "\n"
        )
        for r in records:
            est = [_fmt(a) for a in r.est_deg] + [""] * (n_angles - len(r.est_deg))
            f.write(
                ",".join(
                    [
                        _fmt(r.snr_db),
                        str(r.n_failed),
                        str(r.trial),
                        _fmt(r.rmse_deg),
                        "true" if r.detection_exact else "false",
                        str(r.svt_iterations),
                        _fmt(r.wall_time_s),
                        r.error.replace(",", ";") if r.error else "",
                    ]
                    + est
                )
                + "\n"
            )

    agg = _aggregate(records)
    summary_path = out / "summary.csv"
    with open(summary_path, "w", newline="") as f:
        f.write("snr_db,n_failed,n_trials,n_errors,mean_rmse_deg,std_rmse_deg\n")
        for row in agg:
            f.write(
                f"{_fmt(row['snr_db'])},{row['n_failed']},{row['n_trials']},"
                f"{row['n_errors']},{_fmt(row['mean_rmse_deg'])},"
                f"{_fmt(row['std_rmse_deg'])}\n"
            )

    snr_path = out / "rmse_vs_snr.csv"
    with open(snr_path, "w", newline="") as f:
        f.write("n_failed,snr_db,mean_rmse_deg,std_rmse_deg\n")
        for row in sorted(agg, key=lambda r: (r["n_failed"], r["snr_db"])):
            f.write(
                f"{row['n_failed']},{_fmt(row['snr_db'])},"
                f"{_fmt(row['mean_rmse_deg'])},{_fmt(row['std_rmse_deg'])}\n"
            )

    working_path = out / "rmse_vs_working.csv"
    with open(working_path, "w", newline="") as f:
        f.write("snr_db,n_working,mean_rmse_deg,std_rmse_deg\n")
        for row in sorted(
            agg, key=lambda r: (r["snr_db"], -(n_elements - r["n_failed"]))
        ):
            f.write(
                f"{_fmt(row['snr_db'])},{n_elements - row['n_failed']},"
                f"{_fmt(row['mean_rmse_deg'])},{_fmt(row['std_rmse_deg'])}\n"
            )

    return {
        "trials": trials_path,
        "summary": summary_path,
        "rmse_vs_snr": snr_path,
        "rmse_vs_working": working_path,
    }


_ARRAY_KEYS = {"n_elements", "spacing", "wavelength"}
_SVT_KEYS = {"tau", "delta", "epsilon", "max_iters"}
_TOP_KEYS = {
    "array",
    "doas_deg",
    "snr_db_list",
    "failure_counts",
    "failure_model",
    "failure_value",
    "trials",
    "seed",
    "pencil_length",
    "svt",
    "detect_epsilon",
    "dead_epsilon",
}


def _check_keys(mapping, allowed, where):
    unknown = set(mapping) - allowed
    if unknown:
        raise ParameterError(f"unknown {where} keys: {sorted(unknown)}")


def _parse_snr(value):
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ParameterError(f"invalid snr value {value!r}")
    return float(value)


def load_config(path) -> ExperimentConfig:
    """Load an ExperimentConfig from a JSON document.

    The schema mirrors the dataclass fields; unknown keys are errors.
    SNR entries may be numbers or the string "inf".
    """
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ParameterError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParameterError(f"{path}: top-level document must be an object")
    _check_keys(doc, _TOP_KEYS, "config")

    array_doc = doc.get("array", {})
    if not isinstance(array_doc, dict):
        raise ParameterError("'array' must be an object")
    _check_keys(array_doc, _ARRAY_KEYS, "array")
    if "n_elements" not in array_doc:
        raise ParameterError("'array.n_elements' is required")
    array = ArrayConfig(
        n_elements=int(array_doc["n_elements"]),
        spacing=float(array_doc.get("spacing", 0.5)),
        wavelength=float(array_doc.get("wavelength", 1.0)),
    )

    svt_doc = doc.get("svt", {})
    if not isinstance(svt_doc, dict):
        raise ParameterError("'svt' must be an object")
    _check_keys(svt_doc, _SVT_KEYS, "svt")
    svt = SvtParams(
        tau=None if svt_doc.get("tau") is None else float(svt_doc["tau"]),
        delta=None if svt_doc.get("delta") is None else float(svt_doc["delta"]),
        epsilon=float(svt_doc.get("epsilon", 1e-2)),
        max_iters=int(svt_doc.get("max_iters", 50)),
    )

    if "doas_deg" not in doc:
        raise ParameterError("'doas_deg' is required")
    value = doc.get("failure_value", 0)
    if isinstance(value, list):
        if len(value) != 2:
            raise ParameterError("'failure_value' list form must be [re, im]")
        value = complex(float(value[0]), float(value[1]))
    else:
        value = complex(float(value), 0.0)

    pencil_length = doc.get("pencil_length")
    dead_epsilon = doc.get("dead_epsilon")
    return ExperimentConfig(
        array=array,
        doas_deg=tuple(float(a) for a in doc["doas_deg"]),
        snr_db_list=tuple(_parse_snr(s) for s in doc.get("snr_db_list", [24.0])),
        failure_counts=tuple(int(n) for n in doc.get("failure_counts", [0])),
        failure_model=doc.get("failure_model", "previous"),
        failure_value=value,
        trials=int(doc.get("trials", 20)),
        seed=int(doc.get("seed", 0)),
        pencil_length=None if pencil_length is None else int(pencil_length),
        svt=svt,
        detect_epsilon=float(doc.get("detect_epsilon", 1e-2)),
        dead_epsilon=None if dead_epsilon is None else float(dead_epsilon),
    )
