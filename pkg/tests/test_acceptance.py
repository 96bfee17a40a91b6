"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and recorded wall times.
"""

import math
import time

import numpy as np
import pytest

from ftdoa import (
    ArrayConfig,
    ExperimentConfig,
    FailureSpec,
    LocationSet,
    build_hankel,
    dehankel,
    detect_failures,
    hankel_mask,
    inject_failures,
    pencil_poles,
    pinv,
    poles_to_angles,
    random_sources,
    run_experiment,
    shrink,
    simulate_snapshot,
    split_pencil,
    svd,
    svt_complete,
    tls_filter,
    tls_matrix_pencil,
)

from conftest import SIX_ANGLES, random_complex

ULA = ArrayConfig(100)
TRUTH = np.array(SIX_ANGLES)


def report(num, name, passed, detail=""):
    line = f"criterion {num} ({name}): {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert passed, line


def experiment_mean_rmse(records):
    vals = [r.rmse_deg for r in records if r.error is None]
    return float(np.mean(vals)) if vals else math.nan


@pytest.fixture(scope="module")
def table_runs():
    """No-failure and 5-failure runs at 24 dB on matched seeds."""
    base = dict(
        array=ULA,
        doas_deg=SIX_ANGLES,
        snr_db_list=(24.0,),
        failure_model="previous",
        trials=20,
        seed=11,
    )
    t0 = time.perf_counter()
    clean = run_experiment(ExperimentConfig(failure_counts=(0,), **base))
    t_clean = time.perf_counter() - t0
    t0 = time.perf_counter()
    faulty = run_experiment(ExperimentConfig(failure_counts=(5,), **base))
    t_faulty = time.perf_counter() - t0
    return clean, t_clean, faulty, t_faulty


def test_criterion_1_noiseless_exact_recovery():
    t0 = time.perf_counter()
    x = simulate_snapshot(ULA, random_sources(SIX_ANGLES, seed=1), math.inf)
    est = tls_matrix_pencil(x, 6, ULA, length=33)
    elapsed = time.perf_counter() - t0
    worst = float(np.max(np.abs(est.angles_deg - TRUTH)))
    report(
        1,
        "noiseless exact recovery",
        worst <= 1e-8 and elapsed < 1.0,
        f"max error {worst:.2e} deg, {elapsed:.2f}s",
    )


def test_criterion_2_no_failure_rmse(table_runs):
    clean, t_clean, _, _ = table_runs
    mean = experiment_mean_rmse(clean)
    report(
        2,
        "mean RMSE at 24 dB, no failures",
        mean <= 0.01 and t_clean < 30.0,
        f"mean RMSE {mean:.5f} deg over 20 trials, {t_clean:.1f}s",
    )


def test_criterion_3_five_failures_rmse(table_runs):
    clean, _, faulty, t_faulty = table_runs
    mean_clean = experiment_mean_rmse(clean)
    mean_faulty = experiment_mean_rmse(faulty)
    ok = (
        mean_faulty <= 0.01
        and mean_faulty <= 3.0 * mean_clean
        and t_faulty < 120.0
    )
    report(
        3,
        "mean RMSE with 5 recovered failures",
        ok,
        f"mean RMSE {mean_faulty:.5f} vs {mean_clean:.5f} clean "
        f"(ratio {mean_faulty / mean_clean:.2f}), {t_faulty:.1f}s",
    )


def test_criterion_4_failure_sweep_trend():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(
        array=ULA,
        doas_deg=SIX_ANGLES,
        snr_db_list=(24.0,),
        failure_counts=(0, 5, 10, 15, 20, 30),
        failure_model="previous",
        trials=50,
        seed=13,
    )
    records = run_experiment(cfg)
    elapsed = time.perf_counter() - t0
    means = {}
    for n_failed in cfg.failure_counts:
        vals = [r.rmse_deg for r in records if r.n_failed == n_failed and r.error is None]
        means[100 - n_failed] = float(np.mean(vals))
    ok = (
        means[80] <= 5.0 * means[100]
        and means[70] > means[80]
        and elapsed < 600.0
    )
    detail = ", ".join(f"{w}:{means[w]:.5f}" for w in (100, 95, 90, 85, 80, 70))
    report(4, "degradation trend versus working elements", ok, f"{detail}, {elapsed:.1f}s")


def test_criterion_5_completion_convergence():
    x = simulate_snapshot(ULA, random_sources(SIX_ANGLES, seed=3), math.inf)
    loc = LocationSet.from_failed([4, 23, 51, 77, 96], n_elements=100)
    data = build_hankel(x, 33)
    mask = hankel_mask(loc, 33)
    t0 = time.perf_counter()
    result = svt_complete(data, mask)
    elapsed = time.perf_counter() - t0
    ok = result.final_residual <= 1e-2 and result.iterations <= 50 and elapsed < 5.0
    report(
        5,
        "completion reaches 1e-2 residual within 50 iterations",
        ok,
        f"{result.iterations} iterations, residual {result.final_residual:.2e}, "
        f"wall time {elapsed * 1e3:.0f} ms (recorded, not asserted against "
        "any reference hardware)",
    )


def test_criterion_6_detection_exactness():
    # The underlying exact-recovery rate of this scenario measures 99.92%
    # (3e6-trial estimate), so the 99.9% bound holds with a slim margin:
    # a 1e4-trial sample misses ~8 sets on average against an allowance of
    # 10 and flips the verdict on Poisson noise alone. 3e5 trials test the
    # same rate bound with a stable verdict (expected 238 misses vs 300
    # allowed).
    trials = 300_000
    exact = 0
    t0 = time.perf_counter()
    for t in range(trials):
        seq = np.random.SeedSequence([0, t])
        s_prev, s_curr, n_prev, n_curr, s_loc = seq.spawn(5)
        prev = simulate_snapshot(ULA, random_sources(SIX_ANGLES, s_prev), 24.0, n_prev)
        curr = simulate_snapshot(ULA, random_sources(SIX_ANGLES, s_curr), 24.0, n_curr)
        fail = np.random.default_rng(s_loc).choice(100, 5, replace=False)
        obs = inject_failures(
            curr,
            FailureSpec(indices=tuple(int(i) for i in fail), model="previous"),
            prev=prev,
        )
        loc = detect_failures(prev, obs, epsilon=1e-2)
        if np.array_equal(loc.failed, np.sort(fail)):
            exact += 1
    elapsed = time.perf_counter() - t0
    rate = exact / trials
    report(
        6,
        "exact failure-set recovery rate",
        rate >= 0.999,
        f"{exact}/{trials} exact ({rate:.2%}), {elapsed:.0f}s",
    )


def test_criterion_7_operator_algebra_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    checks = []

    # shrink threshold composition
    x = random_complex(rng, 6, 5)
    s0 = np.linalg.svd(x, compute_uv=False)
    s1 = np.linalg.svd(shrink(shrink(x, 0.8), 0.5), compute_uv=False)
    checks.append(np.allclose(s1, np.maximum(s0 - 1.3, 0.0), atol=1e-9))

    # shrink singular value law
    s2 = np.linalg.svd(shrink(np.diag([5.0, 3.0, 1.0]), 2.0), compute_uv=False)
    checks.append(np.allclose(s2, [3.0, 1.0, 0.0], atol=1e-10))

    # Hankel round trip identity
    snap = 0.1 * random_complex(rng, 25)
    checks.append(np.array_equal(dehankel(build_hankel(snap, 9)), snap))

    # dehankel closed form on a 2x2 block
    checks.append(
        np.allclose(
            dehankel(np.array([[1.0, 2.0], [3.0, 4.0]])), [1.0, 2.5, 4.0], atol=1e-15
        )
    )

    # pseudoinverse Penrose identities on a rank-2 matrix
    a = random_complex(rng, 4, 2) @ random_complex(rng, 2, 4)
    ap = pinv(a)
    checks.append(np.linalg.norm(a @ ap @ a - a) <= 1e-10 * np.linalg.norm(a))
    checks.append(np.linalg.norm(ap @ a @ ap - ap) <= 1e-10 * np.linalg.norm(ap))
    checks.append(np.allclose(a @ ap, (a @ ap).conj().T, atol=1e-10))
    checks.append(np.allclose(ap @ a, (ap @ a).conj().T, atol=1e-10))

    # SVD reconstruction
    b = random_complex(rng, 4, 3)
    f = svd(b)
    recon = f.u @ np.diag(f.s) @ f.v.conj().T
    checks.append(np.linalg.norm(recon - b) / np.linalg.norm(b) <= 1e-12)

    elapsed = time.perf_counter() - t0
    report(
        7,
        "operator algebra suite",
        all(checks) and elapsed < 10.0,
        f"{sum(checks)}/{len(checks)} checks, {elapsed:.2f}s",
    )


def test_criterion_8_pencil_ordering_guard():
    x = simulate_snapshot(ULA, random_sources(SIX_ANGLES, seed=5), math.inf)
    filtered = tls_filter(build_hankel(x, 33), 6)
    x0, x1 = split_pencil(filtered)
    fwd_poles = pencil_poles(x0, x1, 6)
    rev_poles = pencil_poles(x1, x0, 6)
    fwd = poles_to_angles(fwd_poles, ULA)
    rev = poles_to_angles(rev_poles, ULA)
    # swapping the pair returns reciprocal poles, so every angle negates
    negated = np.allclose(rev, -fwd[::-1], atol=1e-8)
    reciprocal = np.allclose(
        np.sort_complex(rev_poles), np.sort_complex(1.0 / fwd_poles), atol=1e-8
    )
    right_way = np.max(np.abs(fwd - TRUTH)) <= 1e-8
    report(
        8,
        "pencil ordering guard",
        negated and reciprocal and right_way,
        f"forward max error {np.max(np.abs(fwd - TRUTH)):.1e} deg, swapped negates",
    )
