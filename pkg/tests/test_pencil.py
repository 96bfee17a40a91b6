import numpy as np
import pytest

from ftdoa import (
    AmbiguityError,
    ArrayConfig,
    DivergenceError,
    FailureSpec,
    ParameterError,
    PipelineError,
    RankDeficiencyError,
    ShapeError,
    SvtParams,
    fault_tolerant_estimate,
    inject_failures,
    pencil_poles,
    poles_to_angles,
    random_sources,
    rmse,
    simulate_snapshot,
    tls_filter,
    tls_matrix_pencil,
)

from conftest import SIX_ANGLES, random_complex


def pole_of(angle_deg, cfg=ArrayConfig(4)):
    return np.exp(
        1j * 2 * np.pi / cfg.wavelength * cfg.spacing * np.sin(np.deg2rad(angle_deg))
    )


def direct_pencil_pair(poles, amplitudes, rows, cols):
    """Shifted window pair built directly from the exponential model."""
    poles = np.asarray(poles)
    amplitudes = np.asarray(amplitudes)
    x0 = np.zeros((rows, cols), dtype=complex)
    x1 = np.zeros((rows, cols), dtype=complex)
    for i in range(rows):
        for j in range(cols):
            x0[i, j] = np.sum(amplitudes * poles ** (i + j))
            x1[i, j] = np.sum(amplitudes * poles ** (i + j + 1))
    return x0, x1


class TestTlsFilter:
    def test_rank_n_input_unchanged(self):
        rng = np.random.default_rng(0)
        x = random_complex(rng, 6, 2) @ random_complex(rng, 2, 5)
        out = tls_filter(x, 2)
        assert np.linalg.norm(out - x) <= 1e-12 * np.linalg.norm(x)

    def test_eckart_young_small_perturbation(self):
        rng = np.random.default_rng(1)
        base = np.outer(random_complex(rng, 5), random_complex(rng, 4))
        noise = random_complex(rng, 5, 4)
        noise *= 1e-6 / np.linalg.norm(noise)
        out = tls_filter(base + noise, 1)
        assert np.linalg.norm(out - base) <= 2e-6

    def test_full_rank_request_is_identity(self):
        rng = np.random.default_rng(2)
        x = random_complex(rng, 3, 4)
        assert np.allclose(tls_filter(x, 3), x, atol=1e-12)

    def test_zero_sources_rejected(self):
        with pytest.raises(ParameterError):
            tls_filter(np.eye(3), 0)


class TestPencilPoles:
    def test_single_pole(self):
        z = pole_of(30.0)  # exactly 1j at half-wavelength spacing
        x0, x1 = direct_pencil_pair([z], [1.0], rows=5, cols=3)
        poles = pencil_poles(x0, x1, 1)
        assert abs(poles[0] - 1j) <= 1e-10

    def test_two_poles_any_order(self):
        z = [pole_of(0.0), pole_of(30.0)]
        x0, x1 = direct_pencil_pair(z, [1.0, 1.0], rows=6, cols=4)
        poles = np.sort_complex(pencil_poles(x0, x1, 2))
        assert np.allclose(poles, np.sort_complex(np.array([1.0, 1j])), atol=1e-8)

    def test_unit_modulus_for_unit_sources(self):
        rng = np.random.default_rng(3)
        z = [pole_of(a) for a in (-20.0, 8.0, 41.0)]
        amps = np.exp(1j * rng.uniform(-np.pi, np.pi, 3))
        x0, x1 = direct_pencil_pair(z, amps, rows=8, cols=5)
        poles = pencil_poles(x0, x1, 3)
        assert np.allclose(np.abs(poles), 1.0, atol=1e-6)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            pencil_poles(np.ones((3, 2)), np.ones((3, 3)), 1)

    def test_rank_deficiency(self):
        z = [pole_of(0.0), pole_of(30.0)]
        x0, x1 = direct_pencil_pair(z, [1.0, 1.0], rows=6, cols=4)
        with pytest.raises(RankDeficiencyError):
            pencil_poles(x0, x1, 3)


class TestPolesToAngles:
    def test_quarter_turn_maps_to_thirty_degrees(self):
        out = poles_to_angles([np.exp(1j * np.pi / 2)], ArrayConfig(4))
        assert out[0] == pytest.approx(30.0, abs=1e-12)

    def test_zero_argument_is_broadside(self):
        assert poles_to_angles([1.0 + 0j], ArrayConfig(4))[0] == 0.0

    def test_boundary_accepted(self):
        out = poles_to_angles([np.exp(1j * np.pi)], ArrayConfig(4))
        assert out[0] == pytest.approx(90.0, abs=1e-9)

    def test_out_of_domain_names_the_pole(self):
        cfg = ArrayConfig(4, spacing=0.3)
        with pytest.raises(AmbiguityError) as exc:
            poles_to_angles([np.exp(1j * np.pi)], cfg)
        assert abs(exc.value.pole - np.exp(1j * np.pi)) < 1e-12


class TestTlsMatrixPencil:
    def test_noiseless_six_sources_exact(self, ula100):
        src = random_sources(SIX_ANGLES, seed=1)
        x = simulate_snapshot(ula100, src, np.inf)
        est = tls_matrix_pencil(x, 6, ula100, length=33)
        assert np.max(np.abs(est.angles_deg - np.array(SIX_ANGLES))) <= 1e-8
        assert est.sv_gap > 1e8

    def test_noisy_errors_are_small(self, ula100):
        src = random_sources(SIX_ANGLES, seed=2)
        x = simulate_snapshot(ula100, src, 24.0, seed=3)
        est = tls_matrix_pencil(x, 6, ula100, length=33)
        assert np.max(np.abs(est.angles_deg - np.array(SIX_ANGLES))) < 0.05

    def test_length_below_source_count_rejected(self, ula100):
        src = random_sources(SIX_ANGLES, seed=1)
        x = simulate_snapshot(ula100, src, np.inf)
        with pytest.raises(ParameterError):
            tls_matrix_pencil(x, 6, ula100, length=1)

    def test_noiseless_exactness_property(self):
        # random scenarios: N <= 8 well-separated angles, M >= 4N
        for seed in range(10):
            rng = np.random.default_rng([21, seed])
            n = int(rng.integers(1, 9))
            angles = np.sort(rng.uniform(-60.0, 60.0, n))
            while n > 1 and np.min(np.diff(angles)) < 3.0:
                angles = np.sort(rng.uniform(-60.0, 60.0, n))
            m = 4 * n + int(rng.integers(0, 20))
            cfg = ArrayConfig(max(m, 4))
            x = simulate_snapshot(cfg, random_sources(angles, rng), np.inf)
            est = tls_matrix_pencil(x, n, cfg)
            assert np.max(np.abs(est.angles_deg - angles)) <= 1e-8

    def test_permutation_invariance(self, ula100):
        fwd = random_sources(SIX_ANGLES, seed=4)
        perm = np.array([3, 0, 5, 1, 4, 2])
        from ftdoa import SourceSet

        shuffled = SourceSet(
            doas_deg=fwd.doas_deg[perm],
            phases=fwd.phases[perm],
            amplitudes=fwd.amplitudes[perm],
        )
        a = tls_matrix_pencil(simulate_snapshot(ula100, fwd, np.inf), 6, ula100)
        b = tls_matrix_pencil(simulate_snapshot(ula100, shuffled, np.inf), 6, ula100)
        assert np.allclose(a.angles_deg, b.angles_deg, atol=1e-8)
        assert np.allclose(np.sort_complex(a.poles), np.sort_complex(b.poles), atol=1e-8)

    def test_shift_identity_brute_force(self):
        # direct construction on tiny cases, no Hankel machinery involved
        for angles in ([12.0], [-30.0, 25.0]):
            poles = np.array([pole_of(a) for a in angles])
            n = len(angles)
            x0, x1 = direct_pencil_pair(poles, np.ones(n), rows=12 - n, cols=n + 1)
            got = np.sort_complex(pencil_poles(x0, x1, n))
            assert np.allclose(got, np.sort_complex(poles), atol=1e-8)

    def test_swapped_pair_negates_angles(self, ula100):
        from ftdoa import build_hankel, split_pencil

        src = random_sources(SIX_ANGLES, seed=5)
        x = simulate_snapshot(ula100, src, np.inf)
        filtered = tls_filter(build_hankel(x, 33), 6)
        x0, x1 = split_pencil(filtered)
        fwd = poles_to_angles(pencil_poles(x0, x1, 6), ula100)
        rev = poles_to_angles(pencil_poles(x1, x0, 6), ula100)
        assert np.allclose(rev, -fwd[::-1], atol=1e-8)


class TestFaultTolerantEstimate:
    def test_no_failures_bypasses_completion(self, ula100):
        seq = np.random.SeedSequence(6)
        s1, s2, n1, n2 = seq.spawn(4)
        prev = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s1), 24.0, n1)
        curr = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s2), 24.0, n2)
        est = fault_tolerant_estimate(prev, curr, 6, ula100)
        direct = tls_matrix_pencil(curr, 6, ula100)
        assert np.array_equal(est.angles_deg, direct.angles_deg)
        assert est.n_failed == 0 and est.svt is None
        assert est.location is not None and est.location.is_complete

    def test_five_failures_recovered(self, ula100):
        seq = np.random.SeedSequence(7)
        s1, s2, n1, n2 = seq.spawn(4)
        prev = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s1), 24.0, n1)
        curr = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s2), 24.0, n2)
        failed = (4, 23, 51, 77, 96)
        obs = inject_failures(
            curr, FailureSpec(indices=failed, model="previous"), prev=prev
        )
        est = fault_tolerant_estimate(prev, obs, 6, ula100)
        assert est.n_failed == 5
        assert est.svt is not None
        assert np.array_equal(est.location.failed, failed)
        assert rmse(SIX_ANGLES, est.angles_deg) < 0.02

    def test_more_failures_degrade_rmse(self, ula100):
        # matched seeds, 20 vs 30 failed elements, averaged over trials
        def mean_rmse(n_failed):
            values = []
            for t in range(15):
                seq = np.random.SeedSequence([8, t])
                s1, s2, n1, n2, s_loc = seq.spawn(5)
                prev = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s1), 24.0, n1)
                curr = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s2), 24.0, n2)
                fail = np.random.default_rng(s_loc).choice(100, n_failed, replace=False)
                obs = inject_failures(
                    curr,
                    FailureSpec(indices=tuple(int(i) for i in fail), model="previous"),
                    prev=prev,
                )
                est = fault_tolerant_estimate(prev, obs, 6, ula100)
                values.append(rmse(SIX_ANGLES, est.angles_deg))
            return np.mean(values)

        assert mean_rmse(30) > mean_rmse(20)

    def test_force_completion_flag(self, ula100):
        src = random_sources(SIX_ANGLES, seed=9)
        x = simulate_snapshot(ula100, src, np.inf)
        est = fault_tolerant_estimate(x * 0 + 1, x, 6, ula100, force_completion=True)
        assert est.svt is not None
        assert est.n_failed == 0
        assert rmse(SIX_ANGLES, est.angles_deg) < 0.1

    def test_completion_stage_error_is_tagged(self, ula100):
        seq = np.random.SeedSequence(10)
        s1, s2, n1, n2 = seq.spawn(4)
        prev = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s1), 24.0, n1)
        curr = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s2), 24.0, n2)
        obs = inject_failures(curr, FailureSpec(indices=(3,), model="zero"))
        bad = SvtParams(delta=1e80, epsilon=1e-9, max_iters=60)
        with pytest.raises(PipelineError) as exc:
            fault_tolerant_estimate(prev, obs, 6, ula100, svt_params=bad)
        assert exc.value.stage == "completion"
        assert isinstance(exc.value.__cause__, DivergenceError)

    def test_estimation_stage_error_is_tagged(self, ula100):
        seq = np.random.SeedSequence(11)
        s1, s2, n1, n2 = seq.spawn(4)
        prev = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s1), 24.0, n1)
        curr = simulate_snapshot(ula100, random_sources(SIX_ANGLES, s2), 24.0, n2)
        with pytest.raises(PipelineError) as exc:
            fault_tolerant_estimate(prev, curr, 40, ula100, length=33)
        assert exc.value.stage == "estimation"
