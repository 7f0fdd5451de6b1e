import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import linregress

from transport.bounds import levy_tail, levy_width_gain, levy_width_mi
from transport.ensemble import (
    DEFAULT_TAIL_ELLS,
    convex_hull,
    conditional_entropy,
    dispersion_stats,
    ensemble_statistics,
    histogram,
    min_area_rectangle,
    moments,
    power_law_fit,
    rescale_samples,
    run_ensemble,
    sample_transport,
    scan_dimensions,
    standard_error,
    tail_curve,
    tail_probability,
)
from transport.errors import DegenerateGeometryError, DomainError, RetryLimitError
from transport.models import EnsembleConfig, TransportSample
from transport.states import bell_state


def config(**overrides):
    params = dict(d_b=2, d_c=2, n_samples=200, master_seed=7)
    params.update(overrides)
    return EnsembleConfig(**params)


class TestRunEnsemble:
    def test_product_states_never_gain(self):
        samples = run_ensemble(config(state_class="product", n_samples=500))
        assert max(s.gain_over_e for s in samples) <= 1e-9

    def test_general_states_can_gain(self):
        samples = run_ensemble(config(n_samples=500))
        assert any(s.gain_over_e > 0 for s in samples)

    def test_deterministic(self):
        first = run_ensemble(config(d_b=2, d_c=3, n_samples=30))
        second = run_ensemble(config(d_b=2, d_c=3, n_samples=30))
        assert first == second

    def test_thread_count_does_not_change_results(self):
        serial = run_ensemble(config(n_samples=40))
        parallel = run_ensemble(config(n_samples=40), threads=4)
        assert serial == parallel
        assert [s.sample_index for s in parallel] == list(range(40))

    def test_sample_does_not_depend_on_ensemble_size(self):
        small = run_ensemble(config(n_samples=5))
        assert small[3] == sample_transport(config(n_samples=500), 3)

    def test_qubit_product_gap_starts_at_zero(self):
        for s in run_ensemble(config(state_class="product", n_samples=50)):
            assert abs(s.gap_before) <= 1e-12
            assert s.gap_after >= -1e-9

    def test_product_gap_with_degenerate_levels_is_nonnegative(self):
        samples = run_ensemble(config(state_class="product", d_b=2, d_c=3, n_samples=50))
        for s in samples:
            assert s.gap_before >= -1e-10
            assert s.gain_over_e == pytest.approx(s.gap_before - s.gap_after, abs=1e-9)
        # produto de marginais passivas não é passivo quando H_BC tem níveis degenerados
        assert any(s.gap_before > 1e-6 for s in samples)

    def test_zero_gap_never_gains(self):
        classes = ("general", "product", "separable_hdu", "separable_pfhs")
        for d_c in (2, 3):
            for state_class in classes:
                for s in run_ensemble(config(state_class=state_class, d_c=d_c, n_samples=150)):
                    if s.gap_before <= 1e-12:
                        assert s.gain_over_e <= 1e-9

    def test_unitary_phases_change_the_draws(self):
        plain = run_ensemble(config(n_samples=20))
        phased = run_ensemble(config(n_samples=20, unitary_phases=True))
        assert plain != phased
        for s in phased:
            assert s.gain_over_e == pytest.approx(s.gap_before - s.gap_after, abs=1e-9)

    def test_separable_classes(self):
        for state_class in ("separable_hdu", "separable_pfhs"):
            samples = run_ensemble(config(state_class=state_class, n_samples=20))
            assert len(samples) == 20
            assert all(s.gap_before >= -1e-9 for s in samples)

    def test_fixed_state(self):
        samples = run_ensemble(config(state_class="fixed", n_samples=20), fixed_state=bell_state())
        gaps = {round(s.gap_before, 12) for s in samples}
        assert len(gaps) == 1

    def test_fixed_state_is_required(self):
        with pytest.raises(DomainError):
            run_ensemble(config(state_class="fixed", n_samples=2))

    def test_retry_limit_reports_sample(self):
        cfg = config(d_b=3, d_c=3, n_samples=2, grain=1e-6, gap_max_attempts=3)
        with pytest.raises(RetryLimitError) as excinfo:
            run_ensemble(cfg)
        assert excinfo.value.sample_index == 0

    def test_pfhs_dimension_is_validated(self):
        with pytest.raises(ValidationError):
            config(d_b=3, d_c=3, state_class="separable_pfhs")


class TestStatistics:
    def test_histogram(self):
        h = histogram([0.1, 0.2, 0.2, 0.9, 5.0], bins=2, range=(0.0, 1.0))
        np.testing.assert_array_equal(h.counts, [3, 1])
        np.testing.assert_allclose(h.edges, [0.0, 0.5, 1.0])
        assert h.total == 4

    def test_histogram_rejects_empty(self):
        with pytest.raises(DomainError):
            histogram([], bins=10)

    def test_moments(self):
        mean, sd = moments([1.0, 2.0, 3.0, 4.0])
        assert mean == pytest.approx(2.5)
        assert sd == pytest.approx(math.sqrt(1.25))
        assert standard_error([1.0, 2.0, 3.0, 4.0]) == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)

    def test_moments_need_two_values(self):
        with pytest.raises(DomainError):
            moments([1.0])

    def test_tail_probability(self):
        values = [-1.0, 0.0, 0.0, 1.0]
        assert tail_probability(values, 0.5) == pytest.approx(0.5)
        assert tail_probability(values, 1.0) == 0.0
        assert tail_curve(values, [0.0, 0.5]) == [(0.0, 0.5), (0.5, 0.5)]
        with pytest.raises(DomainError):
            tail_probability(values, -1.0)

    def test_ensemble_statistics(self):
        samples = run_ensemble(config(state_class="product", n_samples=100))
        stats = ensemble_statistics(samples)
        assert stats.n == 100
        assert stats.max_gain <= 1e-9
        assert stats.identity_violations == 0
        assert stats.envelope_violations == 0
        assert stats.se_gain > 0


class TestRescale:
    def test_divides_by_max_abs(self):
        rescaled = rescale_samples([[2.0, -1.0], [-4.0, 0.5]])
        np.testing.assert_allclose(rescaled.points, [[0.5, -1.0], [-1.0, 0.5]])
        assert rescaled.scale == (4.0, 1.0)
        assert not rescaled.degenerate

    def test_zero_column(self):
        rescaled = rescale_samples([[0.0, 1.0], [0.0, -2.0]])
        np.testing.assert_allclose(rescaled.points[:, 0], 0.0)
        assert rescaled.zero_columns == (True, False)
        assert rescaled.degenerate

    def test_transport_samples_use_mi_then_gain(self):
        samples = [
            TransportSample(gain_over_e=0.2, delta_mi=-0.4, d_b=2, d_c=2, sample_index=0, gap_before=0.3, gap_after=0.1),
            TransportSample(gain_over_e=-0.1, delta_mi=0.2, d_b=2, d_c=2, sample_index=1, gap_before=0.0, gap_after=0.1),
        ]
        np.testing.assert_allclose(rescale_samples(samples).points, [[-1.0, 1.0], [0.5, -0.5]])

    def test_empty(self):
        with pytest.raises(DomainError):
            rescale_samples([])


class TestGeometry:
    def test_square_hull(self):
        pts = [[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]]
        hull = convex_hull(pts)
        assert not hull.degenerate
        assert len(hull.vertices) == 4
        assert hull.contains(pts).all()
        assert not hull.contains([[2.0, 2.0]])[0]

    def test_collinear_points_are_degenerate(self):
        hull = convex_hull([[0, 0], [1, 1], [2, 2]])
        assert hull.degenerate
        with pytest.raises(DegenerateGeometryError):
            min_area_rectangle(hull)

    def test_too_few_points(self):
        assert convex_hull([[0, 0], [1, 1], [0, 0]]).degenerate

    def test_axis_aligned_rectangle(self):
        rect = min_area_rectangle(convex_hull([[0, 0], [4, 0], [4, 1], [0, 1]]))
        assert rect.width == pytest.approx(1.0)
        assert rect.length == pytest.approx(4.0)
        assert rect.angle == pytest.approx(0.0)
        assert rect.ratio == pytest.approx(0.25)
        assert rect.area == pytest.approx(4.0)

    def test_rotated_rectangle(self):
        theta = 0.3
        c, s = math.cos(theta), math.sin(theta)
        corners = np.array([[0, 0], [3, 0], [3, 1], [0, 1]], dtype=float)
        rotated = corners @ np.array([[c, s], [-s, c]])
        rect = min_area_rectangle(convex_hull(rotated))
        assert rect.area == pytest.approx(3.0)
        assert rect.angle == pytest.approx(theta)

    def test_diamond_has_single_orientation(self):
        diamond = [[1, 0], [0, 1], [-1, 0], [0, -1]]
        rect = min_area_rectangle(convex_hull(diamond))
        assert rect.area == pytest.approx(2.0)
        assert rect.angle == pytest.approx(math.pi / 4)
        assert rect.ratio == pytest.approx(1.0)

    def test_rectangle_contains_hull(self, np_rng):
        pts = np_rng.normal(size=(200, 2)) * [1.0, 0.3]
        hull = convex_hull(pts)
        rect = min_area_rectangle(hull)
        c, s = math.cos(rect.angle), math.sin(rect.angle)
        x = pts[:, 0] * c + pts[:, 1] * s
        y = -pts[:, 0] * s + pts[:, 1] * c
        sides = sorted([x.max() - x.min(), y.max() - y.min()])
        assert sides[0] == pytest.approx(rect.width)
        assert sides[1] == pytest.approx(rect.length)


class TestConditionalEntropy:
    def test_functional_relation_is_zero(self):
        x = np.linspace(-1, 1, 400)
        pairs = np.column_stack([x, x])
        assert conditional_entropy(pairs, bins=20, range=((-1, 1), (-1, 1))) == pytest.approx(0.0, abs=1e-12)

    def test_independent_uniform_is_large(self, np_rng):
        pairs = np_rng.uniform(-1, 1, size=(20000, 2))
        value = conditional_entropy(pairs, bins=10, range=((-1, 1), (-1, 1)))
        assert value == pytest.approx(math.log(10), abs=0.01)

    def test_needs_two_bins(self):
        with pytest.raises(DomainError):
            conditional_entropy([[0.0, 0.0]], bins=1)


class TestPowerLawFit:
    def test_exact_power_law(self):
        x = np.array([4.0, 9.0, 16.0, 25.0])
        fit = power_law_fit(x, 3.0 * x ** -1.5)
        assert fit.exponent == pytest.approx(-1.5)
        assert math.exp(fit.intercept) == pytest.approx(3.0)
        assert fit.r_squared == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "x,y",
        [([1, 2], [1, 2]), ([1, 2, 3], [1, 2]), ([1, 2, 3], [1, -2, 3])],
    )
    def test_invalid_inputs(self, x, y):
        with pytest.raises(DomainError):
            power_law_fit(x, y)


class TestDispersion:
    def test_dispersion_stats(self):
        samples = run_ensemble(config(d_b=2, d_c=3, n_samples=150))
        stats = dispersion_stats(samples, ells=[0.0, 0.01])
        assert stats.conditional_entropy >= 0
        assert stats.rect is not None
        assert 0 < stats.rect.ratio <= 1
        assert stats.tail_curve[0][0] == 0.0
        assert stats.sd_gain > 0

    def test_scan_dimensions(self):
        points = scan_dimensions([config(n_samples=20), config(d_b=3, d_c=3, n_samples=20)])
        assert [(p.config.d_b, p.config.d_c) for p in points] == [(2, 2), (3, 3)]
        assert points[1].stats.n == 20


class TestSymmetry:
    def test_general_means_vanish(self):
        samples = run_ensemble(config(n_samples=2000))
        stats = ensemble_statistics(samples)
        assert abs(stats.mean_gain) <= 5 * stats.se_gain
        assert abs(stats.mean_mi) <= 5 * stats.se_mi

    @pytest.mark.slow
    def test_general_mi_mean_at_desk_scale(self):
        stats = ensemble_statistics(run_ensemble(config(n_samples=100_000), threads=4))
        assert abs(stats.mean_mi) <= 5 * stats.se_mi

    @pytest.mark.slow
    def test_concentration_with_dimension(self):
        small = ensemble_statistics(run_ensemble(config(d_b=2, d_c=2, n_samples=10_000)))
        large = ensemble_statistics(run_ensemble(config(d_b=4, d_c=4, n_samples=10_000)))
        assert large.sd_gain < small.sd_gain
        assert large.sd_mi < small.sd_mi

    @pytest.mark.slow
    def test_hdu_is_more_concentrated_than_pfhs(self):
        hdu = ensemble_statistics(run_ensemble(config(state_class="separable_hdu", n_samples=10_000)))
        pfhs = ensemble_statistics(run_ensemble(config(state_class="separable_pfhs", n_samples=10_000)))
        assert abs(hdu.mean_gain - pfhs.mean_gain) <= 3 * math.hypot(hdu.se_gain, pfhs.se_gain)
        assert hdu.sd_gain <= pfhs.sd_gain


class TestDimensionTrends:
    @pytest.mark.slow
    def test_product_mean_shift_follows_power_law(self):
        points = scan_dimensions(
            [config(state_class="product", d_b=d, d_c=d, n_samples=10_000) for d in (2, 3, 4, 5)],
            threads=4,
        )
        means = [p.stats.mean_gain for p in points]
        assert all(m < 0 for m in means[1:])
        assert all(a > b for a, b in zip(means, means[1:]))
        fit = power_law_fit([p.config.d_bc for p in points[1:]], [-m for m in means[1:]])
        assert 0.5 <= fit.exponent <= 1.1

    @pytest.mark.slow
    def test_concentration_over_dimensions(self):
        points = scan_dimensions(
            [config(d_b=d, d_c=d, n_samples=10_000) for d in (2, 3, 4, 5, 6)], threads=4
        )
        sd = [p.stats.sd_mi for p in points]
        assert all(a > b for a, b in zip(sd, sd[1:]))
        fit = linregress([p.config.d_bc for p in points], 1.0 / np.array(sd))
        assert fit.rvalue ** 2 > 0.9

        for p in points:
            width_mi = levy_width_mi(p.config.d_b, p.config.d_c)
            width_gain = levy_width_gain(p.config.d_b, p.config.d_c)
            mi = [s.delta_mi for s in p.samples]
            gain = [s.gain_over_e for s in p.samples]
            for ell in DEFAULT_TAIL_ELLS:
                assert tail_probability(mi, ell) <= levy_tail(ell, width_mi).clamped
                assert tail_probability(gain, ell) <= levy_tail(ell, width_gain).clamped

    @pytest.mark.slow
    @pytest.mark.parametrize("d_c", [2, 3])
    def test_separable_mean_between_product_and_general(self, d_c):
        stats = {
            state_class: ensemble_statistics(
                run_ensemble(config(state_class=state_class, d_c=d_c, n_samples=10_000), threads=4)
            )
            for state_class in ("product", "separable_pfhs", "general")
        }
        product, separable, general = stats["product"], stats["separable_pfhs"], stats["general"]
        assert product.mean_gain < separable.mean_gain
        assert separable.mean_gain <= general.mean_gain + 3 * math.hypot(separable.se_gain, general.se_gain)

    @pytest.mark.slow
    def test_dispersion_shrinks_at_high_dimension(self):
        small, large = scan_dimensions(
            [config(d_b=3, d_c=5, n_samples=10_000), config(d_b=6, d_c=6, n_samples=10_000)], threads=4
        )
        small_stats = dispersion_stats(small.samples, bins=20)
        large_stats = dispersion_stats(large.samples, bins=20)
        assert large_stats.rect.ratio < small_stats.rect.ratio
        assert large_stats.conditional_entropy < small_stats.conditional_entropy
