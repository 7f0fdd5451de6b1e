import math

import numpy as np
import pytest

from transport.bounds import (
    LN2,
    LN4,
    LINEAR_OFFSET,
    TURNING_POINT,
    QmpSpectra,
    binary_entropy,
    envelope,
    gamma,
    inv_binary_entropy_upper,
    levy_overlay,
    levy_tail,
    levy_width_gain,
    levy_width_gain_general,
    levy_width_mi,
    linear_bounds,
    lipschitz_entropy,
    lipschitz_mutual_information,
    overlay_curves,
    propeller_violations,
    qmp_general,
    qmp_two_qubit,
)
from transport.ensemble import run_ensemble
from transport.ergotropy import gap_spectral
from transport.errors import DomainError, ShapeError, TraceError
from transport.models import EnsembleConfig
from transport.sampling import hs_state
from transport.states import BipartiteState, bell_state


class TestBinaryEntropy:
    def test_known_values(self):
        assert binary_entropy(0.5) == pytest.approx(LN2)
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.2) == pytest.approx(0.500402, abs=1e-6)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            binary_entropy(1.1)

    @pytest.mark.parametrize("x", [0.5, 0.6, 0.75, 0.9, 0.999])
    def test_inverse_round_trip(self, x):
        assert inv_binary_entropy_upper(binary_entropy(x)) == pytest.approx(x, abs=1e-10)

    def test_inverse_endpoints(self):
        assert inv_binary_entropy_upper(0.0) == 1.0
        assert inv_binary_entropy_upper(LN2) == 0.5
        with pytest.raises(DomainError):
            inv_binary_entropy_upper(1.0)


class TestGamma:
    def test_propeller_tips(self):
        assert gamma(1, -LN4) == pytest.approx(1.0)
        assert gamma(4, -LN4) == pytest.approx(1.0)
        assert gamma(3, LN4) == pytest.approx(-1.0)
        assert gamma(6, LN4) == pytest.approx(-1.0)

    def test_origin(self):
        assert gamma(1, 0.0) == pytest.approx(0.0)
        assert gamma(4, 0.0) == pytest.approx(0.0)
        assert gamma(2, 0.0) == pytest.approx(0.280, abs=2e-3)
        assert gamma(5, 0.0) == pytest.approx(-gamma(2, 0.0))

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma(1, 0.5)
        with pytest.raises(DomainError):
            gamma(7, 0.0)

    def test_envelope_at_origin(self):
        env = envelope(0.0)
        assert env.gamma_upper == pytest.approx(gamma(2, 0.0))
        assert env.gamma_lower == pytest.approx(gamma(5, 0.0))

    def test_envelope_outside_domain(self):
        with pytest.raises(DomainError):
            envelope(2.0)


class TestLinearBounds:
    def test_turning_point(self):
        lower, upper = linear_bounds(TURNING_POINT)
        assert lower == pytest.approx(0.0, abs=1e-12)
        assert upper == pytest.approx(2 * LINEAR_OFFSET)

    def test_offset(self):
        assert LINEAR_OFFSET == pytest.approx(0.321928, abs=1e-6)

    def test_lines_enclose_and_touch_the_envelope(self):
        rows = overlay_curves(n_points=4001)
        upper_slack = [r["linear_upper"] - r["gamma_upper"] for r in rows]
        lower_slack = [r["gamma_lower"] - r["linear_lower"] for r in rows]
        assert min(upper_slack) >= -1e-12
        assert min(lower_slack) >= -1e-12
        # tangência em h(x) com x = 4/5
        assert min(upper_slack) < 1e-4
        assert min(lower_slack) < 1e-4

    def test_overlay_grid(self):
        rows = overlay_curves()
        assert len(rows) == 500
        assert rows[0]["delta_mi"] == pytest.approx(-LN4)
        assert rows[-1]["delta_mi"] == pytest.approx(LN4)
        assert set(rows[0]) == {"delta_mi", "gamma_upper", "gamma_lower", "linear_upper", "linear_lower"}


class TestPropellerViolations:
    def test_inside_and_outside(self):
        counts = propeller_violations([0.0, 0.0, 0.0], [0.0, 0.5, -0.5])
        assert counts == {"envelope": 2, "linear": 2}

    def test_two_qubit_ensemble_stays_inside(self):
        cfg = EnsembleConfig(d_b=2, d_c=2, n_samples=300, master_seed=11)
        samples = run_ensemble(cfg)
        counts = propeller_violations(
            [s.delta_mi for s in samples], [s.gain_over_e for s in samples]
        )
        assert counts == {"envelope": 0, "linear": 0}


class TestLipschitzAndLevy:
    def test_lipschitz_constants(self):
        assert lipschitz_entropy(2) == pytest.approx(2.322 * math.pi / 2)
        assert lipschitz_mutual_information(2, 2) == pytest.approx(2.322 * math.pi * 2)

    def test_widths(self):
        assert levy_width_mi(2, 2) == pytest.approx(65.951 * LN4 / 4)
        assert levy_width_gain(2, 3) == pytest.approx(50.133 * 3 / 6)
        assert levy_width_gain_general(1.0, 1.0, 4) == pytest.approx(math.sqrt(200 * math.pi) / 2)

    def test_widths_shrink_with_dimension(self):
        assert levy_width_mi(10, 10) < levy_width_mi(3, 3)
        assert levy_width_gain(10, 10) < levy_width_gain(3, 3)

    def test_width_dimension_check(self):
        with pytest.raises(DomainError):
            levy_width_mi(1, 4)

    def test_tail(self):
        assert levy_tail(0.0, 1.0).raw == pytest.approx(3.0)
        assert levy_tail(0.0, 1.0).clamped == 1.0
        assert levy_tail(2.0, 1.0).raw == pytest.approx(3 * math.exp(-4))
        with pytest.raises(DomainError):
            levy_tail(-0.1, 1.0)
        with pytest.raises(DomainError):
            levy_tail(0.1, 0.0)

    def test_overlay(self):
        rows = levy_overlay(3, 3, [0.0, 0.5])
        assert rows[0] == {"ell": 0.0, "levy_tail_mi": 1.0, "levy_tail_gain": 1.0}
        assert rows[1]["levy_tail_mi"] <= 1.0


class TestQmp:
    def test_bell_state_passes(self):
        report = qmp_two_qubit(QmpSpectra.from_state(bell_state()))
        assert report.passed
        assert all(report.inequalities.values())

    def test_incompatible_spectra_fail(self):
        # marginais puras com global misto
        report = qmp_two_qubit(QmpSpectra((1.0, 0.0), (1.0, 0.0), (0.5, 0.5, 0.0, 0.0)))
        assert not report.passed
        assert not report.inequalities["ineq3"]
        assert report.slacks["ineq3"] == pytest.approx(-0.5)

    def test_random_states_pass(self, rng):
        for k in range(50):
            s = BipartiteState(2, 2, hs_state(4, rng.child(k)))
            assert qmp_two_qubit(QmpSpectra.from_state(s)).passed

    def test_spectra_validation(self):
        with pytest.raises(ShapeError):
            QmpSpectra((0.3, 0.7), (0.5, 0.5), (0.25,) * 4)
        with pytest.raises(TraceError):
            QmpSpectra((0.6, 0.6), (0.5, 0.5), (0.25,) * 4)
        with pytest.raises(ShapeError):
            qmp_two_qubit(QmpSpectra((1.0,), (0.5, 0.5), (0.5, 0.5)))

    def test_general_family_reduces_to_first_inequality(self, rng):
        for k in range(20):
            spectra = QmpSpectra.from_state(BipartiteState(2, 2, hs_state(4, rng.child(k))))
            slack = gap_spectral(
                spectra.local_b, spectra.local_c, [-0.5, 0.5], [0.0, 0.0], spectra.global_spectrum
            )
            assert slack == pytest.approx(qmp_two_qubit(spectra).slacks["ineq1"], abs=1e-12)

    def test_general_uniform_spectra(self):
        spectra = QmpSpectra((1 / 3,) * 3, (0.5, 0.5), (1 / 6,) * 6)
        assert qmp_general(spectra, [-1.0, 0.0, 1.0], [-0.5, 0.5])

    def test_general_requires_traceless_energies(self):
        spectra = QmpSpectra((0.5, 0.5), (0.5, 0.5), (0.25,) * 4)
        with pytest.raises(TraceError):
            qmp_general(spectra, [0.0, 1.0], [-0.5, 0.5])

    def test_general_family_over_sampled_states(self, rng):
        dims = [(2, 2), (2, 3), (3, 2), (3, 3)]
        for k in range(1000):
            d_b, d_c = dims[k % len(dims)]
            stream = rng.child(k)
            spectra = QmpSpectra.from_state(BipartiteState(d_b, d_c, hs_state(d_b * d_c, stream.child(0))))
            energies = stream.child(1).generator
            for _ in range(10):
                e_b = energies.normal(size=d_b)
                e_c = energies.normal(size=d_c)
                assert qmp_general(spectra, e_b - e_b.mean(), e_c - e_c.mean())

    @pytest.mark.slow
    def test_two_qubit_inequalities_at_desk_scale(self, rng):
        for k in range(10_000):
            s = BipartiteState(2, 2, hs_state(4, rng.child(k)))
            assert qmp_two_qubit(QmpSpectra.from_state(s)).passed

    def test_general_detects_violation(self):
        spectra = QmpSpectra((1.0, 0.0), (1.0, 0.0), (0.5, 0.5, 0.0, 0.0))
        assert not qmp_general(spectra, [-0.5, 0.5], [-0.5, 0.5])
        assert np.isclose(
            gap_spectral((1.0, 0.0), (1.0, 0.0), [-0.5, 0.5], [-0.5, 0.5], (0.5, 0.5, 0.0, 0.0)), -0.5
        )
