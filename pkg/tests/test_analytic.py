"""Тесты аналитических формул."""
import math

import pytest

from src.analytic import (
    Regime,
    alpha_continuous,
    alpha_frequent,
    detector_rate,
    detector_rates_from_bias,
    identify_tau,
    p1_survival,
    p2_transfer,
    tau_from_gamma_d,
)
from src.errors import DomainError


class TestAlphaContinuous:
    def test_zeno_limit(self):
        assert alpha_continuous(0.0) == 0.0

    def test_unmeasured_limit(self):
        assert alpha_continuous(1e9) > 1.0 - 1e-8
        assert alpha_continuous(math.inf) == 1.0

    def test_y_one(self):
        assert alpha_continuous(1.0) == pytest.approx(2.0 / 3.0, abs=1e-15)

    @pytest.mark.parametrize("y", [-1.0, math.nan])
    def test_domain(self, y):
        with pytest.raises(DomainError):
            alpha_continuous(y)


class TestAlphaFrequent:
    def test_small_x_series(self):
        assert abs(alpha_frequent(1e-6) - 5e-7) < 1e-12

    def test_zero(self):
        assert alpha_frequent(0.0) == 0.0

    def test_large_x(self):
        assert alpha_frequent(1e6) == pytest.approx(1.0, abs=1e-5)
        assert alpha_frequent(math.inf) == 1.0

    def test_x_one(self):
        assert alpha_frequent(1.0) == pytest.approx(math.exp(-1.0), abs=1e-15)

    def test_series_matches_closed_form_at_threshold(self):
        x = 1e-4
        closed = 1.0 - (-math.expm1(-x)) / x
        series = x / 2.0 - x * x / 6.0 + x ** 3 / 24.0
        assert series == pytest.approx(closed, rel=1e-8)
        assert alpha_frequent(x) == pytest.approx(closed, rel=1e-8)

    def test_negative(self):
        with pytest.raises(DomainError):
            alpha_frequent(-0.1)


class TestSurvival:
    def test_start(self):
        assert p1_survival(0.0, 1.0, 0.5) == 1.0
        assert p2_transfer(0.0, 1.0, 0.5) == 0.0

    def test_asymptote(self):
        assert p1_survival(1e4, 1.0, 0.5) == pytest.approx(0.25, abs=1e-15)
        assert p2_transfer(1e4, 1.0, 0.5) == pytest.approx(0.25, abs=1e-15)

    def test_direct_value(self):
        assert p1_survival(3.0, 1.0, 2.0 / 3.0) == pytest.approx(0.25 * (math.exp(-2.0) + 1.0) ** 2, rel=1e-12)

    def test_frozen_without_decay(self):
        assert p1_survival(100.0, 1.0, 0.0) == 1.0

    @pytest.mark.parametrize("t, gamma, alpha", [(-1.0, 1.0, 0.5), (1.0, 0.0, 0.5), (1.0, 1.0, 1.5)])
    def test_domain(self, t, gamma, alpha):
        with pytest.raises(DomainError):
            p1_survival(t, gamma, alpha)


class TestDetectorRate:
    def test_no_which_path_information(self):
        assert detector_rate(3.0, 0.4, 0.4) == 0.0

    def test_linear_in_bias(self):
        assert detector_rate(2.0, 0.9, 0.1) == pytest.approx(2.0 * detector_rate(1.0, 0.9, 0.1))

    def test_direct_value(self):
        assert detector_rate(2.0 * math.pi, 1.0, 0.0) == pytest.approx(1.0)

    def test_bias_to_params(self):
        det = detector_rates_from_bias(2.0 * math.pi, 1.0, 0.0)
        assert det.GammaD1 == det.GammaD2 == pytest.approx(1.0)

    def test_negative_transmission(self):
        with pytest.raises(DomainError):
            detector_rate(1.0, -0.1, 0.0)


class TestTauIdentification:
    def test_small_x(self):
        assert tau_from_gamma_d(4.0, Regime.SMALL_X) == pytest.approx(1.0)

    def test_large_x(self):
        assert tau_from_gamma_d(4.0, "large-x") == pytest.approx(0.5)

    def test_unknown_regime(self):
        with pytest.raises(ValueError):
            tau_from_gamma_d(4.0, "medium-x")

    @pytest.mark.parametrize("y", [1e-2, 1e-3, 1e-4])
    def test_first_order_agreement(self, y):
        """α(y) и α′(4y) совпадают в первом порядке по y."""
        assert abs(alpha_continuous(y) - alpha_frequent(4.0 * y)) / y < 10.0 * y

    def test_identify_small_x(self):
        (point,) = identify_tau(GammaD=100.0, Lambda=5.0)
        assert point.regime is Regime.SMALL_X
        assert point.x == pytest.approx(0.2)
        assert not point.intermediate

    def test_identify_large_x(self):
        (point,) = identify_tau(GammaD=1.0, Lambda=5.0)
        assert point.regime is Regime.LARGE_X
        assert point.x == pytest.approx(10.0)

    def test_identify_intermediate(self):
        points = identify_tau(GammaD=5.0, Lambda=5.0)
        assert len(points) == 2
        assert all(p.intermediate for p in points)
