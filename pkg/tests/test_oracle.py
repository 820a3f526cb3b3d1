"""Тесты дискретного лоренцева континуума."""
import math

import numpy as np
import pytest

from src.errors import InvalidStateError, RecurrenceViolation
from src.experiments import oracle_curves
from src.model import SystemParams
from src.oracle import (
    AmplitudeState,
    build_reservoir,
    compare_fictitious,
    hamiltonian,
    lorentzian_density,
    refinement_sweep,
    schrodinger_evolve,
)

S = 1.0 / math.sqrt(2.0)


class TestReservoir:
    def test_sampling_reproduces_density(self, symmetric):
        res = build_reservoir(symmetric, 1000, 10.0 * symmetric.Lambda)
        density = lorentzian_density(res.energies, symmetric.Gamma1, symmetric.ER, symmetric.Lambda)
        np.testing.assert_allclose(res.omega1 ** 2 / res.dE, density, rtol=1e-12)

    def test_two_modes(self, symmetric):
        Lambda = symmetric.Lambda
        res = build_reservoir(symmetric, 2, Lambda)
        np.testing.assert_allclose(res.energies, [-Lambda / 2.0, Lambda / 2.0])
        expected = math.sqrt(Lambda * Lambda ** 2 / (2.0 * math.pi * (Lambda ** 2 / 4.0 + Lambda ** 2)))
        np.testing.assert_allclose(res.omega1, [expected, expected], rtol=1e-12)

    def test_sum_rule(self, symmetric):
        res = build_reservoir(symmetric, 20000, 50.0 * symmetric.Lambda)
        total = float(np.sum(res.omega1 ** 2))
        full = symmetric.Gamma1 * symmetric.Lambda / 2.0
        assert 0.98 * full <= total <= full

    def test_wide_band_flat(self):
        res = build_reservoir(SystemParams.symmetric(Lambda=1e4), 100, 10.0)
        assert res.omega1.max() / res.omega1.min() == pytest.approx(1.0, abs=1e-5)

    def test_recurrence_time(self, symmetric):
        res = build_reservoir(symmetric, 16000, 200.0)
        assert res.dE == pytest.approx(0.025)
        assert res.recurrence_time == pytest.approx(2.0 * math.pi / 0.025)

    @pytest.mark.parametrize("N, W", [(1, 10.0), (100, 0.0)])
    def test_invalid_grid(self, symmetric, N, W):
        with pytest.raises(InvalidStateError):
            build_reservoir(symmetric, N, W)

    def test_hamiltonian_hermitian(self, symmetric):
        h = hamiltonian(symmetric, build_reservoir(symmetric, 50, 20.0)).toarray()
        np.testing.assert_allclose(h, h.conj().T)
        assert h.shape == (52, 52)


class TestSchrodinger:
    def test_zero_couplings(self):
        sys = SystemParams(Gamma1=0.0, Gamma2=0.0, E1=0.3)
        res = build_reservoir(sys, 100, 10.0)
        psi0 = AmplitudeState.in_dots(S, S, 100)
        trajectory = schrodinger_evolve(psi0, sys, res, np.linspace(0.0, 5.0, 11))
        np.testing.assert_allclose(trajectory.P1, 0.5, atol=1e-12)

    def test_norm_conserved(self, symmetric):
        res = build_reservoir(symmetric, 2000, 100.0)
        trajectory = schrodinger_evolve(AmplitudeState.in_dots(1.0, 0.0, 2000), symmetric, res,
                                        np.linspace(0.0, 5.0, 51))
        np.testing.assert_allclose(trajectory.P1 + trajectory.P2 + trajectory.reservoir, 1.0, atol=1e-8)

    def test_single_dot_exponential_decay(self):
        sys = SystemParams(Gamma1=1.0, Gamma2=0.0, Lambda=100.0)
        res = build_reservoir(sys, 4000, 10.0 * sys.Lambda)
        times = np.linspace(0.0, 3.0, 61)
        trajectory = schrodinger_evolve(AmplitudeState.in_dots(1.0, 0.0, 4000), sys, res, times)
        assert np.max(np.abs(trajectory.P1 - np.exp(-times))) <= 2e-2

    def test_unnormalized_input(self, symmetric):
        res = build_reservoir(symmetric, 10, 10.0)
        with pytest.raises(InvalidStateError):
            schrodinger_evolve(AmplitudeState.in_dots(1.0, 1.0, 10), symmetric, res, [0.0, 0.1])

    def test_horizon_beyond_recurrence(self, symmetric):
        res = build_reservoir(symmetric, 100, 100.0)
        with pytest.raises(RecurrenceViolation):
            schrodinger_evolve(AmplitudeState.in_dots(1.0, 0.0, 100), symmetric, res, [0.0, 10.0])


class TestCompareFictitious:
    def test_recurrence_checked_first(self, symmetric):
        with pytest.raises(RecurrenceViolation):
            compare_fictitious(symmetric, 100, 100.0, 10.0)

    def test_dark_state_on_both_sides(self, symmetric):
        comparison = compare_fictitious(symmetric, 2000, 100.0, 5.0, amplitudes=(S, -S), n_points=51)
        np.testing.assert_allclose(comparison.oracle.P1 + comparison.oracle.P2, 1.0, atol=1e-9)
        assert comparison.deviation_dots < 1e-9

    def test_halving_modes_never_helps(self):
        sys = SystemParams.symmetric(Lambda=5.0)
        coarse = compare_fictitious(sys, 340, 100.0, 10.0)
        fine = compare_fictitious(sys, 680, 100.0, 10.0)
        assert coarse.deviation >= fine.deviation

    def test_curve_set(self, symmetric):
        comparison = compare_fictitious(symmetric, 1000, 50.0, 2.0, n_points=21)
        curves = oracle_curves(comparison, symmetric.Lambda)
        assert list(curves.frame.columns) == ["t", "N", "scheme", "P1", "P2", "PR", "Pleaked"]
        assert set(curves.frame["scheme"]) == {"oracle", "fictitious"}
        assert len(curves.series(1000, "oracle")) == 21

    @pytest.mark.slow
    def test_converged_deviation(self, symmetric):
        comparison = compare_fictitious(symmetric, 16000, 40.0 * symmetric.Lambda, 10.0)
        assert comparison.deviation < 1e-2

    @pytest.mark.slow
    def test_refinement_strictly_decreasing(self, symmetric):
        result = refinement_sweep(symmetric, 10.0)
        assert len(result.deviations) >= 3
        assert result.strictly_decreasing
        assert result.final < 1e-2
