"""Тесты сценариев, конфигураций, метрик и записи результатов."""
import json

import numpy as np
import pandas as pd
import pytest

from src.analytic import alpha_continuous, p1_survival
from src.config import ExperimentConfig, Scenario, TimeGrid, load_config, load_config_data, preset
from src.config.experiment import (
    CAPTION_DELTA,
    CAPTION_LAMBDA,
    CAPTION_LEVEL_SHIFT,
    CAPTION_T0,
    CAPTION_Y_VALUES,
    fig3b_ratio_grid,
)
from src.errors import AlignmentError, ConfigError
from src.experiments import (
    CurveSet,
    build_figure,
    collapse_metric,
    crossing_times,
    find_peak,
    parallel_map,
    run_checks,
    run_continuous_sweep,
    run_fig2,
    run_fig3b,
    run_fig4,
    run_frequent_sweep,
    scaling_study,
    tau_regimes,
    write_csv,
    write_scenario,
)
from src.experiments.acceptance import check_analytic, check_return_effect, check_structure, format_table
from src.model import SystemParams

FAST_GRID = TimeGrid(t_max=20.0, n_points=101)


def _square(x: int) -> int:
    return x * x


# ═══════════════════════════════════════════════════════════════════
# Configuration
# ═══════════════════════════════════════════════════════════════════


class TestPresets:
    def test_fig2a(self):
        cfg = preset("fig2a")
        assert cfg.system == SystemParams.symmetric(Lambda=5.0)
        assert cfg.sweep == [1.0, 0.1, 0.01]
        assert cfg.delta == 0.0
        assert cfg.time_grid.t_max == 20.0
        assert cfg.time_grid.n_points == 400

    def test_fig2b_levels(self):
        cfg = preset(Scenario.FIG2B)
        assert (cfg.system.E1, cfg.system.E2) == (0.05, -0.05)

    @pytest.mark.parametrize("scenario", ["fig2c", "fig2d"])
    def test_detector_asymmetry(self, scenario):
        assert preset(scenario).delta == 0.2

    def test_fig2d_combines(self):
        cfg = preset("fig2d")
        assert cfg.system.E1 == CAPTION_LEVEL_SHIFT

    def test_fig3b(self):
        cfg = preset("fig3b")
        assert cfg.t0 == 20.0
        assert cfg.system.Lambda == 5.0
        assert len(cfg.sweep) == 25
        assert cfg.sweep[0] == pytest.approx(0.05)
        assert cfg.sweep[-1] == pytest.approx(20.0)

    def test_fig4(self):
        a, b = preset("fig4a"), preset("fig4b")
        assert 5.0 in a.lambdas
        assert a.initial == "R"
        assert b.initial == "1"

    def test_caption_constants(self):
        assert CAPTION_Y_VALUES == (1.0, 0.1, 0.01)
        assert (CAPTION_LAMBDA, CAPTION_DELTA, CAPTION_T0) == (5.0, 0.2, 20.0)

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError):
            preset("fig9")

    def test_ratio_grid_logarithmic(self):
        grid = np.array(fig3b_ratio_grid())
        ratios = grid[1:] / grid[:-1]
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)


class TestExperimentConfig:
    def test_load_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({
            "schema_version": 1,
            "scenario": "custom",
            "system": {"Lambda": 20.0},
            "detector": {"GammaD1": 2.0, "GammaD2": 2.0},
            "initial": "dark",
        }), encoding="utf-8")
        cfg = load_config(path)
        assert cfg.system.Lambda == 20.0
        assert cfg.detector.GammaD1 == 2.0
        assert cfg.initial_state()[0, 1] == pytest.approx(-0.5)

    def test_preset_round_trip(self):
        cfg = preset("fig2c")
        assert load_config_data(json.loads(cfg.model_dump_json())) == cfg

    @pytest.mark.parametrize("data", [
        {"schema_version": 2},
        {"system": {"Lambda": -1.0}},
        {"unknown": 1},
        {"scheme": "frequent"},
        {"initial": "3"},
        {"sweep": [1.0, -0.1]},
    ])
    def test_invalid(self, data):
        with pytest.raises(ConfigError):
            load_config_data(data)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_amplitudes(self):
        cfg = ExperimentConfig(amplitudes=[(0.6, 0.0), (0.0, 0.8), (0.0, 0.0)])
        rho = cfg.initial_state()
        assert rho[0, 0] == pytest.approx(0.36)
        assert rho[1, 1] == pytest.approx(0.64)

    def test_overrides_revalidate(self):
        with pytest.raises(ConfigError):
            preset("fig2a").with_overrides(time_grid={"t_max": -1.0, "n_points": 10})


# ═══════════════════════════════════════════════════════════════════
# Curves and collapse
# ═══════════════════════════════════════════════════════════════════


class TestCurveSet:
    def test_rows_sorted_and_clipped(self):
        curves = CurveSet.empty("t", "y")
        curves.add_series([2.0, 0.0, 1.0], 1.0, "continuous",
                          np.array([[0.5, 0.1, 0, 0.4], [1.0 + 1e-13, 0, 0, 0], [0.7, 0.2, 0.1, -1e-14]]))
        assert list(curves.frame["t"]) == [0.0, 1.0, 2.0]
        assert curves.frame[["P1", "P2", "PR", "Pleaked"]].to_numpy().max() <= 1.0
        assert curves.frame[["P1", "P2", "PR", "Pleaked"]].to_numpy().min() >= 0.0

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            CurveSet.empty().add_series([0.0], 1.0, "quantum", np.zeros((1, 4)))

    def test_extend_requires_same_columns(self):
        with pytest.raises(AlignmentError):
            CurveSet.empty("t", "y").extend(CurveSet.empty("t", "Lambda"))


def _family(times, values_by_lambda, y=1.0):
    family = []
    for Lambda, p1 in values_by_lambda.items():
        curves = CurveSet.empty("t", "y", Lambda=Lambda)
        probabilities = np.column_stack([p1, np.zeros_like(p1), np.zeros_like(p1), 1.0 - p1])
        curves.add_series(times, y, "continuous", probabilities)
        family.append(curves)
    return family


class TestCollapseMetric:
    def test_identical_curves(self):
        times = np.linspace(0.0, 5.0, 11)
        p1 = np.exp(-times) * 0.5 + 0.5
        metric = collapse_metric(_family(times, {5.0: p1, 20.0: p1}), 1.0)
        assert metric.spread == 0.0
        assert metric.largest_lambda == 20.0

    def test_mismatched_grids(self):
        a = _family(np.linspace(0.0, 5.0, 11), {5.0: np.ones(11)})
        b = _family(np.linspace(0.0, 6.0, 11), {20.0: np.ones(11)})
        with pytest.raises(AlignmentError):
            collapse_metric(a + b, 1.0)

    def test_single_curve(self):
        with pytest.raises(AlignmentError):
            collapse_metric(_family(np.linspace(0.0, 1.0, 3), {5.0: np.ones(3)}), 1.0)

    def test_convergence_ordering(self):
        times = FAST_GRID.times()
        sweeps = {
            Lambda: run_continuous_sweep(SystemParams.symmetric(Lambda=Lambda), [0.1], times)
            for Lambda in (5.0, 20.0, 100.0)
        }
        low = collapse_metric([sweeps[5.0], sweeps[20.0]], 0.1)
        high = collapse_metric([sweeps[20.0], sweeps[100.0]], 0.1)
        assert high.spread < low.spread

    def test_limit_law_at_large_bandwidth(self):
        times = FAST_GRID.times()
        family = [run_continuous_sweep(SystemParams.symmetric(Lambda=Lambda), [1.0], times)
                  for Lambda in (20.0, 100.0)]
        assert collapse_metric(family, 1.0).analytic_deviation < 1e-2


# ═══════════════════════════════════════════════════════════════════
# Scenarios
# ═══════════════════════════════════════════════════════════════════


class TestFig2:
    def test_columns_and_schemes(self):
        curves = run_fig2("a", time_grid=FAST_GRID)
        assert curves.columns == ["t", "y", "scheme", "P1", "P2", "PR", "Pleaked"]
        assert set(curves.frame["scheme"]) == {"continuous", "analytic"}
        assert len(curves.frame) == 2 * 3 * 101

    def test_zeno_curve_close_to_analytic(self):
        curves = run_fig2("a", y_values=[0.01], time_grid=FAST_GRID)
        series = curves.series(0.01, "continuous")
        analytic = [p1_survival(t, 1.0, alpha_continuous(0.01)) for t in series["t"]]
        assert np.max(np.abs(series["P1"] - analytic)) < 2e-2
        assert series["P1"].min() > 0.6

    def test_asymptote(self):
        curves = run_fig2("a", y_values=[1.0], time_grid=TimeGrid(t_max=40.0, n_points=81))
        assert curves.series(1.0, "continuous")["P1"].iloc[-1] == pytest.approx(0.25, abs=1e-2)

    def test_crossing_with_misaligned_levels(self):
        curves = run_fig2("b", y_values=[1.0, 0.1])
        assert len(crossing_times(curves, 1.0, 0.1)) >= 1

    def test_dot_population_decays_with_asymmetric_detector(self):
        curves = run_fig2("c", y_values=[1.0], time_grid=FAST_GRID)
        series = curves.series(1.0, "continuous")
        assert (series["P1"] + series["P2"]).iloc[-1] < 0.5

    def test_scaling_study_monotone(self):
        study = scaling_study(y_values=[1.0], time_grid=FAST_GRID)
        deviations, _ = study[1.0]
        assert all(b < a for a, b in zip(deviations, deviations[1:]))
        assert deviations[-1] <= 1e-2


class TestFig3b:
    def test_schemes_agree_on_subset(self):
        curves = run_fig3b(ratios=[0.05, 0.5, 5.0])
        assert curves.metadata["max_scheme_gap"]["aligned"] <= 2e-2
        assert not curves.metadata["flagged"]
        assert set(curves.frame["levels"]) == {"aligned", "misaligned"}

    def test_weak_measurement_limit(self):
        curves = run_fig3b(ratios=[0.05])
        row = curves.series("aligned", "continuous").iloc[0]
        alpha = alpha_continuous(1.0 / 0.05)
        assert row["P1"] == pytest.approx(p1_survival(20.0, 1.0, alpha), abs=1e-2)
        assert row["P2"] == pytest.approx(0.25, abs=1e-2)

    def test_tau_regimes(self):
        assert tau_regimes([5.0, 1.0, 0.05], 5.0) == {"5": "small-x", "1": "intermediate", "0.05": "large-x"}

    @pytest.mark.slow
    def test_full_grid(self):
        curves = run_fig3b()
        assert curves.metadata["max_scheme_gap"]["aligned"] <= 2e-2
        continuous = curves.series("aligned", "continuous")
        for ratio, p1 in zip(continuous["gd_over_lambda"], continuous["P1"]):
            assert p1 == pytest.approx(p1_survival(20.0, 1.0, alpha_continuous(1.0 / ratio)), abs=1e-2)


class TestFig4:
    def test_return_effect_numbers(self):
        curves = run_fig4("a", lambdas=[5.0])
        (peak,) = curves.metadata["peaks"]
        assert peak["P1_at_probe"] == pytest.approx(0.037, abs=0.004)
        assert peak["P1_peak"] == pytest.approx(0.058, abs=0.006)
        assert peak["t_peak"] == pytest.approx(0.43, rel=0.15)
        assert peak["returned_at_peak"] == pytest.approx(2.0 * peak["P1_peak"], rel=1e-6)

    def test_quadratic_start(self):
        curves = run_fig4("a", lambdas=[5.0], time_grid=TimeGrid(t_max=0.002, n_points=3))
        p1 = curves.series(5.0, "continuous")["P1"].to_numpy()
        assert p1[0] == 0.0
        assert p1[2] / p1[1] == pytest.approx(4.0, rel=0.05)

    def test_variant_b_columns(self):
        curves = run_fig4("b", lambdas=[5.0, 10.0], time_grid=TimeGrid(t_max=5.0, n_points=51))
        assert set(curves.frame["Lambda"]) == {5.0, 10.0}
        assert "peaks" not in curves.metadata


class TestFindPeak:
    def test_parabola_exact(self):
        times = np.linspace(0.0, 1.0, 11)
        values = 1.0 - (times - 0.43) ** 2
        t_peak, height = find_peak(times, values)
        assert t_peak == pytest.approx(0.43, abs=1e-12)
        assert height == pytest.approx(1.0, abs=1e-12)

    def test_edge_maximum(self):
        assert find_peak(np.array([0.0, 1.0, 2.0]), np.array([3.0, 2.0, 1.0])) == (0.0, 3.0)


# ═══════════════════════════════════════════════════════════════════
# Workers and output
# ═══════════════════════════════════════════════════════════════════


class TestWorkers:
    def test_sequential(self):
        assert parallel_map(_square, [3, 1, 2]) == [9, 1, 4]

    def test_process_pool_keeps_order(self):
        assert parallel_map(_square, list(range(6)), workers=2) == [x * x for x in range(6)]

    def test_sweep_independent_of_worker_count(self):
        sys = SystemParams.symmetric()
        times = np.linspace(0.0, 5.0, 21)
        single = run_continuous_sweep(sys, [1.0, 0.1], times, workers=1)
        pooled = run_continuous_sweep(sys, [1.0, 0.1], times, workers=2)
        pd.testing.assert_frame_equal(single.frame, pooled.frame)


class TestOutput:
    def test_csv_header(self, tmp_path):
        path = write_csv(run_fig2("a", y_values=[1.0], time_grid=TimeGrid(t_max=1.0, n_points=3)),
                         tmp_path / "fig2a.csv")
        assert path.read_text(encoding="utf-8").splitlines()[0] == "t,y,scheme,P1,P2,PR,Pleaked"

    def test_byte_identical_reruns(self, tmp_path):
        grid = TimeGrid(t_max=5.0, n_points=21)
        first = write_csv(run_fig2("b", time_grid=grid), tmp_path / "a.csv").read_bytes()
        second = write_csv(run_fig2("b", time_grid=grid), tmp_path / "b.csv").read_bytes()
        assert first == second
        assert b"\r\n" not in first

    def test_scenario_files(self, tmp_path):
        curves, summary, columns = build_figure("fig4a", time_points=101, Lambda=5.0)
        written = write_scenario(curves, "fig4a", tmp_path, summary, columns)
        names = sorted(path.name for path in written)
        assert names == ["fig4a.csv", "fig4a_summary.json", "plot_fig4a.py"]
        data = json.loads((tmp_path / "fig4a_summary.json").read_text(encoding="utf-8"))
        assert data["peaks"][0]["Lambda"] == 5.0
        script = (tmp_path / "plot_fig4a.py").read_text(encoding="utf-8")
        assert "fig4a.csv" in script
        compile(script, "plot_fig4a.py", "exec")

    def test_frequent_sweep_columns(self):
        curves = run_frequent_sweep(SystemParams.symmetric(), [0.1, 0.5], 1.0)
        assert curves.columns[:3] == ["t", "tau", "scheme"]
        assert len(curves.series(0.5, "frequent")) == 3


# ═══════════════════════════════════════════════════════════════════
# Acceptance helpers
# ═══════════════════════════════════════════════════════════════════


class TestAcceptance:
    def test_analytic_check(self):
        assert check_analytic().passed

    def test_return_effect_check(self):
        result = check_return_effect()
        assert result.passed, result.detail

    def test_structure_covers_fig3b_and_frequent_runs(self):
        result = check_structure()
        assert result.passed, result.detail
        assert "fig3b" in result.detail
        assert "frequent" in result.detail

    def test_table(self):
        table = format_table([check_analytic()])
        assert table.splitlines()[0].split() == ["name", "value", "threshold", "status"]
        assert table.splitlines()[1].endswith("PASS")

    @pytest.mark.slow
    def test_full_suite_passes(self):
        results = run_checks()
        assert all(r.passed for r in results), format_table(results)
