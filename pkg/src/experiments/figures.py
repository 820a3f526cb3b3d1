"""Сценарии рисунков: непрерывное наблюдение, частые измерения и эффект возврата."""
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.analytic import Regime, alpha_continuous, identify_tau, p1_survival, p2_transfer, tau_from_gamma_d
from src.config.experiment import (
    CAPTION_LAMBDA,
    CAPTION_T0,
    CAPTION_Y_VALUES,
    FIG4_LAMBDAS,
    TimeGrid,
    fig3b_ratio_grid,
    preset,
)
from src.dynamics import build_liouvillian, evolve
from src.errors import ConfigError
from src.measurement import MeasurementSchedule, run_frequent, sample_at
from src.model import DensityMatrix, DetectorParams, SystemParams, occupations
from src.oracle import OracleComparison

from .curves import CollapseMetric, CurveSet, collapse_metric
from .workers import parallel_map

SCALING_LAMBDAS = (5.0, 20.0, 100.0)
SCHEME_GAP_TOLERANCE = 2e-2
RETURN_PROBE_TIME = 0.2


@dataclass(frozen=True)
class ReturnPeak:
    """Максимум P₁(τ) после старта из фиктивной ямы."""

    Lambda: float
    t_peak: float
    P1_peak: float
    returned_at_peak: float
    P1_at_probe: float
    probe_time: float = RETURN_PROBE_TIME


def with_lambda(sys: SystemParams, Lambda: Optional[float]) -> SystemParams:
    """Копия параметров с другой шириной полосы."""
    if Lambda is None:
        return sys
    return SystemParams(**{**sys.model_dump(), "Lambda": Lambda})


def _occupation_array(states: Sequence[DensityMatrix]) -> np.ndarray:
    return np.array([occupations(rho) for rho in states])


def _continuous_task(task: Tuple[SystemParams, DetectorParams, DensityMatrix, np.ndarray]) -> np.ndarray:
    sys, det, rho0, times = task
    return _occupation_array(evolve(rho0, build_liouvillian(sys, det), times))


def _frequent_task(
    task: Tuple[SystemParams, MeasurementSchedule, DensityMatrix]
) -> Tuple[np.ndarray, np.ndarray, Optional[float]]:
    sys, schedule, rho0 = task
    run = run_frequent(rho0, sys, schedule)
    null = None if run.null_probability is None else float(run.null_probability[-1])
    return run.times, _occupation_array(run.states), null


def detector_for_y(sys: SystemParams, y: float, delta: float = 0.0, Gamma: float = 1.0) -> DetectorParams:
    """Детектор со скоростью Γ_d = Λ/y."""
    return DetectorParams.from_rate(sys.Lambda / y, delta=delta, Gamma=Gamma)


def run_continuous_sweep(
    sys: SystemParams,
    y_values: Sequence[float],
    times: np.ndarray,
    delta: float = 0.0,
    rho0: Optional[DensityMatrix] = None,
    workers: int = 1,
) -> CurveSet:
    """Кривые P(t) при непрерывном наблюдении для набора y.

    Args:
        sys: Параметры системы
        y_values: Значения y = Λ/Γ_d
        times: Временная сетка
        delta: Асимметрия детектора δ
        rho0: Начальное состояние (по умолчанию |1⟩)
        workers: Число процессов

    Returns:
        Набор кривых с колонками t, y, scheme, ...
    """
    rho0 = rho0 or DensityMatrix.basis("1")
    tasks = [(sys, detector_for_y(sys, y, delta), rho0, times) for y in y_values]
    results = parallel_map(_continuous_task, tasks, workers)
    curves = CurveSet.empty("t", "y", Lambda=sys.Lambda, delta=delta)
    for y, probabilities in zip(y_values, results):
        curves.add_series(times, float(y), "continuous", probabilities)
    return curves


def run_frequent_sweep(
    sys: SystemParams,
    taus: Sequence[float],
    t_max: float,
    mode: str = "nonselective",
    rho0: Optional[DensityMatrix] = None,
    workers: int = 1,
) -> CurveSet:
    """Кривые P(nτ) при частых измерениях для набора τ.

    В режиме null-conditioned metadata["null_probability"] хранит итоговую
    вероятность ни разу не найти электрон в яме для каждого τ.
    """
    rho0 = rho0 or DensityMatrix.basis("1")
    tasks = [(sys, MeasurementSchedule.covering(tau, t_max, mode), rho0) for tau in taus]
    results = parallel_map(_frequent_task, tasks, workers)
    curves = CurveSet.empty("t", "tau", Lambda=sys.Lambda, mode=mode)
    null_probability = {}
    for tau, (times, probabilities, null) in zip(taus, results):
        curves.add_series(times, float(tau), "frequent", probabilities)
        if null is not None:
            null_probability[f"{tau:g}"] = null
    if null_probability:
        curves.metadata["null_probability"] = null_probability
    return curves


def analytic_probabilities(times: np.ndarray, alpha: float, Gamma: float = 1.0) -> np.ndarray:
    """P₁, P₂ в пределе Λ → ∞; вес ямы нулевой, остальное - в резервуаре."""
    p1 = np.array([p1_survival(t, Gamma, alpha) for t in times])
    p2 = np.array([p2_transfer(t, Gamma, alpha) for t in times])
    return np.column_stack([p1, p2, np.zeros_like(p1), 1.0 - p1 - p2])


def run_fig2(
    variant: str = "a",
    y_values: Sequence[float] = CAPTION_Y_VALUES,
    Lambda: float = CAPTION_LAMBDA,
    time_grid: Optional[TimeGrid] = None,
    workers: int = 1,
) -> CurveSet:
    """Сценарий рисунка 2: P(t) при непрерывном наблюдении для нескольких y.

    Args:
        variant: a (симметрия), b (расстроенные уровни), c (асимметричный детектор), d (оба)
        y_values: Значения y
        Lambda: Ширина полосы
        time_grid: Временная сетка (по умолчанию из пресета)
        workers: Число процессов

    Returns:
        Набор кривых; в варианте a добавлены аналитические кривые
    """
    cfg = preset(f"fig2{variant}")
    sys = with_lambda(cfg.system, Lambda)
    times = (time_grid or cfg.time_grid).times()
    logger.info(f"Рисунок 2{variant}: Λ={sys.Lambda:g}, y={list(y_values)}, δ={cfg.delta:g}")
    curves = run_continuous_sweep(sys, y_values, times, delta=cfg.delta, workers=workers)
    curves.metadata.update(scenario=f"fig2{variant}")
    if variant == "a":
        for y in y_values:
            curves.add_series(times, float(y), "analytic", analytic_probabilities(times, alpha_continuous(y)))
    logger.success(f"✓ Рисунок 2{variant}: {len(curves.frame)} строк")
    return curves


def scaling_study(
    y_values: Sequence[float] = CAPTION_Y_VALUES,
    lambdas: Sequence[float] = SCALING_LAMBDAS,
    time_grid: Optional[TimeGrid] = None,
    workers: int = 1,
) -> Dict[float, Tuple[List[float], CollapseMetric]]:
    """Сходимость к аналитике при росте Λ для каждого y (симметричный случай).

    Returns:
        Для каждого y: отклонения sup|P₁ − аналитика| по Λ и метрика коллапса
    """
    times = (time_grid or TimeGrid(t_max=CAPTION_T0, n_points=400)).times()
    families = {y: [] for y in y_values}
    for Lambda in lambdas:
        sys = SystemParams.symmetric(Lambda=Lambda)
        curves = run_continuous_sweep(sys, y_values, times, workers=workers)
        for y in y_values:
            single = CurveSet.empty("t", "y", Lambda=Lambda)
            single.add_series(times, float(y), "continuous", curves.series(float(y), "continuous")[
                ["P1", "P2", "PR", "Pleaked"]].to_numpy())
            families[y].append(single)

    study = {}
    for y, family in families.items():
        analytic = analytic_probabilities(times, alpha_continuous(y))[:, 0]
        deviations = [
            float(np.max(np.abs(curve.series(float(y), "continuous")["P1"].to_numpy() - analytic)))
            for curve in family
        ]
        study[y] = (deviations, collapse_metric(family, float(y)))
        logger.info(f"y={y:g}: отклонения от аналитики по Λ={list(lambdas)}: "
                    + ", ".join(f"{d:.3e}" for d in deviations))
    return study


def _fig3b_task(task: Tuple[SystemParams, float, float]) -> Tuple[np.ndarray, np.ndarray]:
    sys, ratio, t0 = task
    gamma_d = ratio * sys.Lambda
    rho0 = DensityMatrix.basis("1")
    continuous = evolve(rho0, build_liouvillian(sys, DetectorParams.from_rate(gamma_d)), [t0])[-1]
    tau = tau_from_gamma_d(gamma_d, Regime.SMALL_X)
    run = run_frequent(rho0, sys, MeasurementSchedule.covering(tau, t0))
    frequent = sample_at(run, t0)
    return np.array(occupations(continuous)), np.array(occupations(frequent))


def run_fig3b(
    t0: float = CAPTION_T0,
    ratios: Optional[Sequence[float]] = None,
    Lambda: float = CAPTION_LAMBDA,
    workers: int = 1,
) -> CurveSet:
    """Сценарий рисунка 3(b): P₁,₂(t₀) против Γ_d/Λ для обеих схем, τ = 4/Γ_d.

    Args:
        t0: Момент считывания
        ratios: Сетка Γ_d/Λ (по умолчанию логарифмическая [0.05, 20], 25 точек)
        Lambda: Ширина полосы
        workers: Число процессов

    Returns:
        Набор с колонками gd_over_lambda, levels, scheme, ...; в metadata - расхождение схем
    """
    ratios = list(ratios or fig3b_ratio_grid())
    configurations = {
        "aligned": SystemParams.symmetric(Lambda=Lambda),
        "misaligned": SystemParams.misaligned(Lambda=Lambda),
    }
    curves = CurveSet.empty("gd_over_lambda", "levels", scenario="fig3b", Lambda=Lambda, t0=t0)
    gaps = {}
    for levels, sys in configurations.items():
        logger.info(f"Рисунок 3(b), уровни {levels}: {len(ratios)} точек")
        results = parallel_map(_fig3b_task, [(sys, ratio, t0) for ratio in ratios], workers)
        continuous = np.array([c for c, _ in results])
        frequent = np.array([f for _, f in results])
        curves.add_series(ratios, levels, "continuous", continuous)
        curves.add_series(ratios, levels, "frequent", frequent)
        gaps[levels] = float(np.max(np.abs(continuous[:, :2] - frequent[:, :2])))

    flagged = gaps["aligned"] > SCHEME_GAP_TOLERANCE
    curves.metadata.update(max_scheme_gap=gaps, flagged=flagged)
    if flagged:
        logger.warning(f"⚠ Схемы расходятся: {gaps['aligned']:.3e} > {SCHEME_GAP_TOLERANCE:g}")
    else:
        logger.success(f"✓ Схемы совпадают: максимальное расхождение {gaps['aligned']:.3e}")
    return curves


def tau_regimes(ratios: Sequence[float], Lambda: float) -> Dict[str, str]:
    """Режим отождествления τ ↔ Γ_d⁻¹ для каждой точки Γ_d/Λ (small-x, large-x или intermediate)."""
    regimes = {}
    for ratio in ratios:
        points = identify_tau(ratio * Lambda, Lambda)
        regimes[f"{ratio:g}"] = "intermediate" if points[0].intermediate else points[0].regime.value
    return regimes


def find_peak(times: np.ndarray, values: np.ndarray) -> Tuple[float, float]:
    """Максимум на сетке с уточнением по параболе через три точки.

    Returns:
        (положение, высота) максимума
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    i = int(np.argmax(values))
    if i == 0 or i == len(values) - 1:
        return float(times[i]), float(values[i])
    y0, y1, y2 = values[i - 1], values[i], values[i + 1]
    denominator = y0 - 2.0 * y1 + y2
    if denominator >= 0:
        return float(times[i]), float(y1)
    h = times[i + 1] - times[i]
    offset = 0.5 * (y0 - y2) / denominator
    return float(times[i] + offset * h), float(y1 - 0.25 * (y0 - y2) * offset)


def return_peak(sys: SystemParams, times: np.ndarray) -> ReturnPeak:
    """Положение и высота максимума P₁ при старте из |R⟩ (без детектора)."""
    L = build_liouvillian(sys, DetectorParams.off())
    rho0 = DensityMatrix.basis("R")
    p1 = _occupation_array(evolve(rho0, L, times))[:, 0]
    t_peak, _ = find_peak(times, p1)
    at_peak = occupations(evolve(rho0, L, [t_peak])[-1])
    at_probe = occupations(evolve(rho0, L, [RETURN_PROBE_TIME])[-1])
    return ReturnPeak(
        Lambda=sys.Lambda,
        t_peak=t_peak,
        P1_peak=at_peak[0],
        returned_at_peak=at_peak[0] + at_peak[1],
        P1_at_probe=at_probe[0],
    )


def run_fig4(
    variant: str = "a",
    lambdas: Sequence[float] = FIG4_LAMBDAS,
    time_grid: Optional[TimeGrid] = None,
) -> CurveSet:
    """Сценарий рисунка 4: эффект возврата из конечной полосы.

    Args:
        variant: a - старт из |R⟩, P₁(τ); b - старт из |1⟩, P₁ и P_R
        lambdas: Ширины полосы
        time_grid: Временная сетка (по умолчанию из пресета)

    Returns:
        Набор кривых с меткой Lambda; для варианта a в metadata["peaks"] - максимумы
    """
    cfg = preset(f"fig4{variant}")
    times = (time_grid or cfg.time_grid).times()
    rho0 = cfg.initial_state()
    curves = CurveSet.empty("t", "Lambda", scenario=f"fig4{variant}")
    peaks = []
    for Lambda in lambdas:
        sys = with_lambda(cfg.system, Lambda)
        states = evolve(rho0, build_liouvillian(sys, DetectorParams.off()), times)
        curves.add_states(times, float(Lambda), "continuous", states)
        if variant == "a":
            peak = return_peak(sys, times)
            peaks.append(asdict(peak))
            logger.info(
                f"Λ={Lambda:g}: максимум P₁={peak.P1_peak:.4f} при τ={peak.t_peak:.4f}, "
                f"P₁({RETURN_PROBE_TIME:g})={peak.P1_at_probe:.4f}, возврат {100 * peak.returned_at_peak:.1f}%"
            )
    if variant == "a":
        curves.metadata["peaks"] = peaks
    return curves


def oracle_curves(comparison: OracleComparison, Lambda: float) -> CurveSet:
    """Кривые дискретного континуума и фиктивной ямы на общей сетке.

    Вес вне точек целиком относится к P_leaked: в замкнутой системе это заселённость мод.
    """
    curves = CurveSet.empty("t", "N", Lambda=Lambda, W=comparison.W, deviation=comparison.deviation,
                            deviation_dots=comparison.deviation_dots)
    times = comparison.oracle.times
    for scheme, p1, p2 in (
        ("oracle", comparison.oracle.P1, comparison.oracle.P2),
        ("fictitious", comparison.fictitious_P1, comparison.fictitious_P2),
    ):
        zeros = np.zeros_like(p1)
        curves.add_series(times, comparison.N, scheme, np.column_stack([p1, p2, zeros, 1.0 - p1 - p2]))
    return curves


def crossing_times(curves: CurveSet, first: float, second: float, column: str = "P1") -> List[float]:
    """Моменты смены знака разности двух непрерывных кривых (линейная интерполяция)."""
    a = curves.series(first, "continuous")
    b = curves.series(second, "continuous")
    times = a[curves.abscissa].to_numpy()
    difference = a[column].to_numpy() - b[column].to_numpy()
    crossings = []
    for i in range(1, len(times)):
        d0, d1 = difference[i - 1], difference[i]
        if times[i] > 0 and d0 * d1 < 0:
            crossings.append(float(times[i - 1] + (times[i] - times[i - 1]) * d0 / (d0 - d1)))
    return crossings


def build_figure(
    scenario: str,
    workers: int = 1,
    Lambda: Optional[float] = None,
    y_values: Optional[Sequence[float]] = None,
    time_points: Optional[int] = None,
) -> Tuple[CurveSet, Dict[str, Any], List[str]]:
    """Расчёт сценария рисунка со сводкой для JSON.

    Args:
        scenario: fig2a … fig4b
        workers: Число процессов
        Lambda: Переопределение ширины полосы (для fig4 - единственное значение)
        y_values: Переопределение набора y (fig2)
        time_points: Число точек временной сетки

    Returns:
        (кривые, сводка, колонки для графика)
    """
    cfg = preset(scenario)
    grid = cfg.time_grid if time_points is None else TimeGrid(t_max=cfg.time_grid.t_max, n_points=time_points)
    summary: Dict[str, Any] = {"scenario": cfg.scenario.value}

    if cfg.scenario.value.startswith("fig2"):
        variant = cfg.scenario.value[-1]
        y_values = list(y_values or cfg.sweep)
        curves = run_fig2(variant, y_values, Lambda or cfg.system.Lambda, grid, workers)
        if variant == "a" and len(y_values) > 0:
            study = scaling_study(y_values, SCALING_LAMBDAS, grid, workers)
            summary["scaling"] = {
                f"{y:g}": {
                    "lambdas": list(SCALING_LAMBDAS),
                    "analytic_deviation": deviations,
                    "collapse_spread": metric.spread,
                }
                for y, (deviations, metric) in study.items()
            }
        if variant == "b" and {1.0, 0.1} <= set(y_values):
            summary["crossings_y1_y0.1"] = crossing_times(curves, 1.0, 0.1)
        if variant in ("c", "d"):
            summary["final_dot_population"] = {
                f"{y:g}": float(curves.series(float(y), "continuous")[["P1", "P2"]].sum(axis=1).iloc[-1])
                for y in y_values
            }
        return curves, summary, ["P1"]

    if cfg.scenario.value == "fig3b":
        curves = run_fig3b(cfg.t0, cfg.sweep, Lambda or cfg.system.Lambda, workers)
        summary.update(max_scheme_gap=curves.metadata["max_scheme_gap"], flagged=curves.metadata["flagged"],
                       t0=cfg.t0, tau_rule="4/GammaD")
        summary["tau_regimes"] = tau_regimes(cfg.sweep, Lambda or cfg.system.Lambda)
        return curves, summary, ["P1", "P2"]

    if cfg.scenario.value in ("fig4a", "fig4b"):
        variant = cfg.scenario.value[-1]
        lambdas = [Lambda] if Lambda else cfg.lambdas
        curves = run_fig4(variant, lambdas, grid)
        if variant == "a":
            summary["peaks"] = curves.metadata["peaks"]
        return curves, summary, ["P1"] if variant == "a" else ["P1", "PR"]

    raise ConfigError(f"Сценарий {scenario} не является рисунком")
