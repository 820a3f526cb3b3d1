"""Набор проверок приёмки: аналитика, скейлинг, частые измерения, эффект возврата, инварианты."""
import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
from loguru import logger

from src.analytic import alpha_continuous, alpha_frequent, p1_survival
from src.config.experiment import CAPTION_DELTA, TimeGrid
from src.dynamics import build_liouvillian, evolve
from src.errors import SimulationError
from src.measurement import KRAUS, MeasurementSchedule, run_frequent
from src.model import DensityMatrix, DetectorParams, SystemParams, dark_state, occupations
from src.oracle import refinement_sweep

from .figures import (
    SCALING_LAMBDAS,
    build_figure,
    crossing_times,
    return_peak,
    run_fig2,
    run_fig3b,
    run_frequent_sweep,
    scaling_study,
)
from .output import write_csv

FREQUENT_LAMBDA = 100.0
FREQUENT_X_VALUES = (0.1, 1.0, 5.0)
FREQUENT_HORIZON = 20.0
RETURN_PROBE_TARGET = (0.037, 0.004)
RETURN_PEAK_TARGET = (0.058, 0.006)
RETURN_PEAK_TIME = (0.43, 0.15)
DARK_HORIZON = 50.0
ORACLE_LAMBDA = 5.0
ORACLE_HORIZON = 10.0
RANDOM_STATES = 20
RANDOM_SEED = 20240101
STRUCTURE_SCENARIOS = ("fig2a", "fig2b", "fig2c", "fig2d", "fig4a", "fig4b")
STRUCTURE_FIG3B_RATIOS = (0.05, 1.0, 20.0)
STRUCTURE_TAUS = (0.01, 0.2)


@dataclass(frozen=True)
class CheckResult:
    """Результат одной проверки."""

    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""


def check_analytic(scale: float = 1.0) -> CheckResult:
    """α(1) = 2/3, α′(1) = e⁻¹, P₁(0) = 1, P₁(∞) = 1/4."""
    errors = [
        abs(alpha_continuous(1.0) - 2.0 / 3.0),
        abs(alpha_frequent(1.0) - math.exp(-1.0)),
        abs(p1_survival(0.0, 1.0, 0.5) - 1.0),
        abs(p1_survival(1e4, 1.0, 0.5) - 0.25),
    ]
    value = max(errors)
    threshold = 1e-12 * scale
    return CheckResult("analytic formulas", value, threshold, value <= threshold)


def check_scaling_collapse(scale: float = 1.0, workers: int = 1) -> CheckResult:
    """Отклонение от аналитики монотонно убывает по Λ и мало при Λ = 100Γ."""
    study = scaling_study(lambdas=SCALING_LAMBDAS, workers=workers)
    monotone = all(
        all(b < a for a, b in zip(deviations, deviations[1:])) for deviations, _ in study.values()
    )
    value = max(deviations[-1] for deviations, _ in study.values())
    threshold = 1e-2 * scale
    detail = "" if monotone else "отклонение не убывает по Λ"
    return CheckResult("scaling collapse", value, threshold, monotone and value <= threshold, detail)


def check_frequent_law(scale: float = 1.0) -> CheckResult:
    """P₁(nτ) частых измерений против ¼(e^(−α′t) + 1)² при Λ = 100Γ."""
    sys = SystemParams.symmetric(Lambda=FREQUENT_LAMBDA)
    worst = 0.0
    for x in FREQUENT_X_VALUES:
        tau = x / FREQUENT_LAMBDA
        run = run_frequent(DensityMatrix.basis("1"), sys, MeasurementSchedule.covering(tau, FREQUENT_HORIZON))
        alpha = alpha_frequent(x)
        p1 = np.array([occupations(rho)[0] for rho in run.states])
        analytic = np.array([p1_survival(t, 1.0, alpha) for t in run.times])
        deviation = float(np.max(np.abs(p1 - analytic)))
        logger.debug(f"x={x:g}: τ={tau:.4g}, отклонение {deviation:.3e}")
        worst = max(worst, deviation)
    threshold = 2e-2 * scale
    return CheckResult("frequent-measurement law", worst, threshold, worst <= threshold)


def check_scheme_equivalence(scale: float = 1.0, workers: int = 1) -> CheckResult:
    """Совпадение схем в сценарии рисунка 3(b) для выровненных уровней."""
    curves = run_fig3b(workers=workers)
    value = curves.metadata["max_scheme_gap"]["aligned"]
    threshold = 2e-2 * scale
    return CheckResult("scheme equivalence", value, threshold, value <= threshold)


def check_return_effect(scale: float = 1.0) -> CheckResult:
    """P₁(0.2) ≈ 0.037 и максимум ≈ 0.058 при τ ≈ 0.43 для Λ = 5Γ."""
    peak = return_peak(SystemParams.symmetric(Lambda=5.0), TimeGrid(t_max=2.0, n_points=400).times())
    probe_target, probe_tol = RETURN_PROBE_TARGET
    peak_target, peak_tol = RETURN_PEAK_TARGET
    time_target, time_rel = RETURN_PEAK_TIME
    probe_error = abs(peak.P1_at_probe - probe_target)
    passed = (
        probe_error <= probe_tol * scale
        and abs(peak.P1_peak - peak_target) <= peak_tol * scale
        and abs(peak.t_peak - time_target) <= time_rel * time_target * scale
    )
    detail = f"P1(0.2)={peak.P1_at_probe:.4f}, пик {peak.P1_peak:.4f} при τ={peak.t_peak:.4f}"
    return CheckResult("return effect", probe_error, probe_tol * scale, passed, detail)


def check_dark_state(scale: float = 1.0) -> CheckResult:
    """Тёмное состояние не распадается без детектора и распадается при асимметричном детекторе."""
    sys = SystemParams.symmetric(Lambda=5.0)
    times = np.linspace(0.0, DARK_HORIZON, 501)
    free = evolve(dark_state(), build_liouvillian(sys, DetectorParams.off()), times)
    in_dots = np.array([sum(occupations(rho)[:2]) for rho in free])
    leakage = float(np.max(np.abs(in_dots - 1.0)))

    detector = DetectorParams.from_rate(sys.Lambda, delta=CAPTION_DELTA)
    monitored = evolve(dark_state(), build_liouvillian(sys, detector), times)
    decay = np.array([sum(occupations(rho)[:2]) for rho in monitored])
    decays = bool(decay[-1] < decay[0] - 1e-3)

    threshold = 1e-9 * scale
    detail = "" if decays else "при асимметричном детекторе P1+P2 не убывает"
    return CheckResult("dark state", leakage, threshold, leakage <= threshold and decays, detail)


def _random_state(rng: np.random.Generator) -> DensityMatrix:
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    return DensityMatrix.symmetrized(rho / np.real(np.trace(rho)) * rng.uniform(0.2, 1.0))


def check_structure(scale: float = 1.0) -> CheckResult:
    """Закон следа, полнота операторов Крауса и корректность состояний на траекториях рисунков."""
    rng = np.random.default_rng(RANDOM_SEED)
    worst = 0.0
    for Lambda in (5.0, 20.0, 100.0):
        sys = SystemParams.symmetric(Lambda=Lambda)
        L = build_liouvillian(sys, DetectorParams.from_rate(Lambda, delta=CAPTION_DELTA))
        for _ in range(RANDOM_STATES):
            rho = _random_state(rng)
            expected = -2.0 * Lambda * float(np.real(rho.rho[2, 2]))
            worst = max(worst, abs(L.trace_rate(rho.rho) - expected) / Lambda)

    completeness = float(np.max(np.abs(KRAUS.completeness() - np.eye(3))))

    # DensityMatrix проверяет эрмитовость и положительность при каждом построении
    for scenario in STRUCTURE_SCENARIOS:
        build_figure(scenario, time_points=100)
    run_fig3b(ratios=STRUCTURE_FIG3B_RATIOS)
    for mode in ("nonselective", "null-conditioned"):
        run_frequent_sweep(SystemParams.symmetric(), STRUCTURE_TAUS, FREQUENT_HORIZON, mode)
    covered = [*STRUCTURE_SCENARIOS, "fig3b", "frequent"]

    threshold = 1e-12 * scale
    passed = worst <= threshold and completeness == 0.0
    return CheckResult("structural invariants", worst, threshold, passed,
                       f"полнота Крауса: {completeness:g}; траектории: {', '.join(covered)}")


def check_determinism(scale: float = 1.0) -> CheckResult:
    """Повторная запись сценария fig2a даёт идентичные байты."""
    grid = TimeGrid(t_max=20.0, n_points=100)
    with tempfile.TemporaryDirectory() as tmp:
        first = write_csv(run_fig2("a", time_grid=grid), Path(tmp) / "first.csv").read_bytes()
        second = write_csv(run_fig2("a", time_grid=grid), Path(tmp) / "second.csv").read_bytes()
    identical = first == second
    return CheckResult("csv determinism", 0.0 if identical else 1.0, 0.0, identical)


def check_crossing(scale: float = 1.0) -> CheckResult:
    """Кривые y = 1 и y = 0.1 при E₁,₂ = ±0.05Γ пересекаются на (0, 20]."""
    crossings = crossing_times(run_fig2("b", y_values=(1.0, 0.1)), 1.0, 0.1)
    value = float(len(crossings))
    detail = ", ".join(f"{t:.3f}" for t in crossings)
    return CheckResult("curve crossing", value, 1.0, value >= 1.0, detail)


def check_oracle(scale: float = 1.0) -> CheckResult:
    """Дискретный континуум сходится к модели фиктивной ямы при уточнении (N, W)."""
    result = refinement_sweep(SystemParams.symmetric(Lambda=ORACLE_LAMBDA), ORACLE_HORIZON)
    threshold = 1e-2 * scale
    detail = ", ".join(f"{d:.2e}" for d in result.deviations)
    passed = result.final <= threshold and result.strictly_decreasing
    return CheckResult("oracle equivalence", result.final, threshold, passed, detail)


def run_checks(full: bool = False, scale: float = 1.0, workers: int = 1) -> List[CheckResult]:
    """Запуск всех проверок; ошибка расчёта считается проваленной проверкой.

    Args:
        full: Включить проверку оракулом (минуты расчёта)
        scale: Множитель допусков
        workers: Число процессов для развёрток

    Returns:
        Результаты в порядке запуска
    """
    checks: List[Tuple[str, Callable[[], CheckResult]]] = [
        ("analytic formulas", lambda: check_analytic(scale)),
        ("scaling collapse", lambda: check_scaling_collapse(scale, workers)),
        ("frequent-measurement law", lambda: check_frequent_law(scale)),
        ("scheme equivalence", lambda: check_scheme_equivalence(scale, workers)),
        ("return effect", lambda: check_return_effect(scale)),
        ("dark state", lambda: check_dark_state(scale)),
        ("structural invariants", lambda: check_structure(scale)),
        ("csv determinism", lambda: check_determinism(scale)),
        ("curve crossing", lambda: check_crossing(scale)),
    ]
    if full:
        checks.append(("oracle equivalence", lambda: check_oracle(scale)))

    results = []
    for name, check in checks:
        try:
            result = check()
        except SimulationError as e:
            logger.error(f"Проверка прервана ошибкой: {e}")
            result = CheckResult(name, math.nan, math.nan, False, str(e))
        if result.passed:
            logger.success(f"✓ {result.name}: {result.value:.3e} (порог {result.threshold:.1e})")
        else:
            logger.warning(f"⚠ {result.name}: {result.value:.3e} (порог {result.threshold:.1e}) {result.detail}")
        results.append(result)
    return results


def format_table(results: List[CheckResult]) -> str:
    """Таблица name / value / threshold / status."""
    width = max(len(r.name) for r in results)
    lines = [f"{'name':<{width}}  {'value':>10}  {'threshold':>10}  status"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {r.value:>10.3e}  {r.threshold:>10.1e}  {status}")
    return "\n".join(lines)
