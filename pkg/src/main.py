"""Точка входа в приложение."""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from src.config import ExperimentConfig, Settings, load_config, preset
from src.config.experiment import Scenario
from src.dynamics import build_liouvillian, evolve
from src.errors import ConfigError, exit_code_for
from src.experiments import (
    CurveSet,
    build_figure,
    format_table,
    oracle_curves,
    run_checks,
    run_continuous_sweep,
    run_frequent_sweep,
    write_scenario,
    write_summary,
)
from src.measurement import MeasurementSchedule, run_frequent
from src.model import DetectorParams, SystemParams, occupations
from src.oracle import compare_fictitious, refinement_sweep
from src.utils import setup_logger

FIGURES = [s.value for s in Scenario if s is not Scenario.CUSTOM]
ORACLE_THRESHOLD = 1e-2


def build_parser() -> argparse.ArgumentParser:
    """Парсер аргументов командной строки."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=str, default=None, help="Папка вывода (по умолчанию OUTPUT_DIR или output)")
    common.add_argument("--workers", type=int, default=None, help="Число процессов (0 - по числу ядер)")

    parser = argparse.ArgumentParser(
        prog="python -m src.main",
        description="ZenoTransfer - перенос электрона между квантовыми точками через континуум конечной ширины",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", parents=[common], help="Одна траектория по конфигурации")
    simulate.add_argument("--config", type=str, help="JSON-конфигурация (schema_version = 1)")
    simulate.add_argument("--scenario", type=str, choices=[s.value for s in Scenario], help="Пресет сценария")
    simulate.add_argument("--lambda", dest="Lambda", type=float, help="Ширина полосы Λ")
    simulate.add_argument("--y", type=float, help="Скейлинговая переменная y = Λ/Γ_d (включает детектор)")
    simulate.add_argument("--tau", type=float, help="Интервал измерений τ (включает схему frequent)")
    simulate.add_argument("--mode", choices=["nonselective", "null-conditioned"], help="Режим частых измерений")
    simulate.add_argument("--tmax", type=float, help="Горизонт времени")

    figure = commands.add_parser("figure", parents=[common], help="Сценарий рисунка → CSV + скрипт графика")
    figure.add_argument("id", choices=FIGURES, help="Идентификатор рисунка")
    figure.add_argument("--lambda", dest="Lambda", type=float, help="Ширина полосы Λ")
    figure.add_argument("--y", type=float, nargs="+", help="Значения y (рисунок 2)")

    sweep = commands.add_parser("sweep", parents=[common], help="Развёртка по собственной сетке y или τ")
    sweep.add_argument("--config", type=str, help="JSON-конфигурация; sweep задаёт значения y")
    sweep.add_argument("--scenario", type=str, choices=[s.value for s in Scenario], help="Пресет сценария")
    sweep.add_argument("--lambda", dest="Lambda", type=float, help="Ширина полосы Λ")
    sweep.add_argument("--y", type=float, nargs="+", help="Значения y (непрерывное наблюдение)")
    sweep.add_argument("--tau", type=float, nargs="+", help="Значения τ (частые измерения)")
    sweep.add_argument("--mode", choices=["nonselective", "null-conditioned"], default="nonselective")
    sweep.add_argument("--tmax", type=float, help="Горизонт времени")

    oracle = commands.add_parser("oracle-validate", parents=[common], help="Сравнение с дискретным континуумом")
    oracle.add_argument("--lambda", dest="Lambda", type=float, default=5.0, help="Ширина полосы Λ")
    oracle.add_argument("--n", type=int, default=None, help="Число мод N")
    oracle.add_argument("--w", type=float, default=None, help="Полуширина окна W")
    oracle.add_argument("--tmax", type=float, default=10.0, help="Горизонт сравнения")
    oracle.add_argument("--threshold", type=float, default=ORACLE_THRESHOLD, help="Допустимое отклонение P₁")
    oracle.add_argument("--refine", action="store_true", help="Серия уточняющихся сеток (N, W)")

    check = commands.add_parser("check", parents=[common], help="Набор проверок приёмки")
    check.add_argument("--full", action="store_true", help="Включить проверку оракулом (минуты)")

    return parser


def _output_dir(args: argparse.Namespace, settings: Settings, cfg: Optional[ExperimentConfig] = None) -> Path:
    if args.out:
        return Path(args.out).resolve()
    if cfg is not None and cfg.output_dir:
        return Path(cfg.output_dir).resolve()
    return settings.output_path


def _workers(args: argparse.Namespace, settings: Settings) -> int:
    if args.workers is None:
        return settings.worker_count
    if args.workers < 0:
        raise ConfigError(f"Число процессов не может быть отрицательным: {args.workers}")
    return settings.model_copy(update={"workers": args.workers}).worker_count


def _positive(name: str, value: Optional[float]) -> None:
    if value is not None and value <= 0:
        raise ConfigError(f"{name} должно быть положительным: {value}")


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Пресет → файл конфигурации → флаги командной строки."""
    if args.config:
        cfg = load_config(Path(args.config))
    else:
        cfg = preset(args.scenario or Scenario.CUSTOM)

    for name in ("Lambda", "y", "tmax"):
        value = getattr(args, name, None)
        for item in value if isinstance(value, list) else [value]:
            _positive(name, item)

    updates = {}
    if args.Lambda is not None:
        updates["system"] = {**cfg.system.model_dump(), "Lambda": args.Lambda}
    if args.tmax is not None:
        updates["time_grid"] = {**cfg.time_grid.model_dump(), "t_max": args.tmax}
    return cfg.with_overrides(**updates)


def command_simulate(args: argparse.Namespace, settings: Settings) -> int:
    """Одна траектория: непрерывное наблюдение или частые измерения."""
    cfg = resolve_config(args)
    _positive("tau", args.tau)
    if args.y is not None:
        detector = DetectorParams.from_rate(cfg.system.Lambda / args.y, delta=cfg.delta)
        cfg = cfg.with_overrides(detector=detector.model_dump())
    if args.tau is not None or args.mode is not None:
        tau = args.tau or (cfg.schedule.tau if cfg.schedule else None)
        if tau is None:
            raise ConfigError("Для частых измерений нужен --tau")
        schedule = MeasurementSchedule.covering(tau, cfg.time_grid.t_max, args.mode or "nonselective")
        cfg = cfg.with_overrides(scheme="frequent", schedule=schedule.model_dump())

    rho0 = cfg.initial_state()
    curves = CurveSet.empty("t", "Lambda", scenario=cfg.scenario.value)
    null_probability = None
    if cfg.scheme == "continuous":
        times = cfg.time_grid.times()
        states = evolve(rho0, build_liouvillian(cfg.system, cfg.detector), times)
    else:
        run = run_frequent(rho0, cfg.system, cfg.schedule)
        times, states = run.times, run.states
        if run.null_probability is not None:
            null_probability = float(run.null_probability[-1])
    curves.add_states(times, cfg.system.Lambda, cfg.scheme, states)

    out_dir = _output_dir(args, settings, cfg)
    write_scenario(curves, "simulate", out_dir, columns=["P1", "P2", "PR"])
    final = states[-1]
    p1, p2, pr, leaked = occupations(final)
    final_summary = {"t": float(times[-1]), "rho": final.to_pairs(), "P1": p1, "P2": p2, "PR": pr,
                     "Pleaked": leaked, "config": json.loads(cfg.model_dump_json())}
    if null_probability is not None:
        final_summary["null_probability"] = null_probability
    write_summary(final_summary, out_dir / "simulate_final.json")
    print(f"t={times[-1]:g}: P1={p1:.6f} P2={p2:.6f} PR={pr:.6f} Pleaked={leaked:.6f}")
    if null_probability is not None:
        print(f"Вероятность ни разу не найти электрон в яме: {null_probability:.6e}")
    return 0


def command_figure(args: argparse.Namespace, settings: Settings) -> int:
    """Сценарий рисунка по пресету."""
    _positive("Lambda", args.Lambda)
    for y in args.y or []:
        _positive("y", y)
    if args.y and not args.id.startswith("fig2"):
        raise ConfigError(f"Флаг --y относится только к рисункам 2a-2d, а не к {args.id}")
    curves, summary, columns = build_figure(
        args.id, workers=_workers(args, settings), Lambda=args.Lambda, y_values=args.y,
        time_points=settings.time_points,
    )
    written = write_scenario(curves, args.id, _output_dir(args, settings), summary, columns)
    for path in written:
        print(path)
    if summary.get("flagged"):
        logger.warning("⚠ Схемы расходятся сильнее допуска, см. сводку")
    return 0


def command_sweep(args: argparse.Namespace, settings: Settings) -> int:
    """Развёртка по y (непрерывное наблюдение) или по τ (частые измерения)."""
    cfg = resolve_config(args)
    workers = _workers(args, settings)
    if args.tau:
        for tau in args.tau:
            _positive("tau", tau)
        curves = run_frequent_sweep(cfg.system, args.tau, cfg.time_grid.t_max, args.mode,
                                    cfg.initial_state(), workers)
    else:
        y_values = args.y or cfg.sweep
        if not y_values:
            raise ConfigError("Не задана сетка развёртки: --y, --tau или sweep в конфигурации")
        curves = run_continuous_sweep(cfg.system, y_values, cfg.time_grid.times(), cfg.delta,
                                      cfg.initial_state(), workers)
    summary = None
    if "null_probability" in curves.metadata:
        summary = {"mode": args.mode, "null_probability": curves.metadata["null_probability"]}
    for path in write_scenario(curves, "sweep", _output_dir(args, settings, cfg), summary):
        print(path)
    return 0


def command_oracle(args: argparse.Namespace, settings: Settings) -> int:
    """Сравнение модели фиктивной ямы с дискретным континуумом."""
    _positive("Lambda", args.Lambda)
    _positive("tmax", args.tmax)
    sys_params = SystemParams.symmetric(Lambda=args.Lambda)
    out_dir = _output_dir(args, settings)

    if args.refine:
        result = refinement_sweep(sys_params, args.tmax)
        deviation = result.final
        summary = {"levels": result.levels, "deviations": result.deviations,
                   "strictly_decreasing": result.strictly_decreasing}
        passed = deviation <= args.threshold and result.strictly_decreasing
    else:
        N = args.n or settings.oracle_modes
        W = args.w or settings.oracle_window * args.Lambda
        if N < 2 or W <= 0:
            raise ConfigError(f"Некорректная сетка резервуара: N={N}, W={W}")
        comparison = compare_fictitious(sys_params, N, W, args.tmax)
        write_scenario(oracle_curves(comparison, args.Lambda), "oracle", out_dir, columns=["P1", "P2"])
        deviation = comparison.deviation
        summary = {"N": N, "W": W, "deviation": deviation, "deviation_dots": comparison.deviation_dots}
        passed = deviation <= args.threshold

    summary.update(Lambda=args.Lambda, t_max=args.tmax, threshold=args.threshold, passed=passed)
    write_summary(summary, out_dir / "oracle_summary.json")
    print(f"sup|P1 - P1_fictitious| = {deviation:.3e} (порог {args.threshold:.1e})")
    if not passed:
        logger.error(f"Отклонение {deviation:.3e} выше порога {args.threshold:.1e}")
        return 3
    return 0


def command_check(args: argparse.Namespace, settings: Settings) -> int:
    """Набор проверок приёмки с таблицей результатов."""
    results = run_checks(full=args.full, scale=settings.check_tolerance_scale,
                         workers=_workers(args, settings))
    print(format_table(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error(f"Проверки не пройдены: {', '.join(failed)}")
        return 3
    logger.success(f"✓ Все проверки пройдены: {len(results)}")
    return 0


COMMANDS = {
    "simulate": command_simulate,
    "figure": command_figure,
    "sweep": command_sweep,
    "oracle-validate": command_oracle,
    "check": command_check,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Основная функция приложения.

    Args:
        argv: Аргументы командной строки (None - sys.argv)

    Returns:
        Код возврата (0 - успех, 2 - ошибка использования, 3 - численная ошибка, 1 - прочее)
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = Settings()
        setup_logger(settings.logs_path, settings.log_level)
        logger.info(f"Команда {args.command}")
        code = COMMANDS[args.command](args, settings)
        if code == 0:
            logger.success(f"✓ Команда {args.command} завершена")
        return code

    except KeyboardInterrupt:
        logger.warning("Прервано пользователем")
        return 1

    except Exception as e:
        code = exit_code_for(e)
        logger.error(f"Ошибка ({type(e).__name__}): {e}")
        if code == 1:
            logger.exception("Детали ошибки:")
        return code


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
