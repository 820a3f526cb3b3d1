"""Эксперименты: сценарии рисунков, метрики, запись результатов и проверки приёмки."""
from .acceptance import CheckResult, format_table, run_checks
from .curves import PROBABILITY_COLUMNS, CollapseMetric, CurveSet, collapse_metric
from .figures import (
    ReturnPeak,
    build_figure,
    crossing_times,
    find_peak,
    oracle_curves,
    return_peak,
    run_continuous_sweep,
    run_fig2,
    run_fig3b,
    run_fig4,
    run_frequent_sweep,
    scaling_study,
)
from .output import write_csv, write_plot_script, write_scenario, write_summary
from .workers import parallel_map

__all__ = [
    "PROBABILITY_COLUMNS",
    "CheckResult",
    "CollapseMetric",
    "CurveSet",
    "ReturnPeak",
    "build_figure",
    "collapse_metric",
    "crossing_times",
    "find_peak",
    "format_table",
    "oracle_curves",
    "parallel_map",
    "return_peak",
    "run_checks",
    "run_continuous_sweep",
    "run_fig2",
    "run_fig3b",
    "run_fig4",
    "run_frequent_sweep",
    "scaling_study",
    "tau_regimes",
    "write_csv",
    "write_plot_script",
    "write_scenario",
    "write_summary",
]
