"""Протокол частых проективных измерений в резервуаре."""
from src.model.params import MeasurementSchedule

from .protocol import (
    KRAUS,
    Branches,
    FrequentRun,
    KrausPair,
    measure_branches,
    run_frequent,
    sample_at,
    step_branches,
    step_nonselective,
)

__all__ = [
    "KRAUS",
    "Branches",
    "FrequentRun",
    "KrausPair",
    "MeasurementSchedule",
    "measure_branches",
    "run_frequent",
    "sample_at",
    "step_branches",
    "step_nonselective",
]
