"""Модель: параметры системы и усечённая матрица плотности."""
from .density import (
    BASIS,
    DensityMatrix,
    bright_dark_inverse,
    bright_state,
    dark_bright_transform,
    dark_state,
    occupations,
    pure_state,
)
from .params import DetectorParams, MeasurementSchedule, SystemParams

__all__ = [
    "BASIS",
    "DensityMatrix",
    "DetectorParams",
    "MeasurementSchedule",
    "SystemParams",
    "bright_dark_inverse",
    "bright_state",
    "dark_bright_transform",
    "dark_state",
    "occupations",
    "pure_state",
]
