"""Конфигурация экспериментов (JSON, schema_version = 1) и пресеты сценариев."""
import json
from enum import StrEnum
from pathlib import Path
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.errors import ConfigError
from src.model.density import DensityMatrix, dark_state, pure_state
from src.model.params import DetectorParams, MeasurementSchedule, SystemParams

SCHEMA_VERSION = 1

# Константы из подписей к рисункам
CAPTION_Y_VALUES = (1.0, 0.1, 0.01)
CAPTION_LAMBDA = 5.0
CAPTION_DELTA = 0.2
CAPTION_LEVEL_SHIFT = 0.05
CAPTION_T0 = 20.0
FIG3B_RATIO_RANGE = (0.05, 20.0)
FIG3B_POINTS = 25
FIG4_LAMBDAS = (5.0, 10.0, 20.0)


class Scenario(StrEnum):
    """Идентификаторы сценариев."""

    FIG2A = "fig2a"
    FIG2B = "fig2b"
    FIG2C = "fig2c"
    FIG2D = "fig2d"
    FIG3B = "fig3b"
    FIG4A = "fig4a"
    FIG4B = "fig4b"
    CUSTOM = "custom"


class TimeGrid(BaseModel):
    """Равномерная сетка [0, t_max]."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    t_max: float = Field(default=20.0, gt=0.0, description="Горизонт в единицах Γ⁻¹")
    n_points: int = Field(default=400, ge=2, description="Число точек")

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)


class ExperimentConfig(BaseModel):
    """Полное описание одного прогона."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    scenario: Scenario = Scenario.CUSTOM
    scheme: Literal["continuous", "frequent"] = "continuous"
    system: SystemParams = Field(default_factory=SystemParams.symmetric)
    detector: DetectorParams = Field(default_factory=DetectorParams.off)
    # δ асимметрии детектора для развёрток по y (Γ_d = Λ/y)
    delta: float = Field(default=0.0, ge=0.0, description="Асимметрия детектора δ")
    schedule: Optional[MeasurementSchedule] = None
    time_grid: TimeGrid = Field(default_factory=TimeGrid)
    initial: str = Field(default="1", description="1 | 2 | R | dark")
    amplitudes: Optional[List[Tuple[float, float]]] = Field(
        default=None, description="Начальные амплитуды (re, im) для b₁, b₂, b_R"
    )
    sweep: List[float] = Field(default_factory=list, description="Значения y или Γ_d/Λ")
    lambdas: List[float] = Field(default_factory=list, description="Ширины полосы Λ")
    t0: float = Field(default=CAPTION_T0, gt=0.0, description="Момент считывания")
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        if self.initial not in ("1", "2", "R", "dark"):
            raise ValueError(f"Неизвестное начальное состояние: {self.initial}")
        if self.amplitudes is not None and len(self.amplitudes) != 3:
            raise ValueError("Нужно ровно три амплитуды (b₁, b₂, b_R)")
        if any(value <= 0 for value in self.sweep):
            raise ValueError("Значения развёртки должны быть положительными")
        if any(value <= 0 for value in self.lambdas):
            raise ValueError("Ширины полосы должны быть положительными")
        if self.scheme == "frequent" and self.schedule is None:
            raise ValueError("Для схемы frequent нужно расписание измерений (schedule)")
        return self

    def initial_state(self) -> DensityMatrix:
        """Начальная матрица плотности."""
        if self.amplitudes is not None:
            return pure_state([complex(re, im) for re, im in self.amplitudes])
        if self.initial == "dark":
            return dark_state()
        return DensityMatrix.basis(self.initial)

    def with_overrides(self, **updates) -> "ExperimentConfig":
        """Копия с заменой полей и повторной валидацией."""
        data = self.model_dump()
        data.update({key: value for key, value in updates.items() if value is not None})
        return load_config_data(data)


def load_config_data(data: dict) -> ExperimentConfig:
    """Валидация словаря конфигурации."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Некорректная конфигурация: {e}") from e


def load_config(path: Path) -> ExperimentConfig:
    """Чтение конфигурации из JSON-файла.

    Args:
        path: Путь к файлу

    Returns:
        Проверенная конфигурация
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"Файл конфигурации не найден: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Файл конфигурации не является JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("Конфигурация должна быть JSON-объектом")
    return load_config_data(data)


def fig3b_ratio_grid() -> List[float]:
    """Логарифмическая сетка Γ_d/Λ ∈ [0.05, 20], 25 точек."""
    low, high = FIG3B_RATIO_RANGE
    return [float(v) for v in np.logspace(np.log10(low), np.log10(high), FIG3B_POINTS)]


def preset(scenario: Scenario | str) -> ExperimentConfig:
    """Конфигурация сценария с параметрами из подписей к рисункам.

    Args:
        scenario: Идентификатор сценария

    Returns:
        Конфигурация
    """
    try:
        scenario = Scenario(scenario)
    except ValueError as e:
        raise ConfigError(f"Неизвестный сценарий: {scenario}") from e

    aligned = SystemParams.symmetric(Lambda=CAPTION_LAMBDA)
    misaligned = SystemParams.misaligned(delta_E=CAPTION_LEVEL_SHIFT, Lambda=CAPTION_LAMBDA)
    fig2_grid = TimeGrid(t_max=CAPTION_T0, n_points=400)

    if scenario is Scenario.FIG2A:
        return ExperimentConfig(scenario=scenario, system=aligned, sweep=list(CAPTION_Y_VALUES),
                                time_grid=fig2_grid)
    if scenario is Scenario.FIG2B:
        return ExperimentConfig(scenario=scenario, system=misaligned, sweep=list(CAPTION_Y_VALUES),
                                time_grid=fig2_grid)
    if scenario is Scenario.FIG2C:
        return ExperimentConfig(scenario=scenario, system=aligned, delta=CAPTION_DELTA,
                                sweep=list(CAPTION_Y_VALUES), time_grid=fig2_grid)
    if scenario is Scenario.FIG2D:
        return ExperimentConfig(scenario=scenario, system=misaligned, delta=CAPTION_DELTA,
                                sweep=list(CAPTION_Y_VALUES), time_grid=fig2_grid)
    if scenario is Scenario.FIG3B:
        return ExperimentConfig(scenario=scenario, system=aligned, sweep=fig3b_ratio_grid(),
                                t0=CAPTION_T0)
    if scenario is Scenario.FIG4A:
        return ExperimentConfig(scenario=scenario, system=aligned, initial="R",
                                lambdas=list(FIG4_LAMBDAS), time_grid=TimeGrid(t_max=2.0, n_points=400))
    if scenario is Scenario.FIG4B:
        return ExperimentConfig(scenario=scenario, system=aligned, initial="1",
                                lambdas=list(FIG4_LAMBDAS), time_grid=TimeGrid(t_max=5.0, n_points=400))
    return ExperimentConfig(scenario=scenario)
