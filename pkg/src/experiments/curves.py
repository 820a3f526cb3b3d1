"""Наборы кривых и метрика скейлингового коллапса."""
import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
import pandas as pd

from src.analytic import alpha_continuous, p1_survival
from src.errors import AlignmentError
from src.model.density import DensityMatrix, occupations

PROBABILITY_COLUMNS = ["P1", "P2", "PR", "Pleaked"]
SCHEMES = ("continuous", "frequent", "analytic", "oracle", "fictitious")
GRID_ATOL = 1e-12


@dataclass
class CurveSet:
    """Таблица серий (абсцисса, метка, схема, P1, P2, PR, Pleaked) с метаданными."""

    abscissa: str
    label: str
    frame: pd.DataFrame
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def empty(cls, abscissa: str = "t", label: str = "y", **metadata: Any) -> "CurveSet":
        return cls(abscissa, label, pd.DataFrame(columns=cls.columns_for(abscissa, label)), dict(metadata))

    @staticmethod
    def columns_for(abscissa: str, label: str) -> List[str]:
        return [abscissa, label, "scheme", *PROBABILITY_COLUMNS]

    @property
    def columns(self) -> List[str]:
        return self.columns_for(self.abscissa, self.label)

    def add_series(self, x: Sequence[float], label_value: Any, scheme: str, probabilities: np.ndarray) -> None:
        """Добавляет серию; строки серии сортируются по абсциссе.

        Args:
            x: Значения абсциссы
            label_value: Значение метки серии (y, Λ, ...)
            scheme: Схема (continuous | frequent | analytic | oracle | fictitious)
            probabilities: Массив (n, 4) из P1, P2, PR, Pleaked
        """
        if scheme not in SCHEMES:
            raise ValueError(f"Неизвестная схема: {scheme}")
        probabilities = np.clip(np.asarray(probabilities, dtype=float), 0.0, 1.0)
        series = pd.DataFrame(probabilities, columns=PROBABILITY_COLUMNS)
        series.insert(0, "scheme", scheme)
        series.insert(0, self.label, label_value)
        series.insert(0, self.abscissa, np.asarray(x, dtype=float))
        series = series.sort_values(self.abscissa, kind="stable")
        frames = [frame for frame in (self.frame, series) if not frame.empty]
        self.frame = pd.concat(frames, ignore_index=True)[self.columns]

    def add_states(self, x: Sequence[float], label_value: Any, scheme: str,
                   states: Iterable[DensityMatrix]) -> None:
        """Добавляет серию, вычисляя заселённости из матриц плотности."""
        self.add_series(x, label_value, scheme, np.array([occupations(rho) for rho in states]))

    def series(self, label_value: Any, scheme: str) -> pd.DataFrame:
        """Строки одной серии."""
        mask = (self.frame[self.label] == label_value) & (self.frame["scheme"] == scheme)
        return self.frame.loc[mask].reset_index(drop=True)

    def extend(self, other: "CurveSet") -> None:
        """Присоединяет серии другого набора с теми же колонками."""
        if other.columns != self.columns:
            raise AlignmentError(f"Колонки не совпадают: {other.columns} vs {self.columns}")
        frames = [frame for frame in (self.frame, other.frame) if not frame.empty]
        self.frame = pd.concat(frames, ignore_index=True)[self.columns]


@dataclass(frozen=True)
class CollapseMetric:
    """Разброс семейства кривых при фиксированном y и отклонение от аналитики."""

    y: float
    spread: float
    analytic_deviation: float
    largest_lambda: float


def collapse_metric(curves: Sequence[CurveSet], y: float, Gamma: float = 1.0) -> CollapseMetric:
    """Метрика коллапса кривых P₁(t) при фиксированном y и разных Λ.

    Args:
        curves: Наборы с непрерывной схемой, в metadata["Lambda"] - ширина полосы
        y: Скейлинговая переменная Λ/Γ_d
        Gamma: Единица скорости

    Returns:
        Максимальное попарное sup-отклонение и отклонение кривой с наибольшей Λ от аналитики
    """
    if len(curves) < 2:
        raise AlignmentError("Для метрики коллапса нужно не меньше двух кривых")
    series = []
    for curve in curves:
        rows = curve.series(y, "continuous")
        if rows.empty:
            raise AlignmentError(f"Нет непрерывной кривой для y={y}")
        series.append((float(curve.metadata["Lambda"]), rows[curve.abscissa].to_numpy(), rows["P1"].to_numpy()))

    times = series[0][1]
    for _, t, _ in series[1:]:
        if t.shape != times.shape or np.max(np.abs(t - times)) > GRID_ATOL:
            raise AlignmentError("Кривые заданы на разных временных сетках")

    spread = max(
        float(np.max(np.abs(a[2] - b[2]))) for a, b in itertools.combinations(series, 2)
    )
    largest = max(series, key=lambda item: item[0])
    alpha = alpha_continuous(y)
    analytic = np.array([p1_survival(t, Gamma, alpha) for t in times])
    return CollapseMetric(
        y=y,
        spread=spread,
        analytic_deviation=float(np.max(np.abs(largest[2] - analytic))),
        largest_lambda=largest[0],
    )
