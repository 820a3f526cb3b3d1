"""Исключения моделирования.

Каждый класс соответствует одному классу ошибок из CLI и одному коду возврата
(см. ``EXIT_CODES``).
"""
from typing import Optional


class SimulationError(Exception):
    """Базовое исключение пакета."""


class ConfigError(SimulationError):
    """Некорректная конфигурация эксперимента или аргументы CLI."""


class InvalidStateError(SimulationError, ValueError):
    """Некорректное состояние (норма, эрмитовость, положительность)."""


class DomainError(SimulationError, ValueError):
    """Аргумент вне области определения формулы или параметра."""


class NumericalFailure(SimulationError):
    """Нарушение инвариантов матрицы плотности при распространении во времени."""

    def __init__(self, message: str, t: Optional[float] = None):
        super().__init__(message if t is None else f"{message} (t={t:.6g})")
        self.t = t


class EmptyStateError(SimulationError):
    """Измерение над состоянием с нулевым следом."""


class SurvivalExtinctionError(SimulationError):
    """Вероятность нулевого результата исчезающе мала для перенормировки."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (шаг {step})")
        self.step = step


class RecurrenceViolation(SimulationError):
    """Горизонт моделирования превышает время возврата дискретного резервуара."""


class IntegratorFailure(SimulationError):
    """Дрейф нормы в унитарной эволюции."""


class AlignmentError(SimulationError):
    """Кривые заданы на разных временных сетках."""


EXIT_CODES = {
    ConfigError: 2,
    NumericalFailure: 3,
    EmptyStateError: 3,
    SurvivalExtinctionError: 3,
    RecurrenceViolation: 3,
    IntegratorFailure: 3,
    AlignmentError: 3,
    InvalidStateError: 3,
    DomainError: 2,
}


def exit_code_for(error: BaseException) -> int:
    """Код возврата CLI для исключения.

    Args:
        error: Перехваченное исключение

    Returns:
        Код возврата (2 - ошибка использования, 3 - численная ошибка, 1 - прочее)
    """
    for error_class in type(error).__mro__:
        if error_class in EXIT_CODES:
            return EXIT_CODES[error_class]
    return 1
