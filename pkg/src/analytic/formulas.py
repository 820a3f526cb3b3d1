"""Аналитические формулы в пределе Λ, Γ_d → ∞ при фиксированных скейлинговых переменных."""
import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Tuple

from src.errors import DomainError
from src.model.params import DetectorParams

SMALL_X_MAX = 2.0
LARGE_X_MIN = 5.0
_SERIES_X = 1e-4


class Regime(StrEnum):
    """Режим отождествления τ ↔ Γ_d⁻¹."""

    SMALL_X = "small-x"
    LARGE_X = "large-x"


@dataclass(frozen=True)
class ScalingPoint:
    """Точка в скейлинговых переменных y = Λ/Γ_d, x = Λτ."""

    y: float
    x: float
    tau: float
    regime: Regime
    # x попал между порогами 2 и 5, ни одно отождествление не обосновано
    intermediate: bool = False


def alpha_continuous(y: float) -> float:
    """Показатель затухания при непрерывном наблюдении: α = 2y/(1 + 2y)."""
    if y < 0 or math.isnan(y):
        raise DomainError(f"y должно быть неотрицательным: {y}")
    if math.isinf(y):
        return 1.0
    return 2.0 * y / (1.0 + 2.0 * y)


def alpha_frequent(x: float) -> float:
    """Показатель затухания при частых измерениях: α′ = 1 − (1 − e⁻ˣ)/x.

    При x → 0 возвращается предел по непрерывности (ряд x/2 − x²/6 + x³/24).
    """
    if x < 0 or math.isnan(x):
        raise DomainError(f"x должно быть неотрицательным: {x}")
    if math.isinf(x):
        return 1.0
    if x < _SERIES_X:
        return x / 2.0 - x * x / 6.0 + x ** 3 / 24.0
    return 1.0 - (-math.expm1(-x)) / x


def _check_survival_args(t: float, Gamma: float, alpha: float) -> None:
    if t < 0:
        raise DomainError(f"Время должно быть неотрицательным: {t}")
    if Gamma <= 0:
        raise DomainError(f"Γ должна быть положительной: {Gamma}")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"α вне [0, 1]: {alpha}")


def p1_survival(t: float, Gamma: float, alpha: float) -> float:
    """Вероятность остаться в начальной точке: P₁ = ¼(e^(−αΓt) + 1)²."""
    _check_survival_args(t, Gamma, alpha)
    return 0.25 * (math.exp(-alpha * Gamma * t) + 1.0) ** 2


def p2_transfer(t: float, Gamma: float, alpha: float) -> float:
    """Заселённость второй точки в том же пределе: P₂ = ¼(1 − e^(−αΓt))²."""
    _check_survival_args(t, Gamma, alpha)
    return 0.25 * (1.0 - math.exp(-alpha * Gamma * t)) ** 2


def detector_rate(Vd: float, T: float, Tprime: float) -> float:
    """Скорость измерения точечного контакта Γ_d = V_d(√T − √T′)²/2π."""
    for name, value in (("Vd", Vd), ("T", T), ("Tprime", Tprime)):
        if value < 0:
            raise DomainError(f"{name} должно быть неотрицательным: {value}")
    return Vd * (math.sqrt(T) - math.sqrt(Tprime)) ** 2 / (2.0 * math.pi)


def detector_rates_from_bias(
    Vd: float, T: float, Tprime: float, delta: float = 0.0, Gamma: float = 1.0
) -> DetectorParams:
    """Параметры детектора для напряжения смещения V_d."""
    return DetectorParams.from_rate(detector_rate(Vd, T, Tprime), delta=delta, Gamma=Gamma)


def tau_from_gamma_d(GammaD: float, regime: Regime | str) -> float:
    """Интервал измерений, отвечающий скорости Γ_d.

    Args:
        GammaD: Скорость измерения
        regime: small-x (τ = 4/Γ_d, x < 2) или large-x (τ = 2/Γ_d, x > 5)

    Returns:
        Интервал τ
    """
    if GammaD <= 0:
        raise DomainError(f"Γ_d должна быть положительной: {GammaD}")
    regime = Regime(regime)
    return (4.0 if regime is Regime.SMALL_X else 2.0) / GammaD


def identify_tau(GammaD: float, Lambda: float) -> Tuple[ScalingPoint, ...]:
    """Отождествление τ ↔ Γ_d⁻¹ с пометкой режима.

    Если ни один порог не выполнен, возвращаются обе точки с флагом intermediate.
    """
    if Lambda <= 0:
        raise DomainError(f"Λ должна быть положительной: {Lambda}")
    y = Lambda / GammaD
    small = ScalingPoint(y=y, x=Lambda * tau_from_gamma_d(GammaD, Regime.SMALL_X),
                         tau=tau_from_gamma_d(GammaD, Regime.SMALL_X), regime=Regime.SMALL_X)
    large = ScalingPoint(y=y, x=Lambda * tau_from_gamma_d(GammaD, Regime.LARGE_X),
                         tau=tau_from_gamma_d(GammaD, Regime.LARGE_X), regime=Regime.LARGE_X)
    if small.x < SMALL_X_MAX:
        return (small,)
    if large.x > LARGE_X_MIN:
        return (large,)
    return (
        ScalingPoint(small.y, small.x, small.tau, small.regime, intermediate=True),
        ScalingPoint(large.y, large.x, large.tau, large.regime, intermediate=True),
    )
