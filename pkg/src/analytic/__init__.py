"""Аналитика: вероятность выживания, показатели α и связь Γ_d ↔ τ."""
from .formulas import (
    LARGE_X_MIN,
    SMALL_X_MAX,
    Regime,
    ScalingPoint,
    alpha_continuous,
    alpha_frequent,
    detector_rate,
    detector_rates_from_bias,
    identify_tau,
    p1_survival,
    p2_transfer,
    tau_from_gamma_d,
)

__all__ = [
    "LARGE_X_MIN",
    "SMALL_X_MAX",
    "Regime",
    "ScalingPoint",
    "alpha_continuous",
    "alpha_frequent",
    "detector_rate",
    "detector_rates_from_bias",
    "identify_tau",
    "p1_survival",
    "p2_transfer",
    "tau_from_gamma_d",
]
