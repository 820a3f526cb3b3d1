"""Физические параметры: двойная точка, континуум и детектор.

Все энергии и скорости заданы в единицах Γ (ħ = 1).
"""
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import DomainError


class SystemParams(BaseModel):
    """Параметры двойной точки, фиктивной ямы и континуума."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    E1: float = Field(default=0.0, description="Энергия уровня точки 1")
    E2: float = Field(default=0.0, description="Энергия уровня точки 2")
    ER: float = Field(default=0.0, description="Центр лоренцева спектра (уровень фиктивной ямы)")
    Gamma1: float = Field(default=1.0, ge=0.0, description="Скорость связи точки 1 с континуумом")
    Gamma2: float = Field(default=1.0, ge=0.0, description="Скорость связи точки 2 с континуумом")
    Lambda: float = Field(default=5.0, gt=0.0, description="Ширина полосы континуума")

    @property
    def OmegaBar1(self) -> float:
        """Связь точки 1 с фиктивной ямой: √(Γ₁Λ/2)."""
        return math.sqrt(self.Gamma1 * self.Lambda / 2.0)

    @property
    def OmegaBar2(self) -> float:
        """Связь точки 2 с фиктивной ямой: √(Γ₂Λ/2)."""
        return math.sqrt(self.Gamma2 * self.Lambda / 2.0)

    @classmethod
    def symmetric(cls, Gamma: float = 1.0, Lambda: float = 5.0, E: float = 0.0) -> "SystemParams":
        """Симметричная конфигурация E₁ = E₂ = E_R, Γ₁ = Γ₂."""
        return cls(E1=E, E2=E, ER=E, Gamma1=Gamma, Gamma2=Gamma, Lambda=Lambda)

    @classmethod
    def misaligned(
        cls, delta_E: float = 0.05, Gamma: float = 1.0, Lambda: float = 5.0
    ) -> "SystemParams":
        """Расстроенные уровни E₁,₂ = ±delta_E при E_R = 0."""
        return cls(E1=delta_E, E2=-delta_E, ER=0.0, Gamma1=Gamma, Gamma2=Gamma, Lambda=Lambda)


class DetectorParams(BaseModel):
    """Скорости дефазировки, наводимые точечным контактом."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    GammaD1: float = Field(default=0.0, ge=0.0, description="Скорость дефазировки точки 1")
    GammaD2: float = Field(default=0.0, ge=0.0, description="Скорость дефазировки точки 2")

    @classmethod
    def off(cls) -> "DetectorParams":
        """Детектор выключен."""
        return cls(GammaD1=0.0, GammaD2=0.0)

    @classmethod
    def from_rate(cls, GammaD: float, delta: float = 0.0, Gamma: float = 1.0) -> "DetectorParams":
        """Асимметричный детектор Γ_d1,2 = Γ_d(1 ± δ√(Γ/Γ_d)).

        Args:
            GammaD: Средняя скорость измерения
            delta: Параметр асимметрии δ
            Gamma: Единица скорости Γ

        Returns:
            Параметры детектора
        """
        if GammaD < 0:
            raise DomainError(f"Скорость измерения отрицательна: {GammaD}")
        if GammaD == 0:
            return cls.off()
        d = delta * math.sqrt(Gamma / GammaD)
        if abs(d) > 1.0:
            raise DomainError(
                f"Асимметрия δ={delta} слишком велика для Γ_d={GammaD}: Γ_d2 < 0"
            )
        return cls(GammaD1=GammaD * (1.0 + d), GammaD2=GammaD * (1.0 - d))

    @property
    def is_off(self) -> bool:
        return self.GammaD1 == 0.0 and self.GammaD2 == 0.0

    @property
    def dot_dephasing(self) -> float:
        """Скорость дефазировки между точками (√Γ_d1 − √Γ_d2)²/2."""
        return (math.sqrt(self.GammaD1) - math.sqrt(self.GammaD2)) ** 2 / 2.0


class MeasurementSchedule(BaseModel):
    """Расписание частых проективных проверок резервуара."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau: float = Field(gt=0.0, description="Интервал между измерениями")
    n_steps: int = Field(ge=1, description="Число измерений")
    mode: str = Field(default="nonselective", description="nonselective | null-conditioned")

    @model_validator(mode="after")
    def _check_mode(self) -> "MeasurementSchedule":
        if self.mode not in ("nonselective", "null-conditioned"):
            raise ValueError(f"Неизвестный режим измерений: {self.mode}")
        return self

    @classmethod
    def covering(cls, tau: float, t_max: float, mode: str = "nonselective") -> "MeasurementSchedule":
        """Расписание с числом шагов, покрывающим [0, t_max]."""
        n_steps = max(1, int(math.floor(t_max / tau + 1e-9)))
        return cls(tau=tau, n_steps=n_steps, mode=mode)
