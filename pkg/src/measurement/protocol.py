"""Частые проективные проверки резервуара: свободная эволюция + измерение каждые τ."""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from src.dynamics.liouvillian import Liouvillian, build_liouvillian, propagator, unvec, vec
from src.errors import EmptyStateError, NumericalFailure, SurvivalExtinctionError, InvalidStateError
from src.model.density import DensityMatrix
from src.model.params import DetectorParams, MeasurementSchedule, SystemParams

EMPTY_TRACE = 1e-15
EXTINCTION_PROBABILITY = 1e-300


@dataclass(frozen=True, eq=False)
class KrausPair:
    """Операторы Крауса проверки «в точках / в яме» в базисе (1, 2, R)."""

    M0: np.ndarray = field(default_factory=lambda: np.diag([1, 1, 0]))
    MR: np.ndarray = field(default_factory=lambda: np.diag([0, 0, 1]))

    @property
    def E0(self) -> np.ndarray:
        return self.M0.conj().T @ self.M0

    @property
    def ER(self) -> np.ndarray:
        return self.MR.conj().T @ self.MR

    def completeness(self) -> np.ndarray:
        """M₀†M₀ + M_R†M_R (единичная матрица для корректной пары)."""
        return self.E0 + self.ER

    def sandwich(self, rho: np.ndarray) -> np.ndarray:
        """Неселективное измерение M₀ρM₀† + M_RρM_R†."""
        return self.M0 @ rho @ self.M0.conj().T + self.MR @ rho @ self.MR.conj().T


KRAUS = KrausPair()


@dataclass(frozen=True, eq=False)
class Branches:
    """Исходы одной проверки: вероятности и нормированные условные состояния."""

    P0: float
    rho0: Optional[DensityMatrix]
    PR: float
    rhoR: Optional[DensityMatrix]


@dataclass(frozen=True, eq=False)
class FrequentRun:
    """Траектория в моменты t = nτ (состояния сразу после измерения)."""

    schedule: MeasurementSchedule
    liouvillian: Liouvillian = field(repr=False)
    times: np.ndarray = field(repr=False)
    states: List[DensityMatrix] = field(repr=False)
    # Накопленная вероятность нулевого результата (только в режиме null-conditioned)
    null_probability: Optional[np.ndarray] = field(default=None, repr=False)


def _normalized(rho: np.ndarray, p: float) -> Optional[DensityMatrix]:
    if p <= EMPTY_TRACE:
        return None
    return DensityMatrix.symmetrized(rho / p)


def measure_branches(rho: DensityMatrix, kraus: KrausPair = KRAUS) -> Branches:
    """Разложение состояния по исходам проверки резервуара.

    Args:
        rho: Состояние перед измерением (след > 0)
        kraus: Пара операторов Крауса

    Returns:
        P₀ = Tr(E₀ρ), ρ₀ = M₀ρM₀†/P₀ и аналогично для исхода «в яме»;
        пустая ветвь возвращается как None
    """
    if rho.trace <= EMPTY_TRACE:
        raise EmptyStateError(f"Измерение над пустым состоянием: Tr ρ = {rho.trace:.3e}")
    p0 = float(np.real(np.trace(kraus.E0 @ rho.rho)))
    pr = float(np.real(np.trace(kraus.ER @ rho.rho)))
    unnorm0 = kraus.M0 @ rho.rho @ kraus.M0.conj().T
    unnormR = kraus.MR @ rho.rho @ kraus.MR.conj().T
    return Branches(P0=p0, rho0=_normalized(unnorm0, p0), PR=pr, rhoR=_normalized(unnormR, pr))


def _free_step(rho: np.ndarray, U: np.ndarray) -> np.ndarray:
    return unvec(U @ vec(rho))


def step_nonselective(rhoM: DensityMatrix, U: np.ndarray, kraus: KrausPair = KRAUS) -> DensityMatrix:
    """Один шаг итерации: свободная эволюция за τ, затем неселективное измерение.

    Args:
        rhoM: Смесь после предыдущего измерения
        U: Пропагатор свободной эволюции exp(Lτ) без детектора
        kraus: Пара операторов Крауса

    Returns:
        M₀·U(ρ)·M₀† + M_R·U(ρ)·M_R†
    """
    return DensityMatrix.symmetrized(kraus.sandwich(_free_step(rhoM.rho, U)))


def step_branches(
    rho0: np.ndarray, rhoR: np.ndarray, U: np.ndarray, kraus: KrausPair = KRAUS
) -> Tuple[np.ndarray, np.ndarray]:
    """Итерация для ненормированных условных состояний ρ₀(n), ρ_R(n).

    Сумма ветвей совпадает с неселективным состоянием ``step_nonselective``.
    """
    evolved = _free_step(np.asarray(rho0) + np.asarray(rhoR), U)
    return (
        kraus.M0 @ evolved @ kraus.M0.conj().T,
        kraus.MR @ evolved @ kraus.MR.conj().T,
    )


def run_frequent(
    rho0: DensityMatrix, sys: SystemParams, sched: MeasurementSchedule, kraus: KrausPair = KRAUS
) -> FrequentRun:
    """Эволюция с проверками резервуара через каждые τ.

    Свободная эволюция всегда идёт без детектора: две схемы измерения - альтернативы.

    Args:
        rho0: Начальное состояние
        sys: Параметры системы
        sched: Расписание (τ, число шагов, режим)
        kraus: Пара операторов Крауса

    Returns:
        Траектория длины n_steps + 1 в моменты t = nτ
    """
    L = build_liouvillian(sys, DetectorParams.off())
    U = propagator(L, sched.tau)
    conditioned = sched.mode == "null-conditioned"
    logger.debug(
        f"Частые измерения: τ={sched.tau:.6g}, шагов {sched.n_steps}, режим {sched.mode}, "
        f"x=Λτ={sys.Lambda * sched.tau:.4g}"
    )

    states = [rho0]
    null_probability = [1.0] if conditioned else None
    state = rho0
    cumulative = 1.0
    for n in range(1, sched.n_steps + 1):
        try:
            if conditioned:
                branches = measure_branches(DensityMatrix.symmetrized(_free_step(state.rho, U)), kraus)
                if branches.P0 < EXTINCTION_PROBABILITY or branches.rho0 is None:
                    raise SurvivalExtinctionError(
                        f"Вероятность нулевого результата исчезла: P₀={branches.P0:.3e}", step=n
                    )
                cumulative *= branches.P0
                if cumulative < EXTINCTION_PROBABILITY:
                    raise SurvivalExtinctionError(
                        f"Накопленная вероятность нулевого результата исчезла: {cumulative:.3e}", step=n
                    )
                state = branches.rho0
                null_probability.append(cumulative)
            else:
                state = step_nonselective(state, U, kraus)
        except (InvalidStateError, EmptyStateError) as e:
            raise NumericalFailure(f"Нарушен инвариант при измерении: {e}", t=n * sched.tau) from e
        states.append(state)

    times = sched.tau * np.arange(sched.n_steps + 1, dtype=float)
    if conditioned:
        logger.debug(f"Накопленная вероятность нулевого результата к t={times[-1]:.6g}: {cumulative:.6e}")
    return FrequentRun(
        schedule=sched,
        liouvillian=L,
        times=times,
        states=states,
        null_probability=None if null_probability is None else np.asarray(null_probability),
    )


def sample_at(run: FrequentRun, t: float) -> DensityMatrix:
    """Состояние в произвольный момент t: последнее измеренное при n = ⌊t/τ⌋ плюс свободная эволюция.

    Args:
        run: Результат ``run_frequent``
        t: Момент считывания

    Returns:
        Матрица плотности в момент t
    """
    if t < 0:
        raise InvalidStateError(f"Отрицательный момент считывания: {t}")
    tau = run.schedule.tau
    n = min(int(math.floor(t / tau + 1e-9)), len(run.states) - 1)
    remainder = t - n * tau
    if remainder <= 1e-12:
        return run.states[n]
    v = propagator(run.liouvillian, remainder) @ vec(run.states[n].rho)
    try:
        return DensityMatrix.symmetrized(unvec(v))
    except InvalidStateError as e:
        raise NumericalFailure(f"Нарушен инвариант при считывании: {e}", t=t) from e
