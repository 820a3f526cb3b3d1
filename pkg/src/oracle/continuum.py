"""Прямая проверка модели фиктивной ямы: дискретный лоренцев континуум.

Исходный гамильтониан (две точки + N мод резервуара) интегрируется в явном виде
и сравнивается с эволюцией усечённой матрицы плотности.
"""
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from src.dynamics.liouvillian import build_liouvillian, evolve
from src.errors import IntegratorFailure, InvalidStateError, RecurrenceViolation
from src.model.density import occupations, pure_state
from src.model.params import DetectorParams, SystemParams

NORM_DRIFT_MAX = 1e-6

# (N, W/Λ) при постоянном шаге по энергии: расширяется только окно
DEFAULT_REFINEMENT: Tuple[Tuple[int, float], ...] = ((4000, 10.0), (8000, 20.0), (16000, 40.0))


@dataclass(frozen=True, eq=False)
class DiscretizedReservoir:
    """N мод на равномерной сетке [E_R − W, E_R + W] (середины ячеек)."""

    N: int
    W: float
    ER: float
    energies: np.ndarray = field(repr=False)
    omega1: np.ndarray = field(repr=False)
    omega2: np.ndarray = field(repr=False)

    @property
    def dE(self) -> float:
        return 2.0 * self.W / self.N

    @property
    def recurrence_time(self) -> float:
        """Время возврата 2π/dE дискретного спектра."""
        return 2.0 * math.pi / self.dE


@dataclass(frozen=True, eq=False)
class AmplitudeState:
    """Амплитуды (b₁, b₂, b_r) замкнутой системы."""

    b1: complex
    b2: complex
    br: np.ndarray = field(repr=False)

    @classmethod
    def in_dots(cls, b1: complex, b2: complex, N: int) -> "AmplitudeState":
        """Электрон в точках, резервуар пуст."""
        return cls(complex(b1), complex(b2), np.zeros(N, dtype=complex))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate(([self.b1, self.b2], np.asarray(self.br, dtype=complex)))

    @property
    def norm(self) -> float:
        v = self.vector
        return float(np.real(np.vdot(v, v)))


@dataclass(frozen=True, eq=False)
class OracleTrajectory:
    """Заселённости точек вдоль унитарной эволюции."""

    times: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    reservoir: np.ndarray


@dataclass(frozen=True, eq=False)
class OracleComparison:
    """Сравнение дискретного континуума и модели фиктивной ямы на общей сетке."""

    N: int
    W: float
    deviation: float
    deviation_dots: float
    oracle: OracleTrajectory = field(repr=False)
    fictitious_P1: np.ndarray = field(repr=False)
    fictitious_P2: np.ndarray = field(repr=False)


def lorentzian_density(energies: np.ndarray, Gamma: float, ER: float, Lambda: float) -> np.ndarray:
    """Спектральная плотность Ω²ρ(E) = ΓΛ²/(2π[(E − E_R)² + Λ²])."""
    return Gamma * Lambda ** 2 / (2.0 * math.pi * ((energies - ER) ** 2 + Lambda ** 2))


def build_reservoir(sys: SystemParams, N: int, W: float) -> DiscretizedReservoir:
    """Дискретизация лоренцева континуума.

    Args:
        sys: Параметры системы (Γ₁, Γ₂, Λ, E_R)
        N: Число мод (≥ 2)
        W: Полуширина окна по энергии

    Returns:
        Резервуар с Ω_jr = √(dE·Γ_jΛ²/(2π[(E_r − E_R)² + Λ²]))
    """
    if N < 2:
        raise InvalidStateError(f"Нужно не меньше двух мод: N={N}")
    if W <= 0:
        raise InvalidStateError(f"Полуширина окна должна быть положительной: W={W}")
    dE = 2.0 * W / N
    energies = sys.ER - W + (np.arange(N) + 0.5) * dE
    omega1 = np.sqrt(dE * lorentzian_density(energies, sys.Gamma1, sys.ER, sys.Lambda))
    omega2 = np.sqrt(dE * lorentzian_density(energies, sys.Gamma2, sys.ER, sys.Lambda))
    return DiscretizedReservoir(N=N, W=W, ER=sys.ER, energies=energies, omega1=omega1, omega2=omega2)


def hamiltonian(sys: SystemParams, res: DiscretizedReservoir) -> sparse.csr_matrix:
    """Разреженный эрмитов гамильтониан (N+2)×(N+2); индексы 0, 1 - точки."""
    n = res.N + 2
    modes = np.arange(2, n)
    rows = np.concatenate(([0, 1], modes, modes, modes, np.zeros(res.N, int), np.ones(res.N, int)))
    cols = np.concatenate(([0, 1], modes, np.zeros(res.N, int), np.ones(res.N, int), modes, modes))
    data = np.concatenate(
        ([sys.E1, sys.E2], res.energies, res.omega1, res.omega2, res.omega1, res.omega2)
    ).astype(complex)
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


def schrodinger_evolve(
    psi0: AmplitudeState, sys: SystemParams, res: DiscretizedReservoir, t_grid: Sequence[float]
) -> OracleTrajectory:
    """Унитарная эволюция i∂ψ/∂t = Hψ на возрастающей сетке времён.

    Args:
        psi0: Нормированное начальное состояние
        sys: Параметры системы
        res: Дискретный резервуар
        t_grid: Моменты времени в пределах времени возврата

    Returns:
        P₁(t), P₂(t) и вес резервуара Σ|b_r|²
    """
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
        raise InvalidStateError("Сетка времён должна быть непустой, неотрицательной и возрастающей")
    if psi0.br.shape != (res.N,):
        raise InvalidStateError(f"Размер амплитуд резервуара {psi0.br.shape} не совпадает с N={res.N}")
    if abs(psi0.norm - 1.0) > NORM_DRIFT_MAX:
        raise InvalidStateError(f"Начальное состояние не нормировано: {psi0.norm:.8f}")
    if times[-1] >= res.recurrence_time:
        raise RecurrenceViolation(
            f"Горизонт {times[-1]:g} превышает время возврата {res.recurrence_time:.4g}"
        )

    generator = (-1j * hamiltonian(sys, res)).tocsr()
    scaled = {}
    psi = psi0.vector
    p1, p2, rest = [], [], []
    previous = 0.0
    for t in times:
        dt = float(t) - previous
        if dt > 0:
            key = round(dt, 12)
            if key not in scaled:
                scaled[key] = (generator * key).tocsr()
            psi = expm_multiply(scaled[key], psi)
        probabilities = np.abs(psi) ** 2
        norm = float(probabilities.sum())
        if abs(norm - 1.0) > NORM_DRIFT_MAX:
            raise IntegratorFailure(f"Дрейф нормы {norm - 1.0:.3e} при t={t:.6g}")
        p1.append(probabilities[0])
        p2.append(probabilities[1])
        rest.append(probabilities[2:].sum())
        previous = float(t)
    return OracleTrajectory(times=times, P1=np.array(p1), P2=np.array(p2), reservoir=np.array(rest))


def compare_fictitious(
    sys: SystemParams,
    N: int,
    W: float,
    t_max: float,
    amplitudes: Tuple[complex, complex] = (1.0, 0.0),
    n_points: int = 201,
) -> OracleComparison:
    """Максимальное отклонение P₁(t) дискретного континуума от модели фиктивной ямы.

    Args:
        sys: Параметры системы
        N: Число мод
        W: Полуширина окна
        t_max: Горизонт сравнения
        amplitudes: Начальные амплитуды (b₁, b₂)
        n_points: Число точек общей сетки

    Returns:
        Результат сравнения с отклонениями по P₁ и по P₁ + P₂
    """
    res = build_reservoir(sys, N, W)
    if t_max >= res.recurrence_time:
        raise RecurrenceViolation(
            f"Горизонт {t_max:g} превышает время возврата 2π/dE = {res.recurrence_time:.4g} "
            f"(N={N}, W={W:g})"
        )
    times = np.linspace(0.0, t_max, n_points)
    b1, b2 = amplitudes
    logger.info(f"Оракул: N={N}, W={W:g}, dE={res.dE:.4g}, горизонт {t_max:g}")
    oracle = schrodinger_evolve(AmplitudeState.in_dots(b1, b2, N), sys, res, times)

    rho0 = pure_state([b1, b2, 0.0])
    trajectory = evolve(rho0, build_liouvillian(sys, DetectorParams.off()), times)
    fict = np.array([occupations(rho)[:2] for rho in trajectory])

    deviation = float(np.max(np.abs(oracle.P1 - fict[:, 0])))
    deviation_dots = float(np.max(np.abs(oracle.P1 + oracle.P2 - fict[:, 0] - fict[:, 1])))
    logger.info(f"✓ Отклонение P₁: {deviation:.3e}, отклонение P₁+P₂: {deviation_dots:.3e}")
    return OracleComparison(
        N=N,
        W=W,
        deviation=deviation,
        deviation_dots=deviation_dots,
        oracle=oracle,
        fictitious_P1=fict[:, 0],
        fictitious_P2=fict[:, 1],
    )


@dataclass(frozen=True)
class RefinementResult:
    """Отклонения по уровням уточнения (N, W)."""

    levels: Tuple[Tuple[int, float], ...]
    deviations: Tuple[float, ...]

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.deviations, self.deviations[1:]))

    @property
    def final(self) -> float:
        return self.deviations[-1]


def refinement_sweep(
    sys: SystemParams,
    t_max: float,
    levels: Optional[Iterable[Tuple[int, float]]] = None,
) -> RefinementResult:
    """Серия сравнений на уточняющихся сетках.

    Args:
        sys: Параметры системы
        t_max: Горизонт сравнения
        levels: Пары (N, W/Λ); по умолчанию окно удваивается при постоянном dE

    Returns:
        Отклонения P₁ по уровням
    """
    levels = tuple(levels or DEFAULT_REFINEMENT)
    deviations: List[float] = []
    for N, window in levels:
        deviations.append(compare_fictitious(sys, N, window * sys.Lambda, t_max).deviation)
    result = RefinementResult(
        levels=tuple((N, window * sys.Lambda) for N, window in levels),
        deviations=tuple(deviations),
    )
    if not result.strictly_decreasing:
        logger.warning(f"⚠ Отклонения не убывают строго: {result.deviations}")
    return result
