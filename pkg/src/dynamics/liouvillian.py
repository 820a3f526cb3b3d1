"""Генератор уравнений для матрицы плотности и точное распространение во времени.

Векторизация построчная: vec(ρ)[3i + j] = ρ_ij, так что vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
"""
import threading
from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from scipy.linalg import expm

from src.errors import InvalidStateError, NumericalFailure
from src.model.density import DIM, DensityMatrix
from src.model.params import DetectorParams, SystemParams

RHS_ATOL = 1e-12
_DT_DECIMALS = 12


def vec(rho: np.ndarray) -> np.ndarray:
    """Построчная векторизация матрицы 3×3."""
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    """Обратная операция к ``vec``."""
    return np.asarray(v, dtype=complex).reshape(DIM, DIM)


def effective_hamiltonian(sys: SystemParams) -> np.ndarray:
    """Неэрмитов гамильтониан H − iΛ|R⟩⟨R| в базисе (1, 2, R)."""
    h = np.diag([sys.E1, sys.E2, sys.ER - 1j * sys.Lambda]).astype(complex)
    h[2, 0] = h[0, 2] = sys.OmegaBar1
    h[2, 1] = h[1, 2] = sys.OmegaBar2
    return h


def commutator_superop(h: np.ndarray) -> np.ndarray:
    """Супероператор ρ → −i(Hρ − ρH†) для построчной векторизации."""
    eye = np.eye(h.shape[0], dtype=complex)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.conj()))


def dissipator_superop(c: np.ndarray) -> np.ndarray:
    """Супероператор D[c]ρ = cρc† − ½{c†c, ρ} для построчной векторизации."""
    eye = np.eye(c.shape[0], dtype=complex)
    cdc = c.conj().T @ c
    return np.kron(c, c.conj()) - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))


def master_equation_rhs(rho: np.ndarray, sys: SystemParams, det: DetectorParams) -> np.ndarray:
    """Правая часть уравнений для всех девяти элементов ρ, записанная поэлементно.

    Служит независимой проверкой матрицы генератора при её сборке.
    """
    r = np.asarray(rho, dtype=complex)
    e1, e2, er, lam = sys.E1, sys.E2, sys.ER, sys.Lambda
    o1, o2 = sys.OmegaBar1, sys.OmegaBar2
    g12 = det.dot_dephasing
    g1r = det.GammaD1 / 2.0 + lam
    g2r = det.GammaD2 / 2.0 + lam
    i = 1j

    out = np.zeros((DIM, DIM), dtype=complex)
    out[0, 0] = i * o1 * (r[0, 2] - r[2, 0])
    out[1, 1] = i * o2 * (r[1, 2] - r[2, 1])
    out[2, 2] = i * o1 * (r[2, 0] - r[0, 2]) + i * o2 * (r[2, 1] - r[1, 2]) - 2.0 * lam * r[2, 2]
    out[0, 1] = i * (e2 - e1) * r[0, 1] + i * (o2 * r[0, 2] - o1 * r[2, 1]) - g12 * r[0, 1]
    out[1, 0] = -i * (e2 - e1) * r[1, 0] - i * (o2 * r[2, 0] - o1 * r[1, 2]) - g12 * r[1, 0]
    out[0, 2] = i * (er - e1) * r[0, 2] + i * o1 * (r[0, 0] - r[2, 2]) + i * o2 * r[0, 1] - g1r * r[0, 2]
    out[2, 0] = -i * (er - e1) * r[2, 0] - i * o1 * (r[0, 0] - r[2, 2]) - i * o2 * r[1, 0] - g1r * r[2, 0]
    out[1, 2] = i * (er - e2) * r[1, 2] + i * o2 * (r[1, 1] - r[2, 2]) + i * o1 * r[1, 0] - g2r * r[1, 2]
    out[2, 1] = -i * (er - e2) * r[2, 1] - i * o2 * (r[1, 1] - r[2, 2]) - i * o1 * r[0, 1] - g2r * r[2, 1]
    return out


class Liouvillian:
    """Генератор d vec(ρ)/dt = L vec(ρ) с кэшем пропагаторов exp(L·dt)."""

    def __init__(self, matrix: np.ndarray, sys: SystemParams, det: DetectorParams):
        """Инициализация генератора.

        Args:
            matrix: Матрица 9×9
            sys: Параметры системы, из которых собрана матрица
            det: Параметры детектора
        """
        matrix = np.array(matrix, dtype=complex, copy=True)
        matrix.setflags(write=False)
        self.matrix = matrix
        self.sys = sys
        self.det = det
        self._cache: Dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    def __getstate__(self) -> dict:
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state: dict) -> None:
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """dρ/dt для произвольной матрицы 3×3."""
        return unvec(self.matrix @ vec(rho))

    def trace_rate(self, rho: np.ndarray) -> float:
        """Мгновенная производная следа d Tr ρ / dt."""
        return float(np.real(np.trace(self.apply(rho))))

    def step(self, dt: float) -> np.ndarray:
        """Пропагатор exp(L·dt) из кэша."""
        key = round(float(dt), _DT_DECIMALS)
        with self._lock:
            cached = self._cache.get(key)
            if cached is None:
                cached = expm(self.matrix * key)
                cached.setflags(write=False)
                self._cache[key] = cached
                logger.debug(f"Новый пропагатор dt={key:.6g} (в кэше: {len(self._cache)})")
        return cached


def build_liouvillian(sys: SystemParams, det: Optional[DetectorParams] = None) -> Liouvillian:
    """Сборка генератора уравнений с дефазировкой от детектора.

    Дефазировка задаётся диссипатором D[√Γ_d1 n₁ + √Γ_d2 n₂]: диагональ ρ не меняется,
    ρ₁₂ затухает со скоростью (√Γ_d1 − √Γ_d2)²/2, ρ_jR - со скоростью Γ_dj/2.

    Args:
        sys: Параметры системы
        det: Параметры детектора (None - детектор выключен)

    Returns:
        Генератор 9×9
    """
    det = det or DetectorParams.off()
    matrix = commutator_superop(effective_hamiltonian(sys))
    if not det.is_off:
        c = np.diag([np.sqrt(det.GammaD1), np.sqrt(det.GammaD2), 0.0]).astype(complex)
        matrix = matrix + dissipator_superop(c)

    # Сверка с поэлементной правой частью на матричных единицах
    scale = 1.0 + np.max(np.abs(matrix))
    for k in range(DIM * DIM):
        unit = np.zeros(DIM * DIM, dtype=complex)
        unit[k] = 1.0
        expected = vec(master_equation_rhs(unvec(unit), sys, det))
        if np.max(np.abs(matrix[:, k] - expected)) > RHS_ATOL * scale:
            raise NumericalFailure(f"Генератор расходится с уравнениями в столбце {k}")

    logger.debug(
        f"Генератор собран: Λ={sys.Lambda:g}, Ω̄=({sys.OmegaBar1:.4g}, {sys.OmegaBar2:.4g}), "
        f"Γ_d=({det.GammaD1:g}, {det.GammaD2:g})"
    )
    return Liouvillian(matrix, sys, det)


def propagator(L: Liouvillian, dt: float) -> np.ndarray:
    """Точный шаг exp(L·dt) (масштабирование и возведение в квадрат, Паде).

    Args:
        L: Генератор
        dt: Шаг по времени (≥ 0)

    Returns:
        Матрица 9×9
    """
    if dt < 0:
        raise InvalidStateError(f"Отрицательный шаг по времени: {dt}")
    return L.step(dt)


def _checked(v: np.ndarray, t: float) -> DensityMatrix:
    try:
        return DensityMatrix.symmetrized(unvec(v))
    except InvalidStateError as e:
        raise NumericalFailure(f"Нарушен инвариант матрицы плотности: {e}", t=t) from e


def evolve(rho0: DensityMatrix, L: Liouvillian, t_grid: Sequence[float]) -> List[DensityMatrix]:
    """Траектория ρ(t_k) = unvec(exp(L t_k) vec(ρ₀)) на возрастающей сетке.

    Соседние шаги одинаковой длины используют один пропагатор из кэша.

    Args:
        rho0: Начальное состояние при t = 0
        L: Генератор
        t_grid: Строго возрастающие моменты времени, t_grid[0] ≥ 0

    Returns:
        Список состояний по одному на каждый момент сетки
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise InvalidStateError("Пустая временная сетка")
    if times[0] < 0:
        raise InvalidStateError(f"Сетка начинается с отрицательного времени: {times[0]}")
    if np.any(np.diff(times) <= 0):
        raise InvalidStateError("Временная сетка должна строго возрастать")

    trajectory: List[DensityMatrix] = []
    v = vec(rho0.rho)
    previous = 0.0
    for t in times:
        dt = float(t) - previous
        if dt > 0:
            v = propagator(L, dt) @ v
        trajectory.append(_checked(v, float(t)))
        previous = float(t)
    return trajectory
