"""Усечённая матрица плотности в базисе {|1⟩, |2⟩, |R⟩}."""
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from src.errors import InvalidStateError

# Порядок базиса фиксирован: (1, 2, R)
BASIS = ("1", "2", "R")
DIM = 3

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10

# |1̃(2̃)⟩ = (|1⟩ ∓ |2⟩)/√2, строки - новые базисные векторы.
# Фаза |2̃⟩ взята отрицательной: матрица вещественная симметричная, T = T⁻¹.
_S = 1.0 / np.sqrt(2.0)
DARK_BRIGHT = np.array(
    [
        [_S, -_S, 0.0],
        [-_S, -_S, 0.0],
        [0.0, 0.0, 1.0],
    ],
    dtype=complex,
)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Неизменяемая эрмитова матрица 3×3 со следом ≤ 1.

    След меньше единицы означает вероятность, ушедшую в широкополосный резервуар.
    """

    rho: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        rho = np.array(self.rho, dtype=complex, copy=True)
        if rho.shape != (DIM, DIM):
            raise InvalidStateError(f"Ожидалась матрица 3×3, получено {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise InvalidStateError("Матрица плотности содержит NaN/inf")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_ATOL:
            raise InvalidStateError("Матрица плотности не эрмитова")
        rho = 0.5 * (rho + rho.conj().T)
        trace = float(np.real(np.trace(rho)))
        if trace < -TRACE_ATOL or trace > 1.0 + TRACE_ATOL:
            raise InvalidStateError(f"След вне [0, 1]: {trace:.3e}")
        smallest = float(np.linalg.eigvalsh(rho)[0])
        if smallest < -PSD_ATOL:
            raise InvalidStateError(f"Отрицательное собственное значение: {smallest:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def symmetrized(cls, rho: np.ndarray) -> "DensityMatrix":
        """Создаёт состояние из матрицы после симметризации (ρ+ρ†)/2."""
        rho = np.asarray(rho, dtype=complex)
        return cls(0.5 * (rho + rho.conj().T))

    @classmethod
    def basis(cls, label: str) -> "DensityMatrix":
        """Базисное состояние |1⟩, |2⟩ или |R⟩."""
        if label not in BASIS:
            raise InvalidStateError(f"Неизвестное базисное состояние: {label}")
        rho = np.zeros((DIM, DIM), dtype=complex)
        index = BASIS.index(label)
        rho[index, index] = 1.0
        return cls(rho)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "DensityMatrix":
        """Восстановление из 9 пар (re, im) в построчном порядке."""
        if len(pairs) != DIM * DIM:
            raise InvalidStateError(f"Ожидалось 9 пар (re, im), получено {len(pairs)}")
        values = np.array([complex(re, im) for re, im in pairs], dtype=complex)
        return cls(values.reshape(DIM, DIM))

    def to_pairs(self) -> List[List[float]]:
        """Построчный список 9 пар (re, im) для JSON."""
        return [[float(z.real), float(z.imag)] for z in self.rho.reshape(-1)]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def __getitem__(self, index: Tuple[int, int]) -> complex:
        return complex(self.rho[index])


def pure_state(amplitudes: Iterable[complex]) -> DensityMatrix:
    """Чистое состояние v v† из усечённых амплитуд (b₁, b₂, b_R).

    Args:
        amplitudes: Три комплексные амплитуды, |v|² ∈ (0, 1]

    Returns:
        Матрица плотности ранга 1 со следом |v|²
    """
    v = np.asarray(list(amplitudes), dtype=complex)
    if v.shape != (DIM,):
        raise InvalidStateError(f"Ожидалось 3 амплитуды, получено {v.shape}")
    norm2 = float(np.real(np.vdot(v, v)))
    if norm2 == 0.0:
        raise InvalidStateError("Нулевой вектор амплитуд")
    if norm2 > 1.0 + TRACE_ATOL:
        raise InvalidStateError(f"Норма амплитуд больше единицы: {norm2:.6g}")
    return DensityMatrix(np.outer(v, v.conj()))


def dark_state() -> DensityMatrix:
    """Тёмное состояние (|1⟩ − |2⟩)/√2."""
    return pure_state(DARK_BRIGHT[0])


def bright_state() -> DensityMatrix:
    """Светлое состояние (|1⟩ + |2⟩)/√2."""
    return pure_state([_S, _S, 0.0])


def dark_bright_transform(rho: DensityMatrix) -> DensityMatrix:
    """Переход в базис {|1̃⟩, |2̃⟩, |R⟩}, |1̃(2̃)⟩ = (|1⟩ ∓ |2⟩)/√2.

    Знак выбран для Ω̄₁, Ω̄₂ > 0: при E₁ = E₂ и Γ₁ = Γ₂ от резервуара отделено |1̃⟩.
    """
    return DensityMatrix.symmetrized(DARK_BRIGHT @ rho.rho @ DARK_BRIGHT.conj().T)


def bright_dark_inverse(rho: DensityMatrix) -> DensityMatrix:
    """Обратное преобразование из базиса {|1̃⟩, |2̃⟩, |R⟩} в {|1⟩, |2⟩, |R⟩}."""
    return DensityMatrix.symmetrized(DARK_BRIGHT.conj().T @ rho.rho @ DARK_BRIGHT)


def occupations(rho: DensityMatrix) -> Tuple[float, float, float, float]:
    """Заселённости (P₁, P₂, P_R, P_leaked), P_leaked = 1 − Tr ρ."""
    p1, p2, pr = (float(np.real(rho.rho[i, i])) for i in range(DIM))
    p1, p2, pr = (min(max(p, 0.0), 1.0) for p in (p1, p2, pr))
    leaked = min(max(1.0 - (p1 + p2 + pr), 0.0), 1.0)
    return p1, p2, pr, leaked
