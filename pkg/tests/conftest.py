"""Общие фикстуры тестов."""
import numpy as np
import pytest

from src.model import DensityMatrix, SystemParams


@pytest.fixture
def symmetric() -> SystemParams:
    """E₁ = E₂ = E_R = 0, Γ₁ = Γ₂ = 1, Λ = 5."""
    return SystemParams.symmetric(Lambda=5.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def random_density(rng: np.random.Generator, trace: float = 1.0) -> DensityMatrix:
    """Случайная эрмитова положительная матрица с заданным следом."""
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    return DensityMatrix.symmetrized(trace * rho / np.real(np.trace(rho)))


@pytest.fixture
def random_states(rng: np.random.Generator):
    return [random_density(rng, trace=rng.uniform(0.3, 1.0)) for _ in range(20)]


@pytest.fixture
def isolated_run(tmp_path, monkeypatch):
    """Папки вывода и логов во временной директории."""
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "output"))
    monkeypatch.setenv("LOGS_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("WORKERS", "1")
    monkeypatch.chdir(tmp_path)
    return tmp_path
