"""Настройки приложения."""
from pathlib import Path

import psutil
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки приложения."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Папки проекта
    output_dir: str = Field(default="output", description="Папка для CSV/JSON результатов")
    logs_dir: str = Field(default="logs", description="Папка для логов")

    log_level: str = Field(default="INFO", description="Уровень логирования в консоли")

    # Параллельный расчёт точек развёртки (0 - по числу физических ядер)
    workers: int = Field(default=1, ge=0, description="Число процессов для развёрток")

    # Сетки
    time_points: int = Field(default=400, ge=2, description="Число точек временной сетки")
    oracle_modes: int = Field(default=16000, ge=2, description="Число мод дискретного резервуара")
    oracle_window: float = Field(
        default=40.0, gt=0.0, description="Полуширина окна резервуара в единицах Λ"
    )

    check_tolerance_scale: float = Field(
        default=1.0, gt=0.0, description="Множитель допусков в проверке check"
    )

    @property
    def output_path(self) -> Path:
        """Возвращает путь к папке output."""
        return Path(self.output_dir).resolve()

    @property
    def logs_path(self) -> Path:
        """Возвращает путь к папке logs."""
        return Path(self.logs_dir).resolve()

    @property
    def worker_count(self) -> int:
        """Фактическое число процессов."""
        if self.workers > 0:
            return self.workers
        return psutil.cpu_count(logical=False) or 1
