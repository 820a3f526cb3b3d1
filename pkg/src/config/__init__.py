"""Конфигурация приложения."""
from .experiment import ExperimentConfig, Scenario, TimeGrid, load_config, load_config_data, preset
from .settings import Settings

__all__ = [
    "ExperimentConfig",
    "Scenario",
    "Settings",
    "TimeGrid",
    "load_config",
    "load_config_data",
    "preset",
]
