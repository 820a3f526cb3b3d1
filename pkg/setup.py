"""Установка ZenoTransfer: зависимости, проверка численного стека, .env и папки результатов.

Запуск: python setup.py
"""
import importlib
import shutil
import subprocess
import sys
from pathlib import Path
from typing import Callable, List, Tuple

# enum.StrEnum и синтаксис X | Y в аннотациях
MIN_PYTHON = (3, 12)

# Модуль → что без него не работает
REQUIRED_MODULES = {
    "numpy": "матрицы плотности",
    "scipy": "пропагаторы exp(Lτ) и дискретный континуум",
    "pandas": "таблицы кривых и CSV",
    "loguru": "логирование",
    "pydantic_settings": "настройки из .env",
    "psutil": "число ядер для развёрток",
}
OPTIONAL_MODULES = {"matplotlib": "скрипты plot_<id>.py"}


def check_python() -> bool:
    version = sys.version_info
    if version[:2] < MIN_PYTHON:
        print(f"❌ Python {version.major}.{version.minor}: нужен {MIN_PYTHON[0]}.{MIN_PYTHON[1]}+ (enum.StrEnum)")
        return False
    print(f"✓ Python {version.major}.{version.minor}.{version.micro}")
    return True


def install_requirements() -> bool:
    requirements = Path("requirements.txt")
    if not requirements.exists():
        print("❌ Нет requirements.txt: запустите скрипт из корня проекта")
        return False
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", str(requirements)])
    except subprocess.CalledProcessError as e:
        print(f"❌ pip завершился с кодом {e.returncode}")
        return False
    print("✓ Пакеты из requirements.txt установлены")
    return True


def verify_stack() -> bool:
    """Импорт пакетов численного стека после установки."""
    importlib.invalidate_caches()
    missing = []
    for module, purpose in REQUIRED_MODULES.items():
        try:
            importlib.import_module(module)
        except ImportError:
            missing.append(module)
            print(f"❌ {module} не импортируется ({purpose})")
    for module, purpose in OPTIONAL_MODULES.items():
        try:
            importlib.import_module(module)
        except ImportError:
            print(f"⚠ {module} не найден: не будут работать {purpose}")
    if missing:
        return False
    print("✓ Численный стек импортируется")
    return True


def prepare_workspace() -> bool:
    """.env из .env_sample (существующий не трогаем) и папки output/, logs/."""
    env_sample, env_file = Path(".env_sample"), Path(".env")
    if env_file.exists():
        print("✓ .env уже есть, оставлен без изменений")
    elif env_sample.exists():
        shutil.copy(env_sample, env_file)
        print("✓ .env создан из .env_sample")
    else:
        print("⚠ Нет .env_sample: используются значения настроек по умолчанию")

    for name in ("output", "logs"):
        Path(name).mkdir(parents=True, exist_ok=True)
    print("✓ Папки output/ и logs/ готовы")
    return True


STEPS: List[Tuple[str, Callable[[], bool]]] = [
    ("Версия Python", check_python),
    ("Установка зависимостей", install_requirements),
    ("Проверка численного стека", verify_stack),
    ("Настройки и папки", prepare_workspace),
]


def main() -> int:
    print("УСТАНОВКА ZenoTransfer")
    for number, (title, step) in enumerate(STEPS, start=1):
        print(f"\n[{number}/{len(STEPS)}] {title}")
        if not step():
            print("\nУстановка прервана")
            return 1

    print("\n✓ Готово. Дальше:")
    print("   python -m src.main check            # критерии приёмки")
    print("   python -m src.main figure fig2a     # данные рисунка")
    print("   pytest -m \"not slow\"                # быстрые тесты")
    return 0


if __name__ == "__main__":
    sys.exit(main())
