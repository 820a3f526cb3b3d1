"""Запись результатов: CSV кривых, JSON сводок и скрипт построения графика."""
import json
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
from loguru import logger

from .curves import CurveSet

FLOAT_FORMAT = "%.12g"

PLOT_TEMPLATE = '''"""Построение графика {scenario} по файлу {csv_name}."""
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

frame = pd.read_csv(Path(__file__).with_name("{csv_name}"))
fig, ax = plt.subplots(figsize=(6, 4))
for (label, scheme), series in frame.groupby(["{label}", "scheme"], sort=False):
    style = "o" if scheme == "frequent" else "-"
    for column in {columns}:
        ax.plot(series["{abscissa}"], series[column], style, markersize=3,
                label=f"{{column}}, {label}={{label}}, {{scheme}}")
{xscale}ax.set_xlabel("{abscissa}")
ax.set_ylabel("probability")
ax.legend(fontsize=6)
fig.tight_layout()
fig.savefig(Path(__file__).with_name("{scenario}.png"), dpi=150)
'''


def _plain(value: Any) -> Any:
    """Приведение numpy-значений к типам JSON."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_plain(item) for item in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_csv(curves: CurveSet, path: Path) -> Path:
    """Сохраняет набор кривых в CSV (фиксированный порядок колонок, LF).

    Args:
        curves: Набор кривых
        path: Путь к файлу

    Returns:
        Путь к файлу
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    curves.frame[curves.columns].to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"✓ CSV сохранён: {path} ({len(curves.frame)} строк)")
    return path


def write_summary(summary: Dict[str, Any], path: Path) -> Path:
    """Сохраняет скалярные результаты в JSON."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(summary), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                    encoding="utf-8")
    logger.info(f"✓ Сводка сохранена: {path}")
    return path


def write_plot_script(curves: CurveSet, scenario: str, out_dir: Path, columns: List[str] = None) -> Path:
    """Скрипт matplotlib, который читает только CSV рядом с собой."""
    csv_name = f"{scenario}.csv"
    script = PLOT_TEMPLATE.format(
        scenario=scenario,
        csv_name=csv_name,
        label=curves.label,
        abscissa=curves.abscissa,
        columns=repr(columns or ["P1"]),
        xscale='ax.set_xscale("log")\n' if curves.abscissa != "t" else "",
    )
    path = out_dir / f"plot_{scenario}.py"
    path.write_text(script, encoding="utf-8")
    return path


def write_scenario(
    curves: CurveSet,
    scenario: str,
    out_dir: Path,
    summary: Dict[str, Any] = None,
    columns: List[str] = None,
) -> List[Path]:
    """Полный набор файлов сценария: <id>.csv, plot_<id>.py и при наличии <id>_summary.json.

    Args:
        curves: Набор кривых
        scenario: Идентификатор сценария
        out_dir: Папка вывода
        summary: Скалярные результаты
        columns: Колонки вероятностей для графика

    Returns:
        Список записанных файлов
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [write_csv(curves, out_dir / f"{scenario}.csv"),
               write_plot_script(curves, scenario, out_dir, columns)]
    if summary:
        written.append(write_summary(summary, out_dir / f"{scenario}_summary.json"))
    return written
