"""Параллельный расчёт точек развёртки."""
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from loguru import logger

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(function: Callable[[T], R], tasks: Iterable[T], workers: int = 1) -> List[R]:
    """Применяет функцию к задачам, сохраняя порядок задач в результате.

    Args:
        function: Функция верхнего уровня модуля (должна сериализоваться pickle)
        tasks: Задачи
        workers: Число процессов (≤ 1 - расчёт в текущем процессе)

    Returns:
        Результаты в порядке задач
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [function(task) for task in tasks]
    workers = min(workers, len(tasks))
    logger.info(f"Запуск {len(tasks)} задач на {workers} процессах")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, tasks))
