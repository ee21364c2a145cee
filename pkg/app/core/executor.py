"""有界并行映射 - 进程池执行 CPU 密集的独立任务，保持输入顺序."""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from typing import Callable, Iterable, List, Optional, TypeVar

from app.core.config import settings
from app.core.logger import jdebug, jwarn

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int] = None) -> int:
    """解析并行度：显式参数 > 配置 > CPU 数量."""
    if workers is None:
        workers = settings.WORKERS
    if workers is None:
        workers = os.cpu_count() or 1
    return max(1, int(workers))


def parallel_map(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
    label: str = "并行任务",
) -> List[R]:
    """
    并行执行一组独立任务，结果顺序与输入顺序一致.

    func 必须是模块级函数（可被 pickle）。并行度为 1 或任务数不超过 1 时
    直接串行执行；进程池无法创建时回退为串行。

    Args:
        func: 任务函数
        items: 任务参数列表
        workers: 最大并发进程数
        label: 日志中的任务名称

    Returns:
        List[R]: 按输入顺序排列的结果
    """
    batch = list(items)
    n_workers = min(resolve_workers(workers), max(1, len(batch)))

    if n_workers <= 1 or len(batch) <= 1:
        return [func(item) for item in batch]

    chunksize = max(1, math.ceil(len(batch) / (n_workers * 4)))
    jdebug(logger, "开始并行执行", 节点=label, 任务数=len(batch), 并发数=n_workers, 分块=chunksize)
    try:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(func, batch, chunksize=chunksize))
    except (OSError, BrokenProcessPool) as e:
        jwarn(logger, "进程池不可用，回退为串行执行", 节点=label, 错误=str(e))
        results = [func(item) for item in batch]
    jdebug(logger, "并行执行完成", 节点=label, 任务数=len(results))
    return results
