"""
并行任务模块
用 QThreadPool 分发互相独立的检查任务，结果按提交顺序返回
"""

from typing import Any, Callable, List, Optional, Sequence

from PyQt5.QtCore import QMutex, QRunnable, QThreadPool

from .config_manager import get_performance_config
from .error_handler import log_debug, log_error


class _TaskRunner(QRunnable):
    """把一个可调用对象包装成 QRunnable"""

    def __init__(self, index: int, task: Callable[[], Any], sink: "_ResultSink"):
        super().__init__()
        self.index = index
        self.task = task
        self.sink = sink
        self.setAutoDelete(False)

    def run(self):
        try:
            self.sink.put(self.index, self.task(), None)
        except Exception as e:  # 在主线程中按顺序重新抛出
            self.sink.put(self.index, None, e)


class _ResultSink:
    def __init__(self, size: int):
        self.mutex = QMutex()
        self.results: List[Any] = [None] * size
        self.errors: List[Optional[BaseException]] = [None] * size

    def put(self, index, result, error):
        self.mutex.lock()
        try:
            self.results[index] = result
            self.errors[index] = error
        finally:
            self.mutex.unlock()


def run_parallel(tasks: Sequence[Callable[[], Any]], max_workers: Optional[int] = None) -> List[Any]:
    """
    并行执行任务

    Args:
        tasks: 无参数可调用对象列表
        max_workers: 线程数，默认取 performance.max_workers

    Returns:
        与 tasks 顺序一致的结果列表；若有任务失败，抛出序号最小的那个异常
    """
    if max_workers is None:
        max_workers = int(get_performance_config().get('max_workers', 1) or 1)

    if max_workers <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]

    pool = QThreadPool()
    pool.setMaxThreadCount(max_workers)
    sink = _ResultSink(len(tasks))
    runners = [_TaskRunner(i, task, sink) for i, task in enumerate(tasks)]
    log_debug(f"并行执行 {len(runners)} 个任务，线程数 {max_workers}")
    for runner in runners:
        pool.start(runner)
    pool.waitForDone()

    for index, error in enumerate(sink.errors):
        if error is not None:
            log_error(f"并行任务 {index} 失败: {type(error).__name__}: {error}")
            raise error
    return sink.results
