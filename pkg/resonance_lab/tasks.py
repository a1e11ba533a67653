from collections.abc import Callable, Iterable
from concurrent.futures import Future, ThreadPoolExecutor
import logging
import threading

from resonance_lab.settings import SETTINGS


log = logging.getLogger(__name__)


class TaskStatus:
    def __init__(self, name: str, callback: Callable[[float], None] | None = None):
        self._name = name
        self._callback = callback
        self._lock = threading.Lock()
        self._min_value = 0
        self._max_value = 100
        self._value = 0

    @property
    def name(self) -> str:
        return self._name

    @property
    def min_value(self) -> int:
        return self._min_value

    @min_value.setter
    def min_value(self, value: int):
        self._min_value = value

    @property
    def max_value(self) -> int:
        return self._max_value

    @max_value.setter
    def max_value(self, value: int):
        self._max_value = value

    @property
    def value(self) -> int:
        return self._value

    @value.setter
    def value(self, x: int):
        self._value = x
        progress = self.progress
        log.debug('%s: %.0f%%', self._name, progress)
        if self._callback is not None:
            self._callback(progress)

    @property
    def progress(self) -> float:
        if self._max_value == self._min_value:
            return 100.0
        return (self._value - self._min_value) * 100 / (self._max_value - self._min_value)

    def advance(self, step: int = 1):
        with self._lock:
            self.value = self._value + step


class TaskPool:
    """Runs independent jobs on a thread pool, returning results in submission order."""

    def __init__(self, threads: int | None = None):
        if threads is None:
            threads = SETTINGS.get('tasks/threads')
        self._threads = threads

    @property
    def threads(self) -> int:
        return self._threads

    def map[T, R](
        self,
        name: str,
        f: Callable[[T], R],
        items: Iterable[T],
        callback: Callable[[float], None] | None = None,
    ) -> list[R]:
        items = list(items)
        status = TaskStatus(name, callback)
        status.max_value = len(items)

        def run(item: T) -> R:
            try:
                return f(item)
            finally:
                status.advance()

        if self._threads == 1 or len(items) <= 1:
            return [run(item) for item in items]

        with ThreadPoolExecutor(max_workers=self._threads, thread_name_prefix=name) as executor:
            futures: list[Future[R]] = [executor.submit(run, item) for item in items]
            return [future.result() for future in futures]
