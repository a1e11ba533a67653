import threading
import time

import pytest

from resonance_lab.tasks import TaskPool, TaskStatus


def test_status_progress():
    reported = []
    status = TaskStatus('sweep', reported.append)
    status.min_value = 0
    status.max_value = 4
    status.advance()
    status.advance(2)
    assert status.value == 3
    assert status.progress == pytest.approx(75.0)
    assert reported == [pytest.approx(25.0), pytest.approx(75.0)]


def test_empty_range_is_complete():
    status = TaskStatus('empty')
    status.max_value = 0
    assert status.progress == 100.0


@pytest.mark.parametrize('threads', [1, 4])
def test_pool_keeps_submission_order(threads):
    def slow_square(x):
        time.sleep(0.001 * (5 - x))
        return x * x

    assert TaskPool(threads).map('squares', slow_square, range(5)) == [0, 1, 4, 9, 16]


def test_pool_reports_progress():
    reported = []
    lock = threading.Lock()

    def record(progress):
        with lock:
            reported.append(progress)

    TaskPool(3).map('identity', lambda x: x, range(6), record)
    assert sorted(reported)[-1] == pytest.approx(100.0)
    assert len(reported) == 6


def test_pool_propagates_errors():
    def fail(x):
        if x == 2:
            raise ValueError(x)
        return x

    with pytest.raises(ValueError):
        TaskPool(2).map('failing', fail, range(4))


def test_pool_reads_thread_setting(reset_settings):
    reset_settings.set('tasks/threads', 3)
    assert TaskPool().threads == 3
