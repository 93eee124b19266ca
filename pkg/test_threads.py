"""
Purpose: Test the threads module to make sure bounded pools return results
in submission order and never exceed their limit.
"""
import threading
import time

import pytest

from threads import ResultThread, create_thread_with_args, map_bounded, \
    run_bounded


def test_result_thread_keeps_value():
    """Test if a ResultThread keeps its target's return value."""
    thread = create_thread_with_args(pow, (2, 10))
    thread.start()
    thread.join()
    assert thread.result == 1024
    assert not thread.failed


def test_result_thread_reraises():
    """Test if an exception inside the thread surfaces on .result."""
    thread = ResultThread(target=lambda: 1 / 0)
    thread.start()
    thread.join()
    assert thread.failed
    with pytest.raises(ZeroDivisionError):
        _ = thread.result


@pytest.mark.parametrize("limit", [1, 2, 4])
def test_map_bounded_keeps_order(limit):
    """Test if results come back in input order."""
    def slow_square(value):
        time.sleep(0.01 * (5 - value))
        return value * value

    assert map_bounded(slow_square, [(v,) for v in range(5)], limit) == \
        [0, 1, 4, 9, 16]


def test_run_bounded_respects_limit():
    """Test if no more than two workers run at once."""
    lock = threading.Lock()
    state = {"alive": 0, "peak": 0}

    def work():
        with lock:
            state["alive"] += 1
            state["peak"] = max(state["peak"], state["alive"])
        time.sleep(0.02)
        with lock:
            state["alive"] -= 1

    threads = [ResultThread(target=work) for _ in range(6)]
    run_bounded(threads, 2)
    assert state["peak"] <= 2
    assert all(not t.is_alive() for t in threads)
