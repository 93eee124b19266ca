"""
Purpose: Thread helpers shared by the solvers and the command line. Node
blocks, seesaw restarts and sweep grid points all run as ResultThreads inside
a bounded pool and are collected back in submission order.
"""
# Import essential libraries
import logging
import threading
from datetime import datetime

from colorama import Fore, Style

log = logging.getLogger(__name__)


##############################################################################
                        #   Thread Management   #
##############################################################################


class ResultThread(threading.Thread):
    """
    A subclass of threading's Thread. Creates a new thread where the return
    value (or the exception raised) is saved to be viewed later. They may be
    accessed by typing the objectname.result
    """

    def __init__(self, target, *args, **kwargs):
        super().__init__(target=target, args=args, kwargs=kwargs)
        self._result = None
        self._error = None

    def run(self):
        try:
            self._result = self._target(*self._args, **self._kwargs)
        except Exception as exc:  # re-raised by .result in the caller
            self._error = exc

    @property
    def result(self):
        """
        Passes back the return value of the function ran, re-raising any
        exception the function raised inside the thread.
        """
        if self._error is not None:
            raise self._error
        return self._result

    @property
    def failed(self):
        """Whether the target raised."""
        return self._error is not None


# Define a helper function to create threads with arguments
def create_thread_with_args(target, args):
    """
    Allows the creation of a ResultThread and still pass arguments to the
    thread.

    :param target: The function that the thread will be running.
    :type target: function
    :param args: The arguments that will be passed through the function.
    :type args: Any
    :return: Returns a ResultThread
    :rtype: thread
    """
    return ResultThread(target=lambda: target(*args))


def run_bounded(limited_threads, limit=1):
    """
    Run threads with at most ``limit`` of them alive at once. Threads are
    started in submission order and joined in submission order.

    :param limited_threads: A list of threads that need to be run.
    :type limited_threads: list
    :param limit: The number of threads allowed to run concurrently.
    :type limit: int
    :return: The threads, all finished.
    :rtype: list
    """
    gate = threading.BoundedSemaphore(max(1, int(limit)))

    def gated(thread):
        original = thread.run

        def run():
            try:
                original()
            finally:
                gate.release()

        thread.run = run

    for thread in limited_threads:
        gated(thread)
        gate.acquire()

        log.debug(
            "%sStarting thread %s%s%s at time %s%s%s",
            Fore.LIGHTBLACK_EX,
            Fore.LIGHTYELLOW_EX, thread.name, Style.RESET_ALL,
            Fore.LIGHTBLACK_EX,
            datetime.now().strftime('%H:%M:%S'), Style.RESET_ALL
        )

        thread.start()

    for thread in limited_threads:
        thread.join()

    return limited_threads


def map_bounded(target, arg_list, limit=1):
    """
    Run ``target`` over every argument tuple and return the results in input
    order. Exceptions raised inside a worker propagate to the caller.

    :param target: The function to run.
    :type target: function
    :param arg_list: One tuple of positional arguments per call.
    :type arg_list: list
    :param limit: Maximum number of concurrent workers.
    :type limit: int
    :return: The return values in the order of ``arg_list``.
    :rtype: list
    """
    if int(limit) <= 1:
        return [target(*args) for args in arg_list]

    threads = [create_thread_with_args(target, args) for args in arg_list]
    run_bounded(threads, limit)
    return [thread.result for thread in threads]
