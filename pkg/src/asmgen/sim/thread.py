"""Run a simulator on its own thread behind a serialized command queue."""
import queue
import threading
from concurrent.futures import Future

_STOP = object()


class SimulationThread:
    """Owns a :class:`Simulator`; every command runs on the worker thread.

    ``call(fn, *args)`` queues ``fn(sim, *args)`` and blocks for its result,
    re-raising any exception in the caller.
    """

    def __init__(self, sim, name="workcell-sim"):
        self.sim = sim
        self.name = name
        self._queue = queue.Queue()
        self._thread = None
        self.stopped = False
        self.stop_count = 0

    def start(self):
        if self._thread is not None:
            raise RuntimeError("simulation thread already started")
        self._thread = threading.Thread(target=self._loop, name=self.name, daemon=True)
        self._thread.start()
        return self

    def _loop(self):
        while True:
            item = self._queue.get()
            if item is _STOP:
                return
            fn, args, kwargs, fut = item
            if not fut.set_running_or_notify_cancel():
                continue
            try:
                fut.set_result(fn(self.sim, *args, **kwargs))
            except BaseException as exc:  # handed to the caller
                fut.set_exception(exc)

    def submit(self, fn, *args, **kwargs):
        if self._thread is None or self.stopped:
            raise RuntimeError("simulation thread is not running")
        fut = Future()
        self._queue.put((fn, args, kwargs, fut))
        return fut

    def call(self, fn, *args, **kwargs):
        return self.submit(fn, *args, **kwargs).result()

    def stop(self):
        """Stop the worker.  Safe to call more than once; only the first call acts."""
        if self.stopped or self._thread is None:
            self.stopped = True
            return
        self.stopped = True
        self.stop_count += 1
        self._queue.put(_STOP)
        self._thread.join()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
