"""Phase timers and counters used by the learner and the commands."""

import time
from collections import defaultdict
from contextlib import contextmanager
from typing import DefaultDict, Dict, Iterator


class Stats:
    """Accumulates wall-clock time per named phase and integer counters."""

    def __init__(self) -> None:
        self.durations: DefaultDict[str, float] = defaultdict(float)
        self.counters: DefaultDict[str, int] = defaultdict(int)
        self._started = time.perf_counter()

    @contextmanager
    def duration(self, phase: str) -> Iterator[None]:
        """Time the enclosed block and add it to ``phase``."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.durations[phase] += time.perf_counter() - start

    def count(self, name: str, amount: int = 1) -> None:
        self.counters[name] += amount

    def elapsed(self) -> float:
        """Seconds since this object was created."""
        return time.perf_counter() - self._started

    def phases(self) -> Dict[str, float]:
        return dict(self.durations)

    def totals(self) -> Dict[str, int]:
        return dict(self.counters)
