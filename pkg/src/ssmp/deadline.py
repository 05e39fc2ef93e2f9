"""Cooperative deadlines polled by the solver loops."""

from __future__ import annotations

import math
import time


class DeadlineExceeded(Exception):
    """Raised by :meth:`Deadline.check` once the time allowance is spent."""


class Deadline:
    def __init__(self, seconds: float | None = None):
        self.start = time.monotonic()
        self.end = math.inf if seconds is None else self.start + seconds

    @classmethod
    def never(cls) -> Deadline:
        return cls(None)

    def remaining(self) -> float:
        return self.end - time.monotonic()

    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def expired(self) -> bool:
        return time.monotonic() >= self.end

    def check(self) -> None:
        if time.monotonic() >= self.end:
            raise DeadlineExceeded


def as_deadline(deadline: Deadline | float | None) -> Deadline:
    if isinstance(deadline, Deadline):
        return deadline
    return Deadline(deadline)
