"""Precision contexts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

__all__ = ["PrecisionContext", "guard_digits"]


def guard_digits(target_digits: int) -> int:
    """Working digits used for a given target: ``ceil(1.2 * target) + 30``."""
    return math.ceil(1.2 * target_digits) + 30


@dataclass(frozen=True)
class PrecisionContext:
    """Requested accuracy plus the derived working precision.

    All public numerical functions take one of these. It is immutable and
    hashable, so it can be shared between callers and used as a cache key.

    >>> ctx = PrecisionContext(50)
    >>> ctx.working_digits
    90
    """

    target_digits: int
    working_digits: int = field(default=0)
    max_refinement: int = 12

    def __post_init__(self):
        if not isinstance(self.target_digits, int) or self.target_digits < 10:
            raise ValueError("target_digits must be an integer >= 10")
        floor = guard_digits(self.target_digits)
        if self.working_digits == 0:
            object.__setattr__(self, "working_digits", floor)
        elif self.working_digits < floor:
            raise ValueError(f"working_digits must be >= {floor} for target {self.target_digits}")
        if self.max_refinement < 1:
            raise ValueError("max_refinement must be positive")

    @property
    def tolerance(self):
        """Absolute accuracy ``10**-target_digits`` as an mpf."""
        with mpmath.workdps(self.working_digits):
            return mpmath.mpf(10) ** (-self.target_digits)

    def workdps(self):
        """Context manager switching mpmath to the working precision."""
        return mpmath.workdps(self.working_digits)

    def with_target(self, target_digits: int) -> "PrecisionContext":
        return PrecisionContext(target_digits, max_refinement=self.max_refinement)
