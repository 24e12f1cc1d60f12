"""Working precision for extended-precision evaluation.

Every special function and experiment takes an optional ``ctx`` argument.
When omitted, the process-wide default is used; it starts at 30 digits and
can be overridden with the ``PRIMECF_DIGITS`` environment variable.
"""
from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass

import mpmath

ENV_DIGITS = "PRIMECF_DIGITS"


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision plus guard digits for truncation decisions."""

    digits: int = 30
    series_guard: int = 10

    def __post_init__(self):
        if self.digits < 15:
            raise ValueError(f"digits must be >= 15, got {self.digits}")
        if self.series_guard < 5:
            raise ValueError(f"series_guard must be >= 5, got {self.series_guard}")

    @property
    def working_digits(self) -> int:
        return self.digits + self.series_guard

    @property
    def eps(self) -> mpmath.mpf:
        """Relative size below which series terms are dropped."""
        return mpmath.mpf(10) ** (-self.working_digits)

    @property
    def tolerance(self) -> mpmath.mpf:
        """Accuracy promised for returned values."""
        return mpmath.mpf(10) ** (-self.digits)

    @contextmanager
    def workdps(self, extra: int = 0):
        """Temporarily raise mpmath's precision to ``working_digits + extra``."""
        with mpmath.workdps(self.working_digits + max(0, int(extra))):
            yield


def _initial_default() -> PrecisionContext:
    raw = os.environ.get(ENV_DIGITS)
    if raw:
        return PrecisionContext(digits=int(float(raw)))
    return PrecisionContext()


_default = _initial_default()


def get_context() -> PrecisionContext:
    return _default


def set_context(ctx: PrecisionContext) -> PrecisionContext:
    """Install ``ctx`` as the default; returns the previous default."""
    global _default
    previous, _default = _default, ctx
    return previous


@contextmanager
def local_context(ctx: PrecisionContext):
    previous = set_context(ctx)
    try:
        yield ctx
    finally:
        set_context(previous)


def resolve(ctx: PrecisionContext | None) -> PrecisionContext:
    return _default if ctx is None else ctx
