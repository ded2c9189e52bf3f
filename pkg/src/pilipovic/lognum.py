"""Signed log-domain scalars.

Quantities like ``(2N/log N)**(2N)`` overflow IEEE doubles long before the
ratios we actually care about become ill-conditioned, so every large
intermediate in this package is carried as ``sign * exp(loga)``.  Zero gets
a distinguished ``sign == 0`` rather than ``loga == -inf``; this keeps
differences of equal magnitudes from breeding NaNs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "LogReal",
    "NonPositiveTermError",
    "NoConvergenceError",
    "log_mul",
    "log_add",
    "log_sum_positive_series",
    "log_sum_finite",
]

# Terms this far (in log units) below the running maximum contribute less
# than ~1e-20 relatively and are dropped once the peak has passed.
SERIES_CUTOFF = 46.0


class NonPositiveTermError(ValueError):
    """A series declared positive produced a negative term."""


class NoConvergenceError(ArithmeticError):
    """A series consumed its term budget without reaching the cutoff."""


@dataclass(frozen=True)
class LogReal:
    """A real number stored as ``sign * exp(loga)``.

    ``sign`` is -1, 0 or +1.  ``loga`` is the natural log of the magnitude
    and is ignored (kept at 0.0 by the constructors) when ``sign == 0``.
    """

    sign: int
    loga: float

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign != 0 and not math.isfinite(self.loga):
            raise ValueError(f"nonzero LogReal needs finite loga, got {self.loga!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "LogReal":
        return cls(0, 0.0)

    @classmethod
    def one(cls) -> "LogReal":
        return cls(1, 0.0)

    @classmethod
    def from_real(cls, x: float) -> "LogReal":
        if x != x or math.isinf(x):
            raise ValueError(f"cannot represent {x!r}")
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, loga: float, sign: int = 1) -> "LogReal":
        """Build ``sign * exp(loga)``; ``loga == -inf`` collapses to zero."""
        if sign == 0 or loga == -math.inf:
            return cls.zero()
        return cls(sign, loga)

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def to_real(self) -> float:
        """Native float value; overflows to +-inf rather than raising."""
        if self.sign == 0:
            return 0.0
        try:
            mag = math.exp(self.loga)
        except OverflowError:
            mag = math.inf
        return self.sign * mag

    def log_or(self, default: float = -math.inf) -> float:
        """``loga`` for nonzero values, ``default`` for zero."""
        return default if self.sign == 0 else self.loga

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "LogReal":
        return LogReal(-self.sign, self.loga if self.sign else 0.0)

    def __mul__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0 or other.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.loga + other.loga)

    def __add__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.loga >= other.loga else (other, self)
        delta = lo.loga - hi.loga  # <= 0
        if self.sign == other.sign:
            return LogReal(self.sign, hi.loga + math.log1p(math.exp(delta)))
        if self.loga == other.loga:
            return LogReal.zero()
        # log(1 - e^delta): expm1 branch keeps near-ties from collapsing to log(0)
        if delta > -0.6931471805599453:
            return LogReal(hi.sign, hi.loga + math.log(-math.expm1(delta)))
        return LogReal(hi.sign, hi.loga + math.log1p(-math.exp(delta)))

    def __sub__(self, other: "LogReal") -> "LogReal":
        return self + (-other)

    def pow(self, exponent: float) -> "LogReal":
        """Raise to a real power.  Negative bases only support integer powers."""
        if self.sign == 0:
            if exponent <= 0:
                raise ValueError("0 cannot be raised to a nonpositive power")
            return LogReal.zero()
        if self.sign < 0:
            if exponent != int(exponent):
                raise ValueError("negative base needs an integer exponent")
            sign = -1 if int(exponent) % 2 else 1
            return LogReal(sign, self.loga * exponent)
        return LogReal(1, self.loga * exponent)

    def sqrt(self) -> "LogReal":
        if self.sign < 0:
            raise ValueError("sqrt of a negative value")
        if self.sign == 0:
            return LogReal.zero()
        return LogReal(1, 0.5 * self.loga)

    def abs(self) -> "LogReal":
        return LogReal(abs(self.sign), self.loga if self.sign else 0.0)


def log_mul(a: LogReal, b: LogReal) -> LogReal:
    """Exact product: signs multiply, log magnitudes add."""
    return a * b


def log_add(a: LogReal, b: LogReal) -> LogReal:
    """Stable sum ``max + log1p(+-exp(-|delta|))``; exact cancellation -> zero."""
    return a + b


def log_sum_positive_series(
    term: Callable[[int], LogReal],
    peak_hint: int,
    max_terms: int = 10_000_000,
) -> LogReal:
    """Sum a nonnegative, unimodal (or eventually decreasing) series.

    Terms are consumed in index order and accumulation stops once the
    current term has fallen ``SERIES_CUTOFF`` log units below the largest
    term seen *and* the index is past ``peak_hint``.  A zero term past the
    hint also stops the sum: a nonnegative unimodal tail that reaches zero
    stays there.

    Raises ``NonPositiveTermError`` on a negative term and
    ``NoConvergenceError`` when ``max_terms`` terms do not reach the cutoff.
    """
    logs: list[float] = []
    best = -math.inf
    k = 0
    while k < max_terms:
        t = term(k)
        if t.sign < 0:
            raise NonPositiveTermError(f"term {k} is negative")
        if t.sign == 0:
            if k > peak_hint:
                break
        else:
            if t.loga > best:
                best = t.loga
            logs.append(t.loga)
            if k > peak_hint and t.loga < best - SERIES_CUTOFF:
                break
        k += 1
    else:
        raise NoConvergenceError(f"no cutoff after {max_terms} terms")
    if not logs:
        return LogReal.zero()
    total = math.fsum(math.exp(la - best) for la in logs)
    return LogReal(1, best + math.log(total))


def log_sum_finite(values: list[LogReal]) -> LogReal:
    """Sum a finite list of nonnegative values through the series machinery."""
    if not values:
        return LogReal.zero()
    peak = max(range(len(values)), key=lambda i: values[i].log_or())
    return log_sum_positive_series(
        lambda k: values[k] if k < len(values) else LogReal.zero(),
        peak_hint=max(peak, len(values) - 1),
        max_terms=len(values) + 2,
    )
