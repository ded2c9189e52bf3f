"""Scalar search primitives shared by the verification modules."""

from __future__ import annotations

import math
from typing import Callable

__all__ = [
    "BracketFailureError",
    "bisect_decreasing",
    "golden_max",
    "int_argmax_unimodal",
    "approx_peak_index",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class BracketFailureError(ArithmeticError):
    """A root bracket could not be established."""


def bisect_decreasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = 1e-12,
    max_expand: int = 60,
    max_iter: int = 200,
) -> float:
    """Root of a strictly decreasing ``f`` with automatic bracket growth.

    The initial bracket is widened (``lo`` halved, ``hi`` doubled) up to
    ``max_expand`` times on each side before giving up.
    """
    flo, fhi = f(lo), f(hi)
    n = 0
    while flo < 0.0 and n < max_expand:
        lo *= 0.5
        flo = f(lo)
        n += 1
    n = 0
    while fhi > 0.0 and n < max_expand:
        hi *= 2.0
        fhi = f(hi)
        n += 1
    if flo < 0.0 or fhi > 0.0:
        raise BracketFailureError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rel_tol * max(abs(mid), 1.0):
            return mid
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = 1e-12,
    max_iter: int = 300,
) -> tuple[float, float]:
    """Maximizer and maximum of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= rel_tol * max(abs(a), abs(b), 1.0):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, max(fc, fd)


def int_argmax_unimodal(f: Callable[[int], float], lo: int, hi: int) -> tuple[int, float]:
    """Argmax of a unimodal integer sequence by ternary search.

    Falls back to a linear scan once the bracket is small, which also
    covers flat stretches around the maximum.
    """
    a, b = lo, hi
    while b - a > 8:
        m1 = a + (b - a) // 3
        m2 = b - (b - a) // 3
        if f(m1) < f(m2):
            a = m1 + 1
        else:
            b = m2
    best_k, best_v = a, f(a)
    for k in range(a + 1, b + 1):
        v = f(k)
        if v > best_v:
            best_k, best_v = k, v
    return best_k, best_v


def approx_peak_index(f: Callable[[int], float], max_index: int = 10_000_000) -> int:
    """Rough index of the largest term of a unimodal sequence.

    Samples on a geometric ladder until values fall well below the running
    best; the result is a hint, not an exact argmax.  ``f`` returns log
    magnitudes and may be ``-inf``.
    """
    best_k, best_v = 0, f(0)
    k = 1
    while k <= max_index:
        v = f(k)
        if v >= best_v:
            best_k, best_v = k, v
        elif best_v > -math.inf and v < best_v - 120.0:
            break
        k = k + 1 if k < 8 else int(k * 1.5)
    return best_k
