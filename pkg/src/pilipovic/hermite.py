"""Multi-index bookkeeping, Hermite basis functions and coefficient laws.

The basis is the L2(R)-orthonormal Hermite family, so Parseval holds with
constant 1 and the harmonic oscillator acts diagonally with eigenvalue
``2|alpha| + d``.  Coefficient tables are stored as :class:`LogReal` so that
laws with large parameters never leave the representable range; factorials
only ever appear through ``lgamma``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Union

import numpy as np

from .lognum import LogReal, log_sum_finite

__all__ = [
    "MultiIndex",
    "HermiteExpansion",
    "GeometricLaw",
    "SubExponentialLaw",
    "FiniteLaw",
    "CoefficientLaw",
    "SizeLimitError",
    "QuadratureUnderresolvedError",
    "enumerate_multiindices",
    "realize_law",
    "hermite_function_eval",
    "hermite_values_1d",
    "hermite_poly_values_1d",
    "expansion_l2_norm",
    "parseval_oracle",
    "expansion_to_csv",
    "expansion_from_csv",
]

MAX_INDEX_COUNT = 10**8


class SizeLimitError(ValueError):
    """An enumeration would produce more indices than the budget allows."""


class QuadratureUnderresolvedError(ValueError):
    """Gauss-Hermite order too low for the polynomial degrees involved."""


@dataclass(frozen=True)
class MultiIndex:
    """Element of N^d with its total degree cached."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.entries) < 1:
            raise ValueError("multi-index needs dimension >= 1")
        if any((not isinstance(e, int)) or e < 0 for e in self.entries):
            raise ValueError(f"entries must be nonnegative integers: {self.entries!r}")

    @cached_property
    def degree(self) -> int:
        return sum(self.entries)

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def log_factorial(self) -> float:
        """log(alpha!) = sum_i log(alpha_i!)."""
        return math.fsum(math.lgamma(e + 1) for e in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self) -> str:  # compact: MultiIndex(2, 0, 1)
        return f"MultiIndex{self.entries!r}"


def mi(*entries: int) -> MultiIndex:
    """Shorthand constructor, mainly for tests and the CLI."""
    return MultiIndex(tuple(entries))


def graded_key(alpha: MultiIndex) -> tuple:
    """Sort key for the enumeration order: by degree, then leading entries first."""
    return (alpha.degree, tuple(-e for e in alpha.entries))


def enumerate_multiindices(d: int, max_degree: int) -> list[MultiIndex]:
    """All alpha in N^d with |alpha| <= max_degree, graded order.

    Within a degree, indices with larger leading entries come first, so
    (1,0) precedes (0,1).  The count is binomial(max_degree + d, d).
    """
    if d < 1 or max_degree < 0:
        raise ValueError(f"need d >= 1 and max_degree >= 0, got d={d}, M={max_degree}")
    count = math.comb(max_degree + d, d)
    if count > MAX_INDEX_COUNT:
        raise SizeLimitError(f"{count} indices exceed the {MAX_INDEX_COUNT} budget")

    out: list[MultiIndex] = []

    def compositions(total: int, parts: int, prefix: tuple[int, ...]) -> None:
        if parts == 1:
            out.append(MultiIndex(prefix + (total,)))
            return
        for first in range(total, -1, -1):
            compositions(total - first, parts - 1, prefix + (first,))

    for k in range(max_degree + 1):
        compositions(k, d, ())
    return out


# ---------------------------------------------------------------------------
# Coefficient laws
# ---------------------------------------------------------------------------

SIGN_RULES = ("all-positive", "alternating")


@dataclass(frozen=True)
class GeometricLaw:
    """c_alpha = C * r^{|alpha|} / sqrt(alpha!).

    The rate always enters through the total degree |alpha|, also in the
    "for every r" variants; per-component rate vectors are deliberately
    not supported (the two readings coincide on the diagonal r-vector and
    only the total-degree form feeds the degree-grouped norm sums).
    """

    c: float = 1.0
    r: float = 1.0
    sign_rule: str = "all-positive"

    def __post_init__(self) -> None:
        if self.c <= 0 or self.r <= 0:
            raise ValueError("GeometricLaw needs C > 0 and r > 0")
        if self.sign_rule not in SIGN_RULES:
            raise ValueError(f"unknown sign rule {self.sign_rule!r}")

    def log_coeff(self, alpha: MultiIndex) -> float:
        return math.log(self.c) + alpha.degree * math.log(self.r) - 0.5 * alpha.log_factorial()


@dataclass(frozen=True)
class SubExponentialLaw:
    """c_alpha = exp(-r * |alpha|^{1/(2s)}) with 0 < s < 1/2."""

    r: float
    s: float
    sign_rule: str = "all-positive"

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise ValueError("SubExponentialLaw needs r > 0")
        if not 0.0 < self.s < 0.5:
            raise ValueError("SubExponentialLaw needs s in (0, 1/2)")
        if self.sign_rule not in SIGN_RULES:
            raise ValueError(f"unknown sign rule {self.sign_rule!r}")

    def log_coeff(self, alpha: MultiIndex) -> float:
        if alpha.degree == 0:
            return 0.0
        return -self.r * alpha.degree ** (1.0 / (2.0 * self.s))


@dataclass(frozen=True)
class FiniteLaw:
    """Explicit finite table of coefficients; everything else is zero."""

    table: Mapping[MultiIndex, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", dict(self.table))


CoefficientLaw = Union[GeometricLaw, SubExponentialLaw, FiniteLaw]


@dataclass(frozen=True)
class HermiteExpansion:
    """Dense truncated coefficient table over all |alpha| <= max_degree."""

    dimension: int
    max_degree: int
    coeffs: Mapping[MultiIndex, LogReal]

    def __post_init__(self) -> None:
        table = dict(self.coeffs)
        expected = enumerate_multiindices(self.dimension, self.max_degree)
        for alpha in expected:
            table.setdefault(alpha, LogReal.zero())
        for alpha in table:
            if alpha.dimension != self.dimension:
                raise ValueError(f"{alpha!r} has wrong dimension")
            if alpha.degree > self.max_degree:
                raise ValueError(f"{alpha!r} exceeds max_degree {self.max_degree}")
        ordered = {alpha: table[alpha] for alpha in expected}
        object.__setattr__(self, "coeffs", MappingProxyType(ordered))

    def coeff(self, alpha: MultiIndex) -> LogReal:
        return self.coeffs.get(alpha, LogReal.zero())

    def degree_sq_profile(self) -> list[LogReal]:
        """S_k = sum_{|alpha| = k} c_alpha^2, k = 0..max_degree."""
        buckets: list[list[LogReal]] = [[] for _ in range(self.max_degree + 1)]
        for alpha, c in self.coeffs.items():
            if not c.is_zero:
                buckets[alpha.degree].append(c * c)
        return [log_sum_finite(vals) for vals in buckets]

    def degree_max_profile(self) -> list[float]:
        """max_{|alpha| = k} log|c_alpha| with -inf for all-zero degrees."""
        out = [-math.inf] * (self.max_degree + 1)
        for alpha, c in self.coeffs.items():
            if not c.is_zero and c.loga > out[alpha.degree]:
                out[alpha.degree] = c.loga
        return out


def realize_law(law: CoefficientLaw, d: int, max_degree: int) -> HermiteExpansion:
    """Materialize a coefficient law into a dense truncated expansion."""
    if isinstance(law, FiniteLaw):
        table: dict[MultiIndex, LogReal] = {}
        for alpha, value in law.table.items():
            if alpha.dimension != d:
                raise ValueError(f"{alpha!r} does not live in dimension {d}")
            if alpha.degree > max_degree:
                raise ValueError(f"{alpha!r} exceeds max_degree {max_degree}")
            table[alpha] = LogReal.from_real(value)
        return HermiteExpansion(d, max_degree, table)

    table = {}
    for alpha in enumerate_multiindices(d, max_degree):
        loga = law.log_coeff(alpha)
        sign = 1
        if law.sign_rule == "alternating" and alpha.degree % 2:
            sign = -1
        table[alpha] = LogReal(sign, loga)
    return HermiteExpansion(d, max_degree, table)


# ---------------------------------------------------------------------------
# Basis evaluation and quadrature
# ---------------------------------------------------------------------------

def hermite_values_1d(n_max: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal Hermite functions h_0..h_{n_max} on a 1d grid.

    Stable three-term recurrence
    ``h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}``
    seeded by ``h_0 = pi^{-1/4} exp(-x^2/2)``.  Shape ``(n_max+1, len(x))``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1, x.size))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x**2)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = x * math.sqrt(2.0 / (k + 1)) * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_poly_values_1d(n_max: int, x: np.ndarray) -> np.ndarray:
    """Same recurrence without the Gaussian: h_k(x) * exp(x^2/2).

    This is the right object to pair with Gauss-Hermite weights, whose
    weight function already carries exp(-x^2).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1, x.size))
    out[0] = np.full(x.size, math.pi ** -0.25)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = x * math.sqrt(2.0 / (k + 1)) * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_function_eval(alpha: MultiIndex, x: Iterable[float]) -> float:
    """h_alpha(x) = prod_i h_{alpha_i}(x_i) at a single point of R^d."""
    point = tuple(float(v) for v in x)
    if len(point) != alpha.dimension:
        raise ValueError(f"point dimension {len(point)} != index dimension {alpha.dimension}")
    value = 1.0
    for k, xi in zip(alpha.entries, point):
        value *= hermite_values_1d(k, np.array([xi]))[k, 0]
    return value


def expansion_l2_norm(f: HermiteExpansion) -> LogReal:
    """Coefficient-side L2 norm (sum of squares, then square root)."""
    return log_sum_finite(f.degree_sq_profile()).sqrt()


def parseval_oracle(f: HermiteExpansion, quad_order: int) -> float:
    """L2 norm by Gauss-Hermite quadrature of |sum c_alpha h_alpha|^2.

    Test oracle only: independent of the coefficient-side norm path.
    Restricted to d <= 2 and max_degree <= 40.
    """
    if f.dimension > 2 or f.max_degree > 40:
        raise ValueError("oracle supports d <= 2 and max_degree <= 40")
    if quad_order < 2 * f.max_degree + 1:
        raise QuadratureUnderresolvedError(
            f"order {quad_order} < {2 * f.max_degree + 1} for max_degree {f.max_degree}"
        )
    nodes, weights = np.polynomial.hermite.hermgauss(quad_order)
    p = hermite_poly_values_1d(f.max_degree, nodes)  # (M+1, n)
    if f.dimension == 1:
        c = np.zeros(f.max_degree + 1)
        for alpha, v in f.coeffs.items():
            c[alpha.entries[0]] = v.to_real()
        values = c @ p
        return math.sqrt(float(np.dot(weights, values**2)))
    c2 = np.zeros((f.max_degree + 1, f.max_degree + 1))
    for alpha, v in f.coeffs.items():
        a, b = alpha.entries
        c2[a, b] = v.to_real()
    values = p.T @ c2 @ p  # (n, n)
    return math.sqrt(float(weights @ (values**2) @ weights))


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

def expansion_to_csv(f: HermiteExpansion) -> str:
    """CSV text: header alpha_1..alpha_d,coeff, one row per stored index."""
    buf = io.StringIO()
    header = ",".join(f"alpha_{i + 1}" for i in range(f.dimension)) + ",coeff"
    buf.write(header + "\n")
    for alpha, v in f.coeffs.items():
        cells = [str(e) for e in alpha.entries]
        cells.append(f"{v.to_real():.16e}")
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def expansion_from_csv(text: str) -> HermiteExpansion:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty expansion CSV")
    header = lines[0].split(",")
    if header[-1] != "coeff" or not header[0].startswith("alpha_"):
        raise ValueError(f"unexpected header {lines[0]!r}")
    d = len(header) - 1
    table: dict[MultiIndex, LogReal] = {}
    max_degree = 0
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != d + 1:
            raise ValueError(f"row {ln!r} does not match header")
        alpha = MultiIndex(tuple(int(c) for c in cells[:-1]))
        table[alpha] = LogReal.from_real(float(cells[-1]))
        max_degree = max(max_degree, alpha.degree)
    return HermiteExpansion(d, max_degree, table)
