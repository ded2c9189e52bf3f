"""Entire-function side: monomial series from Hermite coefficients, the
degree weights defined by the log-power integral, their two-sided
envelopes, and growth-class fitting.

The Hermite coefficient table maps to monomial coefficients through
``b_alpha = c_alpha / sqrt(alpha!)`` (the standard Fock normalization: a
geometric law with rate r becomes the entire function exp(r z)).  Weight
integrals are evaluated after the substitution ``u = log r`` as
``int exp(-R L(u)^theta + (m+1) u) du`` with ``L(u) = log <e^u>``; the
integrand is always handled relative to its peak so the step-halving
self-check stays meaningful even when the peak sits at u ~ 1e10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .hermite import HermiteExpansion, MultiIndex
from .lognum import LogReal
from .report import CheckReport

__all__ = [
    "EntireSeries",
    "GrowthFit",
    "InsufficientRadiiError",
    "WindowNotFoundError",
    "bargmann_from_expansion",
    "eval_entire",
    "vartheta",
    "vartheta_profile",
    "VarthetaProfile",
    "vartheta_sandwich_constants",
    "vartheta_sandwich_check",
    "growth_fit",
    "classify_entire",
]


class InsufficientRadiiError(ValueError):
    """Growth fitting needs at least 6 radii spanning a factor 100."""


class WindowNotFoundError(ArithmeticError):
    """No interior maximum of the weight integrand could be bracketed."""


@dataclass(frozen=True)
class EntireSeries:
    """F(z) = sum_alpha b_alpha z^alpha with log-domain coefficients."""

    dimension: int
    max_degree: int
    coeffs: Mapping[MultiIndex, LogReal]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", MappingProxyType(dict(self.coeffs)))


def bargmann_from_expansion(f: HermiteExpansion) -> EntireSeries:
    """b_alpha = c_alpha / sqrt(alpha!), exactly in the log domain."""
    table = {}
    for alpha, c in f.coeffs.items():
        if c.is_zero:
            table[alpha] = LogReal.zero()
        else:
            table[alpha] = LogReal(c.sign, c.loga - 0.5 * alpha.log_factorial())
    return EntireSeries(f.dimension, f.max_degree, table)


def eval_entire(
    series: EntireSeries, z: Sequence[tuple[float, float]]
) -> tuple[float, float]:
    """(log |F(z)|, arg F(z)) at z given as (magnitude, phase) per variable.

    Terms are accumulated in graded order on scaled partial sums with an
    exponent carry, so magnitudes far outside native float range are fine.
    Returns (-inf, 0.0) for the zero function.
    """
    if len(z) != series.dimension:
        raise ValueError(f"point has {len(z)} variables, series has {series.dimension}")
    log_mags = []
    phases = []
    for mag, phase in z:
        if mag < 0:
            raise ValueError("magnitudes must be >= 0")
        log_mags.append(math.log(mag) if mag > 0 else -math.inf)
        phases.append(phase)

    acc_re, acc_im = 0.0, 0.0
    carry = -math.inf  # accumulator represents (acc_re + i acc_im) * exp(carry)
    for alpha, b in series.coeffs.items():
        if b.is_zero:
            continue
        term_log = b.loga
        term_phase = 0.0 if b.sign > 0 else math.pi
        skip = False
        for power, lm, ph in zip(alpha.entries, log_mags, phases):
            if power:
                if lm == -math.inf:
                    skip = True
                    break
                term_log += power * lm
                term_phase += power * ph
        if skip:
            continue
        if carry == -math.inf:
            carry = term_log
        rel = term_log - carry
        if rel > 40.0:
            scale = math.exp(carry - term_log)
            acc_re *= scale
            acc_im *= scale
            carry = term_log
            rel = 0.0
        if rel < -745.0:
            continue
        w = math.exp(rel)
        acc_re += w * math.cos(term_phase)
        acc_im += w * math.sin(term_phase)
        norm = max(abs(acc_re), abs(acc_im))
        if norm > 1e130:
            shift = math.log(norm)
            acc_re /= norm
            acc_im /= norm
            carry += shift

    if carry == -math.inf or (acc_re == 0.0 and acc_im == 0.0):
        return -math.inf, 0.0
    return carry + 0.5 * math.log(acc_re**2 + acc_im**2), math.atan2(acc_im, acc_re)


# ---------------------------------------------------------------------------
# Weight integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VarthetaProfile:
    value: LogReal
    peak_u: float
    window: tuple[float, float]
    self_check: float  # |log change| under the final step halving
    nodes: int


def _peak_u(R: float, theta: float, m: int) -> float:
    """Zero of d/du [-R L^theta + (m+1) u]; the derivative is strictly
    decreasing, so bisection is safe."""

    def dg(u: float) -> float:
        if u > 0:
            L = u + 0.5 * math.log1p(math.exp(-2.0 * u))
        else:
            L = 0.5 * math.log1p(math.exp(2.0 * u))
        sig = 1.0 / (1.0 + math.exp(-2.0 * u))
        if L <= 0.0:
            return m + 1.0
        return -R * theta * L ** (theta - 1.0) * sig + (m + 1.0)

    guess = ((m + 1.0) / (theta * R)) ** (1.0 / (theta - 1.0))
    lo, hi = -5.0, max(10.0, 2.0 * guess)
    for _ in range(100):
        if dg(lo) > 0:
            break
        lo -= 10.0
    for _ in range(200):
        if dg(hi) < 0:
            break
        hi *= 2.0
    else:
        raise WindowNotFoundError("integrand derivative never turns negative")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-13 * max(abs(mid), 1.0):
            return mid
        if dg(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def vartheta_profile(
    R: float, alpha_degree: int, s: float, d: int = 1, drop: float = 60.0
) -> VarthetaProfile:
    """Weight for one degree plus quadrature diagnostics.

    vartheta^2 = (pi^d / (2^d m!)) * int_0^infty e^{-R (log <r>)^theta}
    r^m dr with m = |alpha| + d - 1 and theta = 1/(1-2s).  Composite
    Simpson after u = log r, on a window reaching ``drop`` log units below
    the peak, evaluated relative to the peak and step-halved until the log
    of the integral moves <= 1e-8.

    The integrand keeps <r> = sqrt(1 + r^2) throughout; envelope analyses
    that replace it by r only move the small-r end of the window, so the
    fitted envelope constants can differ from closed-form ones by an
    absorbed factor.
    """
    if R <= 0:
        raise ValueError("need R > 0")
    if not 0.0 < s < 0.5:
        raise ValueError("need s in (0, 1/2)")
    if alpha_degree < 0 or d < 1:
        raise ValueError("need alpha_degree >= 0 and d >= 1")
    theta = 1.0 / (1.0 - 2.0 * s)
    m = alpha_degree + d - 1
    u_star = _peak_u(R, theta, m)

    # L and g relative to the peak: for w = u - u_star,
    #   g(u) - g(u_star) = -R L*^theta expm1(theta log1p(dL/L*)) + (m+1) w
    # where dL = L(u) - L(u_star) is computed without cancellation.
    if u_star > 0:
        L_star = u_star + 0.5 * math.log1p(math.exp(-2.0 * u_star))
    else:
        L_star = 0.5 * math.log1p(math.exp(2.0 * u_star))
    if L_star <= 0.0:
        raise WindowNotFoundError("degenerate peak")

    def delta_g(w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        u = u_star + w
        pos = u > 0
        tail_u = 0.5 * np.log1p(np.exp(-2.0 * np.abs(u)))
        L = np.where(pos, u + tail_u, tail_u)  # tail(u) IS L(u) for u <= 0
        if u_star > 0:
            tail_star = 0.5 * math.log1p(math.exp(-2.0 * u_star))
            # cancellation-free on the branch that matters for huge peaks
            dL = np.where(pos, w + (tail_u - tail_star), L - L_star)
        else:
            dL = L - L_star
        ratio = np.maximum(dL / L_star, -1.0 + 1e-16)
        return -R * L_star**theta * np.expm1(theta * np.log1p(ratio)) + (m + 1.0) * w

    def scalar_dg(w: float) -> float:
        return float(delta_g(np.array([w]))[0])

    def edge(direction: float) -> float:
        step = max(1.0, abs(u_star) * 1e-3)
        w = step
        for _ in range(400):
            if scalar_dg(direction * w) <= -drop:
                break
            w *= 1.5
        else:
            raise WindowNotFoundError("window edge not found")
        lo, hi = w / 1.5, w
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if scalar_dg(direction * mid) <= -drop:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 0.01 * hi:
                break
        return direction * hi

    w_left, w_right = edge(-1.0), edge(+1.0)

    def simpson_log(n_intervals: int) -> float:
        w = np.linspace(w_left, w_right, n_intervals + 1)
        g = delta_g(w)
        h = (w_right - w_left) / n_intervals
        weights = np.ones(n_intervals + 1)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        total = float(np.dot(weights, np.exp(g)))
        return math.log(total * h / 3.0)

    n = 1024
    prev = simpson_log(n)
    self_check = math.inf
    for _ in range(8):
        n *= 2
        cur = simpson_log(n)
        self_check = abs(cur - prev)
        prev = cur
        if self_check <= 1e-8:
            break
    # g(u_star) in absolute terms; fine to form directly, the relative
    # rounding here only shifts log vartheta by ~1 ulp of its own size.
    g_star = -R * L_star**theta + (m + 1.0) * u_star
    log_integral = g_star + prev
    log_sq = d * math.log(math.pi / 2.0) - math.lgamma(m + 1) + log_integral
    return VarthetaProfile(
        value=LogReal(1, 0.5 * log_sq),
        peak_u=u_star,
        window=(u_star + w_left, u_star + w_right),
        self_check=self_check,
        nodes=n,
    )


def vartheta(R: float, alpha_degree: int, s: float, d: int = 1) -> LogReal:
    """Degree weight; see :func:`vartheta_profile` for the quadrature."""
    return vartheta_profile(R, alpha_degree, s, d).value


def vartheta_sandwich_constants(s: float, mu: float) -> tuple[float, float, float, float]:
    """(a1, a2, C1, c2) for the two-sided envelope exponents.

    a1 = a2 = 1/(2s) - 1; any c1 < C1 = theta^{-1/(2s)} (theta/mu - 1) is
    admissible below; c2 = 2^{1/(2s)-1} theta^{-1/(2s)} (theta - 1) above.
    """
    if not 0.0 < s < 0.5:
        raise ValueError("need s in (0, 1/2)")
    theta = 1.0 / (1.0 - 2.0 * s)
    if not 1.0 < mu < theta:
        raise ValueError(f"need 1 < mu < theta = {theta}")
    a = 1.0 / (2.0 * s) - 1.0
    c1_max = theta ** (-1.0 / (2.0 * s)) * (theta / mu - 1.0)
    c2 = 2.0 ** (1.0 / (2.0 * s) - 1.0) * theta ** (-1.0 / (2.0 * s)) * (theta - 1.0)
    return a, a, c1_max, c2


def vartheta_sandwich_check(
    R: float,
    s: float,
    d: int,
    k_grid: Sequence[int],
    mu: float,
    c1_margin: float = 0.9,
) -> list[CheckReport]:
    """Fit envelope constants C_L, C_U so that
    C_L exp(c1 k^{1/2s}/R^{a1}) <= vartheta <= C_U exp(c2 k^{1/2s}/R^{a2})
    across the grid, with c1 = ``c1_margin`` * C1.

    Stability gate: the extremal per-exponent-unit slack
    (log vartheta - envelope) / (k^{1/2s}/R^a) computed on the top half of
    the grid must sit within a factor 10 of the full-grid extremum.
    """
    grid = sorted(int(k) for k in k_grid)
    if grid != list(k_grid):
        raise ValueError("k_grid must be sorted ascending")
    a1, a2, c1_max, c2 = vartheta_sandwich_constants(s, mu)
    c1 = c1_margin * c1_max
    inv2s = 1.0 / (2.0 * s)

    rows = []
    for k in grid:
        prof = vartheta_profile(R, k, s, d)
        unit = k**inv2s / R**a1
        lower = c1 * unit
        upper = c2 * k**inv2s / R**a2
        rows.append((k, prof, lower, upper, unit))

    lo_slack = [(p.value.log_or() - lower) / unit for _, p, lower, _, unit in rows]
    up_slack = [(p.value.log_or() - upper) / unit for _, p, _, upper, unit in rows]
    half = len(rows) // 2
    gap_lo = abs(min(lo_slack[half:]) - min(lo_slack)) if rows[half:] else 0.0
    gap_up = abs(max(up_slack[half:]) - max(up_slack)) if rows[half:] else 0.0
    stable = gap_lo <= math.log(10.0) and gap_up <= math.log(10.0)
    log_c_l = min(p.value.log_or() - lower for _, p, lower, _, _ in rows)
    log_c_u = max(p.value.log_or() - upper for _, p, _, upper, _ in rows)

    reports = []
    for k, prof, lower, upper, unit in rows:
        v = prof.value.log_or()
        sandwich = (log_c_l + lower) - 1e-9 <= v <= (log_c_u + upper) + 1e-9
        reports.append(
            CheckReport(
                lhs=prof.value,
                rhs=LogReal(1, upper + log_c_u),
                ratio_log=v - (upper + log_c_u),
                params={
                    "N": k,
                    "k": k,
                    "R": R,
                    "s": s,
                    "mu": mu,
                    "c1": c1,
                    "c1_margin": c1_margin,
                    "c2": c2,
                    "a1": a1,
                    "a2": a2,
                    "lower_env_log": lower + log_c_l,
                    "upper_env_log": upper + log_c_u,
                    "log_c_lower": log_c_l,
                    "log_c_upper": log_c_u,
                    "self_check": prof.self_check,
                    "stability_gap_lower": gap_lo,
                    "stability_gap_upper": gap_up,
                    "stable": stable,
                },
                passed=sandwich and stable and prof.self_check <= 1e-8,
            )
        )
    return reports


# ---------------------------------------------------------------------------
# Growth fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthFit:
    model: str  # log_power | exp_linear | exp_square
    r_hat: float
    theta_hat: float | None
    residual: float
    samples: tuple[tuple[float, float], ...] = ()  # (rho, max log |F|)


def _directions(d: int, count: int) -> list[list[tuple[float, float]]]:
    """Deterministic unit directions as per-variable (weight, phase) pairs."""
    if d > 3:
        raise ValueError("growth sampling supports d <= 3")
    if d == 1:
        return [[(1.0, 2.0 * math.pi * j / count)] for j in range(count)]
    # low-discrepancy lattice on phases and amplitude split, fixed seeds
    dirs = []
    for j in range(count):
        phases = [2.0 * math.pi * math.modf(j * p)[0] for p in (0.6180339887, 0.7548776662, 0.5698402910)[:d]]
        split = [math.modf(0.5 + j * q)[0] + 0.25 for q in (0.4142135624, 0.3247179572, 0.2360679775)[:d]]
        norm = math.sqrt(sum(w * w for w in split))
        dirs.append([(w / norm, ph) for w, ph in zip(split, phases)])
    return dirs


def _max_log_on_sphere(series: EntireSeries, rho: float, count: int) -> float:
    best = -math.inf
    for direction in _directions(series.dimension, count):
        z = [(rho * w, ph) for w, ph in direction]
        val, _ = eval_entire(series, z)
        best = max(best, val)
    return best


def _regress(xs: list[float], ys: list[float]) -> tuple[float, float]:
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        return 0.0, my
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    return slope, my - slope * mx


def _rel_residual(pred: list[float], obs: list[float]) -> float:
    denom = math.sqrt(sum(o * o for o in obs))
    if denom == 0.0:
        return math.inf
    return math.sqrt(sum((p - o) ** 2 for p, o in zip(pred, obs))) / denom


def growth_fit(
    series: EntireSeries, radii: Sequence[float], directions: int = 16
) -> GrowthFit:
    """Fit max log |F| on spheres to the three growth models.

    log_power regresses log M(rho) on log log <rho> (slope = theta,
    intercept = log R); exp_linear regresses M on rho; exp_square on
    rho^2.  Smallest relative residual wins.
    """
    radii = sorted(float(r) for r in radii)
    if len(radii) < 6 or radii[-1] < 100.0 * radii[0]:
        raise InsufficientRadiiError("need >= 6 radii spanning a factor >= 100")
    samples = [(rho, _max_log_on_sphere(series, rho, directions)) for rho in radii]
    ms = [m for _, m in samples]

    if max(abs(m) for m in ms) < 1e-9:
        # bounded function: every model degenerates to R = 0
        return GrowthFit("log_power", 0.0, math.inf, math.inf, tuple(samples))

    fits: list[GrowthFit] = []

    usable = [(rho, m) for rho, m in samples if m > 0.0 and math.log(math.hypot(rho, 1.0)) > 1.0]
    if len(usable) >= 3:
        xs = [math.log(math.log(math.hypot(rho, 1.0))) for rho, _ in usable]
        ys = [math.log(m) for _, m in usable]
        slope, intercept = _regress(xs, ys)
        pred = [math.exp(intercept + slope * x) for x in xs]
        fits.append(
            GrowthFit(
                "log_power",
                math.exp(intercept),
                slope,
                _rel_residual(pred, [m for _, m in usable]),
                tuple(samples),
            )
        )

    slope, intercept = _regress([rho for rho, _ in samples], ms)
    pred = [intercept + slope * rho for rho, _ in samples]
    fits.append(GrowthFit("exp_linear", slope, None, _rel_residual(pred, ms), tuple(samples)))

    slope, intercept = _regress([rho * rho for rho, _ in samples], ms)
    pred = [intercept + slope * rho * rho for rho, _ in samples]
    fits.append(GrowthFit("exp_square", slope, None, _rel_residual(pred, ms), tuple(samples)))

    return min(fits, key=lambda f: f.residual)


def classify_entire(series: EntireSeries, s: float, radii: Sequence[float] | None = None) -> str:
    """"A_s", "A_0s" or "outside" for the log-power class of order 1/(1-2s).

    A best-fit log-power exponent within 20% of 1/(1-2s) is inside; the
    "every R" tag applies when the fitted R on the top half of the radii
    falls below half the bottom-half fit.  A fitted exponent well *below*
    the class order also lands in "A_0s": growing strictly slower beats
    every R.  Exponential-type growth is outside.
    """
    if not 0.0 < s < 0.5:
        raise ValueError("need s in (0, 1/2)")
    if radii is None:
        radii = [10.0 ** (1.0 + 0.25 * i) for i in range(21)]  # 1e1 .. 1e6
    fit = growth_fit(series, radii)
    theta = 1.0 / (1.0 - 2.0 * s)
    if fit.model != "log_power" or fit.theta_hat is None:
        return "outside"
    if math.isinf(fit.theta_hat) or fit.theta_hat < 0.8 * theta:
        # bounded or strictly slower growth sits in every class
        return "A_0s"
    if fit.theta_hat > 1.2 * theta:
        return "outside"

    # R drift: refit the log-power intercept on each half of the samples
    xs = [(rho, m) for rho, m in fit.samples if m > 0.0 and math.log(math.hypot(rho, 1.0)) > 1.0]
    half = len(xs) // 2
    if half < 3:
        return "A_s"

    def r_of(chunk: Sequence[tuple[float, float]]) -> float:
        lx = [math.log(math.log(math.hypot(rho, 1.0))) for rho, _ in chunk]
        ly = [math.log(m) for _, m in chunk]
        _, intercept = _regress(lx, ly)
        return math.exp(intercept)

    r_bot, r_top = r_of(xs[:half]), r_of(xs[half:])
    return "A_0s" if r_top < 0.5 * r_bot else "A_s"
