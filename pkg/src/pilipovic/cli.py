"""Command-line front end: parameter sweeps, CSV reports, SVG plots.

Subcommands
-----------
verify thm1|thm2   norm-growth round trips for geometric laws
lemma  interval|maximum|series|convex   the asymptotic building blocks
bell               Bell-number tables, envelopes and the decay sequence
bargmann           growth fitting / weight sandwich on the entire side

Exit codes: 0 all checks pass, 1 usage or config error, 2 a check failed.
Output directory: --out flag, else $PILIPOVIC_OUT, else the cwd.  A config
file (ini sections named after the subcommands) supplies defaults; flags
win.  Reruns with the same configuration produce byte-identical CSV.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from .asymptotics import (
    ConvexEnvelope,
    bell_numbers,
    berend_tassa_check,
    cn_decay_sequence,
    interval_check,
    maximum_bound_check,
    series_bound_check,
)
from .bargmann import (
    bargmann_from_expansion,
    classify_entire,
    growth_fit,
    vartheta_sandwich_check,
)
from .hermite import GeometricLaw, SubExponentialLaw, realize_law
from .oscillator import forward_check, reverse_check
from .report import CheckReport, reports_to_csv

__all__ = ["main"]


class UsageError(Exception):
    """Bad flags or config; maps to exit code 1."""


# ---------------------------------------------------------------------------
# Grid and config plumbing
# ---------------------------------------------------------------------------

def parse_grid(text: str, integer: bool = False) -> list[float] | list[int]:
    """start:stop:step, start:stop:log (10/decade) or comma list."""
    text = text.strip()
    if not text:
        raise UsageError("empty grid")
    if "," in text or ":" not in text:
        values = [float(v) for v in text.split(",") if v.strip()]
    else:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid {text!r} is not start:stop:step or start:stop:log")
        start, stop = float(parts[0]), float(parts[1])
        if start > stop:
            raise UsageError(f"grid {text!r} has start > stop")
        if parts[2] == "log":
            if start <= 0:
                raise UsageError("log grids need start > 0")
            n_points = int(round(10 * (math.log10(stop) - math.log10(start)))) + 1
            n_points = max(n_points, 2)
            ratio = (stop / start) ** (1.0 / (n_points - 1))
            values = [start * ratio**i for i in range(n_points)]
        else:
            step = float(parts[2])
            if step <= 0:
                raise UsageError("grid step must be positive")
            values = []
            v = start
            while v <= stop * (1 + 1e-12):
                values.append(v)
                v += step
    if not values:
        raise UsageError(f"grid {text!r} is empty")
    if integer:
        ints = sorted({int(round(v)) for v in values})
        return ints
    return values


def _float_repr(x: float) -> str:
    return repr(float(x))


def _out_dir(ns: argparse.Namespace) -> Path:
    out = ns.out or os.environ.get("PILIPOVIC_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_config(path: str | None, section: str) -> dict[str, str]:
    if not path:
        return {}
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise UsageError(f"config file {path!r} not found")
    if not parser.has_section(section):
        return {}
    return dict(parser.items(section))


def _setting(ns: argparse.Namespace, config: dict[str, str], key: str, default):
    """Flag wins over config file wins over built-in default."""
    flag = getattr(ns, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _all_pass(reports: Sequence[CheckReport]) -> bool:
    return bool(reports) and all(r.passed for r in reports)


# ---------------------------------------------------------------------------
# Plots (SVG, headless)
# ---------------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("svg", force=True)
    import matplotlib.pyplot as plt

    return plt


def _plot_ratio_vs_n(reports: Sequence[CheckReport], title: str, path: Path) -> None:
    plt = _pyplot()
    ns = [r.params.get("N") for r in reports]
    ratios = [r.ratio_log for r in reports]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, ratios, "o-", lw=1.2)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set(xlabel="N", ylabel="ratio_log", title=title)
    if ns and max(ns) / max(min(ns), 1) > 50:
        ax.set_xscale("log")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_interval(reports: Sequence[CheckReport], path: Path) -> None:
    plt = _pyplot()
    ns = [r.params["N"] for r in reports]
    d1 = [r.params["dm_t1"] for r in reports]
    d2 = [r.params["dm_t2"] for r in reports]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, d1, "o-", label="m'(t1)")
    ax.plot(ns, d2, "s-", label="m'(t2)")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set(xlabel="N", ylabel="slope", title="peak bracketing")
    ax.set_xscale("log")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_convex(env: ConvexEnvelope, residuals: list[tuple[float, float, float, float]], path: Path) -> None:
    plt = _pyplot()
    ts = [row[0] for row in residuals]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ts, [row[1] for row in residuals], "-", label="phi")
    ax.plot(ts, [row[2] for row in residuals], "--", label="(phi*)*")
    ax.plot(ts, [env.young_conjugate(t) for t in ts], ":", label="phi*")
    ax.set(xlabel="t", title=f"convex envelope, r = {env.r:g}")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_growth(fit, theta: float, path: Path) -> None:
    plt = _pyplot()
    xs = [math.log(math.hypot(rho, 1.0)) ** theta for rho, _ in fit.samples]
    ys = [m for _, m in fit.samples]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, "o-")
    ax.set(
        xlabel=f"(log <rho>)^{theta:g}",
        ylabel="max log |F|",
        title=f"model={fit.model}, R_hat={fit.r_hat:.4g}",
    )
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_sandwich(reports: Sequence[CheckReport], path: Path) -> None:
    plt = _pyplot()
    ks = [r.params["k"] for r in reports]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, [r.lhs.log_or() for r in reports], "o-", label="log vartheta")
    ax.plot(ks, [r.params["lower_env_log"] for r in reports], "--", label="lower")
    ax.plot(ks, [r.params["upper_env_log"] for r in reports], "--", label="upper")
    ax.set(xlabel="k", ylabel="log scale", title="weight sandwich")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_verify(ns: argparse.Namespace) -> int:
    config = _load_config(ns.config, "verify")
    theorem = ns.theorem
    out = _out_dir(ns)
    d = int(_setting(ns, config, "d", 1))
    n_grid = parse_grid(str(_setting(ns, config, "ngrid", "5:40:5")), integer=True)
    if min(n_grid) < 3:
        raise UsageError("N grid must start at 3 or above")
    degrees = parse_grid(str(_setting(ns, config, "kgrid", "20,50,100")), integer=True)
    n_max_rev = int(_setting(ns, config, "nmax_reverse", 2000))
    r0_factor = float(_setting(ns, config, "r0_factor", 2.0))

    rows: list[str] = ["check,param,N,lhs_log,rhs_log,ratio_log,pass"]
    all_reports: list[CheckReport] = []
    plot_reports: list[CheckReport] = []

    def add(check: str, param: float, reports: Sequence[CheckReport]) -> None:
        all_reports.extend(reports)
        for rep in reports:
            rows.append(
                ",".join(
                    [
                        check,
                        _float_repr(param),
                        str(rep.params.get("N", "")),
                        _float_repr(rep.lhs.log_or()),
                        _float_repr(rep.rhs.log_or()),
                        _float_repr(rep.ratio_log),
                        "true" if rep.passed else "false",
                    ]
                )
            )

    if theorem == "thm1":
        r = float(_setting(ns, config, "r", 0.25))
        r0 = float(_setting(ns, config, "r0", r0_factor * d * r))
        forward = forward_check(GeometricLaw(1.0, r), d, n_grid, r0)
        add("forward", r, forward)
        plot_reports = list(forward)
        add("reverse", r, reverse_check(r, degrees, n_max_rev))
    else:
        rgrid_text = str(_setting(ns, config, "rgrid", "1,0.5,0.25,0.1"))
        r_values = sorted((float(v) for v in parse_grid(rgrid_text)), reverse=True)
        for r in r_values:
            r0 = r0_factor * d * r
            forward = forward_check(GeometricLaw(1.0, r), d, n_grid, r0)
            add("forward", r, forward)
            if not plot_reports:
                plot_reports = list(forward)

    _write(out / f"{theorem}_report.csv", "\n".join(rows) + "\n")
    _plot_ratio_vs_n(plot_reports, f"{theorem}: ratio vs N", out / f"{theorem}_ratio.svg")
    return 0 if _all_pass(all_reports) else 2


def cmd_lemma(ns: argparse.Namespace) -> int:
    config = _load_config(ns.config, "lemma")
    which = ns.which
    out = _out_dir(ns)
    r = float(_setting(ns, config, "r", 1.0))

    if which == "interval":
        n_grid = parse_grid(str(_setting(ns, config, "ngrid", "1e2:1e6:log")), integer=True)
        reports, n0 = interval_check(r, n_grid)
        lines = ["param,N,t1,tstar,t2,pass"]
        for rep in reports:
            lines.append(
                ",".join(
                    [
                        _float_repr(r),
                        str(rep.params["N"]),
                        _float_repr(rep.params["t1"]),
                        _float_repr(rep.params["tstar"]),
                        _float_repr(rep.params["t2"]),
                        "true" if rep.passed else "false",
                    ]
                )
            )
        _write(out / "lemma_interval.csv", "\n".join(lines) + "\n")
        _plot_interval(reports, out / "lemma_interval.svg")
        print(f"empirical N0({r:g}) = {n0}")
        ok = n0 is not None and all(rep.passed for rep in reports if rep.params["N"] >= n0)
        return 0 if ok else 2

    if which == "maximum":
        n_grid = parse_grid(str(_setting(ns, config, "ngrid", "1e3:1e6:log")), integer=True)
        reports = maximum_bound_check(r, n_grid)
        _write(out / "lemma_maximum.csv", reports_to_csv(reports))
        _plot_ratio_vs_n(reports, "peak size vs envelope", out / "lemma_maximum.svg")
        return 0 if _all_pass(reports) else 2

    if which == "series":
        a1 = float(_setting(ns, config, "a1", 1.0))
        a2 = float(_setting(ns, config, "a2", 0.0))
        r_in = float(_setting(ns, config, "r", 0.3))
        r0 = float(_setting(ns, config, "r0", 0.5))
        n_grid = parse_grid(str(_setting(ns, config, "ngrid", "10:1e4:log")), integer=True)
        reports = series_bound_check(a1, a2, r_in, r0, n_grid)
        _write(out / "lemma_series.csv", reports_to_csv(reports))
        _plot_ratio_vs_n(reports, "series vs envelope", out / "lemma_series.svg")
        return 0 if _all_pass(reports) else 2

    # convex
    env = ConvexEnvelope(r)
    ts = [0.1 + i * (2.5 * max(env.t0, 1.0) - 0.1) / 19.0 for i in range(20)]
    rows = []
    worst = 0.0
    for t in ts:
        phi = env.value(t)
        phi2 = env.biconjugate(t)
        resid = abs(phi2 - phi) / max(1.0, abs(phi))
        worst = max(worst, resid)
        rows.append((t, phi, phi2, resid))
    lines = ["t,phi,biconjugate,residual"]
    for t, phi, phi2, resid in rows:
        lines.append(",".join(_float_repr(v) for v in (t, phi, phi2, resid)))
    _write(out / "lemma_convex.csv", "\n".join(lines) + "\n")
    _plot_convex(env, rows, out / "lemma_convex.svg")
    print(f"conjugate involution residual = {worst:.3e}")
    return 0 if worst < 1e-6 else 2


def cmd_bell(ns: argparse.Namespace) -> int:
    config = _load_config(ns.config, "bell")
    out = _out_dir(ns)
    n_max = int(_setting(ns, config, "nmax", 50))
    if n_max < 1 or n_max > 200:
        raise UsageError("nmax must be in 1..200")
    lam = float(_setting(ns, config, "lam", 0.5))
    a = float(_setting(ns, config, "a", 0.1))
    r = float(_setting(ns, config, "r", 1.0))

    exact = bell_numbers(min(2 * n_max, 200))
    bt = berend_tassa_check(range(1, n_max + 1))
    lines = ["N,bell_N,dobinski_2N_log,lower_log,upper_log,pass"]
    for n, rep in zip(range(1, n_max + 1), bt):
        bell_n = exact[n - 1]
        lines.append(
            ",".join(
                [
                    str(n),
                    str(bell_n),
                    _float_repr(rep.lhs.log_or()),
                    _float_repr(rep.params["lower_log"]),
                    _float_repr(rep.params["upper_log"]),
                    "true" if rep.passed else "false",
                ]
            )
        )
    _write(out / "bell_report.csv", "\n".join(lines) + "\n")

    cn_grid = parse_grid(str(_setting(ns, config, "cngrid", "1e3:1e8:log")), integer=True)
    rows = cn_decay_sequence(r, lam, a, cn_grid)
    lines = ["N,cn,cn_times_na,identity_rel_err"]
    for row in rows:
        lines.append(
            ",".join([str(row.n), _float_repr(row.cn), _float_repr(row.cn_times_na), _float_repr(row.identity_rel_err)])
        )
    _write(out / "bell_cn.csv", "\n".join(lines) + "\n")

    decreasing = all(b.cn_times_na < a_.cn_times_na for a_, b in zip(rows, rows[1:]))
    ok = _all_pass(bt) and decreasing
    return 0 if ok else 2


def cmd_bargmann(ns: argparse.Namespace) -> int:
    config = _load_config(ns.config, "bargmann")
    out = _out_dir(ns)
    s = float(_setting(ns, config, "s", 0.25))

    if getattr(ns, "vartheta", False):
        R = float(_setting(ns, config, "bigr", 1.0))
        k_grid = parse_grid(str(_setting(ns, config, "kgrid", "10:200:10")), integer=True)
        theta = 1.0 / (1.0 - 2.0 * s)
        mu = float(_setting(ns, config, "mu", 0.5 * (1.0 + theta)))
        reports = vartheta_sandwich_check(R, s, 1, k_grid, mu)
        lines = ["k,R,s,log_vartheta,lower_env,upper_env,pass"]
        for rep in reports:
            lines.append(
                ",".join(
                    [
                        str(rep.params["k"]),
                        _float_repr(R),
                        _float_repr(s),
                        _float_repr(rep.lhs.log_or()),
                        _float_repr(rep.params["lower_env_log"]),
                        _float_repr(rep.params["upper_env_log"]),
                        "true" if rep.passed else "false",
                    ]
                )
            )
        _write(out / "vartheta_sweep.csv", "\n".join(lines) + "\n")
        _plot_sandwich(reports, out / "vartheta_sweep.svg")
        return 0 if _all_pass(reports) else 2

    law_name = str(_setting(ns, config, "law", "subexp"))
    r = float(_setting(ns, config, "r", 1.0))
    if law_name == "subexp":
        law = SubExponentialLaw(r, s)
        default_radii, default_degree = "1e1:1e6:log", 60
    elif law_name == "geometric":
        law = GeometricLaw(1.0, r)
        default_radii, default_degree = "1:100:log", 400
    else:
        raise UsageError(f"unknown law {law_name!r}")
    degree = int(_setting(ns, config, "degree", default_degree))
    radii = parse_grid(str(_setting(ns, config, "radii", default_radii)))

    series = bargmann_from_expansion(realize_law(law, 1, degree))
    fit = growth_fit(series, radii)
    label = classify_entire(series, s, radii)
    theta = 1.0 / (1.0 - 2.0 * s)
    lines = ["rho,logM,model,R_hat,theta_hat,residual"]
    for rho, m in fit.samples:
        lines.append(
            ",".join(
                [
                    _float_repr(rho),
                    _float_repr(m),
                    fit.model,
                    _float_repr(fit.r_hat),
                    _float_repr(fit.theta_hat if fit.theta_hat is not None else float("nan")),
                    _float_repr(fit.residual),
                ]
            )
        )
    _write(out / "growth_fit.csv", "\n".join(lines) + "\n")
    _plot_growth(fit, theta, out / "growth_fit.svg")
    print(f"class = {label}, model = {fit.model}, R_hat = {fit.r_hat:.4g}")
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits 2; we use 1
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="pilipovic", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", default=None, help="ini file with per-command sections")
    parser.add_argument("--out", default=None, help="output directory (default $PILIPOVIC_OUT or .)")
    # accept the global flags after the subcommand too; SUPPRESS keeps an
    # absent late flag from clobbering an early one
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="norm-growth round trips", parents=[common])
    p.add_argument("theorem", choices=["thm1", "thm2"])
    p.add_argument("--r", type=float, dest="r")
    p.add_argument("--rgrid", dest="rgrid")
    p.add_argument("--d", type=int, dest="d")
    p.add_argument("--Ngrid", dest="ngrid")
    p.add_argument("--r0", type=float, dest="r0")
    p.add_argument("--r0-factor", type=float, dest="r0_factor")
    p.add_argument("--kgrid", dest="kgrid")
    p.add_argument("--Nmax-reverse", type=int, dest="nmax_reverse")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lemma", help="asymptotic lemma sweeps", parents=[common])
    p.add_argument("which", choices=["interval", "maximum", "series", "convex"])
    p.add_argument("--r", type=float, dest="r")
    p.add_argument("--Ngrid", dest="ngrid")
    p.add_argument("--a1", type=float, dest="a1")
    p.add_argument("--a2", type=float, dest="a2")
    p.add_argument("--r0", type=float, dest="r0")
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("bell", help="Bell-number tables and envelopes", parents=[common])
    p.add_argument("--nmax", type=int, dest="nmax")
    p.add_argument("--lam", type=float, dest="lam")
    p.add_argument("--a", type=float, dest="a")
    p.add_argument("--r", type=float, dest="r")
    p.add_argument("--cngrid", dest="cngrid")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("bargmann", help="entire-side growth and weights", parents=[common])
    p.add_argument("--law", dest="law", choices=["subexp", "geometric"])
    p.add_argument("--r", type=float, dest="r")
    p.add_argument("--s", type=float, dest="s")
    p.add_argument("--radii", dest="radii")
    p.add_argument("--degree", type=int, dest="degree")
    p.add_argument("--vartheta", action="store_true", dest="vartheta")
    p.add_argument("--R", type=float, dest="bigr")
    p.add_argument("--kgrid", dest="kgrid")
    p.add_argument("--mu", type=float, dest="mu")
    p.set_defaults(func=cmd_bargmann)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        return ns.func(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
