"""Command-line driver: run each route, cross-check, fit, and write reports."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .geometry import (
    ProjectivePoint,
    fs_curvature,
    get_testform,
    integrate,
    scalar_curvature_fd,
    sphere_quadrature,
    testform_library,
)
from .kernels import (
    decay_margin,
    expansion_residual,
    normalized_kernel,
    szego_magnitude,
    szego_magnitude_basis,
)
from .montecarlo import RejectionError, mc_number_variance, mc_variance
from .specfun import DomainError, g_function, riemann_zeta
from .variance import (
    QuadratureError,
    QuadratureSpec,
    asymptotic_coefficients,
    coefficient_integrals,
    curvature_contraction,
    exact_variance,
    fit_expansion,
    multinomial_expand,
    wick_moment,
    zonal_variance_oracle,
)

COMMANDS = ("kernel-probe", "variance-exact", "variance-mc", "number-mc", "asymptotics", "fit", "verify")
SUITES = ("specfun", "geometry", "kernels", "variance", "all")
CSV_COLUMNS = ("k", "route", "value", "error_estimate", "seed")

# provenance labels attached to every comparison value in a report
ANALYTIC = "analytic"  # closed form from the theory
ORACLE = "oracle"  # independent numerical computation

DEFAULTS: dict[str, Any] = {
    "k": [100],
    "testform": "psi1",
    "samples": 2000,
    "seed": 2024,
    "outer_nodes": 32,
    "inner_nodes": 16,
    "cutoff_b": 2.0,
    "radius": math.pi / 4,
    "out": None,
    "format": "json",
    "suite": "all",
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    k_list: list[int]
    testform: str
    n_samples: int
    seed: int
    quadrature: QuadratureSpec
    radius: float
    output_path: str | None
    format: str
    suite: str

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.k_list or any(k < 1 for k in self.k_list):
            raise UsageError("--k values must be positive integers")
        if self.n_samples < 2:
            raise UsageError("--samples must be >= 2")
        if self.seed < 0:
            raise UsageError("--seed must be nonnegative")
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")
        if self.suite not in SUITES:
            raise UsageError(f"--suite must be one of {', '.join(SUITES)}")
        if not 0.0 < self.radius < math.pi / 2:
            raise UsageError("--radius must lie in (0, pi/2)")
        names = {tf.name for tf in testform_library()}
        if self.testform not in names:
            raise UsageError(f"unknown test form {self.testform!r}; choose from {', '.join(sorted(names))}")

    def params(self) -> dict:
        return {
            "k": self.k_list,
            "testform": self.testform,
            "samples": self.n_samples,
            "seed": self.seed,
            "quadrature": self.quadrature.as_dict(),
            "radius": self.radius,
            "format": self.format,
            "suite": self.suite,
        }


@dataclass
class Report:
    results: list[dict] = field(default_factory=list)
    checks: list[dict] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)
    table: list[tuple] | None = None

    def check(self, name: str, expected: float, got: float, tol: float, provenance: str, relative: bool = False) -> bool:
        if relative:
            ok = abs(got - expected) <= tol * abs(expected)
        else:
            ok = abs(got - expected) <= tol
        self.checks.append(
            {
                "name": name,
                "expected": expected,
                "got": got,
                "tol": tol,
                "relative": relative,
                "pass": bool(ok),
                "provenance": provenance,
            }
        )
        return ok

    def flag(self, name: str, ok: bool, got: Any, provenance: str = ORACLE) -> None:
        self.checks.append({"name": name, "expected": True, "got": got, "tol": None, "relative": False, "pass": bool(ok), "provenance": provenance})


# --- argument handling ---------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


_CONVERTERS: dict[str, Callable[[str], Any]] = {
    "k": _int_list,
    "testform": str,
    "samples": int,
    "seed": int,
    "outer_nodes": int,
    "inner_nodes": int,
    "cutoff_b": float,
    "radius": float,
    "out": str,
    "format": str,
    "suite": str,
}


def read_config(path: str) -> dict:
    """key=value lines; '#' starts a comment; keys as flag names."""
    out: dict[str, Any] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _CONVERTERS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _CONVERTERS[key](value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults are None so that config-file values can fill unset flags
    common.add_argument("--k", type=_int_list, help="comma-separated list of k")
    common.add_argument("--testform", help="test form name")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--seed", type=int, help="RNG seed")
    common.add_argument("--outer-nodes", type=int, help="outer quadrature nodes per chart")
    common.add_argument("--inner-nodes", type=int, help="inner radial nodes per panel")
    common.add_argument("--cutoff-b", type=float, help="near-field window constant b")
    common.add_argument("--radius", type=float, help="geodesic disk radius for number-mc")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--config", help="key=value file; flags win")

    parser = argparse.ArgumentParser(prog="zerovar", description="Variance of zero-set linear statistics on CP^1.")
    parser.add_argument("--version", action="version", version=f"zerovar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "kernel-probe": "kernel routes, decay margins and expansion residuals",
        "variance-exact": "bipotential double integral",
        "variance-mc": "Monte Carlo variance of a linear statistic",
        "number-mc": "Monte Carlo variance of the zero count in a disk",
        "asymptotics": "A0 and A1 for a test form",
        "fit": "fit A0 + A1/k to exact variances",
        "verify": "self-test suites",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "verify":
            p.add_argument("--suite", choices=SUITES)
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config(args.config))
    for key in _CONVERTERS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    try:
        spec = QuadratureSpec(
            outer_nodes=int(merged["outer_nodes"]),
            inner_radial=int(merged["inner_nodes"]),
            inner_angular=3 * int(merged["inner_nodes"]),
            cutoff_b=float(merged["cutoff_b"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return RunConfig(
        command=args.command,
        k_list=list(merged["k"]),
        testform=merged["testform"],
        n_samples=int(merged["samples"]),
        seed=int(merged["seed"]),
        quadrature=spec,
        radius=float(merged["radius"]),
        output_path=merged["out"],
        format=merged["format"],
        suite=merged["suite"],
    )


# --- commands -----------------------------------------------------------------


def _random_points(n: int, seed: int) -> list[ProjectivePoint]:
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, 4))
    return [ProjectivePoint(complex(a, b), complex(c, d)) for a, b, c, d in g]


def cmd_kernel_probe(cfg: RunConfig, rep: Report) -> None:
    pts = _random_points(10, cfg.seed)
    u_grid = [r * np.exp(1j * t) for r in np.linspace(0.0, 2.0, 21) for t in (0.0, 1.0)]
    for k in cfg.k_list:
        res: dict[str, Any] = {"k": k}
        diag = szego_magnitude(pts[0], pts[0], k).magnitude
        rep.check(f"diagonal k={k}", (k + 1) / math.pi, diag, 1e-10, ANALYTIC, relative=True)
        if k <= 300:
            worst = 0.0
            for p, q in zip(pts[::2], pts[1::2]):
                a = szego_magnitude(p, q, k).log_magnitude
                b = szego_magnitude_basis(p, q, k).log_magnitude
                if math.isfinite(a):
                    worst = max(worst, abs(math.expm1(b - a)))
            res["route_max_rel_diff"] = worst
            rep.check(f"basis vs closed form k={k}", 0.0, worst, 1e-10, ORACLE)
        if k >= 2:
            decay = {}
            for p_exp in (0.5, 1.0, 2.0):
                d = decay_margin(k, p_exp)
                decay[str(p_exp)] = d.as_dict()
                rep.flag(f"decay ratios nonincreasing k={k} p={p_exp}", d.passed, d.ratios)
            res["decay"] = decay
            window = [u for u in u_grid if abs(u) <= math.sqrt(5 * math.log(k))]
            res["sup_expansion_residual"] = max(abs(expansion_residual(u, k)) for u in window)
        rep.results.append(res)
        rep.rows.append((k, "kernel", diag, 0.0, cfg.seed))


def cmd_variance_exact(cfg: RunConfig, rep: Report) -> None:
    tf = get_testform(cfg.testform)
    for k in cfg.k_list:
        vr = exact_variance(tf, k, cfg.quadrature)
        res = vr.as_dict() | {"k_times_value": k * vr.value}
        if tf.eigenvalue is not None:
            z = zonal_variance_oracle(tf, k)
            res["zonal_oracle"] = z
            if z != 0.0:
                rep.check(f"exact vs zonal k={k}", z, vr.value, 1e-6, ORACLE, relative=True)
            else:
                rep.check(f"exact vs zonal k={k}", 0.0, vr.value, 1e-12, ORACLE)
        rep.check(f"nonnegative k={k}", max(vr.value, 0.0), vr.value, vr.error_estimate, ANALYTIC)
        rep.results.append(res)
        rep.rows.append((k, "exact", vr.value, vr.error_estimate, ""))


def cmd_variance_mc(cfg: RunConfig, rep: Report) -> None:
    tf = get_testform(cfg.testform)
    for k in cfg.k_list:
        est = mc_variance(k, tf, cfg.n_samples, cfg.seed)
        exact = exact_variance(tf, k, cfg.quadrature)
        res = {"k": k, "route": "mc", "mc": est.as_dict(), "exact": exact.value, "delta": est.variance - exact.value}
        rep.check(f"mc vs exact k={k}", exact.value, est.variance, 4.0 * est.stderr_variance, ORACLE)
        rep.results.append(res)
        rep.rows.append((k, "mc", est.variance, est.stderr_variance, cfg.seed))


def cmd_number_mc(cfg: RunConfig, rep: Report) -> None:
    for k in cfg.k_list:
        est = mc_number_variance(k, cfg.radius, cfg.n_samples, cfg.seed)
        ex = est.extras
        rep.results.append({"k": k, "route": "mc", "mc": est.as_dict()})
        rep.check(f"mean count k={k}", ex["theory_mean"], est.mean, 4.0 * est.stderr_mean, ANALYTIC)
        rep.check(f"variance vs sqrt(k) law k={k}", ex["theory_variance"], est.variance, 0.15, ANALYTIC, relative=True)
        rep.rows.append((k, "mc", est.variance, est.stderr_variance, cfg.seed))


def cmd_asymptotics(cfg: RunConfig, rep: Report) -> None:
    tf = get_testform(cfg.testform)
    ci = coefficient_integrals(tf)
    coeffs = asymptotic_coefficients(1, ci)
    rep.results.append({"coefficients": coeffs.as_dict()})
    if tf.eigenvalue is not None:
        fd = coefficient_integrals(tf, method="fd")
        rep.check("dbar norm: eigen vs finite differences", ci.I_dbarf, fd.I_dbarf, 1e-6, ORACLE, relative=True)
    if tf.name == "psi1":
        rep.check("A0 psi1", 4 * riemann_zeta(3) / 3, coeffs.A0, 1e-10, ANALYTIC, relative=True)
        rep.check("A1 psi1", -4 * riemann_zeta(4), coeffs.A1, 1e-10, ANALYTIC, relative=True)
    for k in cfg.k_list:
        v = coeffs.predict(k)
        rep.results.append({"k": k, "route": "asymptotic", "value": v, "flagged": v < 0})
        rep.rows.append((k, "asymptotic", v, abs(coeffs.A1) / k**3, ""))


def cmd_fit(cfg: RunConfig, rep: Report) -> None:
    tf = get_testform(cfg.testform)
    data = []
    for k in cfg.k_list:
        vr = exact_variance(tf, k, cfg.quadrature)
        data.append((k, vr.value))
        rep.rows.append((k, "exact", vr.value, vr.error_estimate, ""))
    fit = fit_expansion(data)
    coeffs = asymptotic_coefficients(1, coefficient_integrals(tf))
    rep.table = [(k, k * v) for k, v in data]
    rep.results.append({"fit": fit.as_dict(), "theory": coeffs.as_dict(), "table": [{"k": k, "k_var": kv} for k, kv in rep.table]})
    rep.check("A0_hat", coeffs.A0, fit.A0_hat, 0.01, ANALYTIC, relative=True)
    rep.check("A1_hat", coeffs.A1, fit.A1_hat, 0.15, ANALYTIC, relative=True)


def _suite_specfun(rep: Report) -> None:
    rep.check("G(0)", 0.0, g_function(0.0), 1e-12, ANALYTIC)
    rep.check("G(1)", 1 / 24, g_function(1.0), 1e-12, ANALYTIC)
    rep.check("G(-1)", -1 / 48, g_function(-1.0), 1e-12, ANALYTIC)
    rep.check("G(1/2)", (math.pi**2 / 12 - math.log(2) ** 2 / 2) / (4 * math.pi**2), g_function(0.5), 1e-13, ANALYTIC)
    rep.check("zeta(2)", math.pi**2 / 6, riemann_zeta(2), 1e-12, ANALYTIC)
    rep.check("zeta(4)", math.pi**4 / 90, riemann_zeta(4), 1e-12, ANALYTIC)
    rep.check("zeta(3)", 1.2020569031595942, riemann_zeta(3), 1e-12, ORACLE)
    rep.check("zeta(3/2)", 2.612375348685488, riemann_zeta(1.5), 1e-12, ORACLE)
    t = np.linspace(0.0, 1.0, 1001)
    rep.flag("G increasing on [0,1]", bool(np.all(np.diff(g_function(t)) > 0)), None)


def _suite_geometry(rep: Report) -> None:
    quad = sphere_quadrature()
    rep.check("area", math.pi, quad.integrate(np.ones(len(quad))), 1e-10, ANALYTIC)
    psi1 = get_testform("psi1")
    rep.check("int psi1^2", math.pi / 3, integrate(lambda a, b: psi1.psi(a, b) ** 2), 1e-10, ANALYTIC)
    rep.check("scalar curvature (finite differences)", 2.0, scalar_curvature_fd(0.3 + 0.2j), 1e-5, ANALYTIC)
    for tf in testform_library():
        rep.check(f"int f = 0 ({tf.name})", 0.0, integrate(tf.f), 1e-8, ANALYTIC)


def _suite_kernels(rep: Report) -> None:
    pts = _random_points(6, 7)
    for k in (1, 2, 10):
        for p, q in zip(pts[::2], pts[1::2]):
            a = szego_magnitude(p, q, k).log_magnitude
            b = szego_magnitude_basis(p, q, k).log_magnitude
            rep.check(f"basis vs closed form k={k}", a, b, 1e-10, ORACLE)
    rep.check("P_k(p,p)", 1.0, normalized_kernel(pts[0], pts[0], 50), 0.0, ANALYTIC)
    r = [abs(expansion_residual(1.0, k)) for k in (100, 200)]
    rep.check("expansion residual halves", 0.5, r[1] / r[0], 0.15 * 0.5, ORACLE)
    rep.flag("decay ladder p=1", decay_margin(50, 1.0).passed, None)


def _suite_variance(rep: Report) -> None:
    psi1 = get_testform("psi1")
    vr = exact_variance(psi1, 20)
    rep.check("exact vs zonal k=20", zonal_variance_oracle(psi1, 20), vr.value, 1e-6, ORACLE, relative=True)
    ci = coefficient_integrals(psi1)
    c = asymptotic_coefficients(1, ci)
    rep.check("A0 psi1", 4 * riemann_zeta(3) / 3, c.A0, 1e-10, ANALYTIC, relative=True)
    rep.check("wick E|v|^4", 2, wick_moment(1, (1, 1), (1, 1)), 0, ANALYTIC)
    for m in (1, 2, 3):
        curv = fs_curvature(m)
        rep.check(f"curvature contraction m={m}", 2 * curv.rho, curvature_contraction(curv), 0, ANALYTIC)
    rep.check("multinomial (1+x^2+2x^3)^2 [x^5]", 4, multinomial_expand([1, 2], 2, 5), 0, ANALYTIC)


def cmd_verify(cfg: RunConfig, rep: Report) -> None:
    suites = {
        "specfun": _suite_specfun,
        "geometry": _suite_geometry,
        "kernels": _suite_kernels,
        "variance": _suite_variance,
    }
    chosen = list(suites) if cfg.suite == "all" else [cfg.suite]
    for name in chosen:
        before = len(rep.checks)
        suites[name](rep)
        n_pass = sum(c["pass"] for c in rep.checks[before:])
        rep.results.append({"suite": name, "checks": len(rep.checks) - before, "passed": n_pass})


HANDLERS: dict[str, Callable[[RunConfig, Report], None]] = {
    "kernel-probe": cmd_kernel_probe,
    "variance-exact": cmd_variance_exact,
    "variance-mc": cmd_variance_mc,
    "number-mc": cmd_number_mc,
    "asymptotics": cmd_asymptotics,
    "fit": cmd_fit,
    "verify": cmd_verify,
}


# --- output -------------------------------------------------------------------


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else repr(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def provenance(cfg: RunConfig, wall: float) -> dict:
    return {
        "tool": "zerovar",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": cfg.seed,
        "quadrature": cfg.quadrature.as_dict(),
        "wall_clock_s": wall,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def render_json(cfg: RunConfig, rep: Report, wall: float) -> str:
    doc = {
        "command": cfg.command,
        "params": cfg.params(),
        "results": rep.results,
        "checks": rep.checks,
        "provenance": provenance(cfg, wall),
    }
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def render_csv(rows: list[tuple], columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    rep = Report()
    t0 = time.perf_counter()
    try:
        HANDLERS[cfg.command](cfg, rep)
    except (QuadratureError, RejectionError) as exc:
        diag = {"command": cfg.command, "error": type(exc).__name__, "message": str(exc), "diagnostics": exc.diagnostics}
        _emit(json.dumps(_jsonable(diag), indent=2) + "\n", cfg.output_path)
        return 1
    except (ArithmeticError, DomainError) as exc:
        diag = {"command": cfg.command, "error": type(exc).__name__, "message": str(exc)}
        _emit(json.dumps(diag, indent=2) + "\n", cfg.output_path)
        return 1
    wall = time.perf_counter() - t0
    if cfg.format == "json":
        _emit(render_json(cfg, rep, wall), cfg.output_path)
    else:
        _emit(render_csv(rep.rows), cfg.output_path)
        if rep.table is not None:
            table = render_csv(rep.table, ("k", "k_var"))
            if cfg.output_path:
                p = Path(cfg.output_path)
                p.with_name(p.stem + "_table.csv").write_text(table)
            else:
                sys.stdout.write(table)
    failed = [c["name"] for c in rep.checks if not c["pass"]]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        cfg = make_config(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"zerovar: error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
