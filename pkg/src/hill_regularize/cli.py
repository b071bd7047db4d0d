"""``hill-regularize`` command-line interface.

Exit codes: 0 success, 1 usage or config error, 2 domain or numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .collision import bifurcation_scan, classify_branch, on_collision_manifold
from .config import RunConfig, load_config, params_from_overrides, resolve_system, validate
from .dynamics import hamiltonian, hamiltonian_array, make_cartesian_field
from .errors import ConfigError, HillError, IntegrationError, SingularState
from .integrator import integrate, integrate_to_collision
from .mcgehee import (
    McGeheeState,
    energy_residual_array,
    from_mcgehee,
    recover_physical_time,
)
from .params import as_fraction
from .portrait import compute_portrait, portrait_csv_rows, render_svg

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HILL_THREADS", "1")))
    except ValueError:
        return 1


def fmt_float(x) -> str:
    """Shortest round-trip representation."""
    return repr(float(x))


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(text: str, path, stream=None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        (stream or sys.stdout).write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_float(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _floats(text: str, n: int, name: str):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name} expects {n} comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"--{name} expects {n} comma-separated numbers")
    return vals


def _merge_flags(cfg: RunConfig, args) -> RunConfig:
    """Overlay command-line numeric flags onto the config and revalidate."""
    raw = json.loads(json.dumps(cfg.raw))
    direct = {k: getattr(args, k) for k in ("mu", "u1", "u2", "c3") if getattr(args, k, None) is not None}
    if direct:
        if "bodies" in raw:
            raise UsageError("direct flags conflict with a 'bodies' config")
        raw.setdefault("direct", {}).update(direct)
    if args.command != "propagate":
        return validate(raw)
    over = {}
    for key in ("nu", "alpha"):
        val = getattr(args, key, None)
        if val is not None:
            over[key] = val
    for key in ("c", "A", "B"):
        val = getattr(args, key, None)
        if val is not None:
            over[key] = val
    if getattr(args, "mode", None):
        over["mode"] = args.mode
    if over:
        raw.setdefault("overrides", {}).update(over)
    integ = {}
    for key in ("rel_tol", "abs_tol", "tau_max", "r_floor", "r_ceiling"):
        val = getattr(args, key, None)
        if val is not None:
            integ[key] = val
    if integ:
        raw.setdefault("integrator", {}).update(integ)
    return validate(raw)


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else validate({"schema": 1})
    return _merge_flags(cfg, args)


def _output(cfg: RunConfig, args, default_format):
    out = cfg.section("output")
    path = args.out or out.get("path")
    fmt = args.format or out.get("format") or default_format
    return path, fmt


# commands -----------------------------------------------------------------


def cmd_equilibrium(cfg: RunConfig, args) -> int:
    system = resolve_system(cfg)
    tri = system.triangle
    report = {
        "mu": tri.mu,
        "u1": tri.u1,
        "u2": tri.u2,
        "lambda1": tri.lambda1,
        "lambda2": tri.lambda2,
        "delta": tri.delta,
        "residuals": list(system.residuals) if system.residuals is not None else None,
        "solved": system.residuals is not None,
        "c3": system.c3,
        "hill_params": system.params.as_dict(),
    }
    path, fmt = _output(cfg, args, "json")
    if fmt != "json":
        raise UsageError("equilibrium only writes json")
    _emit(_dump_json(report), path)
    return EXIT_OK


def _propagate_settings(cfg: RunConfig, args):
    prop = cfg.section("propagate")
    coords = args.coords or prop.get("coords") or "cartesian"
    if args.state0:
        state0 = _floats(args.state0, 4, "state0")
    elif "state0" in prop:
        state0 = prop["state0"]
    else:
        raise UsageError("propagate needs an initial state (--state0 or propagate.state0)")
    if args.span:
        span = _floats(args.span, 2, "span")
    elif "span" in prop:
        span = prop["span"]
    else:
        span = [0.0, cfg.section("integrator").get("tau_max", 20.0)]
    h = args.h if args.h is not None else prop.get("h")
    return coords, state0, span, h


def cmd_propagate(cfg: RunConfig, args) -> int:
    params = resolve_system(cfg).params if cfg.has_system else params_from_overrides(cfg)
    coords, state0, span, h_level = _propagate_settings(cfg, args)
    integ = cfg.section("integrator")
    rel_tol = integ.get("rel_tol", 1e-12)
    abs_tol = integ.get("abs_tol", 1e-12)
    path, fmt = _output(cfg, args, "csv")
    if fmt != "csv":
        raise UsageError("propagate writes a csv trajectory")

    summary = {"coords": coords, "params": params.as_dict(), "truncated": False}
    status = EXIT_OK
    if coords == "cartesian":
        field = make_cartesian_field(params)
        try:
            traj = integrate(field, state0, tuple(span), rel_tol, abs_tol)
        except (IntegrationError, SingularState) as exc:
            traj, status = exc.trajectory, EXIT_DOMAIN
            summary.update(truncated=True, error={"type": type(exc).__name__, "message": str(exc)})
        energies = np.array([hamiltonian_array(y, params) for y in traj.y])
        summary.update(
            h0=float(energies[0]),
            max_energy_drift=float(np.max(np.abs(energies - energies[0]))),
            steps=traj.accepted_steps,
            rejected=traj.rejected_steps,
            t_final=traj.t_final,
        )
        header = ["t", "x1", "x2", "y1", "y2", "H"]
        rows = ([t, *y, e] for t, y, e in zip(traj.t, traj.y, energies))
    else:
        m0 = McGeheeState(*state0, tau=span[0])
        if h_level is None:
            h_level = hamiltonian(from_mcgehee(m0, params.beta, params.gamma), params) if m0.r > 0 else 0.0
        tau_max = span[1] - span[0]
        if not tau_max > 0:
            raise UsageError("mcgehee propagation runs forward in tau")
        try:
            run = integrate_to_collision(
                params,
                m0,
                tau_max,
                r_floor=integ.get("r_floor", 1e-8),
                r_ceiling=integ.get("r_ceiling", 1e3),
                rel_tol=rel_tol,
                abs_tol=abs_tol,
            )
            traj, t_phys, verdict = run.trajectory, run.physical_time, run.verdict
            summary["verdict_thresholds"] = run.verdict_thresholds
        except (IntegrationError, SingularState) as exc:
            traj, status = exc.trajectory, EXIT_DOMAIN
            t_phys = recover_physical_time(np.column_stack([traj.t, np.abs(traj.y[:, 0])]))
            verdict = None
            summary.update(truncated=True, error={"type": type(exc).__name__, "message": str(exc)})
        residuals = np.array([energy_residual_array(y, params, h_level) for y in traj.y])
        final = McGeheeState.from_array(traj.y_final, traj.t_final)
        summary.update(
            h=float(h_level),
            max_residual_drift=float(np.max(np.abs(residuals - residuals[0]))),
            verdict=verdict,
            steps=traj.accepted_steps,
            rejected=traj.rejected_steps,
            tau_final=traj.t_final,
            t_final=float(t_phys[-1]),
            final_state={"r": final.r, "theta": final.theta, "v": final.v, "w": final.w},
            on_collision_manifold=on_collision_manifold(final, params.c, 1e-6),
        )
        header = ["tau", "r", "theta", "v", "w", "energy_residual", "t"]
        rows = ([tau, y[0], y[1], y[2], y[3], e, t] for tau, y, e, t in zip(traj.t, traj.y, residuals, t_phys))

    _emit(_csv_text(header, rows), path)
    _emit(_dump_json(summary), None, sys.stderr if not path else sys.stdout)
    return status


def _rational_setting(args, section: dict, key: str, default):
    val = getattr(args, key, None)
    if val is None:
        val = section.get(key, default)
    return as_fraction(val, key)


def cmd_portrait(cfg: RunConfig, args) -> int:
    sec = cfg.section("portrait")
    alpha = _rational_setting(args, sec, "alpha", 3)
    beta = _rational_setting(args, sec, "beta", Fraction(alpha, 2))
    c = args.c if args.c is not None else sec.get("c", 1.0)
    grid = args.grid if args.grid is not None else sec.get("grid", 7)
    tau = args.tau if args.tau is not None else sec.get("tau", 4.0)
    if grid < 1:
        raise UsageError("grid must be at least 1")
    portrait = compute_portrait(alpha, beta, c, grid=grid, tau=tau, max_workers=_threads())
    path, fmt = _output(cfg, args, "svg")
    if fmt == "svg":
        _emit(render_svg(portrait), path)
        if args.csv:
            _emit(_csv_text(["curve", "index", "v", "w"], portrait_csv_rows(portrait)), args.csv)
    elif fmt == "csv":
        _emit(_csv_text(["curve", "index", "v", "w"], portrait_csv_rows(portrait)), path)
    else:
        _emit(_dump_json({"c": c, "equilibria": [e.as_dict() for e in portrait.equilibria]}), path)
    return EXIT_OK


def cmd_scan(cfg: RunConfig, args) -> int:
    sec = cfg.section("scan")
    alpha = _rational_setting(args, sec, "alpha", 3)
    beta = _rational_setting(args, sec, "beta", Fraction(alpha, 2))
    c_min = args.c_min if args.c_min is not None else sec.get("c_min", -1.0)
    c_max = args.c_max if args.c_max is not None else sec.get("c_max", 1.0)
    steps = args.steps if args.steps is not None else sec.get("steps", 5)
    if steps < 2:
        raise UsageError("steps must be at least 2")
    values = np.linspace(c_min, c_max, steps)
    rows = bifurcation_scan(alpha, beta, values, max_workers=_threads())
    path, fmt = _output(cfg, args, "csv")
    if fmt == "json":
        _emit(_dump_json([
            {"c": row.c, "count": row.count, "equilibria": [e.as_dict() for e in row.equilibria]}
            for row in rows
        ]), path)
        return EXIT_OK
    if fmt != "csv":
        raise UsageError("scan writes csv or json")

    def table():
        for row in rows:
            pts = ";".join(f"{e.name}:{fmt_float(e.location[0])}:{fmt_float(e.location[1])}" for e in row.equilibria)
            yield [row.c, row.count, ";".join(row.kinds), pts]

    _emit(_csv_text(["c", "count", "kinds", "equilibria"], table()), path)
    return EXIT_OK


def cmd_classify(cfg: RunConfig, args) -> int:
    ov = cfg.section("overrides")
    nu = args.nu if args.nu is not None else ov.get("nu", 1)
    alpha = args.alpha if args.alpha is not None else ov.get("alpha", 3)
    report = classify_branch(None if args.single_term else nu, alpha, single_term=args.single_term, c=args.c)
    path, fmt = _output(cfg, args, "json")
    if fmt != "json":
        raise UsageError("classify only writes json")
    _emit(_dump_json(report.as_dict()), path)
    return EXIT_OK


COMMANDS = {
    "equilibrium": cmd_equilibrium,
    "propagate": cmd_propagate,
    "portrait": cmd_portrait,
    "scan": cmd_scan,
    "classify": cmd_classify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hill-regularize", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", metavar="FILE")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--format", choices=["json", "csv", "svg"])

    def exponents(p):
        p.add_argument("--nu", type=str)
        p.add_argument("--alpha", type=str)

    p = sub.add_parser("equilibrium", help="solve the relative equilibrium and lambdas")
    common(p)
    for key in ("mu", "u1", "u2", "c3"):
        p.add_argument(f"--{key}", type=float)

    p = sub.add_parser("propagate", help="integrate an orbit in cartesian or McGehee coordinates")
    common(p)
    exponents(p)
    for key in ("mu", "u1", "u2", "c3", "c", "A", "B", "h"):
        p.add_argument(f"--{key}", type=float)
    p.add_argument("--mode", choices=["standard", "newtonian-limit"])
    p.add_argument("--coords", choices=["cartesian", "mcgehee"])
    p.add_argument("--state0", help="four comma-separated numbers")
    p.add_argument("--span", help="start,end of t (cartesian) or tau (mcgehee)")
    for key in ("rel-tol", "abs-tol", "tau-max", "r-floor", "r-ceiling"):
        p.add_argument(f"--{key}", type=float)

    p = sub.add_parser("portrait", help="phase portrait of the reduced system")
    common(p)
    p.add_argument("--alpha", type=str)
    p.add_argument("--beta", type=str)
    p.add_argument("--c", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--csv", metavar="PATH", help="also write flow lines as csv")

    p = sub.add_parser("scan", help="equilibria of the reduced system over a range of c")
    common(p)
    p.add_argument("--alpha", type=str)
    p.add_argument("--beta", type=str)
    p.add_argument("--c-min", type=float)
    p.add_argument("--c-max", type=float)
    p.add_argument("--steps", type=int)

    p = sub.add_parser("classify", help="branch and block regularizability")
    common(p)
    exponents(p)
    p.add_argument("--single-term", action="store_true")
    p.add_argument("--c", type=float, help="sign of c; c <= 0 classifies the Newtonian term alone")
    return parser


def _error_object(exc) -> str:
    return _dump_json({"error": {"type": type(exc).__name__, "message": str(exc)}})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load(args)
        return COMMANDS[args.command](cfg, args)
    except (UsageError, ConfigError) as exc:
        sys.stdout.write(_error_object(exc))
        return EXIT_USAGE
    except (HillError, ArithmeticError, ValueError, TypeError) as exc:
        sys.stdout.write(_error_object(exc))
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
