"""Command line interface.

Subcommands
-----------
simulate    integrate an orbit and emit t, p1, p2, p3, H, L as CSV
period      compare closed-form, quadrature, and ODE periods on a grid
verify      run the identity/covariance/structure check battery
monodromy   compute loop monodromies (presets or a loop JSON file)
series      emit the exact rational normal-form series

Options common to all subcommands: --tol, --format, --out, --jobs, --config.
Precedence is flags over config file over built-in defaults.  All floats are
printed with 17 significant digits so outputs are byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .core import DomainError, InertiaSpec, ModuliPoint, moduli_from_mechanics
from .dynamics import (
    IntegrationError,
    MomentumState,
    SeparatrixError,
    integrate_orbit,
    orbit_period,
)
from .monodromy import (
    ALPHA_PRESETS,
    GENERATOR_LABELS,
    ModuliLoop,
    MonodromyError,
    loop_monodromy,
    numeric_vs_stated,
    preset_monodromy,
    verify_braid_relations,
    verify_confluence_product,
)
from .periods import (
    S_closed_form,
    birkhoff_series,
    euler_period,
    phi_prime,
    quadrature_sigma_integral,
    verify_connection_identity,
    verify_symmetries,
)

__all__ = ["main", "build_parser"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_complex(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _parse_triple(text: str, flag: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"{flag} wants three comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{flag}: {exc}") from None


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


# ----------------------------------------------------------------------
# Defaults and config handling.

GLOBAL_DEFAULTS = {
    "tol": None,  # per-command fallback when unset
    "format": None,
    "out": None,
    "jobs": 1,
}

COMMAND_DEFAULTS = {
    "simulate": {"tol": 1e-12, "format": "csv", "samples": 2001},
    "period": {
        "tol": 1e-7,
        "format": "csv",
        "abc": "3,2,1",
        "grid_d": "2.1,2.3,2.5,2.7,2.9",
        "grid_l": "1",
        "axis": "p1",
    },
    "verify": {"tol": 1e-10, "format": "json"},
    "monodromy": {"tol": 1e-6, "format": "json", "preset": None, "loop": None},
    "series": {"tol": 0.0, "format": "json", "n": 12, "s": None, "z": None},
}


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _effective_options(args: argparse.Namespace, command: str) -> dict:
    """Merge defaults, config file values, and explicit flags, in that order."""
    merged = dict(GLOBAL_DEFAULTS)
    merged.update(COMMAND_DEFAULTS[command])
    config = _load_config(getattr(args, "config", None))
    for key, value in config.items():
        if key == command and isinstance(value, dict):
            merged.update(value)
        elif not isinstance(value, dict):
            merged.update({key: value})
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        merged[key] = value
    return merged


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ----------------------------------------------------------------------
# simulate

def cmd_simulate(args: argparse.Namespace) -> int:
    opts = _effective_options(args, "simulate")
    try:
        inertia = InertiaSpec(*_parse_triple(opts["inertia"], "--inertia"))
        p0 = MomentumState(*_parse_triple(opts["p0"], "--p0"))
        traj = integrate_orbit(
            p0, inertia, float(opts["t"]),
            tol=float(opts["tol"]), n_samples=int(opts["samples"]),
        )
    except (IntegrationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    lines = ["t,p1,p2,p3,H,L"]
    for i in range(len(traj.t)):
        row = [traj.t[i], *traj.p[i], traj.H[i], traj.L[i]]
        lines.append(",".join(_fmt(x) for x in row))
    _emit("\n".join(lines) + "\n", opts["out"])
    print(
        f"relative drift over run: H {traj.drift_h:.3e}, L {traj.drift_l:.3e}",
        file=sys.stderr,
    )
    return 0


# ----------------------------------------------------------------------
# period

def _period_row(task: tuple) -> dict:
    a, b, c, d, l, axis, tol = task
    m = ModuliPoint(a, b, c, d, l=l)
    closed = phi_prime(axis, m).value
    if axis == "p3":
        from .core import Permutation4, apply_permutation

        quad_point = apply_permutation(m, Permutation4.from_cycles("(ac)"))
    else:
        quad_point = m
    quad = quadrature_sigma_integral(quad_point).value
    # ODE route: period of the orbit with p2 = 0 on the matching oval.
    inertia = InertiaSpec(1.0 / a, 1.0 / b, 1.0 / c)
    p1sq = 2.0 * l * (d - c) / (a - c)
    p3sq = 2.0 * l * (a - d) / (a - c)
    state = MomentumState(math.sqrt(abs(p1sq)), 0.0, math.sqrt(abs(p3sq)))
    t_orbit = orbit_period(state, inertia, tol=min(1e-12, tol))
    s_ode = -t_orbit / (6.0 * math.pi)
    dev_quad = abs(closed - quad) / abs(closed)
    dev_ode = abs(abs(closed) - abs(s_ode)) / abs(closed)
    return {
        "a": a, "b": b, "c": c, "d": d, "l": l,
        "S_closed": closed.real,
        "S_quadrature": quad.real,
        "S_ode": s_ode,
        "dev_quad": dev_quad,
        "dev_ode": dev_ode,
    }


def cmd_period(args: argparse.Namespace) -> int:
    opts = _effective_options(args, "period")
    a, b, c = _parse_triple(str(opts["abc"]), "--abc")
    ds = _parse_floats(str(opts["grid_d"]))
    ls = _parse_floats(str(opts["grid_l"]))
    axis = opts["axis"]
    if axis not in ("p1", "p3"):
        print(f"error: --axis must be p1 or p3, got {axis!r}", file=sys.stderr)
        return 2
    tol = float(opts["tol"])
    tasks = [(a, b, c, d, l, axis, tol) for l in ls for d in ds]
    # Refuse separatrix grid points up front; the period diverges there.
    for t in tasks:
        if abs(t[3] - b) < 1e-8 * abs(b):
            print(
                f"error: grid point d = {t[3]} sits on the separatrix (d = b); "
                "the rotation period diverges there",
                file=sys.stderr,
            )
            return 1
    jobs = int(opts["jobs"])
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_period_row, tasks))
        else:
            rows = [_period_row(t) for t in tasks]
    except (DomainError, SeparatrixError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    worst = max(max(r["dev_quad"], r["dev_ode"]) for r in rows)
    if opts["format"] == "json":
        _emit(_json_dump({"rows": rows, "max_deviation": worst}), opts["out"])
    else:
        header = "a,b,c,d,l,S_closed,S_quadrature,S_ode,dev_quad,dev_ode"
        lines = [header]
        for r in rows:
            lines.append(",".join(_fmt(r[k]) for k in header.split(",")))
        _emit("\n".join(lines) + "\n", opts["out"])
    if worst > tol:
        print(f"error: max deviation {worst:.3e} exceeds tol {tol:.3e}", file=sys.stderr)
        return 1
    print(f"max deviation across {len(rows)} rows: {worst:.3e}", file=sys.stderr)
    return 0


# ----------------------------------------------------------------------
# verify

def cmd_verify(args: argparse.Namespace) -> int:
    opts = _effective_options(args, "verify")
    tol = float(opts["tol"])
    report: dict = {}
    failures: list[str] = []

    # Three-term identity on a d, l grid in the chamber.
    grid = []
    for l in (0.5, 1.0, 2.0, 4.0, 8.0):
        for d in (2.1, 2.3, 2.5, 2.7, 2.9):
            m = ModuliPoint(3.0, 2.0, 1.0, d, l=l)
            grid.append({"d": d, "l": l, "residual": verify_connection_identity(m)})
    worst_identity = max(r["residual"] for r in grid)
    report["connection_identity"] = {
        "rows": grid,
        "max_residual": worst_identity,
        "tol": tol,
        "status": "pass" if worst_identity < tol else "fail",
    }
    if worst_identity >= tol:
        failures.append("connection_identity")

    # Covariance classes at the base point.
    sym = verify_symmetries(ModuliPoint(3.0, 2.0, 1.0, 2.5))
    flagged = [
        {"order": list(r.order), "value": _fmt_complex(r.value), "class": r.class_key}
        for r in sym.flagged_rows
    ]
    sym_ok = (
        len(sym.class_sizes) == 3
        and sym.max_unflagged_deviation < 1e-9
        and sym.flagged_count <= sym.cut_resolved_count
    )
    report["covariance"] = {
        "class_sizes": sym.class_sizes,
        "max_unflagged_deviation": sym.max_unflagged_deviation,
        "flagged_count": sym.flagged_count,
        "cut_resolved_count": sym.cut_resolved_count,
        "flagged_rows": flagged,
        "stabilizer": list(sym.stabilizer_generators),
        "status": "pass" if sym_ok else "fail",
    }
    if not sym_ok:
        failures.append("covariance")
    for row in flagged:
        print(
            f"warning: branch-flagged ordering {''.join(row['order'])} "
            f"in class {row['class']}",
            file=sys.stderr,
        )

    # Modular identity of K across the lambda -> lambda/(lambda-1) map.
    from .special import elliptic_K

    lams = np.linspace(-5.0, 0.5, 101)
    worst_modular = 0.0
    for lam in lams:
        lhs = elliptic_K(lam / (lam - 1.0))
        rhs = math.sqrt(1.0 - lam) * elliptic_K(lam)
        worst_modular = max(worst_modular, abs(lhs - rhs))
    report["modular_identity"] = {
        "points": 101,
        "max_abs_error": worst_modular,
        "status": "pass" if worst_modular < 1e-10 else "fail",
    }
    if worst_modular >= 1e-10:
        failures.append("modular_identity")

    # Palindromic structure of the exact series.
    series = birkhoff_series(order=12)
    palins = {n: series.is_palindromic(n) for n in range(13)}
    pal_ok = all(palins.values())
    report["series_palindromes"] = {
        "orders": palins,
        "status": "pass" if pal_ok else "fail",
    }
    if not pal_ok:
        failures.append("series_palindromes")

    # Confluence product of the stated local matrices.
    conf = verify_confluence_product()
    conf_ok = any(v["is_minus_identity"] for v in conf.values())
    report["confluence"] = {
        "orderings": conf,
        "status": "pass" if conf_ok else "fail",
    }
    if not conf_ok:
        failures.append("confluence")

    report["status"] = "fail" if failures else "pass"
    report["failures"] = failures

    if opts["format"] == "csv":
        lines = ["check,value,status"]
        lines.append(f"connection_identity,{_fmt(worst_identity)},{report['connection_identity']['status']}")
        lines.append(f"covariance,{_fmt(sym.max_unflagged_deviation)},{report['covariance']['status']}")
        lines.append(f"modular_identity,{_fmt(worst_modular)},{report['modular_identity']['status']}")
        lines.append(f"series_palindromes,{int(pal_ok)},{report['series_palindromes']['status']}")
        lines.append(f"confluence,{int(conf_ok)},{report['confluence']['status']}")
        _emit("\n".join(lines) + "\n", opts["out"])
    else:
        _emit(_json_dump(report), opts["out"])
    return 1 if failures else 0


# ----------------------------------------------------------------------
# monodromy

def cmd_monodromy(args: argparse.Namespace) -> int:
    opts = _effective_options(args, "monodromy")
    preset = opts.get("preset")
    loop_file = opts.get("loop")
    if bool(preset) == bool(loop_file):
        print("error: give exactly one of --preset or --loop", file=sys.stderr)
        return 2
    try:
        if loop_file:
            with open(loop_file, "r", encoding="utf-8") as fh:
                loop = ModuliLoop.from_json_dict(json.load(fh))
            matrix, raw, resid = loop_monodromy(loop, return_float=True)
            out = {
                "loop": loop.to_json_dict(),
                "matrix": matrix.as_array().tolist(),
                "residual": resid,
            }
        elif preset in ALPHA_PRESETS:
            matrix, raw, resid = preset_monodromy(preset, return_float=True)
            out = {
                "preset": preset,
                "frame": "engine (S3, S1)",
                "matrix": matrix.as_array().tolist(),
                "residual": resid,
            }
        elif preset == "all-generators":
            entries = []
            for label in GENERATOR_LABELS:
                cmp = numeric_vs_stated(label)
                entries.append({
                    "generator": label,
                    "stated": cmp.stated.as_array().tolist(),
                    "computed": cmp.computed.as_array().tolist(),
                    "orientation": cmp.orientation,
                    "mismatch_count": cmp.mismatch_count,
                    "residual": cmp.float_residual,
                })
            out = {
                "frame": "stated (S1, S3)",
                "generators": entries,
                "all_match": all(e["mismatch_count"] == 0 for e in entries),
            }
        elif preset == "confluence":
            out = {"orderings": verify_confluence_product()}
        elif preset == "braid":
            out = verify_braid_relations()
        else:
            print(f"error: unknown preset {preset!r}", file=sys.stderr)
            return 2
    except (MonodromyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(_json_dump(out), opts["out"])
    return 0


# ----------------------------------------------------------------------
# series

def cmd_series(args: argparse.Namespace) -> int:
    opts = _effective_options(args, "series")
    from fractions import Fraction

    s_opt = opts.get("s")
    s_val = None
    if s_opt is not None:
        text = str(s_opt)
        s_val = Fraction(text) if "/" in text else float(text)
    try:
        series = birkhoff_series(s=s_val, order=int(opts["n"]))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = series.to_json_dict()
    if s_val is not None:
        out["s"] = str(s_val)
        out["pn_at_s"] = [str(series.pn_value(n)) for n in range(series.order + 1)]
    if s_val is not None and opts.get("z") is not None:
        out["value_at_z"] = complex(series.evaluate(float(opts["z"]))).real
    _emit(_json_dump(out), opts["out"])
    return 0


# ----------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="output format")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")
    common.add_argument("--jobs", type=int, default=None, help="worker processes for grid commands")
    common.add_argument("--config", default=None, help="JSON config file mirroring the flags")

    parser = argparse.ArgumentParser(
        prog="eulertop",
        description="Rigid body periods, normal form series, and period monodromy.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", parents=[common], help="integrate an orbit, emit CSV")
    p_sim.add_argument("--inertia", required=True, help="I1,I2,I3")
    p_sim.add_argument("--p0", required=True, help="initial momentum p1,p2,p3")
    p_sim.add_argument("--t", required=True, type=float, help="integration time")
    p_sim.add_argument("--samples", type=int, default=None, help="output sample count")
    p_sim.set_defaults(func=cmd_simulate)

    p_per = sub.add_parser("period", parents=[common], help="compare period routes on a grid")
    p_per.add_argument("--abc", default=None, help="reciprocal moments a,b,c (default 3,2,1)")
    p_per.add_argument("--grid-d", dest="grid_d", default=None, help="comma list of d values")
    p_per.add_argument("--grid-l", dest="grid_l", default=None, help="comma list of l values")
    p_per.add_argument("--axis", choices=("p1", "p3"), default=None, help="orbit family")
    p_per.set_defaults(func=cmd_period)

    p_ver = sub.add_parser("verify", parents=[common], help="run the check battery")
    p_ver.set_defaults(func=cmd_verify)

    p_mon = sub.add_parser("monodromy", parents=[common], help="loop monodromy")
    p_mon.add_argument(
        "--preset",
        default=None,
        help="alpha1|alpha2|alpha3|all-generators|confluence|braid",
    )
    p_mon.add_argument("--loop", default=None, help="JSON file describing a ModuliLoop")
    p_mon.set_defaults(func=cmd_monodromy)

    p_ser = sub.add_parser("series", parents=[common], help="exact normal form series")
    p_ser.add_argument("--n", type=int, default=None, help="series order (max 32)")
    p_ser.add_argument("--s", default=None, help="shape ratio r^2, float or p/q")
    p_ser.add_argument("--z", type=float, default=None, help="evaluate the series at this Z")
    p_ser.set_defaults(func=cmd_series)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
        return 2
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())
