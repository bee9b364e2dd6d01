"""Command-line front end.

Every subcommand writes a table (CSV with a header row, or JSON with the same
columns) to ``--out`` or stdout.  Summary lines go to stderr for CSV output
and into a ``summary`` object for JSON.  Values come from built-in defaults,
then ``--config FILE``, then flags.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import __version__
from .config import SCHEMA, ConfigError, merge, read_config
from .config import _vec as parse_vec

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


# per-command defaults layered over the schema defaults
COMMAND_DEFAULTS = {
    "spectrum": {"nmax": 10},
    "trace": {"nmax": 60, "lambda_min": 1.5, "lambda_max": 5.0, "lambda_points": 36},
    "weyl": {"lambda_min": 0.1, "lambda_max": 2.0, "lambda_points": 20},
    "mc-average": {"lambda_min": 0.5, "lambda_max": 2.0, "lambda_points": 4},
    "wong": {"group": 3},
}

COMMON = ("seed", "out", "format", "strict")
TORUS = ("l1", "l2", "amp", "coupling", "hbar", "mode", "a1", "a2", "nmax")
GRID = ("lambda_min", "lambda_max", "lambda_points")
WEYL = ("dim", "volume", "colour_dim", "spin", "group", "hbar", "coupling", "sigma", "v",
        "c2_mode", "c2_spin", "c2_colour")

FLAGS = {
    "algebra-check": COMMON,
    "spectrum": COMMON + TORUS,
    "trace": COMMON + TORUS + ("kmax", "width") + GRID,
    "weyl": COMMON + WEYL + GRID + ("samples", "workers", "field_scale"),
    "chiral": COMMON + ("zeta_min", "zeta_max", "points"),
    "wong": COMMON + ("group", "coupling", "hbar", "field_scale", "flow", "branch", "p0", "x0",
                      "s0", "t_final", "dt", "store_every", "transport"),
    "mc-average": COMMON + WEYL + GRID + ("samples", "sites", "workers"),
}

HELP = {
    "algebra-check": "run the algebraic invariant suite (gamma, su(N), symbols, projected transport)",
    "spectrum": "exact torus spectrum with brute-force oracle residuals",
    "trace": "smoothed exact density against Weyl term plus Bessel orbit sum",
    "weyl": "mean density scan in one of the semiclassical limits",
    "chiral": "scaled density r(zeta) = zeta exp(-1/(2 zeta^2))",
    "wong": "integrate the Wong equations in a random constant field",
    "mc-average": "Monte Carlo field averages against the closed-form triple-limit density",
}


def _add_flag(parser, key):
    spec = SCHEMA[key]
    flag = "--" + key.replace("_", "-")
    kwargs = {"dest": key, "default": None, "help": spec.help}
    if spec.type == "bool":
        kwargs["action"] = argparse.BooleanOptionalAction
    elif spec.type == "vec":
        kwargs["type"] = parse_vec
        kwargs["metavar"] = "X,Y,..."
    else:
        kwargs["type"] = {"int": int, "float": float, "str": str}[spec.type]
        if spec.choices is not None:
            kwargs["choices"] = spec.choices
    if spec.default is not None and spec.type != "bool":
        kwargs["help"] += f" (default {spec.default})"
    parser.add_argument(flag, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semidirac",
        description="Semiclassical analysis of the Euclidean Dirac operator in gauge fields.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, keys in FLAGS.items():
        sp = sub.add_parser(name, help=HELP[name], description=HELP[name])
        sp.add_argument("--config", metavar="PATH", help="flat key = value config file")
        if name == "weyl":
            sp.add_argument("kind", choices=("free", "colour", "triple", "mc"), help="which limit")
        if name == "algebra-check":
            sp.add_argument("--perturb", metavar="CHECK", help="test hook: corrupt the named check")
        for key in keys:
            _add_flag(sp, key)
    return parser


def _resolve(args) -> dict:
    file_vals = read_config(args.config) if args.config else {}
    flags = {k: getattr(args, k) for k in FLAGS[args.command]}
    return merge(file_vals, flags, COMMAND_DEFAULTS.get(args.command))


def _grid(cfg, positive=False):
    lo, hi, n = cfg["lambda_min"], cfg["lambda_max"], cfg["lambda_points"]
    if n is None or n < 1:
        raise UsageError("lambda_points must be >= 1")
    if lo is None or hi is None or hi < lo:
        raise UsageError("need lambda_min <= lambda_max")
    if lo < 0 or (positive and lo <= 0):
        raise UsageError("lambda grid must be positive" if positive else "lambda grid must be >= 0")
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def emit(command, columns, rows, summary, cfg, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    rows = [tuple(r) for r in rows]
    if cfg["format"] == "json":
        doc = {
            "command": command,
            "columns": list(columns),
            "rows": [{c: _jsonable(v) for c, v in zip(columns, r)} for r in rows],
            "summary": _jsonable(summary),
        }
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = [",".join(columns)] + [",".join(_fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
        for k, v in summary.items():
            print(f"# {k}: {_jsonable(v)}", file=stderr)
    if cfg["out"]:
        with open(cfg["out"], "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


COMPARE_HEADER = ("lambda", "exact_smoothed", "weyl", "weyl_plus_orbits")


def _torus_config(cfg):
    from .torus import TorusConfig

    return TorusConfig(
        L1=cfg["l1"], L2=cfg["l2"], hbar=cfg["hbar"], g=cfg["coupling"], A=cfg["amp"],
        A1=cfg["a1"], A2=cfg["a2"], mode=cfg["mode"],
    )


def _weyl_config(cfg):
    from .weyl import WeylConfig

    return WeylConfig(
        d=cfg["dim"], V=cfg["volume"], J=cfg["colour_dim"], s=cfg["spin"], hbar=cfg["hbar"],
        g=cfg["coupling"], N=cfg["group"], c2_spin=cfg["c2_spin"], c2_colour=cfg["c2_colour"],
        c2_mode=cfg["c2_mode"],
    )


def _field_scale(cfg, wcfg):
    """Return ``(v, sigma)`` from whichever of the two was given (default v = 1)."""
    from .weyl import field_strength_scale

    if cfg["v"] is not None and cfg["sigma"] is not None:
        raise UsageError("give either --v or --sigma, not both")
    if cfg["sigma"] is not None:
        if cfg["sigma"] < 0:
            raise UsageError("sigma must be >= 0")
        return field_strength_scale(cfg["sigma"], wcfg), cfg["sigma"]
    v = 1.0 if cfg["v"] is None else cfg["v"]
    if v < 0:
        raise UsageError("v must be >= 0")
    unit = field_strength_scale(1.0, wcfg)
    return v, (v / unit if unit > 0 else 0.0)


def cmd_algebra_check(cfg, args):
    from .checks import run_algebra_checks

    try:
        results = run_algebra_checks(seed=cfg["seed"], perturb=args.perturb)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    rows = [(r.name, r.residual, r.tolerance, "pass" if r.passed else "FAIL") for r in results]
    failed = [r.name for r in results if not r.passed]
    summary = {"checks": len(results), "failed": failed}
    return ("check", "residual", "tolerance", "status"), rows, summary, (EXIT_FAIL if failed else EXIT_OK)


def cmd_spectrum(cfg, args):
    from .torus import exact_eigenvalues

    if cfg["nmax"] < 0:
        raise UsageError("nmax must be >= 0")
    table = exact_eigenvalues(_torus_config(cfg), cfg["nmax"])
    rows = list(table.rows())
    summary = {"rows": len(rows), "max_oracle_residual": table.max_residual}
    status = EXIT_OK if table.max_residual < 1e-12 * max(1.0, float(table.lam.max())) else EXIT_FAIL
    return table.header, rows, summary, status


def cmd_trace(cfg, args):
    from .torus import TruncationError, TruncationWarning, smoothed_compare

    if not (cfg["width"] and cfg["width"] > 0):
        raise UsageError("width must be > 0 (smoothing is required)")
    if cfg["nmax"] < 0 or cfg["kmax"] < 0:
        raise UsageError("nmax and kmax must be >= 0")
    grid = _grid(cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        try:
            table = smoothed_compare(_torus_config(cfg), grid, cfg["width"], cfg["nmax"], cfg["kmax"],
                                     strict=cfg["strict"])
        except TruncationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return COMPARE_HEADER, [], {"error": str(exc)}, EXIT_FAIL
    summary = {"max_rel_dev": table.max_rel_dev}
    if caught:
        summary["warnings"] = [str(w.message) for w in caught]
    return table.header, list(table.rows()), summary, EXIT_OK


def cmd_weyl(cfg, args):
    from . import weyl
    from .algebra import GaugeField, build_su

    wcfg = _weyl_config(cfg)
    kind = args.kind
    grid = _grid(cfg, positive=(kind == "colour"))
    summary = {"kind": kind}
    if kind == "free":
        rows = [(l, weyl.mean_density_free(l, wcfg)) for l in grid]
        return ("lambda", "density"), rows, summary, EXIT_OK
    if kind == "triple":
        v, _ = _field_scale(cfg, wcfg)
        summary["v"] = v
        rows = [(l, weyl.mean_density_triple(l, v, wcfg)) for l in grid]
        return ("lambda", "density"), rows, summary, EXIT_OK
    if cfg["samples"] < 1:
        raise UsageError("samples must be >= 1")
    if kind == "colour":
        alg = build_su(wcfg.N)
        rng = np.random.default_rng(cfg["seed"])
        A = cfg["field_scale"] * rng.standard_normal((wcfg.d, alg.n_gen))
        fld = GaugeField.constant(alg, A, g=wcfg.g)
        rows = []
        for i, l in enumerate(grid):
            est = weyl.mean_density_colour_limit(l, wcfg, fld, cfg["samples"], seed=cfg["seed"] + i,
                                                 workers=cfg["workers"])
            rows.append((l, est.value, est.stderr))
        return ("lambda", "density", "stderr"), rows, summary, EXIT_OK
    v, sigma = _field_scale(cfg, wcfg)
    summary["v"] = v
    if cfg["samples"] < 100:
        raise UsageError("mc needs samples >= 100")
    rows = []
    for i, l in enumerate(grid):
        est = weyl.mc_density_triple(l, sigma, wcfg, cfg["samples"], seed=cfg["seed"] + i,
                                     workers=cfg["workers"])
        rows.append((l, est.value, est.stderr))
    return ("lambda", "density", "stderr"), rows, summary, EXIT_OK


def cmd_chiral(cfg, args):
    from .weyl import chiral_curve

    lo, hi, n = cfg["zeta_min"], cfg["zeta_max"], cfg["points"]
    if not (0 < lo < hi) or n < 2:
        raise UsageError("need 0 < zeta_min < zeta_max and points >= 2")
    pts = chiral_curve(np.linspace(lo, hi, n))
    return ("zeta", "r"), [(p.zeta, p.r) for p in pts], {"points": len(pts)}, EXIT_OK


def cmd_wong(cfg, args):
    from .algebra import GaugeField, build_su
    from .dynamics import ClassicalState, FlowDomainError, integrate_wong
    from .symbols import HamiltonianKind

    alg = build_su(cfg["group"])
    p0 = np.asarray(cfg["p0"], dtype=float)
    x0 = np.asarray(cfg["x0"], dtype=float)
    if p0.size != 4 or x0.size != 4:
        raise UsageError("p0 and x0 need four components")
    if not (cfg["dt"] > 0 and cfg["t_final"] > 0):
        raise UsageError("dt and t_final must be positive")
    rng = np.random.default_rng(cfg["seed"])
    A = cfg["field_scale"] * rng.standard_normal((4, alg.n_gen))
    fld = GaugeField.constant(alg, A, g=cfg["coupling"])
    family = {"free": "Free", "wong": "Wong", "triple": "Triple"}[cfg["flow"]]
    kind = HamiltonianKind[family + ("Plus" if cfg["branch"] > 0 else "Minus")]
    state = ClassicalState(p=p0, x=x0, C=alg.highest_weight(cfg["hbar"]), s=np.asarray(cfg["s0"]))
    n_steps = int(round(cfg["t_final"] / cfg["dt"]))
    store = cfg["store_every"]
    if store < 1 or n_steps % store:
        raise UsageError("store_every must divide t_final/dt")
    try:
        traj = integrate_wong(state, None if family == "Free" else fld, cfg["coupling"], cfg["t_final"],
                              cfg["dt"], kind=kind, transport=cfg["transport"], store_every=store)
    except FlowDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ("t",), [], {"error": str(exc), "failed_at": exc.t}, EXIT_FAIL
    names, data = traj.columns()
    summary = {"kind": kind.name, "drift": traj.drifts()}
    return tuple(names), [tuple(r) for r in data], summary, EXIT_OK


def cmd_mc_average(cfg, args):
    from .weyl import mc_density_triple, mc_density_triple_lattice, mean_density_triple

    wcfg = _weyl_config(cfg)
    v, sigma = _field_scale(cfg, wcfg)
    if cfg["samples"] < 100:
        raise UsageError("samples must be >= 100")
    if cfg["sites"] < 1:
        raise UsageError("sites must be >= 1")
    grid = _grid(cfg)
    rows = []
    worst = 0.0
    for i, l in enumerate(grid):
        exact = mean_density_triple(l, v, wcfg)
        c = mc_density_triple(l, sigma, wcfg, cfg["samples"], seed=cfg["seed"] + 2 * i, workers=cfg["workers"])
        lat = mc_density_triple_lattice(l, sigma, wcfg, cfg["sites"], cfg["samples"],
                                        seed=cfg["seed"] + 2 * i + 1, workers=cfg["workers"])
        for est in (c, lat):
            if est.stderr > 0:
                worst = max(worst, abs(est.value - exact) / est.stderr)
        rows.append((l, exact, c.value, c.stderr, lat.value, lat.stderr))
    cols = ("lambda", "closed_form", "mc_constant", "stderr_constant", "mc_lattice", "stderr_lattice")
    return cols, rows, {"v": v, "sigma": sigma, "max_z": worst}, EXIT_OK


COMMANDS = {
    "algebra-check": cmd_algebra_check,
    "spectrum": cmd_spectrum,
    "trace": cmd_trace,
    "weyl": cmd_weyl,
    "chiral": cmd_chiral,
    "wong": cmd_wong,
    "mc-average": cmd_mc_average,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        columns, rows, summary, status = COMMANDS[args.command](cfg, args)
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"semidirac {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit(args.command, columns, rows, summary, cfg)
    return status


__all__ = ["main", "build_parser"]
