"""Command-line interface.

Every subcommand prints either an aligned table (default) or a single JSON
document (``--format json``) holding the echoed inputs, results, tolerances
and versions. Exit codes: 0 success, 2 usage error, 1 numerical failure.
The default format may be overridden with the SIMULBELL_FORMAT variable.
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys
from fractions import Fraction

import numpy as np

from . import __version__, kernels
from .bell_correlations import (
    CLASSICAL_BOUND,
    TSIRELSON_BOUND,
    ChshSetting,
    chsh_value,
    classical_chsh_max,
    simultaneous_scheme_report,
)
from .search_opt import SearchConfig, minimize_score
from .singlet_space import (
    NULLSPACE_RTOL,
    named_state_with_norm,
    singlet_basis,
    singlet_multiplicity,
    singlet_residual,
    term_count,
)
from .spin_ops import Direction, Spin, generic_direction
from .tensor_core import StateVector, label_string, load_state, save_state, state_to_dict
from .uniqueness import PROB_FLOOR, is_unique, nonuniqueness_score

SCHEMA = "1"
DIRECTION_TOL = 1e-6
_AXES = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}


class UsageError(Exception):
    pass


def parse_direction(text: str) -> Direction:
    """"0,0,1" or an axis name ("x", "-z"); normalized only if within 1e-6 of unit length."""
    t = text.strip().lower()
    axis = t[1:] if t[:1] in "+-" else t
    if axis in _AXES:
        sign = -1.0 if t.startswith("-") else 1.0
        return Direction.from_vector(sign * np.array(_AXES[axis], dtype=float))
    try:
        v = np.array([float(p) for p in t.split(",")])
    except ValueError:
        raise UsageError(f"malformed direction {text!r}; expected x,y,z") from None
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise UsageError(f"malformed direction {text!r}; expected three numbers")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > DIRECTION_TOL:
        raise UsageError(f"direction {text!r} has length {norm:.6g}; give a unit vector")
    return Direction.from_vector(v, normalize=True)


def parse_spin(text: str) -> Spin:
    try:
        s = Spin.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if s.two_j < 1:
        raise UsageError("spin must be at least 1/2")
    return s


def _dir_doc(d: Direction) -> list[float]:
    return [d.x, d.y, d.z]


def _load(args) -> tuple[str, StateVector, float]:
    if getattr(args, "state_file", None):
        psi = load_state(args.state_file)
        return f"file:{args.state_file}", psi, 1.0
    try:
        psi, norm = named_state_with_norm(args.state)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    return args.state, psi, norm


# -- subcommands: each returns (inputs, results, tolerances) ---------------

def cmd_singlet_dim(args):
    s = parse_spin(args.spin)
    if args.n < 1:
        raise UsageError("--n must be positive")
    basis = singlet_basis(args.n, s, args.tol)
    mult = singlet_multiplicity(args.n, s)
    return (
        {"n": args.n, "spin": str(s)},
        {"dimension": basis.dim, "multiplicity": mult, "agree": basis.dim == mult},
        {"nullspace_rtol": args.tol},
    )


def cmd_state(args):
    name, psi, norm = _load(args)
    if args.save:
        save_state(psi, args.save)
    terms = [
        {"label": label_string(i, psi.num_particles, psi.local_dim), "re": float(a.real), "im": float(a.imag)}
        for i, a in enumerate(psi.amplitudes)
        if abs(a) > args.tol
    ]
    results = {
        "n": psi.num_particles,
        "d": psi.local_dim,
        "prenormalization_norm": norm,
        "singlet_residual": singlet_residual(psi),
        "terms": terms,
    }
    if args.save:
        results["saved_to"] = args.save
    return {"state": name}, results, {"amplitude_tol": args.tol}


def cmd_uniqueness(args):
    name, psi, _ = _load(args)
    dirs = [parse_direction(x) for x in args.dir]
    rows = []
    for d in dirs:
        ok, score, w = is_unique(psi, d, args.tol)
        rows.append({
            "direction": _dir_doc(d),
            "unique": ok,
            "score": score,
            "witness": {"particle": w.particle, "outcome": str(w.outcome), "best_conditional": w.best_conditional},
        })
    results = {"directions": rows, "total_score": nonuniqueness_score(psi, dirs, args.tol), "all_unique": all(r["unique"] for r in rows)}
    return {"state": name, "directions": [_dir_doc(d) for d in dirs]}, results, {"probability_floor": args.tol}


def cmd_term_count(args):
    name, psi, _ = _load(args)
    dirs = [parse_direction(x) for x in args.dir]
    counts = [{"direction": _dir_doc(d), "terms": term_count(psi, d, args.tol)} for d in dirs]
    return {"state": name, "directions": [_dir_doc(d) for d in dirs]}, {"counts": counts}, {"amplitude_tol": args.tol}


def _setting(args) -> ChshSetting:
    std = ChshSetting.standard()
    pick = lambda text, default: parse_direction(text) if text else default
    return ChshSetting(pick(args.a, std.a), pick(args.a_prime, std.a_prime), pick(args.b, std.b), pick(args.b_prime, std.b_prime))


def _setting_doc(st: ChshSetting) -> dict:
    return {k: _dir_doc(getattr(st, k)) for k in ("a", "a_prime", "b", "b_prime")}


def cmd_chsh(args):
    name, psi, _ = _load(args)
    st = _setting(args)
    res = chsh_value(psi, st)
    results = {
        "E": dict(zip(("ab", "ab_prime", "a_prime_b", "a_prime_b_prime"), res.terms)),
        "S": res.s,
        "abs_S": res.abs_s,
        "classical_bound": CLASSICAL_BOUND,
        "classical_max_bruteforce": classical_chsh_max(),
        "tsirelson_bound": TSIRELSON_BOUND,
    }
    return {"state": name, "setting": _setting_doc(st)}, results, {}


def cmd_scheme(args):
    name, psi, _ = _load(args)
    st = _setting(args)
    rep = simultaneous_scheme_report(psi, st, args.tol)
    terms = [
        {
            "particles": [i + 1 for i in t.particles],
            "correlation": t.correlation,
            "singlet_reference": t.singlet_reference,
            "deviation": t.deviation,
        }
        for t in rep.terms
    ]
    results = {
        "terms": terms,
        "S": rep.s,
        "unique": rep.unique,
        "counterfactual_valid": rep.counterfactual_valid,
        "classical_bound": CLASSICAL_BOUND,
        "tsirelson_bound": TSIRELSON_BOUND,
    }
    return {"state": name, "setting": _setting_doc(st)}, results, {"probability_floor": args.tol}


def cmd_search(args):
    s = parse_spin(args.spin)
    dirs = [parse_direction(x) for x in args.dir]
    if args.generic:
        rng = np.random.default_rng(np.uint64(args.seed))
        dirs += [generic_direction(rng) for _ in range(args.generic)]
    if not dirs:
        raise UsageError("give at least one --dir or --generic K")
    cfg = SearchConfig(
        args.n, s, tuple(dirs),
        restricted=not args.unrestricted,
        restarts=args.restarts,
        max_iter=args.max_iter,
        tol=args.tol,
        seed=args.seed,
    )
    res = minimize_score(cfg, keep_traces=args.trace)
    results = {
        "best_score": res.best_score,
        "best_restart": res.best_restart,
        "restart_scores": list(res.restart_scores),
        "iterations": list(res.iterations),
        "spread": res.spread if np.isfinite(res.spread) else None,
        "best_state": state_to_dict(res.best_state),
    }
    if args.trace:
        results["traces"] = [list(t) for t in res.traces]
    inputs = {
        "n": args.n, "spin": str(s), "directions": [_dir_doc(d) for d in dirs],
        "restricted": cfg.restricted, "restarts": cfg.restarts, "max_iter": cfg.max_iter, "seed": cfg.seed,
    }
    return inputs, results, {"convergence_tol": cfg.tol, "probability_floor": PROB_FLOOR}


# -- output ------------------------------------------------------------------

def versions() -> dict:
    return {
        "simulbell": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "kernel_backend": kernels.backend_name(),
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    return x


def render_json(doc: dict) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _flatten(prefix: str, x, rows: list):
    if isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(x, list) and x and isinstance(x[0], (dict, list)):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        if isinstance(x, float):
            x = f"{x:.12g}"
        elif isinstance(x, list):
            x = ", ".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in x)
        rows.append((prefix, str(x)))


def render_table(doc: dict) -> str:
    rows: list = []
    _flatten("", _jsonable(doc["results"]), rows)
    width = max((len(k) for k, _ in rows), default=0)
    head = f"# {doc['command']}  " + "  ".join(f"{k}={v}" for k, v in _jsonable(doc["inputs"]).items() if not isinstance(v, (list, dict)))
    return head + "\n" + "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"


# -- parser --------------------------------------------------------------------

def _add_state_args(p, default=None):
    g = p.add_mutually_exclusive_group(required=default is None)
    g.add_argument("--state", default=default, help="named state, e.g. psi_2_4_s1 or power_singlet(1,2)")
    g.add_argument("--state-file", help="state file (JSON with n, d, re[], im[])")


def _add_setting_args(p):
    for flag in ("--a", "--a-prime", "--b", "--b-prime"):
        p.add_argument(flag, help="direction x,y,z (default: standard coplanar CHSH angles)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simulbell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    default_format = os.environ.get("SIMULBELL_FORMAT", "table")
    if default_format not in ("table", "json"):
        default_format = "table"
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default=default_format)
    common.add_argument("--output", help="write the report here instead of standard output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("singlet-dim", parents=[common], help="dimension of the total-spin-zero subspace")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--spin", required=True, help='"1/2", "1", "3/2", ...')
    p.add_argument("--tol", type=float, default=NULLSPACE_RTOL)
    p.set_defaults(func=cmd_singlet_dim)

    p = sub.add_parser("state", parents=[common], help="show a named state, optionally save it")
    _add_state_args(p)
    p.add_argument("--save", help="write the state file here")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("uniqueness", parents=[common], help="uniqueness verdicts and nonuniqueness score")
    _add_state_args(p)
    p.add_argument("--dir", action="append", required=True, help="direction x,y,z (repeatable)")
    p.add_argument("--tol", type=float, default=PROB_FLOOR)
    p.set_defaults(func=cmd_uniqueness)

    p = sub.add_parser("term-count", parents=[common], help="nonzero terms in the product eigenbasis of a direction")
    _add_state_args(p)
    p.add_argument("--dir", action="append", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_term_count)

    p = sub.add_parser("chsh", parents=[common], help="CHSH value of a two-qubit state")
    _add_state_args(p, default="bell_2_2")
    _add_setting_args(p)
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("scheme", parents=[common], help="single-run four-particle CHSH scheme")
    _add_state_args(p, default="psi_2_4_s1")
    _add_setting_args(p)
    p.add_argument("--tol", type=float, default=PROB_FLOOR)
    p.set_defaults(func=cmd_scheme)

    p = sub.add_parser("search", parents=[common], help="minimize the nonuniqueness score")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--spin", default="1/2")
    p.add_argument("--dir", action="append", default=[])
    p.add_argument("--generic", type=int, default=0, help="add K seeded random off-axis directions")
    p.add_argument("--unrestricted", action="store_true", help="search all states, not only singlets")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="include per-restart score traces")
    p.set_defaults(func=cmd_search)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        inputs, results, tolerances = args.func(args)
    except np.linalg.LinAlgError as exc:
        print(f"simulbell {args.command}: internal error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"simulbell {args.command}: error: {msg}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical failure
        print(f"simulbell {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1
    doc = {
        "schema": SCHEMA,
        "command": args.command,
        "inputs": inputs,
        "results": results,
        "tolerances": tolerances,
        "versions": versions(),
    }
    text = render_json(doc) if args.format == "json" else render_table(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
