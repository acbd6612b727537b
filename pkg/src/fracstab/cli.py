"""Command-line interface.

Every command writes one artifact (CSV or JSON) to ``--output`` or stdout.
Exit status: 0 success, 2 invalid input, 3 numerical failure; ``selftest``
exits 1 when any check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import critcurve
from .charfn import CharFunction, count_rhp_roots
from .classify import LinearSystem2, classify_coeffs, classify_matrix, critical_a, order_free_verdict
from .fde_solver import solve
from .fhn import FhnParams, branch_diagram, hopf_curve, make_fhn_problem
from .selftest import format_report, run_selftest

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# name -> (type, required); a None requirement means "checked by the command"
FHN_KEYS = {"r": (float, True), "c": (float, True), "d": (float, True)}
COMMANDS = {
    "classify": {
        **{k: (float, None) for k in ("a11", "a12", "a21", "a22", "a", "b", "c")},
        "q1": (float, True),
        "q2": (float, True),
    },
    "astar": {"b": (float, True), "c": (float, True), "q1": (float, True), "q2": (float, True)},
    "curve": {
        "c": (float, True),
        "q1": (float, True),
        "q2": (float, True),
        "omega_min": (float, True),
        "omega_max": (float, True),
        "n": (int, True),
    },
    "regions": {
        "c": (float, True),
        "a_min": (float, True),
        "a_max": (float, True),
        "b_min": (float, True),
        "b_max": (float, True),
        "n": (int, True),
    },
    "hopf": {**FHN_KEYS, "I": (float, True), "grid": (int, True)},
    "branch": {**FHN_KEYS, "I_min": (float, True), "I_max": (float, True), "n": (int, True)},
    "simulate": {
        **FHN_KEYS,
        "I": (float, True),
        "q1": (float, True),
        "q2": (float, True),
        "t_end": (float, True),
        "step": (float, True),
        "v0": (float, True),
        "w0": (float, True),
        "stride": (int, False),
    },
    "rhp-count": {"a": (float, True), "b": (float, True), "c": (float, True), "q1": (float, True), "q2": (float, True)},
    "selftest": {"n": (int, False)},
}
DEFAULT_FORMAT = {"classify": "json", "astar": "json", "rhp-count": "json", "selftest": "json"}
COMMON_KEYS = {"output", "format", "precision", "seed"}


def fmt_float(x, precision):
    """Shortest round-trip text of ``x`` after rounding to ``precision`` significant digits."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return repr(float(f"{x:.{precision}g}"))


def _round(obj, precision):
    if isinstance(obj, float):
        return float(fmt_float(obj, precision)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _round(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, precision) for v in obj]
    return obj


def render_csv(header, rows, precision) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [
                ("true" if v else "false") if isinstance(v, (bool, np.bool_))
                else fmt_float(v, precision) if isinstance(v, float)
                else v
                for v in row
            ]
        )
    return buf.getvalue()


def render(result, fmt, precision) -> str:
    """``result`` is either a dict (one record) or ``(header, rows)``."""
    if isinstance(result, dict):
        if fmt == "json":
            return json.dumps(_round(result, precision)) + "\n"
        return render_csv(list(result), [[_plain(v) for v in result.values()]], precision)
    header, rows = result
    rows = [[_plain(v) for v in row] for row in rows]
    if fmt == "csv":
        return render_csv(header, rows, precision)
    return json.dumps(_round({"columns": header, "rows": rows}, precision)) + "\n"


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    return "" if v is None else v


# --- commands -------------------------------------------------------------


def _need(p, *keys):
    missing = [k for k in keys if k not in p]
    if missing:
        raise UsageError("missing required parameter(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _check_orders(q1, q2):
    if not (0.0 < q1 <= 1.0 and 0.0 < q2 <= 1.0):
        raise UsageError("orders must lie in (0, 1]")


def _fhn(p, I=0.0):
    try:
        return FhnParams(p["r"], p["c"], p["d"], I)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_classify(p):
    _check_orders(p["q1"], p["q2"])
    matrix = ("a11", "a12", "a21", "a22")
    coeffs = ("a", "b", "c")
    if any(k in p for k in matrix):
        if any(k in p for k in coeffs):
            raise UsageError("give either the matrix entries or --a/--b/--c, not both")
        _need(p, *matrix)
        sys_ = LinearSystem2(*(p[k] for k in matrix), p["q1"], p["q2"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            verdict = classify_matrix(sys_)
        a, b, c = sys_.coefficients
    else:
        _need(p, *coeffs)
        a, b, c = p["a"], p["b"], p["c"]
        verdict = classify_coeffs(a, b, c, p["q1"], p["q2"])
    return {**verdict.to_dict(), "a": a, "b": b, "c": c, "q1": p["q1"], "q2": p["q2"]}


def cmd_astar(p):
    _check_orders(p["q1"], p["q2"])
    if not p["c"] > 0:
        raise UsageError("--c must be positive")
    if p["q1"] > p["q2"]:
        raise UsageError("astar needs q1 <= q2 (swap the roles of a and b otherwise)")
    out = {"b": p["b"], "c": p["c"], "q1": p["q1"], "q2": p["q2"]}
    out["a_star"] = critical_a(p["b"], p["c"], p["q1"], p["q2"])
    if p["q2"] - p["q1"] >= critcurve.MIN_ORDER_GAP:
        out["omega"] = critcurve.crossing_frequency(critcurve.CriticalCurve(p["c"], p["q1"], p["q2"]), p["b"])
    else:
        out["omega"] = None
    return out


def _curve(p):
    try:
        return critcurve.CriticalCurve(p["c"], p["q1"], p["q2"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_curve(p):
    curve = _curve(p)
    if not 0.0 < p["omega_min"] < p["omega_max"]:
        raise UsageError("need 0 < omega-min < omega-max")
    if p["n"] < 2:
        raise UsageError("--n must be at least 2")
    rows = []
    for w in np.geomspace(p["omega_min"], p["omega_max"], p["n"]):
        pt = critcurve.gamma_point(curve, float(w))
        rows.append([pt.omega, pt.b, pt.a])
    return ["omega", "b", "a"], rows


REGION_LABELS = {"StableAllOrders": "stable-all", "UnstableAllOrders": "unstable-all"}


def region_label(a, b, c) -> str:
    verdict = order_free_verdict(a, b, c)
    if verdict is None:
        return "order-dependent"
    return REGION_LABELS.get(verdict.kind.value, "order-dependent")


def cmd_regions(p):
    if p["n"] < 2 or not (p["a_min"] < p["a_max"] and p["b_min"] < p["b_max"]):
        raise UsageError("need a-min < a-max, b-min < b-max and n >= 2")
    c = p["c"]
    rows = []
    for a in np.linspace(p["a_min"], p["a_max"], p["n"]):
        for b in np.linspace(p["b_min"], p["b_max"], p["n"]):
            rows.append([float(a), float(b), region_label(float(a), float(b), c)])
    return ["a", "b", "label"], rows


def cmd_hopf(p):
    params = _fhn(p, p["I"])
    if p["grid"] < 1:
        raise UsageError("--grid must be positive")
    return ["q1", "q2"], [list(pt) for pt in hopf_curve(params, p["grid"])]


def cmd_branch(p):
    params = _fhn(p)
    if p["n"] < 2 or not p["I_min"] < p["I_max"]:
        raise UsageError("need I-min < I-max and n >= 2")
    return ["I", "v_star", "order_robust"], [list(r) for r in branch_diagram(params, p["I_min"], p["I_max"], p["n"])]


def cmd_simulate(p):
    params = _fhn(p, p["I"])
    _check_orders(p["q1"], p["q2"])
    stride = p.get("stride", 1)
    if stride < 1:
        raise UsageError("--stride must be positive")
    try:
        problem = make_fhn_problem(params, p["q1"], p["q2"], p["v0"], p["w0"], p["t_end"], p["step"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    traj = solve(problem)
    if traj.overflowed:
        print(f"warning: solution overflowed; output stops at t={traj.times[-1]:g}", file=sys.stderr)
    idx = np.arange(0, len(traj), stride)
    return ["t", "v", "w"], [[traj.times[i], traj.states[i, 0], traj.states[i, 1]] for i in idx]


def cmd_rhp_count(p):
    _check_orders(p["q1"], p["q2"])
    if p["c"] == 0.0:
        raise UsageError("--c must be nonzero (Delta(0) = 0 otherwise)")
    res = count_rhp_roots(CharFunction.normalized(p["a"], p["b"], p["c"], p["q1"], p["q2"]))
    return {"count": res.count, "contour_radius": res.contour_radius, "winding_residual": res.winding_residual}


HANDLERS = {
    "classify": cmd_classify,
    "astar": cmd_astar,
    "curve": cmd_curve,
    "regions": cmd_regions,
    "hopf": cmd_hopf,
    "branch": cmd_branch,
    "simulate": cmd_simulate,
    "rhp-count": cmd_rhp_count,
}


# --- argument handling ----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, keys in COMMANDS.items():
        sp = sub.add_parser(name)
        for key, (typ, _) in keys.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=argparse.SUPPRESS)
        sp.add_argument("--config", default=None, help="JSON file with parameters; flags override it")
        sp.add_argument("--output", "-o", default=argparse.SUPPRESS)
        sp.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
        sp.add_argument("--precision", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    return parser


def load_config(path, command):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    allowed = COMMANDS[command]
    out = {}
    for raw_key, value in data.items():
        key = raw_key.replace("-", "_")
        if key in COMMON_KEYS:
            out[key] = value
        elif key in allowed:
            typ = allowed[key][0]
            if typ is int and not (isinstance(value, int) and not isinstance(value, bool)):
                raise UsageError(f"config key {raw_key!r} must be an integer")
            if typ is float and not (isinstance(value, (int, float)) and not isinstance(value, bool)):
                raise UsageError(f"config key {raw_key!r} must be a number")
            out[key] = typ(value)
        else:
            raise UsageError(f"unknown config key {raw_key!r} for command {command!r}")
    return out


def resolve(args) -> dict:
    """Merge config file and flags, then check required keys."""
    command = args.command
    merged = {}
    if args.config:
        try:
            merged.update(load_config(args.config, command))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    merged.update(flags)
    _need(merged, *(k for k, (_, required) in COMMANDS[command].items() if required))
    for key, value in merged.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise UsageError(f"--{key.replace('_', '-')} must be finite")
    if "seed" in merged and not (isinstance(merged["seed"], int) and 0 <= merged["seed"] < 2**64):
        raise UsageError("seed must be an integer in [0, 2^64)")
    merged.setdefault("format", DEFAULT_FORMAT.get(command, "csv"))
    merged.setdefault("precision", 12)
    if merged["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if not 1 <= int(merged["precision"]) <= 17:
        raise UsageError("precision must be between 1 and 17")
    return merged


def _emit(text, output):
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = resolve(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "selftest":
        checks = run_selftest(seed=int(params.get("seed", 0)), n_systems=int(params.get("n", 1000)))
        print(format_report(checks), file=sys.stderr)
        summary = {
            "checks": [
                {"name": c.name, "passed": c.passed, "failed": c.failed, "ok": c.ok} for c in checks
            ],
            "ok": all(c.ok for c in checks),
        }
        _emit(render(summary, "json", params["precision"]), params.get("output"))
        return EXIT_OK if summary["ok"] else EXIT_FAIL

    try:
        result = HANDLERS[args.command](params)
    except ValueError as exc:  # UsageError and library input checks
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(render(result, params["format"], int(params["precision"])), params.get("output"))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
