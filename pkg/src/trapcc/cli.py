"""Command-line front end: ``trapcc <command> [options]``.

Exit status is 0 on success, 1 when a check fails and 2 for usage or
parse errors. Parse errors print a one-line JSON diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from collections import Counter
from dataclasses import fields, replace
from pathlib import Path

from . import __version__
from .ccsystem import evaluate, gate_failures, grad_parallel_check, relation_residual
from .config import (FORMATS, RunConfig, Tolerances, config_from_mapping, read_config_file,
                     with_tolerances)
from .errors import ConfigError, ConvergedOutsideOmega, InvalidDistances, TrapCCError
from .geometry import (DistanceVector, TrapezoidShape, Verdict, cayley_menger, check_omega,
                       classify_shape, embed, height, realizability, trapezoid_distances,
                       trapezoid_residual)
from .golden import NAMES, ROUNDING_NOTE, golden
from .solver import scan_family, solve_equal_mass
from .verify import WITNESS_HEIGHT, WITNESS_INIT, SUITES, run_suites, verify_mass_ordering

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
SCAN_COLUMNS = ("c", "d", "b", "e", "f", "m2", "m3", "m4", "lambda", "sigma", "shape", "in_omega")


class UsageError(Exception):
    """Bad input on the command line or in an input file (exit 2)."""

    def __init__(self, message, **where):
        super().__init__(message)
        self.where = where


# ---------------------------------------------------------------------------
# Input and configuration


def parse_distances_json(text: str, source: str = "<json>") -> DistanceVector:
    """Decode a distance object. Numbers are kept as text so decimal literals round once."""
    try:
        data = json.loads(text, parse_float=str, parse_int=str)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict):
        raise UsageError(f"{source}: expected a JSON object")
    try:
        if set(data) <= set("abcd"):
            shape = TrapezoidShape.from_mapping(data)
            return trapezoid_distances(shape.a, shape.b, shape.c, shape.d)
        return DistanceVector.from_mapping(data)
    except InvalidDistances as exc:
        raise UsageError(f"{source}: {exc}", keys=sorted(data)) from exc


def load_input(args, required=True) -> DistanceVector | None:
    given = [x for x in (args.golden, args.input, args.json) if x is not None]
    if len(given) > 1:
        raise UsageError("give only one of --golden, --input, --json")
    if args.golden is not None:
        try:
            return golden(args.golden)
        except KeyError as exc:
            raise UsageError(str(exc.args[0]), known=list(NAMES)) from exc
    if args.input is not None:
        try:
            text = Path(args.input).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from exc
        return parse_distances_json(text, args.input)
    if args.json is not None:
        return parse_distances_json(args.json)
    if required:
        raise UsageError("no input: use --golden NAME, --input FILE or --json TEXT")
    return None


def build_config(args) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for item in getattr(args, "set", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value.strip()
    cfg = config_from_mapping(values, args.config or "--set")
    tol_over = {f.name: getattr(args, f"tol_{f.name}") for f in fields(Tolerances)}
    return with_tolerances(cfg, **tol_over)


def output_format(args, cfg: RunConfig | None = None) -> str:
    if args.format:
        return args.format
    return cfg.format if cfg is not None else "table"


# ---------------------------------------------------------------------------
# Output


def fmt_value(x):
    if isinstance(x, bool) or x is None:
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _json_default(obj):
    if hasattr(obj, "to_flat_dict"):
        return obj.to_flat_dict()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)


def dump_json(payload, stream):
    json.dump(payload, stream, indent=2, default=_json_default)
    stream.write("\n")


def emit_record(record: dict, fmt: str, stream, meta=None):
    """Write one flat record in the chosen format."""
    if fmt == "json":
        dump_json({**record, "meta": meta or _meta()}, stream)
    elif fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(record.keys())
        writer.writerow(fmt_value(v) for v in record.values())
    else:
        width = max(len(k) for k in record)
        for key, value in record.items():
            stream.write(f"{key:<{width}}  {fmt_value(value)}\n")


def _meta():
    return {"version": __version__, "rounding": ROUNDING_NOTE}


def _open_out(path):
    return open(path, "w", newline="") if path else None


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args) -> int:
    r = load_input(args)
    cfg = build_config(args)
    tol = cfg.tol
    real = realizability(r, tol.cayley_menger)
    rel = relation_residual(r)
    trap = trapezoid_residual(r)
    cm = cayley_menger(r)
    omega = check_omega(r, tol.omega)
    checks = {
        "planar": real.verdict is Verdict.PLANAR,
        "trapezoid": abs(trap.normalized) <= tol.trapezoid,
        "cayley_menger": abs(cm) / r.r13**8 <= tol.cayley_menger,
        "relation": abs(rel.normalized) <= tol.relation,
        "in_omega": omega.in_omega,
    }
    record = dict(r.to_dict())
    record.update(realizability=real.verdict.value, trapezoid_raw=trap.raw,
                  trapezoid_normalized=trap.normalized, cayley_menger=cm,
                  cayley_menger_normalized=cm / r.r13**8, relation_raw=rel.raw,
                  relation_normalized=rel.normalized, shape=classify_shape(r, tol.classify).tag.value)
    record.update({f"ok_{k}": v for k, v in checks.items()})
    if omega.violations:
        record["omega_violations"] = ";".join(name for name, _ in omega.violations)
    if omega.warnings:
        record["omega_warnings"] = ";".join(name for name, _ in omega.warnings)
    record["valid"] = all(checks.values())
    emit_record(record, output_format(args, cfg), sys.stdout)
    return EXIT_OK if record["valid"] else EXIT_CHECK


def cmd_masses(args) -> int:
    r = load_input(args)
    cfg = build_config(args)
    rel = abs(relation_residual(r).normalized)
    if rel > cfg.tol.relation and not args.force:
        _diag(f"relation residual {rel:.3e} exceeds {cfg.tol.relation:.1e}; use --force to proceed",
              kind="check")
        return EXIT_CHECK
    sol = evaluate(r, cfg.tol)
    m = sol.masses
    record = sol.to_flat_dict()
    record.update({"m1/m2": m.m1 / m.m2, "m1/m3": m.m1 / m.m3, "m1/m4": m.m1 / m.m4})
    emit_record(record, output_format(args, cfg), sys.stdout)
    if args.check:
        failed = gate_failures(sol, cfg.tol, need_omega=False)
        if failed:
            _diag("gates failed: " + ", ".join(failed), kind="check")
            return EXIT_CHECK
    return EXIT_OK


def scan_rows_csv(result, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    for row in result.rows:
        sol = row.solution
        r, m = sol.distances, sol.masses
        writer.writerow(fmt_value(v) for v in (
            row.c, row.d, row.root.b, r.e, r.f, m.m2, m.m3, m.m4,
            sol.multipliers.lam, sol.multipliers.sigma, sol.shape.tag.value, sol.in_omega))


def scan_summary(result, elapsed=None) -> dict:
    cfg = result.config
    cells = len(cfg.c_values()) * len(cfg.d_values())
    taxonomy = Counter(reason for *_, reason in result.failures)
    summary = {
        "cells": cells,
        "accepted": len(result.rows),
        "cells_with_solution": len({(row.ci, row.di) for row in result.rows}),
        "failures": dict(sorted(taxonomy.items())),
        "mass_range": {},
        "meta": _meta(),
    }
    sols = result.solutions()
    for k in ("m1", "m2", "m3", "m4"):
        vals = [getattr(s.masses, k) for s in sols]
        summary["mass_range"][k] = {"min": min(vals), "max": max(vals)} if vals else None
    if sols:
        above = sum(s.masses.m1 > s.masses.m2 for s in sols)
        summary["m1_gt_m2"] = above
        summary["m1_lt_m2"] = sum(s.masses.m1 < s.masses.m2 for s in sols)
    else:
        summary["note"] = ("no accepted solutions on this grid; see failures for why each cell "
                           "was rejected")
    if elapsed is not None:
        summary["seconds"] = elapsed
    return summary


def cmd_scan(args) -> int:
    cfg = build_config(args)
    workers = args.workers or cfg.workers
    t0 = time.perf_counter()
    result = scan_family(cfg.scan, workers)
    elapsed = time.perf_counter() - t0
    csv_path = args.csv or cfg.csv_path
    summary_path = args.summary or cfg.summary_path
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            scan_rows_csv(result, fh)
    else:
        scan_rows_csv(result, sys.stdout)
    summary = scan_summary(result, elapsed)
    status = EXIT_OK
    if args.check:
        rep = verify_mass_ordering(result.solutions(), cfg.tol.ordering)
        summary["mass_ordering"] = {"passed": rep.passed, "failures": len(rep.failures)}
        if not rep.passed:
            status = EXIT_CHECK
    if summary_path:
        with open(summary_path, "w") as fh:
            dump_json(summary, fh)
    else:
        dump_json(summary, sys.stdout if csv_path else sys.stderr)
    return status


def _parse_pair(text):
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--pair expects two indices like 1,2, got {text!r}") from exc
    if i == j or not {i, j} <= {1, 2, 3, 4}:
        raise UsageError(f"--pair needs two distinct indices in 1..4, got {text!r}")
    return i, j


def _parse_point(text, name):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{name} expects two numbers like 4.4,7.6, got {text!r}") from exc
    return x, y


def cmd_solve_equal_mass(args) -> int:
    cfg = build_config(args)
    pair = _parse_pair(args.pair)
    init = _parse_point(args.init, "--init") if args.init else WITNESS_INIT
    a = args.a if args.a is not None else cfg.scan.a_fixed
    scan = cfg.scan if a == cfg.scan.a_fixed else _rescale(cfg, a)
    fmt = output_format(args, cfg)
    try:
        sol = solve_equal_mass(pair, init, a, args.height, scan)
    except ConvergedOutsideOmega as exc:
        record = {"status": "outside_omega", "pair": f"{pair[0]},{pair[1]}", "message": str(exc)}
        record.update(exc.witness)
        if exc.solution is not None:
            record.update(exc.solution.to_flat_dict())
        emit_record(record, fmt, sys.stdout)
        return EXIT_CHECK
    record = {"status": "converged", "pair": f"{pair[0]},{pair[1]}", **sol.to_flat_dict(),
              "height": height(sol.distances)}
    emit_record(record, fmt, sys.stdout)
    return EXIT_OK


def _rescale(cfg, a):
    return replace(cfg.scan, a_fixed=a, c_max=min(cfg.scan.c_max, a * (1 - 1e-9)))


def cmd_verify(args) -> int:
    cfg = build_config(args)
    suites = tuple(args.suite or ["all"])
    reports = run_suites(cfg.scan, suites, samples=args.samples, seed=args.seed,
                         workers=args.workers or cfg.workers)
    fmt = output_format(args, cfg)
    ok = all(rep.passed for rep in reports)
    if fmt == "json":
        dump_json({"passed": ok, "reports": [rep.to_dict() for rep in reports], "meta": _meta()},
                  sys.stdout)
    elif fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(("check", "passed", "cases", "failures", "solver_failures",
                         "max_slack_violation"))
        for rep in reports:
            writer.writerow((rep.theorem, fmt_value(rep.passed), rep.cases_checked,
                             len(rep.failures), len(rep.solver_failures),
                             fmt_value(rep.max_slack_violation)))
    else:
        for rep in reports:
            mark = "PASS" if rep.passed else "FAIL"
            sys.stdout.write(f"{mark}  {rep.theorem:<34} cases={rep.cases_checked:<6} "
                             f"violations={len(rep.failures)} solver={len(rep.solver_failures)}\n")
            for note in rep.notes:
                sys.stdout.write(f"      {note}\n")
            for item in rep.failures[:5] + rep.solver_failures[:5]:
                sys.stdout.write(f"      ! {json.dumps(item, default=_json_default)}\n")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_gradcheck(args) -> int:
    r = load_input(args, required=False)
    cfg = build_config(args)
    targets = [("input", r)] if r is not None else [(n, golden(n)) for n in NAMES]
    rows = []
    for name, dv in targets:
        factor, dev = grad_parallel_check(dv)
        rows.append({"name": name, "factor_8h2": factor, "height": height(dv),
                     "max_rel_deviation": dev, "passed": dev <= args.tol})
    fmt = output_format(args, cfg)
    if fmt == "json":
        dump_json({"results": rows, "tolerance": args.tol, "meta": _meta()}, sys.stdout)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n", delimiter="," if fmt == "csv" else "\t")
        writer.writerow(rows[0].keys())
        for row in rows:
            writer.writerow(fmt_value(v) for v in row.values())
    return EXIT_OK if all(row["passed"] for row in rows) else EXIT_CHECK


def cmd_embed(args) -> int:
    r = load_input(args)
    cfg = build_config(args)
    emb = embed(r, cfg.tol.embed)
    labels = ("p1", "p2", "p3", "p4")
    fh = _open_out(args.output)
    stream = fh or sys.stdout
    try:
        if args.format == "json":
            dump_json({"points": {k: list(p) for k, p in zip(labels, emb.points())},
                       "height": emb.h, "meta": _meta()}, stream)
        else:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(("label", "x", "y"))
            for label, (x, y) in zip(labels, emb.points()):
                writer.writerow((label, fmt_value(float(x)), fmt_value(float(y))))
    finally:
        if fh:
            fh.close()
    if args.check:
        back = emb.distances()
        worst = max(abs(back.get(i, j) - r.get(i, j)) / r.get(i, j)
                    for i, j in ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)))
        if not worst <= cfg.tol.embed:
            _diag(f"round trip deviates by {worst:.3e}", kind="check")
            return EXIT_CHECK
        sys.stderr.write(f"round trip ok (max relative deviation {worst:.3e})\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _add_input(p):
    g = p.add_argument_group("input")
    g.add_argument("--golden", metavar="NAME", help=f"named configuration: {', '.join(NAMES)}")
    g.add_argument("--input", metavar="FILE", help="JSON file with r12..r34 or a, b, c, d")
    g.add_argument("--json", metavar="TEXT", help="inline JSON object, same keys as --input")


def _add_config(p):
    g = p.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", help="flat key = value config file")
    g.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    for f in fields(Tolerances):
        g.add_argument(f"--tol-{f.name.replace('_', '-')}", dest=f"tol_{f.name}", type=float,
                       metavar="X", help=f"tolerance override (default {f.default:g})")
    g.add_argument("--format", choices=FORMATS, help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trapcc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"trapcc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="residuals and verdicts for one distance vector")
    _add_input(p)
    _add_config(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("masses", help="masses, multipliers and residuals")
    _add_input(p)
    _add_config(p)
    p.add_argument("--force", action="store_true", help="compute even if the relation fails")
    p.add_argument("--check", action="store_true", help="exit 1 if any acceptance gate fails")
    p.set_defaults(func=cmd_masses)

    p = sub.add_parser("scan", help="grid scan over (c, d); CSV rows plus JSON summary")
    _add_config(p)
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--csv", metavar="PATH", help="CSV destination (default stdout)")
    p.add_argument("--summary", metavar="PATH", help="summary JSON destination")
    p.add_argument("--check", action="store_true", help="also check the mass ordering")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("solve-equal-mass", help="Newton solve for m_i = m_j at a fixed height")
    _add_config(p)
    p.add_argument("--pair", default="1,2", help="mass indices, e.g. 3,4 (default 1,2)")
    p.add_argument("--init", help="initial c,d (default %s,%s)" % WITNESS_INIT)
    p.add_argument("--a", type=float, help="longer base r12 (default from config)")
    p.add_argument("--height", type=float, default=WITNESS_HEIGHT,
                   help="trapezoid height (default %(default)s)")
    p.set_defaults(func=cmd_solve_equal_mass)

    p = sub.add_parser("verify", help="run the theorem and lemma suites")
    _add_config(p)
    p.add_argument("--suite", action="append", choices=SUITES, help="suite to run (repeatable)")
    p.add_argument("--samples", type=int, default=1000, help="random trapezoids for the lemmas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gradcheck", help="compare grad H with 8 h^2 grad F by finite differences")
    _add_input(p)
    _add_config(p)
    p.add_argument("--tol", type=float, default=1e-6, help="max relative deviation")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("embed", help="planar coordinates as label,x,y CSV")
    _add_input(p)
    _add_config(p)
    p.add_argument("--output", metavar="PATH", help="destination (default stdout)")
    p.add_argument("--check", action="store_true", help="re-validate distances from the points")
    p.set_defaults(func=cmd_embed)
    return parser


def _diag(message, kind="error", **extra):
    sys.stderr.write(json.dumps({"error": message, "kind": kind, **extra}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _diag(str(exc), kind="usage", **exc.where)
        return EXIT_USAGE
    except (ConfigError, InvalidDistances) as exc:
        _diag(str(exc), kind="parse")
        return EXIT_USAGE
    except TrapCCError as exc:
        _diag(str(exc), kind=type(exc).__name__)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
