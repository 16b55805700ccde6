"""Command-line interface: ``nonlocalbox {eval,maximize,reproduce,simulate}``.

Exit codes: 0 success, 1 operational error (I/O, parsing, infeasible target,
undefined criterion), 2 box validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .box import TSIRELSON, CorrelationBox, biasness_percent, chsh_value, marginal, quantum_tsirelson_box
from .boxfile import (
    BoxFileError,
    box_document,
    equal_bias_document,
    format_table,
    load_box,
    write_table_csv,
)
from .criteria import CriterionKind, CriterionReport, all_reports
from .errors import BoxValidationError, ConfigError, DeterministicMarginal, InfeasibleTarget, InvalidD
from .macro import MacroConfig, simulate_macroscopic, theoretical_sign_chsh
from .optimizer import OptimizerOptions, max_equal_bias
from .reference import PRINTED_TOL, TABLE_IC

log = logging.getLogger("nonlocalbox")

EXIT_OK, EXIT_ERROR, EXIT_INVALID = 0, 1, 2


def _write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def _load(path, tolerance):
    """Load a box, mapping failures onto (box, exit code)."""
    try:
        return load_box(path, tolerance), EXIT_OK
    except BoxValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return None, EXIT_INVALID
    except (OSError, BoxFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_ERROR


def _describe_report(name: str, rep: CriterionReport | str) -> str:
    if isinstance(rep, str):
        return f"  {name}: undefined ({rep})"
    lhs = ", ".join(f"{v:.9f}" for v in rep.lhs_values)
    verdict = "satisfied" if rep.satisfied else "VIOLATED"
    return f"  {name} [{rep.label}]: lhs [{lhs}] bound {rep.bound:.9f} margin {rep.margin:+.3e} -> {verdict}"


def eval_summary(box: CorrelationBox) -> dict:
    out = {"marginals": {}, "biasness_percent": {}, "chsh": chsh_value(box), "criteria": {}}
    for party in ("alice", "bob"):
        for s in (0, 1):
            key = f"{party}{s}"
            out["marginals"][key] = list(marginal(box, party, s))
            out["biasness_percent"][key] = biasness_percent(box, party, s)
    for name, rep in all_reports(box).items():
        out["criteria"][name] = rep if isinstance(rep, str) else rep.to_dict()
    out["box"] = box_document(box)
    return out


def cmd_eval(args) -> int:
    box, code = _load(args.box_file, args.tolerance)
    if box is None:
        return code
    summary = eval_summary(box)
    if args.json:
        print(json.dumps(summary, indent=2))
        return EXIT_OK
    print(format_table(box))
    print()
    for key, (p0, p1) in summary["marginals"].items():
        print(f"  {key:7s} P(0)={p0:.6f} P(1)={p1:.6f} biasness={summary['biasness_percent'][key]:.6f}%")
    print(f"  CHSH = {summary['chsh']:.6f}")
    for name, rep in all_reports(box).items():
        print(_describe_report(name, rep))
    return EXIT_OK


def _options(args) -> OptimizerOptions:
    return OptimizerOptions(chsh_target=args.chsh_target, seed=args.seed)


def cmd_maximize(args) -> int:
    try:
        res = max_equal_bias(args.criterion, _options(args))
    except (InfeasibleTarget, ConfigError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    data = res.to_dict()
    if args.out:
        try:
            _write_json(args.out, data)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    print(f"criterion {res.criterion.value} at CHSH {res.chsh_target:.6f} ({res.method})")
    print(f"  p* = {res.p_star:.6f}   equal biasness = {res.bias_percent:.4f}%")
    print(f"  distance to quantum box: max_abs {res.distance_to_quantum.max_abs:.6f}, "
          f"TV {res.distance_to_quantum.total_variation:.6f}")
    print(_describe_report(res.criterion.value, res.report))
    print(format_table(res.box))
    return EXIT_OK


def _matches(box: CorrelationBox, table, tol=PRINTED_TOL) -> bool:
    return bool(np.all(np.abs(box.rows() - np.asarray(table)) <= tol + 1e-12))


def cmd_reproduce(args) -> int:
    out = Path(args.out)
    opts = OptimizerOptions(seed=args.seed)
    results = {}
    for kind in CriterionKind:
        log.info("maximizing equal bias under %s", kind.value)
        results[kind] = max_equal_bias(kind, opts)
    ns, ic, ml = results[CriterionKind.NS], results[CriterionKind.IC], results[CriterionKind.ML]
    quantum = quantum_tsirelson_box()
    try:
        out.mkdir(parents=True, exist_ok=True)
        tables = {"table1": quantum, "table3": ic.box, "table4": ml.box}
        for name, box in tables.items():
            write_table_csv(box, out / f"{name}.csv")
            _write_json(out / f"{name}.json", box_document(box))
        for kind, res in results.items():
            _write_json(out / f"{kind.value.lower()}_result.json", res.to_dict())
        summary = {
            "chsh_target": TSIRELSON,
            "p_ns": ns.p_star,
            "p_ic": ic.p_star,
            "p_ml": ml.p_star,
            "bias_ns": ns.bias_percent,
            "bias_ic": ic.bias_percent,
            "bias_ml": ml.bias_percent,
            "ml_max_abs_distance": ml.distance_to_quantum.max_abs,
            "ic_max_abs_distance": ic.distance_to_quantum.max_abs,
            "ic_maximizer": "matches reference table" if _matches(ic.box, TABLE_IC) else "alternative maximizer",
            "ml_matches_quantum_3dp": _matches(ml.box, quantum.rows()),
            "ic_extremal_box": equal_bias_document(ic.extremal_box),
            "ml_extremal_box": equal_bias_document(ml.extremal_box),
        }
        _write_json(out / "summary.json", summary)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"p_NS = {ns.p_star:.6f} ({ns.bias_percent:.4f}%)")
    print(f"p_IC = {ic.p_star:.6f} ({ic.bias_percent:.4f}%)  {summary['ic_maximizer']}")
    print(f"p_ML = {ml.p_star:.6f} ({ml.bias_percent:.4f}%)  max |P - P_Q| = {ml.distance_to_quantum.max_abs:.2e}")
    print(f"wrote {out}/table1.csv table3.csv table4.csv summary.json")
    return EXIT_OK


def cmd_simulate(args) -> int:
    box, code = _load(args.box_file, args.tolerance)
    if box is None:
        return code
    cfg = MacroConfig(args.pairs, args.runs, args.seed)
    try:
        res = simulate_macroscopic(box, cfg, keep_samples=bool(args.emit_samples))
        limit = theoretical_sign_chsh(box)
    except (DeterministicMarginal, InvalidD, ConfigError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    data = res.to_dict()
    data["theoretical_sign_chsh"] = limit
    try:
        if args.emit_samples:
            res.write_samples_csv(args.emit_samples)
        if args.out:
            _write_json(args.out, data)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print(f"N = {cfg.pairs_per_run}, R = {cfg.runs}, seed = {cfg.seed}")
        print(f"  sign CHSH = {res.sign_chsh:.4f} +/- {res.stderr_sign_chsh:.4f}")
        print(f"  large-N limit = {limit:.4f} (local bound 2)")
        for (x, y), d in np.ndenumerate(res.d_hat):
            print(f"  xy={x}{y}: d_hat {d:+.4f}  sign corr {res.sign_corr[x, y]:+.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonlocalbox", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="validate a box and run the NS, IC and ML checks")
    p.add_argument("box_file")
    p.add_argument("--json", action="store_true", help="print machine-readable output")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("maximize", help="maximal equal biasness under one criterion")
    p.add_argument("--criterion", choices=["ns", "ic", "ml"], required=True)
    p.add_argument("--chsh-target", type=float, default=TSIRELSON)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the result as JSON")
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("reproduce", help="regenerate the reference tables and optima")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("simulate", help="Monte Carlo coarse-grained Bell experiment")
    p.add_argument("box_file")
    p.add_argument("--pairs", type=int, default=10_000, help="pairs per run (N)")
    p.add_argument("--runs", type=int, default=10_000, help="runs per setting pair (R)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit-samples", metavar="CSV", help="write per-run standardized counts")
    p.add_argument("--out", help="write the result as JSON")
    p.add_argument("--json", action="store_true")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
