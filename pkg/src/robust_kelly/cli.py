"""Command-line front end.

Exit codes: 0 success, 1 failed check or internal invariant, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .controller import (
    as_explicit_tree,
    format_number,
    kelly_perfect,
    parse_history,
    robust_optimal,
    static_linear_optimal,
)
from .elg import comparison_csv
from .simulate import SimConfig, run_simulation
from .uncertainty import parse_uncertainty_set
from .verify import coordinate_ascent, oracle_optimize, perturbation_decreases, structural_audit

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _pset(text):
    try:
        return parse_uncertainty_set(text)
    except ValueError as exc:
        raise UsageError(f"--pset: {exc}") from exc


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gains(args) -> int:
    pset = _pset(args.pset)
    table = robust_optimal(pset, args.n).table
    if args.format == "json":
        text = table.to_json()
    else:
        text = f"# pset={pset}\n" + table.to_csv()
    _emit(text, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    _emit(comparison_csv(_pset(args.pset), args.n, args.grid), args.out)
    return EXIT_OK


def _build_controller(spec: str, pset_text: Optional[str]):
    if spec.startswith("kelly:"):
        try:
            p = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad --controller {spec!r}") from exc
        if not 0.0 <= p <= 1.0:
            raise UsageError("kelly probability must lie in [0, 1]")
        return kelly_perfect(p), None
    if spec not in ("robust", "static"):
        raise UsageError(f"--controller must be robust, static or kelly:<p>, got {spec!r}")
    if pset_text is None:
        raise UsageError(f"--pset is required for --controller {spec}")
    return spec, _pset(pset_text)


def cmd_simulate(args) -> int:
    controller, pset = _build_controller(args.controller, args.pset)
    if controller == "robust":
        controller = robust_optimal(pset, args.n)
    elif controller == "static":
        controller = static_linear_optimal(pset)
    try:
        cfg = SimConfig(
            controller=controller,
            n=args.n,
            p_true=args.p_true,
            trials=args.trials,
            v0=args.v0,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = run_simulation(cfg, keep_trials=bool(args.trials_csv))
    meta = {"controller": args.controller}
    if pset is not None:
        meta = {"pset": str(pset), **meta}
    text = report.to_json(**meta) if args.format == "json" else report.to_text(**meta)
    _emit(text, args.out)
    if args.trials_csv:
        _emit(report.trials_csv(), args.trials_csv)
    return EXIT_OK


def _parse_expected(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--expect: {exc}") from exc


def cmd_verify(args) -> int:
    pset = _pset(args.pset)
    n = args.n
    if n > 12:
        raise UsageError("verify supports n <= 12")
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    lines = [f"pset={pset} n={n}"]
    ok = True

    def record(passed: bool, name: str, detail: str):
        nonlocal ok
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")

    if n <= 4:
        res = oracle_optimize(pset, n, tol=args.tol)
        gap_ok = res.max_gain_gap < max(args.tol, 1e-7)
        record(
            gap_ok and res.objective_gap < 1e-10 and res.unimodal,
            "oracle",
            f"max gain gap {res.max_gain_gap:.3e}, relative objective gap "
            f"{res.objective_gap:.3e}, unimodal={res.unimodal}",
        )
        changes = perturbation_decreases(pset, n)
        worst = max(changes.values())
        record(worst < 0, "perturbation", f"{len(changes)} moves of +-1e-3, largest change {worst:.3e}")
    else:
        lines.append("SKIP oracle: full tree oracle needs n <= 4")
    if n <= 3:
        gap = coordinate_ascent(pset, n, seed=args.seed)
        record(gap < 1e-7, "coordinate-ascent", f"max gain gap {gap:.3e} (seed {args.seed})")

    audit = structural_audit(pset, n)
    record(
        audit.passed,
        "structure",
        f"{audit.table_size} table entries for {audit.tree_nodes} tree nodes, distinct per stage "
        + ",".join(str(d) for d in audit.distinct_per_stage)
        + ("" if audit.passed else "; " + "; ".join(audit.violations)),
    )

    if args.expect:
        expected = _parse_expected(args.expect)
        tree = as_explicit_tree(robust_optimal(pset, n), n)
        if len(expected) != len(tree.gains):
            raise UsageError(f"--expect needs {len(tree.gains)} values in tree node order")
        gaps = [abs(a - b) for a, b in zip(tree.gains, expected)]
        worst = max(range(len(gaps)), key=gaps.__getitem__)
        record(
            gaps[worst] < args.expect_tol,
            "expect",
            f"max gap {gaps[worst]:.3e} at node {worst} (tolerance {args.expect_tol:g})",
        )

    lines.append(f"result: {'PASS' if ok else 'FAIL'}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_advise(args) -> int:
    pset = _pset(args.pset)
    try:
        history = parse_history(args.history)
    except ValueError as exc:
        raise UsageError(f"--history: {exc}") from exc
    if len(history) >= args.n:
        raise UsageError(f"history length {len(history)} must be < n={args.n}")
    controller = robust_optimal(pset, args.n)
    gain = controller.gain_at(history)
    q = sum(1 for x in history if x == 1)
    if gain > 0:
        action = f"bet {format_number(gain)} of wealth on heads"
    elif gain < 0:
        action = f"bet {format_number(-gain)} of wealth on tails"
    else:
        action = "no bet"
    text = (
        f"pset={pset} n={args.n} stage={len(history)} heads={q}\n"
        f"gain: {format_number(gain)}\n"
        f"advice: {action}\n"
    )
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robust-kelly",
        description="Robust nonlinear Kelly betting for a coin with uncertain bias.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=None, pset_required=True):
        p.add_argument("--pset", required=pset_required, help='uncertainty set, e.g. "0.25:0.95" or "0:0.2,0.8:1"')
        if n_default is None:
            p.add_argument("--n", type=_positive_int, required=True, help="number of flips")
        else:
            p.add_argument("--n", type=_positive_int, default=n_default, help="number of flips")
        p.add_argument("--out", help="write to this path instead of stdout")

    p = sub.add_parser("gains", help="optimal robust gain table")
    common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_gains)

    p = sub.add_parser("compare", help="ELG curves: perfect information, robust, static")
    common(p)
    p.add_argument("--grid", type=int, default=101, help="grid points on [0, 1]")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="Monte Carlo simulation of a controller")
    common(p, pset_required=False)
    p.add_argument("--p-true", type=float, required=True)
    p.add_argument("--trials", type=_positive_int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--v0", type=float, default=1.0)
    p.add_argument("--controller", default="robust", help="robust, static or kelly:<p>")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--trials-csv", help="also dump per-trial results to this CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check closed-form gains against brute-force oracles")
    common(p, n_default=3)
    p.add_argument("--tol", type=float, default=1e-9, help="golden-section bracket width")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--expect", help="comma-separated expected gains in tree node order")
    p.add_argument("--expect-tol", type=float, default=5e-4)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("advise", help="gain to play after an observed history")
    common(p)
    p.add_argument("--history", default="", help="observed flips, e.g. HTH")
    p.set_defaults(func=cmd_advise)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"{parser.prog} {args.command}: invariant failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
