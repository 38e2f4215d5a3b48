"""Command-line entry point.

Exit codes: 0 success, 1 I/O or results-schema error, 2 usage or parse
error, 3 quantum and classical entailment decisions disagree.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import harness, logic
from .grover import (
    WinnerScenario,
    amplitude_closed_form,
    optimal_iterations_argmin,
    optimal_iterations_rounded,
    run_original_grover,
    trajectory_csv,
)
from .schemes import MARKING_SCHEMES, SchemeKind

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_DISAGREE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"cannot write {out}: {e.strerror or e}") from e


def _dump(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def cmd_grover(args) -> int:
    n, winner = args.n, args.winner
    if n < 1 or len(winner) != n or set(winner) - {"0", "1"}:
        raise UsageError(f"--winner must be a {n}-bit string, got {winner!r}")
    if args.iterations is not None and args.iterations < 0:
        raise UsageError("--iterations must be non-negative")
    run = run_original_grover(WinnerScenario(n, frozenset({winner})), args.iterations)
    N = 2**n
    predicted = amplitude_closed_form(N, run.iterations).k ** 2
    out = {
        "n": n,
        "winner": winner,
        "iterations": run.iterations,
        "J_argmin": optimal_iterations_argmin(N),
        "J_rounded": optimal_iterations_rounded(N) if N >= 2 else 0,
        "winner_probability": run.reported[winner],
        "closed_form_probability": predicted,
        "reported": run.reported,
    }
    if args.json:
        sys.stdout.write(_dump(out))
        return EXIT_OK
    lines = [f"Grover search n={n} winner={winner} iterations={run.iterations}"]
    lines += [f"  {label}  {p:.12f}" for label, p in run.reported.items()]
    lines.append(f"winner probability   {run.reported[winner]:.12f}")
    lines.append(f"closed form sin^2    {predicted:.12f}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _schemes_arg(name: str) -> tuple[SchemeKind, ...]:
    if name == "all":
        return MARKING_SCHEMES
    return (SchemeKind.parse(name),)


def cmd_experiment(args) -> int:
    if args.mode == "sampled" and args.seed is None:
        raise UsageError("--seed is required in sampled mode")
    plan = harness.ExperimentPlan(
        n=args.n,
        schemes=_schemes_arg(args.scheme),
        reps=args.reps,
        shots=args.shots,
        master_seed=harness.DEFAULT_SEED if args.seed is None else args.seed,
        mode=args.mode,
        null_angle=harness.NULL_ANGLE if args.null_angle is None else args.null_angle,
        tag_rotation=args.tag_rotation,
    )
    results = harness.run_plan(plan)
    results.meta["config"] = {
        "subcommand": "experiment",
        "scheme": args.scheme,
        "n": args.n,
        "reps": args.reps,
        "shots": args.shots,
        "seed": args.seed,
        "mode": args.mode,
    }
    if args.out:
        harness.save(results, args.out)
        print(f"wrote {len(results.records)} records to {args.out}")
    else:
        sys.stdout.write(results.dumps())
    return EXIT_OK


def cmd_analyze(args) -> int:
    results = harness.load(args.results)
    tables = results.tables
    try:
        if tables is None:
            tables = harness.build_tables(results)
        name = f"table{args.table}"
        if args.format == "csv":
            text = harness.table_csv(tables, name)
        elif args.format == "json":
            text = _dump({name: tables[name], "meta": results.meta})
        else:
            text = harness.table_text(tables, name, results.plan.n)
    except (KeyError, TypeError, ValueError) as e:
        raise harness.ResultsFormatError(f"{args.results}: tables do not match the expected schema: {e!r}") from e
    _emit(text, args.out)
    return EXIT_OK


def cmd_entail(args) -> int:
    try:
        alpha = logic.parse(args.kb)
    except logic.ParseError as e:
        raise UsageError(f"--kb: {e}") from e
    try:
        beta = logic.parse(args.query)
    except logic.ParseError as e:
        raise UsageError(f"--query: {e}") from e
    if args.mode == "sampled" and args.seed is None:
        raise UsageError("--seed is required in sampled mode")
    try:
        res = logic.entails_quantum(alpha, beta, args.scheme, args.mode, args.shots, args.seed)
    except logic.SymbolBudgetError as e:
        raise UsageError(str(e)) from e
    classical = logic.entails_classical(alpha, beta)
    agree = res.decision is not None and res.decision == classical
    out = {
        "kb": logic.pretty(alpha),
        "query": logic.pretty(beta),
        "verdict": res.verdict,
        "marking_factor": res.marking_factor,
        "threshold": res.threshold,
        "scheme": res.scheme.value,
        "mode": res.mode,
        "shots": args.shots,
        "seed": args.seed,
        "classical": "ENTAILS" if classical else "DOES-NOT-ENTAIL",
        "agreement": agree,
        "decision_rule": logic.DECISION_RULE,
        "violations": res.scenario.sorted_winners(),
        "counts": res.evidence.counts,
    }
    if args.json:
        sys.stdout.write(_dump(out))
    else:
        M = "undefined" if res.marking_factor is None else f"{res.marking_factor:.6f}"
        sys.stdout.write(
            f"{res.verdict}\n"
            f"marking factor {M} (threshold {res.threshold}, scheme {res.scheme.value}, {res.mode})\n"
            f"classical check: {out['classical']} ({'agree' if agree else 'DISAGREE'})\n"
            f"decision-rule: {logic.DECISION_RULE}\n"
        )
    return EXIT_OK if agree else EXIT_DISAGREE


def cmd_trajectory(args) -> int:
    try:
        Ns = [int(x) for chunk in args.N_list for x in chunk.split(",") if x]
    except ValueError as e:
        raise UsageError(f"--N-list: {e}") from e
    if args.jmax < 0:
        raise UsageError("--jmax must be non-negative")
    bad = [N for N in Ns if N < 2 or N & (N - 1)]
    if bad or not Ns:
        raise UsageError(f"--N-list values must be powers of two >= 2, got {bad or Ns}")
    _emit(trajectory_csv(Ns, args.jmax), args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="eigenmark", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("grover", help="original Grover search for one winner")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--winner", required=True)
    g.add_argument("--iterations", type=int)
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_grover)

    e = sub.add_parser("experiment", help="run the marking-scheme protocol")
    e.add_argument("--scheme", choices=["eigen", "null", "subtle", "all"], default="all")
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--reps", type=int, default=40)
    e.add_argument("--shots", type=int, default=1024)
    e.add_argument("--seed", type=int)
    e.add_argument("--mode", choices=["sampled", "exact"], default="sampled")
    e.add_argument("--null-angle", type=float, help="override the calibrated null-marking angle (radians)")
    e.add_argument("--tag-rotation", choices=["rz", "phase"], default="rz")
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    a = sub.add_parser("analyze", help="print tables from a results file")
    a.add_argument("results")
    a.add_argument("--table", type=int, choices=[1, 2, 3], default=1)
    a.add_argument("--format", choices=["text", "csv", "json"], default="text")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("entail", help="check kb |= query with a marking scheme")
    t.add_argument("--kb", required=True)
    t.add_argument("--query", required=True)
    t.add_argument("--scheme", choices=["eigen", "null", "subtle"], default="subtle")
    t.add_argument("--mode", choices=["sampled", "exact"], default="exact")
    t.add_argument("--shots", type=int, default=1024)
    t.add_argument("--seed", type=int)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_entail)

    r = sub.add_parser("trajectory", help="CSV of winner/non-winner amplitudes per iteration")
    r.add_argument("--N-list", dest="N_list", nargs="+", required=True)
    r.add_argument("--jmax", type=int, default=10)
    r.add_argument("--out")
    r.set_defaults(func=cmd_trajectory)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"eigenmark: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except harness.ResultsFormatError as e:
        print(f"eigenmark: error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"eigenmark: error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
