"""Command-line entry point.

Exit codes: 0 success or definite verdict, 2 usage / input / I/O error,
3 Inconclusive verdict, 4 fixture mismatch in ``reproduce-paper``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, pipeline, published
from .errors import EmpiricalOError
from .harness import ResponseTable, WorkloadSpec, run_experiment, sweep_k
from .report import key_values, plot_data, render
from .sortlab import UNIT_WEIGHTS, WeightVector, quicksort_instrumented, weighted_cost
from .statfit import TermSet, fit_ols
from .verdict import Label, SelectionPolicy, classify

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_INCONCLUSIVE = 3
EXIT_MISMATCH = 4


class UsageError(EmpiricalOError):
    pass


def _add_family(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", default="uniform", choices=["uniform", "tied", "heavy-tail"],
                   help="input distribution (default: uniform)")
    p.add_argument("--K", "-K", dest="K", default="1000", help="uniform: keys drawn from 1..K (default 1000)")
    p.add_argument("--t-d", dest="t_d", default="1",
                   help="tied: tie density n/K; 'n' makes every key equal (default 1)")
    p.add_argument("--exact", action="store_true", help="tied: exact multiset instead of i.i.d. draws")


def _add_response(p: argparse.ArgumentParser) -> None:
    p.add_argument("--response", default="count", choices=["count", "time"],
                   help="weighted operation count (reproducible) or wall time (default: count)")
    p.add_argument("--weights", default="1,1,1", help="comparison,exchange,partition weights (default 1,1,1)")


def _add_trials(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials-min", type=int, default=30)
    p.add_argument("--trials-max", type=int, default=500)
    p.add_argument("--rel-sem", type=float, default=0.01, help="stop once std/sqrt(t)/|mean| falls below this")
    p.add_argument("--seed", type=int, default=0)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", help="write to this file instead of stdout")


def _add_policy(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--s-ratio-min", type=float, default=2.0)
    p.add_argument("--log-base", type=float, default=2.0)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _family(args):
    return pipeline.parse_family(args.family, args.K, args.t_d, args.exact)


def cmd_generate(args) -> int:
    from .workloads import format_sample
    values = _family(args).generate(args.n, args.seed)
    _emit("".join(format_sample(v) + "\n" for v in values.tolist()), args.output)
    return EXIT_OK


def _read_keys(path: str) -> list:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    keys = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tok = line.strip()
        if not tok:
            continue
        try:
            keys.append(int(tok))
        except ValueError:
            try:
                keys.append(float(tok))
            except ValueError:
                raise UsageError(f"{path}:line {lineno}: not a number: {tok!r}") from None
    return keys


def cmd_sort(args) -> int:
    keys = _read_keys(args.file)
    _, counts = quicksort_instrumented(keys)
    w = WeightVector.parse(args.weights)
    lines = [f"n={len(keys)}", f"comparisons={counts.comparisons}", f"exchanges={counts.exchanges}",
             f"partition_calls={counts.partition_calls}", f"weighted_cost={weighted_cost(counts, w)!r}"]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_measure(args) -> int:
    spec = WorkloadSpec(_family(args), pipeline.parse_grid(args.grid), args.trials_min, args.trials_max,
                        args.rel_sem, args.seed, pipeline.parse_response(args.response, args.weights))
    _emit(run_experiment(spec).to_csv(), args.output)
    return EXIT_OK


def cmd_sweep_k(args) -> int:
    table = sweep_k(args.n, pipeline.parse_grid(args.k_grid), args.trials_min, args.seed,
                    pipeline.parse_response(args.response, args.weights), args.trials_max, args.rel_sem)
    _emit(table.to_csv(), args.output)
    return EXIT_OK


def cmd_fit(args) -> int:
    table = ResponseTable.read_csv(args.csv)
    terms = TermSet.parse(args.terms, args.log_base)
    fit = fit_ols(table, terms)
    out = render(fit, args.response_name, residuals=args.residuals)
    if args.kv:
        out += "\n" + key_values(fit)
    _emit(out, args.output)
    if args.plot_data:
        fits = {name: fit_ols(table, TermSet(ts.terms, args.log_base)) for name, ts in pipeline.CANDIDATES.items()}
        with open(args.plot_data, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(plot_data(fits))
    return EXIT_OK


def _verdict_exit(label: Label) -> int:
    return EXIT_INCONCLUSIVE if label is Label.INCONCLUSIVE else EXIT_OK


def cmd_verdict(args) -> int:
    table = ResponseTable.read_csv(args.csv)
    reference = ResponseTable.read_csv(args.reference) if args.reference else None
    verdict = classify(table, SelectionPolicy(args.alpha, args.s_ratio_min), args.log_base, reference)
    lines = [f"verdict: {verdict.label}"] + ["  " + s for s in verdict.evidence_lines()]
    _emit("\n".join(lines) + "\n", args.output)
    return _verdict_exit(verdict.label)


def cmd_reproduce(args) -> int:
    ids = None if args.fixture == "all" else [args.fixture]
    results = published.reproduce_all(ids)
    out = []
    for r in results:
        out.extend(r.lines(verbose=not args.quiet))
    n_pass = sum(r.passed for r in results)
    out.append(f"{n_pass}/{len(results)} fixtures passed")
    _emit("\n".join(out) + "\n", args.output)
    return EXIT_OK if n_pass == len(results) else EXIT_MISMATCH


def cmd_run(args) -> int:
    config = pipeline.ExperimentConfig.read(args.config)
    if args.out_dir is not None:
        config.out_dir = Path(args.out_dir)
    result = pipeline.end_to_end(config)
    print(f"verdict: {result.verdict.label}")
    for name, path in result.artifacts.items():
        print(f"{name}: {path}")
    return _verdict_exit(result.verdict.label)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="empirical-o",
        description="Estimate empirical complexity classes of an instrumented quicksort.",
        epilog="Exit codes: 0 ok / definite verdict, 2 usage or I/O error, 3 Inconclusive, 4 fixture mismatch.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", help="print one generated input, one sample per line")
    _add_family(p)
    p.add_argument("-n", type=int, required=True, help="sample size")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sort", help="sort keys from a file ('-' for stdin) and print operation counts")
    p.add_argument("file")
    p.add_argument("--weights", default="1,1,1")
    _add_output(p)
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("measure", help="measure the response over a size grid; writes n,y,trials,stddev CSV")
    _add_family(p)
    p.add_argument("--grid", required=True,
                   help="sizes: 'a,b,c' (2^k allowed), 'start:stop:step' or 'start:stop:*2'; stop inclusive")
    _add_trials(p)
    _add_response(p)
    _add_output(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep-k", help="uniform-K response against K at a fixed size; writes K,y,... CSV")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--k-grid", required=True, help="same syntax as --grid")
    _add_trials(p)
    _add_response(p)
    _add_output(p)
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("fit", help="OLS fit with ANOVA and residual diagnostics")
    p.add_argument("csv", help="response table with header n,y[,trials,stddev]")
    p.add_argument("--terms", default="Const,N,NLogN,NSquared", help="comma list of Const, N, NLogN, NSquared")
    p.add_argument("--log-base", type=float, default=2.0)
    p.add_argument("--kv", action="store_true", help="append a machine-readable key=value dump")
    p.add_argument("--residuals", action="store_true", help="list every observation, not only flagged ones")
    p.add_argument("--plot-data", metavar="FILE", help="write model,n,observed,fitted CSV for each candidate model")
    p.add_argument("--response-name", default="y", help="response label used in the report")
    _add_output(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verdict", help="classify a response curve; optional quadratic reference for demotion")
    p.add_argument("csv")
    p.add_argument("reference", nargs="?", help="reference curve on the same grid")
    _add_policy(p)
    _add_output(p)
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("reproduce-paper", help="recompute the bundled published tables at printed precision")
    p.add_argument("fixture", nargs="?", default="all", help=f"fixture id or 'all' ({', '.join(published.fixture_ids())})")
    p.add_argument("-q", "--quiet", action="store_true", help="list mismatches only")
    _add_output(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("run", help="end-to-end experiment from a config file",
                       description="Run generate, measure, fit and verdict from an INI config.",
                       epilog=pipeline.__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    p.add_argument("--out-dir", help="override [output] dir")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EmpiricalOError, OSError, ValueError) as exc:
        print(f"empirical-o {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
