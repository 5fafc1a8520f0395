"""Command-line entry point: stream generation, heavy-element runs, moment
estimation, the verification harness, and the kernel benchmark.

Exit codes: 0 ok, 2 usage, 3 I/O, 4 format, 5 enumeration guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import core, verify
from .bench import run_bench
from .fkest import estimate_fk
from .generate import KINDS, PLACEMENTS, GeneratorSpec, write_with_sidecar
from .heavy import HeavyHitterConfig, find_heavy_detailed
from .params import DEFAULT_REPS_CONSTANT
from .stream import MalformedStreamError, MatrixOverlay, StreamView, read_stream
from .verify import GuardExceededError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_GUARD = 5


def _emit(report: dict, as_json: bool) -> None:
    report = {"schema": 1, **report}
    if as_json:
        print(json.dumps(report, sort_keys=True))
    else:
        for key, value in report.items():
            print(f"{key}: {value}")


def _load(path) -> StreamView:
    try:
        return read_stream(path)
    except MalformedStreamError:
        raise
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


def _cmd_generate(args) -> int:
    spec = GeneratorSpec(
        kind=args.kind, n=args.n, m=args.m,
        heavy_frequency=args.heavy_frequency,
        placement=args.placement, zipf_s=args.zipf_s, seed=args.seed,
    )
    doc = write_with_sidecar(spec, args.out, args.stats_out)
    _emit({"written": args.out, "m": doc["m"], "n": doc["n"],
           "heaviest": doc["heaviest"]}, args.json)
    return EXIT_OK


def _cmd_heavy(args) -> int:
    view = _load(args.input)
    cfg = HeavyHitterConfig(
        n=view.n, k=args.k, eps=args.eps,
        length=args.length if not args.doubling else None,
        reps_constant=args.reps_constant, seed=args.seed,
        delta_override=args.delta, t_override=args.t, lam_override=args.lam,
    )
    result = find_heavy_detailed(iter(view.items.tolist()), cfg)
    _emit(result.report(), args.json)
    return EXIT_OK


def _cmd_fk(args) -> int:
    view = _load(args.input)
    value = estimate_fk(view.items, view.n, args.k, args.eps, seed=args.seed,
                        levels=args.levels, trials=args.trials)
    _emit({"k": args.k, "estimate": value, "trials": args.trials}, args.json)
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.check == "oracle":
        view = _load(args.input)
        ov = MatrixOverlay.from_view(view, args.t)
        report = verify.oracle_agreement(ov, args.lam, args.trials, args.seed)
    elif args.check == "thm21":
        view = _load(args.input)
        ov = MatrixOverlay.from_view(view, args.t)
        report = verify.check_heavy_sample_bound(
            ov, args.lam, args.alpha, args.beta, heavy_id=args.heavy_id,
            trials=args.trials, seed=args.seed,
        )
    elif args.check == "thm31":
        view = _load(args.input)
        report = verify.check_derived_sample_bound(
            view, args.k, args.alpha, args.beta, trials=args.trials,
            seed=args.seed,
        )
    elif args.check == "pairs":
        report = verify.check_winning_lemma(args.max_len, args.max_entry)
        if not report["ok"]:
            _emit(report, args.json)
            return 1
    elif args.check == "promise":
        report = verify.promise_problem_experiment(
            args.n, args.k, args.trials, T=args.reps, seed=args.seed,
        )
    else:  # calibrate
        report = verify.calibrate_constants(trials=args.trials, seed=args.seed)
        report = {"feasible": report["feasible"],
                  "instances": len(report["results"])}
    _emit(report, args.json)
    return EXIT_OK


def _cmd_bench(args) -> int:
    report = run_bench(n_runs=args.runs, repeats=args.repeats, seed=args.seed)
    _emit({**report, "active_kernel": core.KERNEL_NAME}, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pickdrop",
        description="pick-and-drop sampling for heavy elements and frequency moments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic stream plus stats sidecar")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--heavy-frequency", type=int, default=0)
    p.add_argument("--placement", choices=PLACEMENTS, default="uniform-rows")
    p.add_argument("--zipf-s", type=float, default=1.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--stats-out", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("heavy", help="find a heavy element in one pass")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--length", type=int, default=None,
                      help="known stream length F_1")
    mode.add_argument("--doubling", action="store_true",
                      help="unknown-length mode (default)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps-constant", type=float, default=DEFAULT_REPS_CONSTANT)
    p.add_argument("--delta", type=int, default=None, help="restrict to one delta")
    p.add_argument("--t", type=int, default=None, help="override column count")
    p.add_argument("--lam", "--lambda", dest="lam", type=int, default=None,
                   help="override drop threshold")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_heavy)

    p = sub.add_parser("fk", help="approximate the k-th frequency moment")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_fk)

    p = sub.add_parser("verify", help="ground-truth and bound checks")
    p.add_argument("check",
                   choices=("oracle", "thm21", "thm31", "pairs", "promise",
                            "calibrate"))
    p.add_argument("--input")
    p.add_argument("--t", type=int, default=4)
    p.add_argument("--lam", type=int, default=1)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.3)
    p.add_argument("--heavy-id", type=int, default=1)
    p.add_argument("--trials", type=int, default=10**5)
    p.add_argument("--reps", type=int, default=None,
                   help="repetition count T for the promise experiment")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--max-entry", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="compare compiled and fallback kernels")
    p.add_argument("--runs", type=int, default=20000)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MalformedStreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except GuardExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
