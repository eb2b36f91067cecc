"""``csa``: build subdivisions, compute homology, run and verify the protocol.

Exit codes: 0 success, 1 a verdict or run failed, 2 usage error,
3 unreadable or malformed JSON, 4 non-chromatic complex or subdivision,
5 invalid process inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Iterator, Sequence
from pathlib import Path
from typing import Any

from . import __version__, canonical
from . import complex as cx
from .errors import ComplexError, NotChromaticError, NotPureError, ScheduleError, SimplexNotInComplex
from .execution import (
    CanonicalAdversary,
    LivenessViolation,
    SequentialAdversary,
    Trace,
    exhaustive_sweep,
    random_sweep,
    run_execution,
)
from .homology import betti_gf2, check_link_connected, connectivity_degree
from .subdivision import (
    barycentric,
    carriers_to_json,
    decode_label,
    from_tables,
    iterate_ch,
    verify_chromatic_subdivision,
)
from .task import Task, validate_inputs
from .verifier import check_sweep

OK, FAILED, USAGE, BAD_JSON, NOT_CHROMATIC, BAD_INPUTS = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(BAD_JSON, f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(BAD_JSON, f"{path}: malformed JSON: {exc}") from exc


def _load_complex(path: str | Path, labels: bool = False) -> cx.Complex:
    try:
        return cx.from_json(_load(path), label_decoder=decode_label if labels else None)
    except ComplexError as exc:
        raise CliError(BAD_JSON, f"{path}: {exc}") from exc


def sidecar(path: str | Path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".carriers.json")


def parse_inputs(text: str) -> dict[int, int]:
    """``"0:3,1:5"`` -> ``{0: 3, 1: 5}``."""
    out: dict[int, int] = {}
    try:
        for item in filter(None, (x.strip() for x in text.split(","))):
            p, v = item.split(":")
            if int(p) in out:
                raise ValueError(f"process {p} listed twice")
            out[int(p)] = int(v)
    except ValueError as exc:
        raise CliError(BAD_INPUTS, f"bad --inputs {text!r}: {exc}") from exc
    if not out:
        raise CliError(BAD_INPUTS, "--inputs is empty")
    return out


def _emit(obj: Any, out: str | None) -> None:
    if out:
        canonical.write(out, obj)
    else:
        print(json.dumps(canonical.jsonable(obj), indent=2, sort_keys=True))


# -- commands ----------------------------------------------------------------------


def cmd_subdivide(args: argparse.Namespace) -> int:
    base = _load_complex(args.complex)
    if args.kind == "ch":
        try:
            sub = iterate_ch(base, args.iterations)
        except NotChromaticError as exc:
            raise CliError(NOT_CHROMATIC, str(exc)) from exc
    else:
        if args.iterations != 1:
            raise CliError(USAGE, "barycentric subdivision supports --iterations 1 only")
        sub = barycentric(base)
    canonical.write(args.out, cx.to_json(sub.result))
    canonical.write(sidecar(args.out), carriers_to_json(sub))
    summary = {
        "kind": args.kind,
        "iterations": sub.iterations,
        "vertices": len(sub.result.vertices),
        "facets": len(sub.result.facets),
        "out": str(args.out),
        "carriers": str(sidecar(args.out)),
    }
    if args.kind == "ch":
        summary["chromatic_subdivision"] = bool(verify_chromatic_subdivision(sub))
    print(canonical.dumps(summary))
    return OK


def cmd_homology(args: argparse.Namespace) -> int:
    k = _load_complex(args.complex)
    if args.links:
        try:
            report = check_link_connected(k)
        except NotPureError as exc:
            raise CliError(USAGE, str(exc)) from exc
        _emit(report, args.out)
        return OK if report.link_connected else FAILED
    betti = betti_gf2(k)
    _emit({"betti": betti, "homologically_k_connected": connectivity_degree(betti, bool(k.vertices))}, args.out)
    return OK


def _task_from_args(args: argparse.Namespace) -> Task:
    base = _load_complex(args.complex)
    try:
        if args.div:
            result = _load_complex(args.div, labels=True)
            carriers = _load(args.carriers or sidecar(args.div))
            try:
                sub = from_tables(base, result, carriers)
            except ComplexError as exc:
                raise CliError(BAD_JSON, str(exc)) from exc
            report = verify_chromatic_subdivision(sub)
            if not report:
                raise NotChromaticError(f"{args.div} is not a chromatic subdivision: {report.violations[0]}")
        else:
            sub = iterate_ch(base, args.iterations)
        return Task(base, sub)
    except NotChromaticError as exc:
        raise CliError(NOT_CHROMATIC, str(exc)) from exc


def _default_inputs(task: Task) -> dict[int, int]:
    if len(task.base.facets) != 1:
        raise CliError(BAD_INPUTS, "--inputs is required when the input complex has several facets")
    return {task.base.color(v): v for v in sorted(task.base.vertices)}


def _runs(args: argparse.Namespace, task: Task, inputs: dict[int, int]) -> Iterator[Trace]:
    if args.schedule == "exhaustive":
        yield from exhaustive_sweep(task, inputs, crashes=not args.no_crashes, max_runs=args.max_runs)
    elif args.schedule == "random":
        yield from random_sweep(task, inputs, runs=args.max_runs or 1, seed=args.seed,
                                crash_probability=args.crash_probability)
    else:
        adv = CanonicalAdversary() if args.schedule == "canonical" else SequentialAdversary()
        try:
            yield run_execution(task, inputs, adv)
        except LivenessViolation as exc:
            yield exc.trace


def cmd_converge(args: argparse.Namespace) -> int:
    task = _task_from_args(args)
    inputs = parse_inputs(args.inputs) if args.inputs else _default_inputs(task)
    try:
        validate_inputs(task, inputs)
    except (ValueError, SimplexNotInComplex) as exc:
        raise CliError(BAD_INPUTS, str(exc)) from exc
    out = Path(args.trace_out)
    out.mkdir(parents=True, exist_ok=True)
    canonical.write(out / "task.json", task)
    runs, statuses, max_round = 0, {}, 0
    for i, trace in enumerate(_runs(args, task, inputs)):
        canonical.write(out / f"run-{i:06d}.json", trace)
        runs += 1
        statuses[trace.status] = statuses.get(trace.status, 0) + 1
        max_round = max(max_round, trace.max_round)
    summary = {
        "build": __version__,
        "schedule": args.schedule,
        "seed": args.seed if args.schedule == "random" else None,
        "inputs": inputs,
        "runs": runs,
        "statuses": statuses,
        "max_rounds": max_round,
    }
    canonical.write(out / "summary.json", summary)
    print(canonical.dumps(summary))
    return OK if set(statuses) <= {"complete"} else FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    trace_dir = Path(args.trace_dir)
    try:
        task = Task.from_json(_load(args.task or trace_dir / "task.json"))
    except ComplexError as exc:
        raise CliError(BAD_JSON, str(exc)) from exc
    except NotChromaticError as exc:
        raise CliError(NOT_CHROMATIC, str(exc)) from exc
    files = sorted(trace_dir.glob("run-*.json"))

    def traces() -> Iterator[Trace]:
        for f in files:
            try:
                yield Trace.from_json(_load(f))
            except (KeyError, TypeError, ValueError) as exc:
                raise CliError(BAD_JSON, f"{f}: malformed trace: {exc!r}") from exc

    report = check_sweep(traces(), task, names=[f.name for f in files], keep_decisions=not args.no_decisions)
    if args.report:
        canonical.write(args.report, report)
    body = report.to_json()
    print(canonical.dumps({k: body[k] for k in ("build", "runs", "passed_runs", "all_pass", "max_rounds")}))
    return OK if report.all_passed else FAILED


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csa", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"csa {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subdivide", help="subdivide a complex and write it with its carrier table")
    p.add_argument("--complex", required=True, help="input complex JSON")
    p.add_argument("--kind", choices=("ch", "bary"), default="ch", help="chromatic or barycentric subdivision")
    p.add_argument("--iterations", type=int, default=1, help="number of subdivision layers (default 1)")
    p.add_argument("--out", required=True, help="output complex JSON; carriers go to <stem>.carriers.json")
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("homology", help="reduced GF(2) Betti numbers, optionally with link checks")
    p.add_argument("--complex", required=True, help="complex JSON")
    p.add_argument("--links", action="store_true", help="also check that every link is connected enough")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("converge", help="run the protocol under one or many schedules")
    p.add_argument("--complex", required=True, help="input complex JSON")
    p.add_argument("--subdivision", choices=("ch",), default="ch", help="subdivision kind (default ch)")
    p.add_argument("--iterations", type=int, default=1, help="Ch layers N (default 1)")
    p.add_argument("--div", help="use this subdivided complex JSON instead of Ch^N")
    p.add_argument("--carriers", help="carrier table for --div (default <stem>.carriers.json)")
    p.add_argument("--inputs", help='process:vertex pairs, e.g. "0:0,1:1"; default all vertices of a single facet')
    p.add_argument("--schedule", choices=("exhaustive", "random", "canonical", "sequential"), default="canonical",
                   help="adversary (default canonical)")
    p.add_argument("--seed", type=int, default=0, help="first seed of a random sweep (default 0)")
    p.add_argument("--max-runs", type=int, help="cap on runs; number of seeds for random")
    p.add_argument("--crash-probability", type=float, default=0.0,
                   help="random sweeps: chance that a process never starts")
    p.add_argument("--no-crashes", action="store_true", help="exhaustive sweeps: skip proper participant subsets")
    p.add_argument("--trace-out", required=True, help="directory for run-*.json, task.json and summary.json")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("verify", help="check every lemma and theorem against a directory of traces")
    p.add_argument("--trace-dir", required=True, help="directory of run-*.json traces")
    p.add_argument("--task", help="task JSON (default <trace-dir>/task.json)")
    p.add_argument("--report", help="write the full JSON report here")
    p.add_argument("--no-decisions", action="store_true", help="omit the decision table from the report")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"csa: {exc}", file=sys.stderr)
        return exc.code
    except ScheduleError as exc:
        print(f"csa: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
