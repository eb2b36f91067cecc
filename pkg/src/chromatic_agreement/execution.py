"""Immediate-snapshot shared memory and an adversarial, replayable scheduler.

Every shared-memory block is a *site* ``(round, kind)``; all processes still
running reach the same site together, and the adversary picks an ordered
partition of them. Within a block, each class writes and then every member
snapshots the whole array, so a member sees its own class and every earlier
one. A process missing from ``inputs`` never starts, which models a crash
before the first step.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Any

from . import canonical
from .complex import Simplex
from .convergence import (
    Agree,
    AgreementInput,
    AgreementOutput,
    Immediate,
    ProcessRoundState,
    chain_agree,
    chromatic_simplex_agree,
)
from .errors import InvariantViolation, LivenessViolation, ScheduleError, ScheduleExhausted
from .task import Task, full_inputs, validate_inputs

OrderedPartition = tuple[frozenset[int], ...]
Site = tuple[int, str]


@lru_cache(maxsize=None)
def _partitions(items: tuple[int, ...]) -> tuple[OrderedPartition, ...]:
    if not items:
        return ((),)
    out: list[OrderedPartition] = []
    for size in range(len(items), 0, -1):
        for first in combinations(items, size):
            rest = tuple(x for x in items if x not in first)
            for tail in _partitions(rest):
                out.append((frozenset(first), *tail))
    return tuple(out)


def enumerate_ordered_partitions(items: Iterable[int]) -> list[OrderedPartition]:
    """All ordered set partitions; the single-block partition comes first."""
    key = tuple(sorted(set(items)))
    if not key:
        raise ValueError("cannot partition an empty set")
    return list(_partitions(key))


# -- shared memory -----------------------------------------------------------------


class RegisterArray:
    """Single-writer registers indexed by process id; each cell written at most once."""

    def __init__(self, name: str):
        self.name = name
        self.cells: dict[int, Any] = {}

    def write(self, p: int, value: Any) -> None:
        if p in self.cells:
            raise InvariantViolation(f"{self.name}[{p}] written twice")
        self.cells[p] = value

    def snapshot(self) -> dict[int, Any]:
        return dict(self.cells)


@dataclass
class SharedMemory:
    participating: RegisterArray = field(default_factory=lambda: RegisterArray("participating"))
    arrays: dict[Site, RegisterArray] = field(default_factory=dict)

    def array(self, kind: str, r: int) -> RegisterArray:
        key = (r, kind)
        if key not in self.arrays:
            self.arrays[key] = RegisterArray(f"{kind}[{r}]")
        return self.arrays[key]

    def to_json(self) -> dict:
        out: dict[str, Any] = {"participating": self.participating.cells}
        for (r, kind), arr in sorted(self.arrays.items()):
            out.setdefault(kind, {})[r] = arr.cells
        return canonical.jsonable(out)


def immediate_block(
    array: RegisterArray, writes: Mapping[int, Any], partition: OrderedPartition
) -> dict[int, dict[int, Any]]:
    """Apply one immediate-snapshot block; returns each writer's snapshot."""
    members = [p for block in partition for p in block]
    if len(members) != len(set(members)) or set(members) != set(writes):
        raise ScheduleError(f"partition {[sorted(b) for b in partition]} does not cover writers {sorted(writes)}")
    snaps: dict[int, dict[int, Any]] = {}
    for block in partition:
        for p in sorted(block):
            array.write(p, writes[p])
        view = array.snapshot()
        for p in block:
            snaps[p] = view
    return snaps


# -- adversaries --------------------------------------------------------------------


@dataclass
class Choice:
    round: int
    site: str
    pending: tuple[int, ...]
    index: int
    options: int
    partition: OrderedPartition

    def to_json(self) -> dict:
        return {
            "round": self.round,
            "site": self.site,
            "pending": list(self.pending),
            "index": self.index,
            "options": self.options,
            "partition": [sorted(b) for b in self.partition],
        }


class Adversary:
    mode = "abstract"

    def __init__(self) -> None:
        self.choices: list[Choice] = []

    def pick(self, site: Site, options: Sequence[OrderedPartition]) -> int:
        raise NotImplementedError

    def next(self, site: Site, pending: Iterable[int]) -> OrderedPartition:
        pending = tuple(sorted(pending))
        options = enumerate_ordered_partitions(pending)
        i = self.pick(site, options)
        self.choices.append(Choice(site[0], site[1], pending, i, len(options), options[i]))
        return options[i]

    def describe(self) -> dict:
        return {"mode": self.mode}


class CanonicalAdversary(Adversary):
    """Every block is one concurrency class."""

    mode = "canonical"

    def pick(self, site, options):
        return 0


class SequentialAdversary(Adversary):
    """Every block runs the pending processes one at a time, lowest id first."""

    mode = "sequential"

    def pick(self, site, options):
        want = tuple(frozenset({p}) for p in sorted(set().union(*options[0])))
        return options.index(want)


class RandomAdversary(Adversary):
    mode = "random"

    def __init__(self, seed: int):
        super().__init__()
        self.seed = seed
        self.rng = random.Random(seed)

    def pick(self, site, options):
        return self.rng.randrange(len(options))

    def describe(self):
        return {"mode": self.mode, "seed": self.seed}


class CursorAdversary(Adversary):
    """Follows a cursor of choice indices, defaulting to 0 past its end.

    ``next_cursor()`` returns the odometer successor in depth-first order over
    the choice tree, or ``None`` once the tree is exhausted.
    """

    mode = "exhaustive"

    def __init__(self, cursor: Sequence[int] = ()):
        super().__init__()
        self.cursor = list(cursor)

    def pick(self, site, options):
        k = len(self.choices)
        i = self.cursor[k] if k < len(self.cursor) else 0
        if i >= len(options):
            raise ScheduleExhausted(f"cursor index {i} out of range at choice {k}")
        return i

    def next_cursor(self) -> list[int] | None:
        used = [c.index for c in self.choices]
        for k in range(len(used) - 1, -1, -1):
            if used[k] + 1 < self.choices[k].options:
                return used[:k] + [used[k] + 1]
        return None

    def describe(self):
        return {"mode": self.mode, "cursor": [c.index for c in self.choices]}


class ScriptedAdversary(Adversary):
    """Replays explicit partitions in order."""

    mode = "scripted"

    def __init__(self, partitions: Sequence[Iterable[Iterable[int]]]):
        super().__init__()
        self.script = [tuple(frozenset(b) for b in part) for part in partitions]

    def pick(self, site, options):
        k = len(self.choices)
        if k >= len(self.script):
            raise ScheduleExhausted(f"scripted schedule ended before site {site}")
        want = self.script[k]
        try:
            return options.index(want)
        except ValueError:
            raise ScheduleError(f"scripted partition {[sorted(b) for b in want]} invalid at site {site}") from None

    def describe(self):
        return {"mode": self.mode, "partitions": [[sorted(b) for b in p] for p in self.script]}


def adversary_from(schedule: Mapping[str, Any]) -> Adversary:
    mode = schedule.get("mode")
    if mode == "canonical":
        return CanonicalAdversary()
    if mode == "sequential":
        return SequentialAdversary()
    if mode == "random":
        return RandomAdversary(int(schedule["seed"]))
    if mode == "exhaustive":
        return CursorAdversary(schedule.get("cursor", []))
    if mode == "scripted":
        return ScriptedAdversary(schedule["partitions"])
    raise ScheduleError(f"unknown schedule mode {mode!r}")


# -- traces -----------------------------------------------------------------------


@dataclass
class AgreementRecord:
    round: int
    classes: list[list[int]]
    inputs: dict[int, AgreementInput]
    outputs: dict[int, AgreementOutput]

    def to_json(self) -> dict:
        return {
            "round": self.round,
            "classes": self.classes,
            "inputs": {p: t.to_json() for p, t in self.inputs.items()},
            "outputs": {p: o.to_json() for p, o in self.outputs.items()},
        }

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> AgreementRecord:
        return cls(
            d["round"],
            [list(b) for b in d["classes"]],
            {
                int(p): AgreementInput(t["vertex"], frozenset(t["core"]), frozenset(t["P"]))
                for p, t in d["inputs"].items()
            },
            {
                int(p): AgreementOutput(frozenset(o["simplex"]), frozenset(o["refined_core"]), frozenset(o["link_parts"]))
                for p, o in d["outputs"].items()
            },
        )


@dataclass
class Trace:
    inputs: dict[int, int]
    schedule: dict[str, Any]
    choices: list[Choice] = field(default_factory=list)
    memory: dict[str, Any] = field(default_factory=dict)
    agreements: list[AgreementRecord] = field(default_factory=list)
    rounds: list[ProcessRoundState] = field(default_factory=list)
    decisions: dict[int, tuple[int, int]] = field(default_factory=dict)  # p -> (vertex, round)
    status: str = "complete"

    FORMAT = "chromatic-agreement-trace/1"

    @property
    def max_round(self) -> int:
        return max((s.round for s in self.rounds), default=0)

    def state(self, p: int, r: int) -> ProcessRoundState | None:
        for s in self.rounds:
            if s.process == p and s.round == r:
                return s
        return None

    def to_json(self) -> dict:
        return {
            "format": self.FORMAT,
            "status": self.status,
            "inputs": self.inputs,
            "schedule": self.schedule,
            "choices": [c.to_json() for c in self.choices],
            "memory": self.memory,
            "agreements": [a.to_json() for a in self.agreements],
            "rounds": [s.to_json() for s in sorted(self.rounds, key=lambda s: (s.round, s.process))],
            "decisions": {p: {"vertex": u, "round": r} for p, (u, r) in self.decisions.items()},
        }

    def canonical(self) -> str:
        return canonical.dumps(self.to_json())

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> Trace:
        choices = [
            Choice(c["round"], c["site"], tuple(c["pending"]), c["index"], c["options"],
                   tuple(frozenset(b) for b in c["partition"]))
            for c in d.get("choices", [])
        ]
        return cls(
            inputs={int(p): int(v) for p, v in d["inputs"].items()},
            schedule=dict(d["schedule"]),
            choices=choices,
            memory=d.get("memory", {}),
            agreements=[AgreementRecord.from_json(a) for a in d.get("agreements", [])],
            rounds=[ProcessRoundState.from_json(s) for s in d.get("rounds", [])],
            decisions={int(p): (x["vertex"], x["round"]) for p, x in d.get("decisions", {}).items()},
            status=d.get("status", "complete"),
        )


# -- the simulator ------------------------------------------------------------------


def _snapshot_values(snap: Mapping[int, Any]) -> dict[int, Any]:
    return {q: snap[q] for q in sorted(snap)}


def run_execution(
    task: Task,
    inputs: Mapping[int, int],
    adversary: Adversary,
    max_rounds: int | None = None,
) -> Trace:
    """Drive every participating process to a decision under ``adversary``.

    Raises :class:`LivenessViolation` (carrying the partial trace) if some
    process is still running after ``max_rounds`` rounds.
    """
    inputs = {int(p): int(v) for p, v in sorted(inputs.items())}
    validate_inputs(task, inputs)
    if max_rounds is None:
        max_rounds = 2 * task.n_processes + 2
    memory = SharedMemory()
    log: list[ProcessRoundState] = []
    trace = Trace(inputs, {})
    procs = {p: chromatic_simplex_agree(p, v, task, log) for p, v in inputs.items()}
    requests: dict[int, Agree | Immediate] = {p: next(g) for p, g in procs.items()}

    def finish(status: str) -> Trace:
        trace.schedule = adversary.describe()
        trace.choices = list(adversary.choices)
        trace.memory = memory.to_json()
        trace.rounds = log
        trace.status = status
        return trace

    while requests:
        sites = {(req.round, req.kind) for req in requests.values()}
        if len(sites) != 1:
            raise InvariantViolation(f"processes diverged across sites {sorted(sites)}")
        site = sites.pop()
        if site[0] > max_rounds:
            raise LivenessViolation(f"undecided after {max_rounds} rounds: {sorted(requests)}", finish("liveness-violation"))
        pending = sorted(requests)
        partition = adversary.next(site, pending)
        replies: dict[int, Any] = {}
        first = requests[pending[0]]

        if isinstance(first, Agree):
            reqs: dict[int, Agree] = requests  # type: ignore[assignment]
            if site[0] == 1:
                for p in pending:
                    memory.participating.write(p, reqs[p].register)
            triples = {p: reqs[p].input for p in pending}
            snaps = immediate_block(memory.array("agreement", site[0]), triples, partition)
            classes = [sorted(b) for b in partition]
            for k, block in enumerate(classes):
                expected = {q for b in classes[: k + 1] for q in b}
                if any(set(snaps[p]) != expected for p in block):
                    raise InvariantViolation("agreement snapshots disagree with the block order")
            replies = chain_agree(classes, triples, task.link)
            trace.agreements.append(AgreementRecord(site[0], classes, triples, dict(replies)))
        else:
            reqs_i: dict[int, Immediate] = requests  # type: ignore[assignment]
            arr = memory.array(first.array, site[0])
            snaps = immediate_block(arr, {p: reqs_i[p].value for p in pending}, partition)
            for p in pending:
                if reqs_i[p].read_participating:
                    replies[p] = (_snapshot_values(snaps[p]), memory.participating.snapshot())
                else:
                    replies[p] = _snapshot_values(snaps[p])

        for p in pending:
            try:
                requests[p] = procs[p].send(replies[p])
            except StopIteration as stop:
                del requests[p]
                trace.decisions[p] = (stop.value, site[0])
    return finish("complete")


def replay(trace: Trace, task: Task) -> Trace:
    """Re-execute a trace from its recorded seed or cursor."""
    return run_execution(task, trace.inputs, adversary_from(trace.schedule))


# -- sweeps -------------------------------------------------------------------------


def participant_subsets(inputs: Mapping[int, int]) -> list[dict[int, int]]:
    """Every nonempty participating subset, largest first."""
    keys = sorted(inputs)
    return [
        {p: inputs[p] for p in combo}
        for size in range(len(keys), 0, -1)
        for combo in combinations(keys, size)
    ]


def exhaustive_sweep(
    task: Task,
    inputs: Mapping[int, int] | None = None,
    crashes: bool = True,
    max_runs: int | None = None,
) -> Iterator[Trace]:
    """Every adversary choice sequence, for every participating subset if ``crashes``."""
    inputs = dict(full_inputs(task) if inputs is None else inputs)
    runs = 0
    for subset in participant_subsets(inputs) if crashes else [inputs]:
        cursor: list[int] | None = []
        while cursor is not None:
            if max_runs is not None and runs >= max_runs:
                return
            adv = CursorAdversary(cursor)
            try:
                yield run_execution(task, subset, adv)
            except LivenessViolation as exc:
                yield exc.trace
            runs += 1
            cursor = adv.next_cursor()


def random_participants(inputs: Mapping[int, int], seed: int, crash_probability: float) -> dict[int, int]:
    rng = random.Random(f"participants/{seed}")
    while True:
        chosen = {p: v for p, v in sorted(inputs.items()) if rng.random() >= crash_probability}
        if chosen:
            return chosen


def random_sweep(
    task: Task,
    inputs: Mapping[int, int] | None = None,
    runs: int = 1000,
    seed: int = 0,
    crash_probability: float = 0.0,
) -> Iterator[Trace]:
    """Runs with seeds ``seed, seed+1, ...``; each run's seed also picks its crashes."""
    inputs = dict(full_inputs(task) if inputs is None else inputs)
    for i in range(runs):
        s = seed + i
        subset = random_participants(inputs, s, crash_probability) if crash_probability else inputs
        try:
            yield run_execution(task, subset, RandomAdversary(s))
        except LivenessViolation as exc:
            yield exc.trace
