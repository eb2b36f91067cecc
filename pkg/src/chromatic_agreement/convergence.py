"""The convergence algorithm as a per-process state machine.

Each process is a generator that yields one request per shared-memory block
and receives that block's result, so the code below follows the protocol line
by line while the simulator in :mod:`execution` owns all scheduling.

Simplex agreement (round 1) and link-based agreement (later rounds) are a
deterministic task oracle, :func:`chain_agree`, evaluated over the concurrency
classes of one immediate-snapshot block. Its outputs satisfy the agreement
contract: class outputs form a chain, each lies in its class's convergence
complex, and a process alone in the first class keeps its own vertex.
"""

from __future__ import annotations

from collections.abc import Callable, Generator, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .complex import EMPTY, Complex, Simplex, contains
from .errors import InvariantViolation, NoStartVertex, SimplexNotInComplex
from .task import Task

ColorFn = Callable[[int], int]


@dataclass(frozen=True)
class AgreementInput:
    """One process's (starting vertex, core, participating set) triple."""

    vertex: int
    core: Simplex
    parts: Simplex

    def to_json(self) -> dict:
        return {"vertex": self.vertex, "core": sorted(self.core), "P": sorted(self.parts)}


@dataclass(frozen=True)
class AgreementOutput:
    simplex: Simplex
    refined_core: Simplex  # intersection of the cores in the class
    link_parts: Simplex  # union of the participating sets in the class

    def to_json(self) -> dict:
        return {
            "simplex": sorted(self.simplex),
            "refined_core": sorted(self.refined_core),
            "link_parts": sorted(self.link_parts),
        }


@dataclass
class ProcessRoundState:
    process: int
    round: int
    participating: Simplex = EMPTY
    core: Simplex | None = None
    refined_core: Simplex = EMPTY
    link_parts: Simplex = EMPTY
    start_vertex: int | None = None
    simplex: Simplex | None = None
    view: Simplex | None = None
    decision: int | None = None

    def to_json(self) -> dict:
        opt = lambda s: None if s is None else sorted(s)  # noqa: E731
        return {
            "process": self.process,
            "round": self.round,
            "P": sorted(self.participating),
            "core": opt(self.core),
            "refined_core": sorted(self.refined_core),
            "link_parts": sorted(self.link_parts),
            "start_vertex": self.start_vertex,
            "simplex": opt(self.simplex),
            "view": opt(self.view),
            "decision": self.decision,
        }

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> ProcessRoundState:
        opt = lambda s: None if s is None else frozenset(s)  # noqa: E731
        return cls(
            process=d["process"],
            round=d["round"],
            participating=frozenset(d["P"]),
            core=opt(d["core"]),
            refined_core=frozenset(d["refined_core"]),
            link_parts=frozenset(d["link_parts"]),
            start_vertex=d["start_vertex"],
            simplex=opt(d["simplex"]),
            view=opt(d["view"]),
            decision=d["decision"],
        )


# -- requests a process yields to the simulator --------------------------------


@dataclass(frozen=True)
class Agree:
    round: int
    input: AgreementInput
    register: int | None = None  # round 1 also writes participating[p] := input vertex

    kind = "agree"


@dataclass(frozen=True)
class Immediate:
    round: int
    array: str
    value: Any
    read_participating: bool = False

    @property
    def kind(self) -> str:
        return self.array


# -- state computations ----------------------------------------------------------


def compute_core(views: Iterable[Simplex]) -> Simplex:
    views = list(views)
    if not views:
        raise ValueError("core of an empty snapshot")
    return frozenset.intersection(*map(frozenset, views))


def convergence_complex(cores: Iterable[Simplex], parts: Iterable[Simplex], task: Task) -> Complex:
    """Lk(intersection of cores, Div(union of participating sets))."""
    core = compute_core(cores)
    union = frozenset().union(*parts)
    try:
        return task.link(core, union)
    except SimplexNotInComplex as exc:
        raise InvariantViolation(f"core {sorted(core)} is not a simplex of Div({sorted(union)})") from exc


def choose_start_vertex(c: Complex, p: int) -> int:
    for v in sorted(c.vertices):
        if c.vertices[v].color == p:
            return v
    raise NoStartVertex(f"convergence complex has no vertex of color {p}")


def decision_check(simplexes: Iterable[Simplex], p: int, color: ColorFn) -> int | None:
    simplexes = list(simplexes)
    if not simplexes:
        return None
    own = [u for u in compute_core(simplexes) if color(u) == p]
    if len(own) > 1:
        raise InvariantViolation(f"two vertices of color {p} in one intersection: {sorted(own)}")
    return own[0] if own else None


def update_view(
    seen: Iterable[tuple[Simplex, Simplex]], p: int, color: ColorFn, within: Complex | None = None
) -> Simplex:
    """Union of seen simplexes, plus the intersection of seen cores, minus own color."""
    seen = list(seen)
    union = frozenset().union(*(s for s, _ in seen)) | compute_core(c for _, c in seen)
    toss = {u for u in union if color(u) == p}
    if len(toss) > 1:
        raise InvariantViolation(f"view union carries {len(toss)} vertices of color {p}")
    view = union - toss
    if within is not None and not contains(within, view):
        raise InvariantViolation(f"view {sorted(view)} is not a simplex")
    return view


def _grow(seed: Iterable[int], candidates: Iterable[int], target: Complex) -> Simplex:
    s = set(seed)
    for x in candidates:
        if x not in s and contains(target, s | {x}):
            s.add(x)
    return frozenset(s)


def chain_agree(
    classes: Sequence[Iterable[int]],
    inputs: Mapping[int, AgreementInput],
    target: Callable[[Simplex, Simplex], Complex],
) -> dict[int, AgreementOutput]:
    """Agreement oracle over the ordered concurrency classes of one block.

    ``classes`` are the blocks B_1, B_2, ... of the block's ordered partition;
    processes in B_k saw S_k = B_1 + ... + B_k. The class target is
    ``target(intersection of cores, union of participating sets)`` over S_k.
    A lone first class outputs its own starting vertex; otherwise the first
    output is seeded by the starting vertices of S_1 (least first, skipping any
    that break simplexhood), and each later output extends the previous one by
    the new class's starting vertices and then least vertices of the target,
    up to a facet.
    """
    out: dict[int, AgreementOutput] = {}
    seen: list[int] = []
    tau: Simplex | None = None
    for block in classes:
        block = sorted(block)
        seen.extend(block)
        core = compute_core(inputs[q].core for q in seen)
        parts = frozenset().union(*(inputs[q].parts for q in seen))
        lk = target(core, parts)
        starts = sorted(inputs[q].vertex for q in block)
        if tau is None and len(seen) == 1:
            tau = frozenset(starts)
            if not contains(lk, tau):
                raise InvariantViolation(f"starting vertex {starts[0]} is outside its own link")
        else:
            prev = tau or EMPTY
            if not contains(lk, prev):
                raise InvariantViolation("agreement targets are not monotone across classes")
            tau = _grow(_grow(prev, starts, lk), sorted(lk.vertices), lk)
        if not tau:
            raise InvariantViolation("agreement produced an empty simplex")
        result = AgreementOutput(tau, core, parts)
        for q in block:
            out[q] = result
    return out


# -- the protocol ----------------------------------------------------------------

Step = Generator["Agree | Immediate", Any, Any]


def round_one(p: int, v: int, task: Task, log: list[ProcessRoundState]) -> Step:
    """Register, agree on a simplex, exchange it; return ``(decision, view)``."""
    state = ProcessRoundState(p, 1)
    corner = task.corner(v)
    agreed: AgreementOutput = yield Agree(1, AgreementInput(corner, EMPTY, frozenset({v})), register=v)
    state.participating = agreed.link_parts
    state.refined_core = agreed.refined_core
    state.link_parts = agreed.link_parts
    state.start_vertex = corner
    state.simplex = agreed.simplex
    snap: dict[int, tuple[Simplex, Simplex]] = yield Immediate(1, "simplexes", (agreed.simplex, EMPTY))
    log.append(state)
    u = decision_check((s for s, _ in snap.values()), p, task.color)
    if u is not None:
        state.decision = u
        return u, None
    state.view = update_view(snap.values(), p, task.color, within=task.div.result)
    return None, state.view


def later_round(p: int, r: int, w: Simplex, task: Task, log: list[ProcessRoundState]) -> Step:
    state = ProcessRoundState(p, r)
    views, participating = yield Immediate(r, "views", w, read_participating=True)
    c = compute_core(views.values())
    parts = frozenset(participating.values())
    state.participating = parts
    state.core = c
    start = choose_start_vertex(convergence_complex([c], [parts], task), p)
    state.start_vertex = start
    agreed: AgreementOutput = yield Agree(r, AgreementInput(start, c, parts))
    state.refined_core = agreed.refined_core
    state.link_parts = agreed.link_parts
    state.simplex = agreed.simplex
    snap = yield Immediate(r, "simplexes", (agreed.simplex, agreed.refined_core))
    log.append(state)
    u = decision_check((s for s, _ in snap.values()), p, task.color)
    if u is not None:
        state.decision = u
        return u, None
    state.view = update_view(snap.values(), p, task.color, within=task.div.result)
    return None, state.view


def chromatic_simplex_agree(p: int, v: int, task: Task, log: list[ProcessRoundState]) -> Step:
    """Process ``p`` on input vertex ``v``; returns its decided Div vertex."""
    u, w = yield from round_one(p, v, task, log)
    r = 2
    while u is None:
        u, w = yield from later_round(p, r, w, task, log)
        r += 1
    return u
