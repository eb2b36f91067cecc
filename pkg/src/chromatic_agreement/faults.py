"""Seeded trace corruptions, one per verdict id, for self-testing the verifier.

Each injector takes a passing trace and returns a mutated deep copy that
violates exactly the property its verdict checks (neighbouring verdicts may
fail too). Injectors raise ``ValueError`` when the trace lacks the structure
they need, e.g. a second round.
"""

from __future__ import annotations

import copy
from collections.abc import Callable
from dataclasses import replace
from itertools import combinations

from .complex import EMPTY
from .convergence import AgreementOutput
from .execution import Trace, exhaustive_sweep
from .task import Task, standard_task
from .verifier import LEMMAS, check_trace

Injector = Callable[[Trace, Task], Trace]


def _same_color_pair(task: Task) -> frozenset[int]:
    by_color: dict[int, list[int]] = {}
    for u in sorted(task.div.result.vertices):
        by_color.setdefault(task.color(u), []).append(u)
    for us in by_color.values():
        if len(us) > 1:
            return frozenset(us[:2])
    raise ValueError("subdivision has no two vertices of one color")


def foreign_simplex(trace: Trace, task: Task) -> Trace:
    """Replace the first recorded simplex by two same-colored vertices."""
    t = copy.deepcopy(trace)
    t.rounds[0].simplex = _same_color_pair(task)
    return t


def incomparable_links(trace: Trace, task: Task) -> Trace:
    """Give two processes of one round the links of the two ends of an edge."""
    t = copy.deepcopy(trace)
    sigma = frozenset(t.inputs.values())
    ambient = task.restricted(sigma)
    edge = next((f for f in ambient.faces(1)), None)
    by_round: dict[int, list] = {}
    for st in t.rounds:
        by_round.setdefault(st.round, []).append(st)
    pair = next((sts[:2] for sts in by_round.values() if len(sts) >= 2), None)
    if edge is None or pair is None:
        raise ValueError("needs two processes in one round and an edge")
    for st, u in zip(pair, sorted(edge)):
        st.refined_core = frozenset({u})
        st.link_parts = sigma
    return t


def wrong_start_vertex(trace: Trace, task: Task) -> Trace:
    """Swap a later-round starting vertex for one of another color."""
    t = copy.deepcopy(trace)
    st = next((s for s in t.rounds if s.round >= 2), None)
    if st is None:
        raise ValueError("needs a process that reaches round 2")
    st.start_vertex = next(u for u in sorted(task.div.result.vertices) if task.color(u) != st.process)
    return t


def forget_decision(trace: Trace, task: Task) -> Trace:
    """Drop a decided vertex from a view taken in the same round."""
    t = copy.deepcopy(trace)
    for p, (u, r0) in sorted(t.decisions.items()):
        for st in t.rounds:
            if st.process != p and st.round >= r0 and st.view is not None and u in st.view:
                st.view = st.view - {u}
                return t
    raise ValueError("needs a view recorded after some decision")


def empty_agreement(trace: Trace, task: Task) -> Trace:
    """Make the last class of the first agreement output the empty simplex."""
    t = copy.deepcopy(trace)
    rec = t.agreements[0]
    for q in rec.classes[-1]:
        rec.outputs[q] = replace(rec.outputs[q], simplex=EMPTY)
    return t


def undecided_process(trace: Trace, task: Task) -> Trace:
    t = copy.deepcopy(trace)
    t.decisions.pop(max(t.decisions))
    return t


def incompatible_decisions(trace: Trace, task: Task) -> Trace:
    """Move one decision to a same-colored vertex that breaks simplexhood."""
    t = copy.deepcopy(trace)
    sigma = frozenset(t.inputs.values())
    decided = {p: u for p, (u, _) in t.decisions.items()}
    for p in sorted(decided):
        others = frozenset(u for q, u in decided.items() if q != p)
        for u in sorted(task.div.result.vertices):
            if task.color(u) == p and not task.in_div(others | {u}, sigma):
                t.decisions[p] = (u, t.decisions[p][1])
                return t
    raise ValueError("needs two decisions")


def miscolored_decision(trace: Trace, task: Task) -> Trace:
    t = copy.deepcopy(trace)
    p = min(t.decisions)
    u, r = t.decisions[p]
    t.decisions[p] = (next(w for w in sorted(task.div.result.vertices) if task.color(w) != p), r)
    return t


def hidden_participation(trace: Trace, task: Task) -> Trace:
    """Erase what a decider observed of the participating array."""
    t = copy.deepcopy(trace)
    p = min(t.decisions)
    st = t.state(p, t.decisions[p][1])
    if st is None:
        raise ValueError("decider has no state for its deciding round")
    st.participating = EMPTY
    return t


INJECTORS: dict[str, Injector] = {
    "L2-simplexes": foreign_simplex,
    "L3-links": incomparable_links,
    "L4-vertex": wrong_start_vertex,
    "L-stable": forget_decision,
    "L5-contract": empty_agreement,
    "T-liveness": undecided_process,
    "T-safety": incompatible_decisions,
    "chromatic-output": miscolored_decision,
    "carrier-output": hidden_participation,
}
assert tuple(INJECTORS) == LEMMAS


def sample_trace(task: Task | None = None) -> tuple[Trace, Task]:
    """A passing three-process trace where someone decides early and someone reaches round 2."""
    task = task or standard_task(2)
    for trace in exhaustive_sweep(task, crashes=False):
        firsts = [r for _, r in trace.decisions.values()]
        if min(firsts) == 1 and max(firsts) >= 2 and any(st.view for st in trace.rounds):
            return trace, task
    raise ValueError("no suitable trace")


def self_test(trace: Trace | None = None, task: Task | None = None) -> dict[str, bool]:
    """Verdict id -> whether the verifier flags the corresponding injected fault."""
    if trace is None or task is None:
        trace, task = sample_trace(task)
    baseline = check_trace(trace, task)
    if not all(v.passed for v in baseline):
        raise ValueError("self-test needs a passing trace")
    out = {}
    for lemma, inject in INJECTORS.items():
        verdicts = {v.lemma: v for v in check_trace(inject(trace, task), task)}
        v = verdicts[lemma]
        out[lemma] = not v.passed and bool(v.witnesses)
    return out
