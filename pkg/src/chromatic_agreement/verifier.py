"""Post-hoc checks of the correctness lemmas and theorems against traces.

The verifier only reads what a trace records and recomputes links and
memberships from the task; it never calls back into the protocol code.
Every failing verdict carries at least one concrete witness.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

from . import __version__
from .complex import EMPTY, Complex, Simplex, contains, is_subcomplex, link
from .errors import IncompleteTrace
from .execution import Trace
from .task import Task

LEMMAS = (
    "L2-simplexes",
    "L3-links",
    "L4-vertex",
    "L-stable",
    "L5-contract",
    "T-liveness",
    "T-safety",
    "chromatic-output",
    "carrier-output",
)


@dataclass
class LemmaVerdict:
    lemma: str
    passed: bool
    witnesses: list[dict[str, Any]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"lemma": self.lemma, "pass": self.passed, "witnesses": self.witnesses}


def _s(x: Iterable[int] | None) -> list[int] | None:
    return None if x is None else sorted(x)


class _Checker:
    def __init__(self, trace: Trace, task: Task):
        if not trace.inputs or trace.schedule is None:
            raise IncompleteTrace("trace has no inputs or schedule")
        if trace.status == "complete" and not trace.rounds:
            raise IncompleteTrace("complete trace without round states")
        self.trace = trace
        self.task = task
        self.sigma = frozenset(trace.inputs.values())
        self.ambient = task.restricted(self.sigma)
        self._links: dict[tuple[Simplex, Simplex], Complex | None] = {}

    def link_of(self, core: Simplex, parts: Simplex) -> Complex | None:
        key = (core, parts)
        if key not in self._links:
            div = self.task.restricted(parts)
            self._links[key] = link(div, core) if contains(div, core) else None
        return self._links[key]

    # each check returns its witnesses; empty means pass

    def simplexes(self) -> list[dict]:
        bad = []
        for st in self.trace.rounds:
            for name in ("core", "refined_core", "simplex", "view"):
                value = getattr(st, name)
                if value is not None and not contains(self.ambient, value):
                    bad.append({"process": st.process, "round": st.round, "field": name, "value": _s(value)})
        return bad

    def links(self) -> list[dict]:
        bad = []
        by_round: dict[int, list] = {}
        for st in self.trace.rounds:
            c = self.link_of(st.refined_core, st.link_parts)
            if c is None:
                bad.append({"process": st.process, "round": st.round, "reason": "core not in Div(P)",
                            "core": _s(st.refined_core), "P": _s(st.link_parts)})
            else:
                by_round.setdefault(st.round, []).append((st.process, c))
        for r, entries in sorted(by_round.items()):
            for (p, a), (q, b) in combinations(entries, 2):
                if not (is_subcomplex(a, b) or is_subcomplex(b, a)):
                    bad.append({"round": r, "processes": [p, q], "reason": "convergence complexes incomparable"})
        return bad

    def vertex(self) -> list[dict]:
        bad = []
        for st in self.trace.rounds:
            if st.round < 2:
                continue
            c = self.link_of(st.refined_core, st.link_parts)
            where = {"process": st.process, "round": st.round}
            if c is None:
                bad.append({**where, "reason": "convergence complex undefined"})
                continue
            if not any(v.color == st.process for v in c.vertices.values()):
                bad.append({**where, "reason": "no vertex of own color in convergence complex"})
            sv = st.start_vertex
            if sv is None or sv not in c.vertices or self.task.color(sv) != st.process:
                bad.append({**where, "reason": "starting vertex not an own-color vertex of the convergence complex",
                            "start_vertex": sv})
            if st.core is not None and any(self.task.color(u) == st.process for u in st.core):
                bad.append({**where, "reason": "core carries own color", "core": _s(st.core)})
        return bad

    def stable(self) -> list[dict]:
        bad = []
        for p, (u, r0) in sorted(self.trace.decisions.items()):
            for st in self.trace.rounds:
                if st.process == p or st.round < r0:
                    continue
                where = {"decided": p, "vertex": u, "decision_round": r0, "process": st.process, "round": st.round}
                if st.view is not None and u not in st.view:
                    bad.append({**where, "field": "view"})
                if st.round > r0:
                    if st.core is not None and u not in st.core:
                        bad.append({**where, "field": "core"})
                    if u not in st.refined_core:
                        bad.append({**where, "field": "refined_core"})
        return bad

    def contract(self) -> list[dict]:
        bad = []
        for rec in self.trace.agreements:
            prev: Simplex | None = None
            seen: list[int] = []
            for k, block in enumerate(rec.classes):
                seen.extend(block)
                where = {"round": rec.round, "class": k}
                outs = {rec.outputs[q] for q in block if q in rec.outputs}
                if len(outs) != 1 or any(q not in rec.outputs for q in block):
                    bad.append({**where, "reason": "class members disagree or lack outputs"})
                    continue
                out = outs.pop()
                core = frozenset.intersection(*(rec.inputs[q].core for q in seen))
                parts = frozenset().union(*(rec.inputs[q].parts for q in seen))
                for q in block:
                    t = rec.inputs[q]
                    lk = self.link_of(t.core, t.parts)
                    if lk is None or t.vertex not in lk.vertices or not self.task.carrier(t.core) <= t.parts:
                        bad.append({**where, "process": q, "reason": "invalid agreement input triple"})
                if out.refined_core != core or out.link_parts != parts:
                    bad.append({**where, "reason": "refined core or participating union mismatch"})
                if not out.simplex:
                    bad.append({**where, "reason": "empty output"})
                target = self.link_of(core, parts)
                if target is None or not contains(target, out.simplex):
                    bad.append({**where, "reason": "output outside the class link", "simplex": _s(out.simplex)})
                if k == 0 and len(block) == 1 and out.simplex != {rec.inputs[block[0]].vertex}:
                    bad.append({**where, "reason": "solo process moved", "simplex": _s(out.simplex)})
                if prev is not None and not prev <= out.simplex:
                    bad.append({**where, "reason": "outputs not nested", "previous": _s(prev), "simplex": _s(out.simplex)})
                prev = out.simplex
        return bad

    def liveness(self) -> list[dict]:
        bad = []
        if self.trace.status != "complete":
            bad.append({"reason": f"run ended with status {self.trace.status}"})
        undecided = sorted(set(self.trace.inputs) - set(self.trace.decisions))
        if undecided:
            bad.append({"reason": "participants never decided", "processes": undecided})
        bound = len(self.trace.inputs)
        last = max([r for _, r in self.trace.decisions.values()] + [self.trace.max_round], default=0)
        if last > bound:
            bad.append({"reason": "too many rounds", "rounds": last, "bound": bound})
        for r in range(1, last + 1):
            active = [st.process for st in self.trace.rounds if st.round == r]
            if active and not any(d[1] == r for d in self.trace.decisions.values()):
                bad.append({"reason": "no decision in round", "round": r, "active": sorted(active)})
        return bad

    def safety(self) -> list[dict]:
        bad = []
        rounds = sorted({r for _, r in self.trace.decisions.values()})
        for r in rounds:
            decided = frozenset(u for u, rr in self.trace.decisions.values() if rr <= r)
            if not contains(self.ambient, decided):
                bad.append({"round": r, "decided": sorted(decided), "reason": "decisions not a simplex of Div(sigma_P)"})
        return bad

    def chromatic(self) -> list[dict]:
        return [
            {"process": p, "vertex": u, "color": self.task.color(u)}
            for p, (u, _) in sorted(self.trace.decisions.items())
            if self.task.color(u) != p
        ]

    def carrier(self) -> list[dict]:
        bad = []
        for p, (u, r) in sorted(self.trace.decisions.items()):
            st = self.trace.state(p, r)
            observed = st.participating if st is not None else EMPTY
            car = self.task.carrier({u})
            if not car <= observed:
                bad.append({"process": p, "vertex": u, "carrier": sorted(car), "observed_inputs": sorted(observed)})
        # every prefix of deciders lands in Div of the inputs those deciders saw
        for r in sorted({r for _, r in self.trace.decisions.values()}):
            prefix = [(p, u, rr) for p, (u, rr) in self.trace.decisions.items() if rr <= r]
            seen = frozenset().union(*(
                st.participating for p, _, rr in prefix if (st := self.trace.state(p, rr)) is not None
            ))
            decided = frozenset(u for _, u, _ in prefix)
            if not self.task.in_div(decided, seen):
                bad.append({"round": r, "decided": sorted(decided), "observed_inputs": sorted(seen)})
        return bad


_CHECKS = {
    "L2-simplexes": _Checker.simplexes,
    "L3-links": _Checker.links,
    "L4-vertex": _Checker.vertex,
    "L-stable": _Checker.stable,
    "L5-contract": _Checker.contract,
    "T-liveness": _Checker.liveness,
    "T-safety": _Checker.safety,
    "chromatic-output": _Checker.chromatic,
    "carrier-output": _Checker.carrier,
}


def check_trace(trace: Trace, task: Task) -> list[LemmaVerdict]:
    checker = _Checker(trace, task)
    return [LemmaVerdict(name, not (w := _CHECKS[name](checker)), w) for name in LEMMAS]


@dataclass
class SweepReport:
    runs: int = 0
    passed_runs: int = 0
    lemma_passes: dict[str, int] = field(default_factory=lambda: {k: 0 for k in LEMMAS})
    max_rounds: int = 0
    failures: list[dict] = field(default_factory=list)
    decision_map: list[dict] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return self.passed_runs == self.runs

    def to_json(self) -> dict:
        return {
            "build": __version__,
            "runs": self.runs,
            "passed_runs": self.passed_runs,
            "all_pass": self.all_passed,
            "lemma_pass_rates": {k: (v / self.runs if self.runs else 1.0) for k, v in self.lemma_passes.items()},
            "max_rounds": self.max_rounds,
            "failures": self.failures,
            "decision_map": self.decision_map,
        }


def check_sweep(
    traces: Iterable[Trace],
    task: Task,
    names: Iterable[str] | None = None,
    keep_decisions: bool = True,
    max_failures: int = 50,
) -> SweepReport:
    report = SweepReport()
    names = list(names) if names is not None else None
    for i, trace in enumerate(traces):
        name = names[i] if names is not None else str(i)
        verdicts = check_trace(trace, task)
        report.runs += 1
        report.max_rounds = max(report.max_rounds, trace.max_round)
        failed = [v for v in verdicts if not v.passed]
        for v in verdicts:
            report.lemma_passes[v.lemma] += v.passed
        if not failed:
            report.passed_runs += 1
        elif len(report.failures) < max_failures:
            report.failures.append({"run": name, "schedule": trace.schedule, "verdicts": [v.to_json() for v in failed]})
        if keep_decisions:
            report.decision_map.append({
                "run": name,
                "inputs": trace.inputs,
                "schedule": trace.schedule,
                "decisions": {p: u for p, (u, _) in sorted(trace.decisions.items())},
            })
    return report
