"""The chromatic simplex agreement task (I, Div(I), Div)."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from . import complex as cx
from .complex import Complex, Simplex
from .errors import ComplexError, NotChromaticError, SimplexNotInComplex
from .subdivision import Subdivision, carriers_to_json, decode_label, from_tables, iterate_ch


@dataclass(eq=False)
class Task:
    base: Complex
    div: Subdivision
    _links: dict[tuple[Simplex, Simplex], Complex] = field(default_factory=dict, repr=False)
    _corners: dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not cx.is_chromatic(self.base):
            raise NotChromaticError("input complex is not chromatic")
        if not cx.is_chromatic(self.div.result):
            raise NotChromaticError("subdivision is not chromatic")

    @property
    def n_processes(self) -> int:
        return max(v.color for v in self.base.vertices.values()) + 1

    def color(self, u: int) -> int:
        return self.div.result.vertices[u].color

    def restricted(self, parts: Iterable[int]) -> Complex:
        return self.div.restricted(parts)

    def link(self, core: Simplex, parts: Simplex) -> Complex:
        """Lk(core, Div(parts)); raises SimplexNotInComplex if core is not in Div(parts)."""
        key = (frozenset(core), frozenset(parts))
        hit = self._links.get(key)
        if hit is None:
            hit = cx.link(self.restricted(key[1]), key[0])
            self._links[key] = hit
        return hit

    def corner(self, base_vertex: int) -> int:
        """The unique Div vertex over a base vertex."""
        if base_vertex not in self._corners:
            self._corners[base_vertex] = self.div.vertex_over(base_vertex)
        return self._corners[base_vertex]

    def carrier(self, s: Iterable[int]) -> Simplex:
        return frozenset().union(*(self.div.vertex_carrier[u] for u in s))

    def in_div(self, s: Iterable[int], parts: Simplex) -> bool:
        return cx.contains(self.restricted(parts), s)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        data: dict[str, Any] = {"complex": cx.to_json(self.base)}
        if self.div.kind in ("ch", "identity"):
            data["subdivision"] = {"kind": "ch", "iterations": self.div.iterations}
        else:
            data["subdivision"] = {
                "kind": "custom",
                "complex": cx.to_json(self.div.result),
                **carriers_to_json(self.div),
            }
        return data

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Task:
        try:
            base = cx.from_json(data["complex"])
            div_data = data.get("subdivision", {"kind": "ch", "iterations": 1})
            kind = div_data.get("kind", "ch")
        except (KeyError, TypeError, AttributeError) as exc:
            raise ComplexError(f"malformed task JSON: {exc!r}") from exc
        if kind == "ch":
            return cls(base, iterate_ch(base, int(div_data.get("iterations", 1))))
        if kind == "custom":
            result = cx.from_json(div_data["complex"], label_decoder=decode_label)
            return cls(base, from_tables(base, result, div_data))
        raise ComplexError(f"unknown subdivision kind {kind!r}")


def standard_task(n: int, iterations: int = 1) -> Task:
    """CSA on the n-simplex with Div = Ch^iterations."""
    base = cx.simplex_complex(n)
    return Task(base, iterate_ch(base, iterations))


def full_inputs(task: Task) -> dict[int, int]:
    """Process i starts on the base vertex colored i (single-facet base only)."""
    return {v.color: v.id for v in task.base.vertices.values()}


def validate_inputs(task: Task, inputs: Mapping[int, int]) -> Simplex:
    if not inputs:
        raise ValueError("no participating processes")
    for p, v in inputs.items():
        if v not in task.base.vertices:
            raise ValueError(f"process {p}: unknown input vertex {v}")
        if task.base.color(v) != p:
            raise ValueError(f"process {p}: input vertex {v} has color {task.base.color(v)}")
    sigma = frozenset(inputs.values())
    if sigma not in task.base:
        raise SimplexNotInComplex(f"inputs {sorted(sigma)} do not lie on one simplex of the input complex")
    return sigma
