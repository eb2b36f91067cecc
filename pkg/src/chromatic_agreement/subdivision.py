"""Barycentric and standard chromatic subdivisions with carriers.

Every vertex of a subdivision records its *vertex carrier*: the smallest base
simplex whose subdivision contains it. The carrier of any other simplex is the
union of its vertex carriers. Iterated subdivisions compose carriers eagerly, so
``carrier_of`` always answers in the original base complex.

Result vertex ids are assigned in sorted label order, which makes "least
vertex by structural label" the same as "least vertex id".
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Any

from .complex import (
    EMPTY,
    Complex,
    Simplex,
    Vertex,
    build_complex,
    colors_of,
    contains,
    induced,
    is_chromatic,
)
from .errors import ComplexError, NotChromaticError, SimplexNotInComplex


@dataclass(frozen=True, order=True)
class ChromLabel:
    """Vertex ``(i, face)`` of a chromatic subdivision: color ``i`` seeing ``face``."""

    color: int
    face: tuple[int, ...]

    def to_json(self) -> dict:
        return {"kind": "ch", "color": self.color, "face": list(self.face)}


@dataclass(frozen=True)
class BaryLabel:
    """Barycenter of the base simplex ``simplex``."""

    simplex: tuple[int, ...]

    def __lt__(self, other: BaryLabel) -> bool:
        return (len(self.simplex), self.simplex) < (len(other.simplex), other.simplex)

    def to_json(self) -> dict:
        return {"kind": "bary", "simplex": list(self.simplex)}


def decode_label(data: Any) -> Any:
    if isinstance(data, Mapping):
        if data.get("kind") == "ch":
            return ChromLabel(int(data["color"]), tuple(data["face"]))
        if data.get("kind") == "bary":
            return BaryLabel(tuple(data["simplex"]))
    return data


@dataclass(eq=False)
class Subdivision:
    base: Complex
    result: Complex
    vertex_carrier: Mapping[int, Simplex]
    kind: str = "custom"
    iterations: int = 1
    # explicit per-simplex carriers, only for subdivisions loaded from a table
    carrier_table: Mapping[Simplex, Simplex] | None = None
    _restrictions: dict[Simplex, Complex] = field(default_factory=dict, repr=False)

    def restricted(self, face: Iterable[int]) -> Complex:
        """Div(face): the subcomplex of the result carried by ``face``."""
        face = frozenset(face)
        cached = self._restrictions.get(face)
        if cached is None:
            keep = [v for v, c in self.vertex_carrier.items() if c <= face]
            cached = induced(self.result, keep)
            self._restrictions[face] = cached
        return cached

    def vertex_over(self, base_vertex: int) -> int:
        """The unique result vertex carried by a base vertex."""
        target = frozenset({base_vertex})
        found = [v for v, c in self.vertex_carrier.items() if c == target]
        if len(found) != 1:
            raise ComplexError(f"{len(found)} subdivision vertices are carried by base vertex {base_vertex}")
        return found[0]


def carrier_of(sub: Subdivision, s: Iterable[int]) -> Simplex:
    s = frozenset(s)
    if not contains(sub.result, s):
        raise SimplexNotInComplex(f"simplex {sorted(s)} is not in the subdivision")
    if sub.carrier_table is not None and s in sub.carrier_table:
        return sub.carrier_table[s]
    return frozenset().union(*(sub.vertex_carrier[v] for v in s)) if s else EMPTY


def identity(complex: Complex) -> Subdivision:
    vc = {v: frozenset({v}) for v in complex.vertices}
    return Subdivision(complex, complex, vc, kind="identity", iterations=0)


def _relabelled(labels: Iterable[Any], color_of) -> tuple[dict[Any, int], list[Vertex]]:
    ordered = sorted(set(labels))
    ids = {label: i for i, label in enumerate(ordered)}
    return ids, [Vertex(i, color_of(label), label) for i, label in enumerate(ordered)]


def barycentric(complex: Complex, colors: str = "none") -> Subdivision:
    """Vertices are the nonempty simplexes; facets are maximal inclusion chains.

    ``colors="none"`` leaves result colors undefined; ``colors="naive"`` gives
    each barycenter the least color of its simplex, which is not a proper
    coloring and exists to exercise the validator.
    """
    if colors not in ("none", "naive"):
        raise ValueError(f"unknown barycentric coloring {colors!r}")
    faces = list(complex.faces())

    def color_of(label: BaryLabel) -> int | None:
        if colors == "none":
            return None
        cs = [complex.color(v) for v in label.simplex]
        return None if None in cs else min(cs)

    ids, vertices = _relabelled((BaryLabel(tuple(sorted(f))) for f in faces), color_of)
    facets = []
    for f in complex.facets:
        for order in permutations(sorted(f)):
            chain = [BaryLabel(tuple(sorted(order[: k + 1]))) for k in range(len(order))]
            facets.append([ids[label] for label in chain])
    result = build_complex(vertices, facets)
    vc = {ids[lab]: frozenset(lab.simplex) for lab in ids}
    return Subdivision(complex, result, vc, kind="bary", iterations=1)


def _ch_facets(complex: Complex, facet: Simplex) -> list[tuple[tuple[int, Simplex], ...]]:
    """All full-color tuples ((i, sigma_i), ...) over one base facet.

    Direct backtracking over the two defining conditions, checked pairwise:
    faces are totally ordered by inclusion, and color j in sigma_i forces
    sigma_j contained in sigma_i.
    """
    by_color = {complex.color(v): v for v in facet}
    order = sorted(by_color)
    faces = [frozenset(c) for k in range(1, len(facet) + 1) for c in combinations(sorted(facet), k)]
    options = {i: [f for f in faces if by_color[i] in f] for i in order}
    face_colors = {f: frozenset(complex.color(v) for v in f) for f in faces}

    def compatible(i: int, si: Simplex, j: int, sj: Simplex) -> bool:
        if not (si <= sj or sj <= si):
            return False
        if j in face_colors[si] and not sj <= si:
            return False
        if i in face_colors[sj] and not si <= sj:
            return False
        return True

    out: list[tuple[tuple[int, Simplex], ...]] = []
    chosen: list[tuple[int, Simplex]] = []

    def extend(k: int) -> None:
        if k == len(order):
            out.append(tuple(chosen))
            return
        i = order[k]
        for si in options[i]:
            if all(compatible(i, si, j, sj) for j, sj in chosen):
                chosen.append((i, si))
                extend(k + 1)
                chosen.pop()

    extend(0)
    return out


def chromatic_subdivision(complex: Complex) -> Subdivision:
    """One layer of the standard chromatic subdivision, glued facet-wise by label."""
    if not is_chromatic(complex):
        raise NotChromaticError("standard chromatic subdivision needs a chromatic complex")
    labels = set()
    for f in complex.faces():
        for v in f:
            labels.add(ChromLabel(complex.color(v), tuple(sorted(f))))
    ids, vertices = _relabelled(labels, lambda lab: lab.color)
    facets = []
    for facet in complex.facets:
        for tup in _ch_facets(complex, facet):
            facets.append([ids[ChromLabel(i, tuple(sorted(s)))] for i, s in tup])
    result = build_complex(vertices, facets)
    vc = {ids[lab]: frozenset(lab.face) for lab in ids}
    return Subdivision(complex, result, vc, kind="ch", iterations=1)


def iterate_ch(complex: Complex, n: int) -> Subdivision:
    if n < 0:
        raise ValueError("iteration count must be >= 0")
    sub = identity(complex)
    if n and not is_chromatic(complex):
        raise NotChromaticError("standard chromatic subdivision needs a chromatic complex")
    for _ in range(n):
        layer = chromatic_subdivision(sub.result)
        carrier = {
            v: frozenset().union(*(sub.vertex_carrier[w] for w in c))
            for v, c in layer.vertex_carrier.items()
        }
        sub = Subdivision(complex, layer.result, carrier, kind="ch", iterations=sub.iterations + 1)
    return sub


# -- validation --------------------------------------------------------------


@dataclass
class SubdivisionReport:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


def verify_chromatic_subdivision(sub: Subdivision, limit: int = 20) -> SubdivisionReport:
    """Check properness, carrier monotonicity, and color/dimension per base simplex."""
    problems: list[str] = []
    result, base = sub.result, sub.base

    for f in sorted(result.facets, key=sorted):
        cs = [result.color(v) for v in f]
        if None in cs or len(set(cs)) != len(cs):
            problems.append(f"facet {sorted(f)} is not properly colored: {cs}")
            if len(problems) >= limit:
                break

    for s in result.faces():
        car = carrier_of(sub, s)
        if not contains(base, car):
            problems.append(f"carrier {sorted(car)} of {sorted(s)} is not a base simplex")
        for face in combinations(sorted(s), len(s) - 1):
            if face and not carrier_of(sub, face) <= car:
                problems.append(f"carrier not monotone on {list(face)} < {sorted(s)}")
        if len(problems) >= limit:
            break

    for sigma in base.faces():
        part = sub.restricted(sigma)
        got = colors_of(part.vertices, result)
        want = colors_of(sigma, base)
        if got != want:
            problems.append(f"Div({sorted(sigma)}) has colors {sorted(got, key=str)}, base has {sorted(want, key=str)}")
        if not part.is_pure or part.dim != len(sigma) - 1:
            problems.append(f"Div({sorted(sigma)}) is not pure of dimension {len(sigma) - 1}")
        if len(problems) >= limit:
            break
    return SubdivisionReport(not problems, problems)


# -- carrier table exchange format -------------------------------------------


def carriers_to_json(sub: Subdivision) -> dict:
    rows = [
        {"simplex": sorted(s), "carrier": sorted(carrier_of(sub, s))}
        for s in sorted(sub.result.faces(), key=lambda x: (len(x), sorted(x)))
    ]
    return {"carriers": rows}


def from_tables(base: Complex, result: Complex, carriers: Mapping[str, Any], kind: str = "custom") -> Subdivision:
    try:
        table = {frozenset(r["simplex"]): frozenset(r["carrier"]) for r in carriers["carriers"]}
    except (KeyError, TypeError) as exc:
        raise ComplexError(f"malformed carrier table: {exc!r}") from exc
    vc = {}
    for v in result.vertices:
        c = table.get(frozenset({v}))
        if c is None:
            raise ComplexError(f"carrier table has no entry for vertex {v}")
        vc[v] = c
    return Subdivision(base, result, vc, kind=kind, carrier_table=table)
