"""Abstract chromatic simplicial complexes.

A complex is stored by its facets; membership of any other simplex is decided
by a subset test against the facets, so face lists are only materialized when
something (homology, verification) asks for them.

Simplexes are ``frozenset`` of integer vertex ids. The empty simplex belongs to
every complex, and ``link(K, EMPTY) == K``.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Any

from .errors import ComplexError, SimplexNotInComplex

Simplex = frozenset[int]
EMPTY: Simplex = frozenset()


@dataclass(frozen=True)
class Vertex:
    id: int
    color: int | None
    label: Any = None


def simplex(ids: Iterable[int]) -> Simplex:
    return frozenset(int(i) for i in ids)


def maximal(simplexes: Iterable[Simplex]) -> set[Simplex]:
    """Keep only the simplexes not strictly contained in another one."""
    kept: list[Simplex] = []
    by_vertex: dict[int, set[int]] = {}
    for s in sorted(set(simplexes), key=len, reverse=True):
        if not s:
            continue
        it = iter(s)
        holders = set(by_vertex.get(next(it), ()))
        for v in it:
            if not holders:
                break
            holders &= by_vertex.get(v, set())
        if holders:
            continue
        idx = len(kept)
        kept.append(s)
        for v in s:
            by_vertex.setdefault(v, set()).add(idx)
    return set(kept)


class Complex:
    """An immutable abstract simplicial complex with an optional coloring.

    ``vertices`` maps vertex id to :class:`Vertex`; it holds exactly the
    vertices of the complex. Complexes built from user data have dense ids
    ``0..V-1``; subcomplexes (links, stars, restrictions) keep the ids of the
    complex they were cut from.
    """

    def __init__(self, vertices: Mapping[int, Vertex], facets: Iterable[Simplex]):
        self.vertices: Mapping[int, Vertex] = dict(vertices)
        self.facets: frozenset[Simplex] = frozenset(facets)

    @classmethod
    def _sub(cls, parent: Complex, facets: Iterable[Simplex]) -> Complex:
        facets = list(facets)
        used = set().union(*facets) if facets else set()
        return cls({v: parent.vertices[v] for v in sorted(used)}, facets)

    def __repr__(self) -> str:
        return f"Complex(vertices={len(self.vertices)}, facets={len(self.facets)}, dim={self.dim})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return self.facets == other.facets and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.facets)

    def __contains__(self, s: Iterable[int]) -> bool:
        return contains(self, frozenset(s))

    @cached_property
    def _index(self) -> dict[int, frozenset[int]]:
        index: dict[int, set[int]] = {}
        for i, f in enumerate(self._facet_list):
            for v in f:
                index.setdefault(v, set()).add(i)
        return {v: frozenset(ix) for v, ix in index.items()}

    @cached_property
    def _facet_list(self) -> list[Simplex]:
        return sorted(self.facets, key=lambda f: sorted(f))

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    @property
    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1

    def color(self, v: int) -> int | None:
        return self.vertices[v].color

    def faces(self, k: int | None = None) -> Iterator[Simplex]:
        """All nonempty simplexes (of dimension ``k`` if given), each once."""
        seen: set[Simplex] = set()
        sizes = None if k is None else (k + 1,)
        for f in self._facet_list:
            for size in sizes or range(1, len(f) + 1):
                if size > len(f):
                    continue
                for face in combinations(sorted(f), size):
                    fs = frozenset(face)
                    if fs not in seen:
                        seen.add(fs)
                        yield fs

    def cofacets(self, s: Simplex) -> list[Simplex]:
        """Facets containing ``s``."""
        if not s:
            return list(self._facet_list)
        it = iter(s)
        ix = self._index.get(next(it))
        if ix is None:
            return []
        for v in it:
            ix = ix & self._index.get(v, frozenset())
            if not ix:
                return []
        return [self._facet_list[i] for i in sorted(ix)]


def build_complex(vertices: Sequence[Vertex], facets: Iterable[Iterable[int]]) -> Complex:
    """Validate and build a complex; non-maximal facets are absorbed.

    Vertices not covered by any facet become 0-dimensional facets.
    """
    table: dict[int, Vertex] = {}
    for v in vertices:
        if v.id < 0:
            raise ComplexError(f"negative vertex id {v.id}")
        if v.id in table:
            raise ComplexError(f"duplicate vertex id {v.id}")
        table[v.id] = v
    fs = []
    for f in facets:
        s = simplex(f)
        missing = sorted(s - table.keys())
        if missing:
            raise ComplexError(f"facet {sorted(s)} references unknown vertex ids {missing}")
        fs.append(s)
    covered = set().union(*fs) if fs else set()
    fs.extend(frozenset({v}) for v in table if v not in covered)
    return Complex(dict(sorted(table.items())), maximal(fs))


def simplex_complex(n: int, colors: Sequence[int] | None = None) -> Complex:
    """The standard n-simplex with vertices 0..n, vertex i colored i."""
    colors = list(range(n + 1)) if colors is None else list(colors)
    return build_complex([Vertex(i, colors[i]) for i in range(n + 1)], [range(n + 1)])


def contains(complex: Complex, s: Iterable[int]) -> bool:
    s = frozenset(s)
    return not s or bool(complex.cofacets(s))


def _require(complex: Complex, s: Simplex) -> None:
    if not contains(complex, s):
        raise SimplexNotInComplex(f"simplex {sorted(s)} is not in the complex")


def skeleton(complex: Complex, n: int) -> Complex:
    if n < 0:
        raise ValueError("skeleton dimension must be >= 0")
    out: set[Simplex] = set()
    for f in complex.facets:
        if len(f) <= n + 1:
            out.add(f)
        else:
            out.update(frozenset(c) for c in combinations(sorted(f), n + 1))
    return Complex._sub(complex, out)


def star(complex: Complex, s: Iterable[int]) -> Complex:
    s = frozenset(s)
    _require(complex, s)
    return Complex._sub(complex, complex.cofacets(s))


def link(complex: Complex, s: Iterable[int]) -> Complex:
    """Simplexes disjoint from ``s`` whose union with ``s`` is in the complex."""
    s = frozenset(s)
    _require(complex, s)
    return Complex._sub(complex, [f - s for f in complex.cofacets(s) if f != s])


def is_subcomplex(a: Complex, b: Complex) -> bool:
    return all(contains(b, f) for f in a.facets)


def colors_of(s: Iterable[int], complex: Complex) -> set[int | None]:
    return {complex.vertices[v].color for v in s}


def is_chromatic(complex: Complex) -> bool:
    for f in complex.facets:
        colors = [complex.vertices[v].color for v in f]
        if None in colors or len(set(colors)) != len(colors):
            return False
    return True


def induced(complex: Complex, keep: Iterable[int]) -> Complex:
    """The full subcomplex on the vertex set ``keep``."""
    keep = frozenset(keep)
    return Complex._sub(complex, maximal(f & keep for f in complex.facets))


# -- JSON exchange format ---------------------------------------------------


def label_to_json(label: Any) -> Any:
    to_json = getattr(label, "to_json", None)
    return to_json() if to_json else label


def to_json(complex: Complex) -> dict:
    vertices = []
    for v in sorted(complex.vertices.values(), key=lambda x: x.id):
        row: dict[str, Any] = {"id": v.id, "color": v.color}
        if v.label is not None:
            row["label"] = label_to_json(v.label)
        vertices.append(row)
    facets = sorted(sorted(f) for f in complex.facets)
    return {"vertices": vertices, "facets": facets}


def from_json(data: Mapping[str, Any], label_decoder=None) -> Complex:
    try:
        rows = data["vertices"]
        facets = data["facets"]
        vertices = []
        for row in rows:
            label = row.get("label")
            if label is not None and label_decoder is not None:
                label = label_decoder(label)
            color = row.get("color")
            if color is not None and int(color) < 0:
                raise ComplexError(f"vertex {row['id']} has negative color {color}")
            vertices.append(Vertex(int(row["id"]), None if color is None else int(color), label))
        return build_complex(vertices, [[int(i) for i in f] for f in facets])
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, ComplexError):
            raise
        raise ComplexError(f"malformed complex JSON: {exc!r}") from exc
