"""Independent reference constructions used to cross-check the package.

Nothing here imports the subdivision or execution code; complexes are plain
sets of frozensets of hashable labels.
"""

from __future__ import annotations

from itertools import combinations, permutations, product
from math import comb


def fubini(n: int) -> int:
    """Number of ordered set partitions of an n-set."""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


def ordered_partitions(items):
    items = list(items)
    if not items:
        yield ()
        return
    for size in range(1, len(items) + 1):
        for first in combinations(items, size):
            rest = [x for x in items if x not in first]
            for tail in ordered_partitions(rest):
                yield (frozenset(first), *tail)


def ch_by_partitions(facets, color):
    """One Ch layer: each ordered partition of a facet's vertices is one new facet.

    New vertex labels are ``(color, frozenset of base vertices seen)``; a
    member of block k sees blocks 1..k.
    """
    out = set()
    for f in facets:
        for part in ordered_partitions(sorted(f, key=repr)):
            seen: frozenset = frozenset()
            simplex = []
            for block in part:
                seen = seen | block
                simplex.extend((color(v), seen) for v in block)
            out.add(frozenset(simplex))
    return out


def ch_iterated(n: int, times: int):
    """Facets of Ch^times of the n-simplex, labels nested per layer."""
    facets = {frozenset(range(n + 1))}
    color = lambda v: v  # noqa: E731
    for _ in range(times):
        facets = ch_by_partitions(facets, color)
        color = lambda v: v[0]  # noqa: E731
    return facets


def ch_by_conditions(n: int):
    """Ch of the n-simplex straight from the two defining conditions.

    A facet assigns to each color i a face sigma_i containing i, such that the
    sigma_i form a chain and i in sigma_j implies sigma_i is inside sigma_j.
    """
    faces = [frozenset(c) for k in range(1, n + 2) for c in combinations(range(n + 1), k)]
    facets = set()
    choices = [[s for s in faces if i in s] for i in range(n + 1)]
    for tup in product(*choices):
        ok = all(a <= b or b <= a for a, b in combinations(tup, 2)) and all(
            tup[i] <= tup[j] for i in range(n + 1) for j in range(n + 1) if i in tup[j]
        )
        if ok:
            facets.add(frozenset((i, s) for i, s in enumerate(tup)))
    return facets


def bary_chains(n: int):
    """Facets of Bary(n-simplex): maximal chains of faces, one per permutation."""
    out = set()
    for perm in permutations(range(n + 1)):
        out.add(frozenset(frozenset(perm[: k + 1]) for k in range(n + 1)))
    return out


def vertices_of(facets):
    return set().union(*facets) if facets else set()


def all_faces(facets, include_empty=False):
    out = set()
    for f in facets:
        lo = 0 if include_empty else 1
        for k in range(lo, len(f) + 1):
            out.update(frozenset(c) for c in combinations(f, k))
    return out


def is_member(facets, s) -> bool:
    return any(s <= f for f in facets)


def link_facets(facets, s):
    """Maximal simplexes of the link of ``s``, straight from the definition."""
    cands = {f - s for f in facets if s <= f} - {frozenset()}
    return {t for t in cands if not any(t < u for u in cands)}


def euler(facets) -> int:
    return sum((-1) ** (len(f) - 1) for f in all_faces(facets))
