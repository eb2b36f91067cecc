"""Reduced simplicial homology over GF(2), used as a connectivity certificate.

Genuine k-connectivity is a homotopy property. Here it is proxied by the
vanishing of reduced Betti numbers b~_0..b~_k over GF(2). For k <= 0 the proxy
is exact (nonempty, path connected); for k >= 1 a passing check is reported as
``proxy_only``.

Boundary matrices are stored column-wise as Python ints used as bit vectors,
and ranks come from pivot-based Gaussian elimination.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from itertools import combinations

from .complex import EMPTY, Complex, Simplex, link
from .errors import NotPureError


@dataclass
class BoundaryMatrix:
    """The GF(2) boundary map from k-simplexes to (k-1)-simplexes."""

    k: int
    rows: list[Simplex]
    cols: list[Simplex]
    columns: list[int]  # bit r of columns[c] is entry (r, c)

    def rank(self) -> int:
        return gf2_rank(self.columns)


def gf2_rank(columns: Sequence[int]) -> int:
    pivots: dict[int, int] = {}
    for col in columns:
        while col:
            top = col.bit_length() - 1
            if top in pivots:
                col ^= pivots[top]
            else:
                pivots[top] = col
                break
    return len(pivots)


def simplexes_by_dim(complex: Complex) -> list[list[Simplex]]:
    out: list[list[Simplex]] = [[] for _ in range(complex.dim + 1)]
    for s in complex.faces():
        out[len(s) - 1].append(s)
    for layer in out:
        layer.sort(key=sorted)
    return out


def boundary_matrices(complex: Complex) -> list[BoundaryMatrix]:
    """Boundary matrices for k = 1..dim."""
    layers = simplexes_by_dim(complex)
    mats = []
    for k in range(1, len(layers)):
        index = {s: i for i, s in enumerate(layers[k - 1])}
        cols = []
        for s in layers[k]:
            bits = 0
            for face in combinations(sorted(s), k):
                bits |= 1 << index[frozenset(face)]
            cols.append(bits)
        mats.append(BoundaryMatrix(k, layers[k - 1], layers[k], cols))
    return mats


def composes_to_zero(lower: BoundaryMatrix, upper: BoundaryMatrix) -> bool:
    """True iff lower . upper = 0 over GF(2)."""
    for col in upper.columns:
        acc = 0
        bits = col
        while bits:
            low = bits & -bits
            acc ^= lower.columns[low.bit_length() - 1]
            bits ^= low
        if acc:
            return False
    return True


def betti_gf2(complex: Complex) -> list[int]:
    """Reduced Betti numbers b~_0..b~_dim over GF(2).

    The empty complex (no vertices) has reduced homology only in degree -1 and
    gets an empty vector here; see :func:`is_homologically_k_connected`.
    """
    if not complex.vertices:
        return []
    layers = simplexes_by_dim(complex)
    ranks = [1]  # augmentation map, rank 1 on a nonempty complex
    ranks += [m.rank() for m in boundary_matrices(complex)]
    ranks.append(0)
    return [len(layers[k]) - ranks[k] - ranks[k + 1] for k in range(len(layers))]


def euler_characteristic(complex: Complex) -> int:
    return sum((-1) ** k * len(layer) for k, layer in enumerate(simplexes_by_dim(complex)))


def is_homologically_k_connected(complex: Complex, k: int) -> bool:
    if k < -1:
        return True
    if not complex.vertices:
        return False
    betti = betti_gf2(complex)
    return all(b == 0 for b in betti[: k + 1])


@dataclass
class LinkResult:
    simplex: Simplex
    required: int
    betti: list[int]
    passed: bool
    proxy_only: bool

    def to_json(self) -> dict:
        return {
            "simplex": sorted(self.simplex),
            "required_connectivity": self.required,
            "betti": self.betti,
            "pass": self.passed,
            "proxy_only": self.proxy_only,
        }


@dataclass
class ConnectivityReport:
    betti: list[int]
    homologically_connected_to: int
    links: list[LinkResult] = field(default_factory=list)

    @property
    def link_connected(self) -> bool:
        return all(r.passed for r in self.links)

    @property
    def failures(self) -> list[LinkResult]:
        return [r for r in self.links if not r.passed]

    @property
    def proxy_only(self) -> bool:
        return any(r.proxy_only for r in self.links)

    def to_json(self) -> dict:
        return {
            "betti": self.betti,
            "homologically_k_connected": self.homologically_connected_to,
            "link_connected": self.link_connected,
            "proxy_only": self.proxy_only,
            "links": [r.to_json() for r in self.links],
        }


def connectivity_degree(betti: Sequence[int], nonempty: bool = True) -> int:
    """Largest k with b~_0..b~_k all zero; -1 for a nonempty complex with b~_0 != 0."""
    if not nonempty:
        return -2
    k = -1
    for b in betti:
        if b:
            break
        k += 1
    return k


def check_link_connected(complex: Complex) -> ConnectivityReport:
    """Check every link, the empty simplex included, at its required degree."""
    if not complex.is_pure:
        raise NotPureError("link-connectivity is defined for pure complexes")
    n = complex.dim
    betti = betti_gf2(complex)
    report = ConnectivityReport(betti, connectivity_degree(betti, bool(complex.vertices)))
    for s in [EMPTY, *sorted(complex.faces(), key=lambda x: (len(x), sorted(x)))]:
        required = n - (len(s) - 1) - 2
        lk = link(complex, s)
        lb = betti_gf2(lk)
        report.links.append(
            LinkResult(s, required, lb, is_homologically_k_connected(lk, required), required >= 1)
        )
    return report
