import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_agreement import complex as cx
from chromatic_agreement.complex import EMPTY, Vertex, build_complex
from chromatic_agreement.errors import ComplexError, SimplexNotInComplex
from chromatic_agreement.subdivision import chromatic_subdivision

from oracles import all_faces, link_facets


def hollow_triangle():
    return build_complex([Vertex(i, i) for i in range(3)], [[0, 1], [1, 2], [0, 2]])


def test_single_simplex_is_pure_and_chromatic():
    k = cx.simplex_complex(2)
    assert k.is_pure and k.dim == 2 and cx.is_chromatic(k)
    assert k.facets == {frozenset({0, 1, 2})}


def test_repeated_color_is_not_chromatic():
    k = build_complex([Vertex(0, 0), Vertex(1, 0)], [[0, 1]])
    assert not cx.is_chromatic(k)


def test_hollow_triangle():
    k = hollow_triangle()
    assert len(k.facets) == 3 and k.dim == 1
    assert not cx.contains(k, {0, 1, 2})
    assert cx.contains(k, {0, 1})
    assert cx.contains(k, EMPTY)


def test_non_maximal_facets_are_absorbed():
    k = build_complex([Vertex(i, i) for i in range(3)], [[0, 1, 2], [0, 1], [2]])
    assert k.facets == {frozenset({0, 1, 2})}


def test_uncovered_vertex_becomes_a_facet():
    k = build_complex([Vertex(0, 0), Vertex(1, 1), Vertex(2, 2)], [[0, 1]])
    assert frozenset({2}) in k.facets and not k.is_pure


@pytest.mark.parametrize(
    "vertices, facets",
    [
        ([Vertex(0, 0), Vertex(0, 1)], [[0]]),
        ([Vertex(0, 0)], [[0, 1]]),
        ([Vertex(-1, 0)], [[-1]]),
    ],
    ids=["duplicate-id", "dangling-id", "negative-id"],
)
def test_build_errors(vertices, facets):
    with pytest.raises(ComplexError):
        build_complex(vertices, facets)


def test_skeleton():
    assert cx.skeleton(cx.simplex_complex(2), 1).facets == hollow_triangle().facets
    assert cx.skeleton(cx.simplex_complex(2), 2) == cx.simplex_complex(2)
    k1 = cx.skeleton(cx.simplex_complex(3), 1)
    assert len(k1.facets) == 6 and all(len(f) == 2 for f in k1.facets)


def test_star():
    d2 = cx.simplex_complex(2)
    assert cx.star(d2, {0}) == d2
    assert cx.star(hollow_triangle(), {0}).facets == {frozenset({0, 1}), frozenset({0, 2})}
    assert cx.star(d2, {0, 1, 2}).facets == d2.facets
    with pytest.raises(SimplexNotInComplex):
        cx.star(hollow_triangle(), {0, 1, 2})


def test_link():
    d2 = cx.simplex_complex(2)
    assert cx.link(d2, {0}).facets == {frozenset({1, 2})}
    assert cx.link(d2, {0, 1}).facets == {frozenset({2})}
    assert cx.link(d2, EMPTY) == d2
    assert cx.link(d2, {0, 1, 2}).facets == frozenset()
    with pytest.raises(SimplexNotInComplex):
        cx.link(hollow_triangle(), {0, 1, 2})


def test_link_of_central_vertex_in_ch_avoids_its_color():
    ch = chromatic_subdivision(cx.simplex_complex(2)).result
    central = next(v.id for v in ch.vertices.values() if v.color == 0 and len(v.label.face) == 3)
    lk = cx.link(ch, {central})
    assert {v.color for v in lk.vertices.values()} <= {1, 2}
    assert len(lk.facets) == 6  # the hexagon around an interior vertex


def test_colors_of():
    d2 = cx.simplex_complex(2)
    assert cx.colors_of({0, 1, 2}, d2) == {0, 1, 2}
    assert cx.colors_of({1}, d2) == {1}
    assert cx.colors_of(EMPTY, d2) == set()


def test_faces_enumerates_each_simplex_once():
    faces = list(cx.simplex_complex(3).faces())
    assert len(faces) == len(set(faces)) == 15
    assert sorted(len(f) for f in cx.simplex_complex(3).faces(1)) == [2] * 6


def test_json_round_trip_and_canonical_order():
    k = build_complex([Vertex(i, i % 3) for i in range(4)], [[3, 2], [0, 1, 2]])
    data = cx.to_json(k)
    assert data["facets"] == [[0, 1, 2], [2, 3]]
    assert cx.from_json(data) == k


@pytest.mark.parametrize(
    "data",
    [
        {},
        {"vertices": [{"id": 0, "color": "red"}], "facets": [[0]]},
        {"vertices": [{"id": 0, "color": -1}], "facets": [[0]]},
        {"vertices": [], "facets": [[0]]},
        [1, 2],
    ],
)
def test_from_json_rejects_malformed(data):
    with pytest.raises(ComplexError):
        cx.from_json(data)


# -- properties over random complexes -----------------------------------------------


@st.composite
def complexes(draw, max_vertices=7):
    n = draw(st.integers(1, max_vertices))
    colors = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    facets = draw(
        st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=4), min_size=1, max_size=6)
    )
    return build_complex([Vertex(i, c) for i, c in enumerate(colors)], facets)


@settings(max_examples=150, deadline=None)
@given(complexes(), st.integers(0, 4), st.integers(0, 4))
def test_skeleton_composes_to_min(k, n, m):
    assert cx.skeleton(cx.skeleton(k, n), m).facets == cx.skeleton(k, min(n, m)).facets


@settings(max_examples=150, deadline=None)
@given(complexes(), st.data())
def test_link_and_star_invariants(k, data):
    s = data.draw(st.sampled_from(sorted(all_faces(k.facets), key=sorted)))
    lk = cx.link(k, s)
    assert lk.facets == link_facets(k.facets, s)
    for t in all_faces(lk.facets):
        assert not (t & s) and cx.contains(k, t | s)
    star = cx.star(k, s)
    assert cx.contains(star, s)
    assert all(s <= f for f in star.facets)
    if cx.is_chromatic(k):
        assert not (cx.colors_of(lk.vertices, k) & cx.colors_of(s, k))


@settings(max_examples=150, deadline=None)
@given(complexes(), st.sets(st.integers(0, 7), max_size=4))
def test_contains_matches_subset_of_facet(k, s):
    assert cx.contains(k, s) == any(frozenset(s) <= f for f in k.facets)
