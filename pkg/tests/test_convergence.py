import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_agreement import complex as cx
from chromatic_agreement.complex import EMPTY
from chromatic_agreement.convergence import (
    AgreementInput,
    ProcessRoundState,
    chain_agree,
    choose_start_vertex,
    compute_core,
    convergence_complex,
    decision_check,
    update_view,
)
from chromatic_agreement.errors import InvariantViolation, NoStartVertex

from agreement_space import TASK, contract_violations, structures, triples

FULL = frozenset({0, 1, 2})
color = TASK.color


def vertex(c, face):
    """Package id of the Ch(2-simplex) vertex of color ``c`` seeing ``face``."""
    return next(
        v.id for v in TASK.div.result.vertices.values() if v.color == c and set(v.label.face) == set(face)
    )


def test_compute_core():
    assert compute_core([{1, 2, 3}, {2, 3}, {2, 3, 4}]) == {2, 3}
    assert compute_core([{1, 2}]) == {1, 2}
    assert compute_core([{1}, {2}]) == EMPTY
    with pytest.raises(ValueError):
        compute_core([])


def test_convergence_complex():
    assert convergence_complex([EMPTY], [FULL], TASK) == TASK.div.result
    corner = TASK.corner(0)
    lk = convergence_complex([{corner}], [FULL], TASK)
    assert {v.color for v in lk.vertices.values()} <= {1, 2}
    solo = convergence_complex([EMPTY], [{1}], TASK)
    assert set(solo.vertices) == {TASK.corner(1)}
    with pytest.raises(InvariantViolation):
        convergence_complex([{vertex(0, FULL)}], [{0, 1}], TASK)


def test_choose_start_vertex():
    assert choose_start_vertex(TASK.div.result, 0) == min(
        u for u in TASK.div.result.vertices if color(u) == 0
    )
    single = cx.induced(TASK.div.result, [TASK.corner(2)])
    assert choose_start_vertex(single, 2) == TASK.corner(2)
    with pytest.raises(NoStartVertex):
        choose_start_vertex(single, 0)


def test_decision_check():
    u0, x1 = vertex(0, {0, 1}), vertex(1, {0, 1})
    assert decision_check([{u0, x1}, {u0}], 0, color) == u0
    assert decision_check([{x1}, {x1, vertex(2, FULL)}], 0, color) is None
    assert decision_check([{u0}, {x1}], 0, color) is None
    assert decision_check([], 0, color) is None
    with pytest.raises(InvariantViolation):
        decision_check([{vertex(0, {0}), vertex(0, FULL)}], 0, color)


def test_update_view():
    x1, y2, d0 = vertex(1, FULL), vertex(2, FULL), vertex(0, FULL)
    assert update_view([({x1, y2}, {d0})], 0, color) == {x1, y2}
    a, b = vertex(1, {1, 2}), vertex(2, {1, 2})
    assert update_view([({a}, EMPTY), ({a, b}, EMPTY)], 0, color) == {a, b}
    assert update_view([({d0, x1}, EMPTY)], 0, color) == {x1}
    with pytest.raises(InvariantViolation):
        update_view([({vertex(1, {1})}, EMPTY), ({vertex(1, FULL)}, EMPTY)], 1, color)
    with pytest.raises(InvariantViolation):
        update_view([({vertex(1, {1}), vertex(2, {0, 2})}, EMPTY)], 0, color, within=TASK.div.result)


def test_solo_class_keeps_its_vertex():
    t = AgreementInput(vertex(0, FULL), EMPTY, FULL)
    out = chain_agree([[0]], {0: t}, TASK.link)
    assert out[0].simplex == {t.vertex} and out[0].refined_core == EMPTY


def test_two_nested_classes():
    inputs = {
        0: AgreementInput(TASK.corner(0), EMPTY, frozenset({0})),
        1: AgreementInput(TASK.corner(1), EMPTY, frozenset({1})),
    }
    out = chain_agree([[0], [1]], inputs, TASK.link)
    assert out[0].simplex <= out[1].simplex
    assert out[1].simplex in TASK.link(EMPTY, frozenset({0, 1}))


def test_one_class_of_three_contains_every_start_vertex():
    starts = [vertex(0, FULL), vertex(1, FULL), vertex(2, FULL)]
    inputs = {p: AgreementInput(v, EMPTY, FULL) for p, v in enumerate(starts)}
    out = chain_agree([[0, 1, 2]], inputs, TASK.link)
    assert out[0].simplex == set(starts)
    assert len({o for o in out.values()}) == 1


def test_round_state_json_round_trip():
    st_ = ProcessRoundState(1, 2, FULL, frozenset({3}), frozenset({3}), FULL, 4, frozenset({4, 5}), None, 4)
    assert ProcessRoundState.from_json(st_.to_json()) == st_


def test_chain_agree_contract_two_processes():
    n = 0
    for classes, inputs in structures(max_processes=2):
        out = chain_agree(classes, inputs, TASK.link)
        assert not contract_violations(classes, inputs, out), (classes, inputs)
        n += 1
    assert n > 1000


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_chain_agree_contract_without_ordering_assumptions(data):
    procs = data.draw(st.sets(st.integers(0, 2), min_size=1))
    inputs = {p: data.draw(st.sampled_from(triples(p))) for p in sorted(procs)}
    order = data.draw(st.permutations(sorted(procs)))
    cuts = data.draw(st.sets(st.integers(1, len(order) - 1))) if len(order) > 1 else set()
    bounds = [0, *sorted(cuts), len(order)]
    classes = [sorted(order[a:b]) for a, b in zip(bounds, bounds[1:])]
    out = chain_agree(classes, inputs, TASK.link)
    assert not contract_violations(classes, inputs, out)


@pytest.mark.slow
def test_chain_agree_contract_full_space():
    for classes, inputs in structures(inclusion_ordered=False):
        out = chain_agree(classes, inputs, TASK.link)
        assert not contract_violations(classes, inputs, out), (classes, inputs)
