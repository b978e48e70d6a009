import json

import pytest
from hypothesis import given, strategies as st

from vdfkit.search import (
    EolInstance,
    FalsePositive,
    RsvlInstance,
    Sink,
    check_eol_solution,
    check_eoml_solution,
    check_rsvl_solution,
    check_svl_solution,
    instance_from_json,
    keyed_linear_family,
    line_eol_instance,
    line_eoml_instance,
    planted_instance,
    shift_source,
    solution_from_json,
    solution_to_json,
    toy_linear_instance,
    walk,
)


def test_toy_linear_walk():
    inst = toy_linear_instance(8, 5, 3, 10)
    assert walk(inst, 10) == 53
    assert walk(inst, 0) == 3
    assert check_rsvl_solution(inst, Sink(53))
    assert not check_rsvl_solution(inst, Sink(52))
    assert check_svl_solution(inst, 53)


def test_verifier_range_checks():
    inst = toy_linear_instance(8, 5, 3, 10)
    assert not inst.V(53, 11) and not inst.V(3, 0) and not inst.V(256, 10)
    with pytest.raises(ValueError):
        toy_linear_instance(8, 5, 256, 10)
    with pytest.raises(ValueError):
        toy_linear_instance(4, 1, 0, 17)


@pytest.mark.parametrize("n,c,v0,T", [(4, 3, 0, 16), (8, 5, 3, 10), (10, 7, 99, 300), (12, 1001, 5, 4096)])
def test_promise_exhaustive(n, c, v0, T):
    inst = toy_linear_instance(n, c, v0, T)
    line = [walk(inst, i) for i in range(T + 1)]
    steps = range(1, T + 1) if T <= 300 else range(1, T + 1, 97)
    for i in steps:
        for v in range(2 ** n):
            assert inst.V(v, i) == (v == line[i])


def test_planted_false_positive():
    base = toy_linear_instance(8, 5, 3, 10)
    inst = planted_instance(base, [(200, 4)])
    assert inst.false_positive_budget == 1
    assert check_rsvl_solution(inst, FalsePositive(200, 4))
    assert not check_rsvl_solution(inst, FalsePositive(walk(inst, 4), 4))
    assert not check_rsvl_solution(base, FalsePositive(200, 4))
    assert not check_rsvl_solution(inst, FalsePositive(200, 11))


def test_shift_source_example():
    inst = toy_linear_instance(8, 5, 3, 10)
    s = shift_source(inst)
    assert s.v0 == 0
    assert walk(s, 10) == 53 ^ 3 == 54
    assert check_rsvl_solution(s, Sink(walk(s, 10)))


def test_shift_of_zero_source_is_identity():
    inst = toy_linear_instance(8, 5, 0, 10)
    s = shift_source(inst)
    assert all(walk(s, i) == walk(inst, i) for i in range(11))


def test_uncorrected_shift_diverges():
    inst = toy_linear_instance(8, 5, 3, 10)
    v0 = inst.v0
    literal = RsvlInstance(8, 10, 0, lambda v: inst.S(v ^ v0), lambda v, i: inst.V(v ^ v0, i))
    assert not all(literal.V(walk(literal, i), i) for i in (1, 2))
    fixed = shift_source(inst)
    assert all(fixed.V(walk(fixed, i), i) for i in range(1, 11))


@given(st.integers(1, 255), st.integers(0, 255), st.integers(1, 200))
def test_shift_correspondence(c, v0, T):
    inst = toy_linear_instance(8, c, v0, T)
    s = shift_source(inst)
    for i in range(T + 1):
        assert walk(s, i) == walk(inst, i) ^ v0
    sink = walk(inst, T)
    assert check_rsvl_solution(s, Sink(sink ^ v0)) and check_rsvl_solution(inst, Sink(sink))


@given(st.integers(4, 12), st.integers(0, 2 ** 12 - 1), st.integers(1, 16))
def test_honest_sink_always_solves(n, v0, T):
    inst = keyed_linear_family(n, b"k").instance(v0 % 2 ** n, T)
    assert check_rsvl_solution(inst, Sink(walk(inst, T)))


def test_serialization_roundtrip():
    inst = planted_instance(toy_linear_instance(8, 5, 3, 10), [(200, 4)])
    for obj in (inst, shift_source(inst.__class__(8, 10, 3, inst.successor, inst.verifier,
                                                  descriptor=toy_linear_instance(8, 5, 3, 10).descriptor))):
        d = json.loads(json.dumps(obj.to_json()))
        back = instance_from_json(d)
        assert [walk(back, i) for i in range(11)] == [walk(obj, i) for i in range(11)]
    back = instance_from_json(inst.to_json())
    assert check_rsvl_solution(back, FalsePositive(200, 4))
    for sol in (Sink(53), FalsePositive(200, 4)):
        assert solution_from_json(json.loads(json.dumps(solution_to_json(sol)))) == sol
    with pytest.raises(ValueError):
        solution_from_json({"nothing": 1})
    with pytest.raises(ValueError):
        instance_from_json({"family": "mystery", "n": 4, "T": 1, "v0_hex": "00"})


# -- EOL / EOML ------------------------------------------------------------


def test_eol_line_of_three():
    inst = line_eol_instance(4, [0, 1, 3])
    sols = [v for v in range(16) if check_eol_solution(inst, v)]
    assert sols == [3]


def test_eol_preconditions():
    with pytest.raises(ValueError):
        EolInstance(4, lambda v: v, lambda v: v)
    with pytest.raises(ValueError):
        EolInstance(4, lambda v: v + 1, lambda v: 1)


def test_eoml_honest_and_planted_false_source():
    honest = line_eoml_instance(4, [0, 1, 3])
    assert [v for v in range(16) if check_eoml_solution(honest, v)] == [3]
    planted = line_eoml_instance(4, [0, 1, 3], meter={9: 1})
    assert check_eoml_solution(planted, 9)
    miscount = line_eoml_instance(4, [0, 1, 3], meter={1: 5})
    assert check_eoml_solution(miscount, 1) or check_eoml_solution(miscount, 0)


@given(st.lists(st.integers(1, 15), min_size=1, max_size=10, unique=True))
def test_eoml_finds_every_eol_solution(tail):
    line = [0] + tail
    eol = line_eol_instance(4, line)
    eoml = line_eoml_instance(4, line)
    for v in range(16):
        if check_eol_solution(eol, v):
            assert check_eoml_solution(eoml, v)
