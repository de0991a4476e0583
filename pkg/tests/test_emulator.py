import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bvddmc.btor2 import Bitvec, Builder
from bvddmc.emulator import (ArrayValue, BatchRunner, EvaluationError, Stepper, enumerate_inputs,
                             init_state, input_slots, run, run_enumerated)

from conftest import array_model, corpus_model, counter_model, input_model


def test_counter_least_k():
    assert run(counter_model(5), [], 20) == (5, ("hit",))
    assert run(counter_model(5), [], 4) is None


def test_input_model_table():
    table = run_enumerated(input_model(), 5)
    # 3x + 1 = 0x40 (mod 256) has the unique solution x = 0x15
    assert table.satisfying(1, "target") == {(0x15,)}
    assert table.events() == [(1, "target")]
    assert sum(r is not None for r in table.table.values()) == 1


def test_array_model_table():
    table = run_enumerated(array_model(), 3)
    assert table.satisfying(1, "two") == {(2,)}


def test_constraint_cuts_runs():
    b = Builder()
    x = b.state(Bitvec(8), "x")
    b.next(x, x)
    c = b.state(Bitvec(3), "c")
    b.init(c, b.const(3, 0))
    b.next(c, b.op("inc", c))
    b.constraint(b.op("ult", x, b.const(8, 10)), "small")
    b.bad(b.op("eq", c, b.const(3, 2)), "two")
    table = run_enumerated(b.model, 5)
    assert table.satisfying(2, "two") == {(v,) for v in range(10)}
    assert run(b.model, [50], 5) is None


def test_array_value_semantics():
    a = ArrayValue(2, 8, 0)
    b = a.write(1, 5)
    assert a.read(1) == 0 and b.read(1) == 5 and b.read(3) == 0
    assert b.write(1, 0) == a
    assert hash(b.write(1, 0)) == hash(a)
    full = ArrayValue(1, 8, 7, {0: 1})
    assert full == ArrayValue(1, 8, 1, {1: 7})


def test_init_state_checks_inputs():
    m = input_model()
    with pytest.raises(EvaluationError):
        init_state(m, [])
    with pytest.raises(EvaluationError):
        init_state(m, [256])
    with pytest.raises(EvaluationError):
        init_state(m, [1, 2])


def test_enumeration_limit():
    b = Builder()
    for name in "abc":
        s = b.state(Bitvec(8), name)
        b.next(s, s)
    b.bad(b.const(1, 0))
    with pytest.raises(EvaluationError, match="two input bytes"):
        run_enumerated(b.model, 1)


def test_input_slots_expand_arrays():
    m = corpus_model("division-by-zero")
    slots = input_slots(m)
    assert all(s.width == 8 for s in slots)
    assert len(slots) == 2


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 255), min_size=2, max_size=2))
def test_batch_matches_scalar_on_corpus(inputs):
    m = corpus_model("division-by-zero-2")
    least, which = BatchRunner(m).run(np.array([inputs], dtype=np.uint64), 25)
    scalar = run(m, inputs, 25)
    if scalar is None:
        assert least[0] == -1
    else:
        names = [m.property_name(b) for b in m.bads]
        assert least[0] == scalar[0]
        assert tuple(n for n, h in zip(names, which[0]) if h) == scalar[1]


def test_holds_at_agrees_with_least_k():
    m = corpus_model("division-by-zero")
    inputs = enumerate_inputs(m, 1)
    r = BatchRunner(m)
    least, _ = r.run(inputs, 20)
    at = r.holds_at(inputs, 13).any(axis=1)
    assert np.array_equal(at, least == 13)


def test_stepper_commits_simultaneously():
    b = Builder()
    x = b.state(Bitvec(4), "x")
    y = b.state(Bitvec(4), "y")
    b.init(x, b.const(4, 1))
    b.init(y, b.const(4, 2))
    b.next(x, y)
    b.next(y, x)
    st_ = Stepper(b.model)
    s1 = st_.step(init_state(b.model, []))
    assert (s1[x], s1[y]) == (2, 1)
