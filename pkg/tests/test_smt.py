import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bvddmc.bitvec import apply_binary
from bvddmc.btor2 import Array, Bitvec, Builder
from bvddmc.smt import NoSolver, Solver, SolverError, literal, parse_sexpr, parse_value, to_smtlib
from conftest import needs_z3

BINOPS = ["add", "sub", "mul", "udiv", "urem", "sdiv", "srem", "and", "or", "xor",
          "sll", "srl", "sra"]


def test_literal_wraps():
    assert literal(8, -1) == "(_ bv255 8)"
    assert literal(4, 17) == "(_ bv1 4)"


def test_parse_sexpr_and_values():
    assert parse_sexpr("((n1 #x0f) (n2 (_ bv3 8)))") == [["n1", "#x0f"], ["n2", ["_", "bv3", "8"]]]
    assert parse_value("#b101") == 5
    assert parse_value(["_", "bv200", "8"]) == 200
    with pytest.raises(SolverError):
        parse_sexpr("((a)")
    with pytest.raises(SolverError):
        parse_value("true")


def test_to_smtlib_cone_only():
    b = Builder()
    x = b.state(Bitvec(8), "x")
    unused = b.state(Bitvec(8), "u")
    c = b.op("eq", b.op("add", x, b.const(8, 1)), b.const(8, 0))
    text = to_smtlib(b.model, [c])
    assert f"(declare-const n{x} (_ BitVec 8))" in text
    assert f"n{unused} " not in text
    assert f"(assert (= n{c} #b1))" in text


def test_constant_array_state():
    b = Builder()
    a = b.state(Array(2, 8), "a")
    text = to_smtlib(b.model, [b.op("eq", b.op("read", a, b.const(2, 1)), b.const(8, 4))], {a: 4})
    assert "(as const (Array (_ BitVec 2) (_ BitVec 8)))" in text


def test_no_solver():
    b = Builder()
    x = b.state(Bitvec(1), "x")
    s = Solver("")
    assert not s.available
    with pytest.raises(NoSolver):
        s.enumerate(b.model, [x], {0: x})


def test_missing_binary():
    b = Builder()
    x = b.state(Bitvec(1), "x")
    with pytest.raises(SolverError, match="cannot start"):
        Solver("no-such-solver-binary").satisfiable(b.model, [x])


@needs_z3
@settings(max_examples=25, deadline=None)
@given(st.sampled_from(BINOPS), st.integers(0, 15))
def test_enumeration_matches_semantics(op, target):
    b = Builder()
    x, y = b.state(Bitvec(4), "x"), b.state(Bitvec(4), "y")
    c = b.op("eq", b.op(op, x, y), b.const(4, target))
    found, complete = Solver(timeout=60).enumerate(b.model, [c], {0: x, 1: y})
    assert complete
    want = {(u, v) for u, v in itertools.product(range(16), repeat=2)
            if apply_binary(op, u, v, 4) == target}
    assert {(f[0], f[1]) for f in found} == want


@needs_z3
def test_enumeration_limit_and_support():
    b = Builder()
    x, y = b.state(Bitvec(8), "x"), b.state(Bitvec(8), "y")
    c = b.op("ult", x, b.const(8, 10))
    s = Solver(limit=4)
    found, complete = s.enumerate(b.model, [c], {0: x, 1: y})
    assert not complete and len(found) == 4 and all(set(f) == {0} for f in found)
    assert s.calls == 1
    assert not Solver().satisfiable(b.model, [c, b.op("ugt", x, b.const(8, 20))])
