import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bvddmc.bitvec import apply_binary
from bvddmc.btor2 import Bitvec, Builder
from bvddmc.emulator import init_state, Stepper
from bvddmc.roabvdd import FULL, Context, byteset, members, ranges, reachable


def test_byteset_helpers():
    m = byteset([1, 2, 3, 7])
    assert members(m) == [1, 2, 3, 7]
    assert ranges(m) == [(1, 3), (7, 7)]


def test_leaves_and_vars_are_unique():
    c = Context()
    assert c.leaf(8, 3) is c.leaf(8, 259)
    assert c.var(0) is c.var(0)
    assert len(reachable([c.var(0)])) == 257


def test_node_reduction_and_checks():
    c = Context()
    one = c.leaf(8, 1)
    assert c.node(0, [(FULL, one)]) is one
    assert c.node(0, [(byteset(range(128)), one), (byteset(range(128, 256)), one)]) is one
    with pytest.raises(ValueError, match="cover"):
        c.node(0, [(byteset([0]), one), (byteset([1]), c.leaf(8, 2))])
    x1 = c.var(1)
    with pytest.raises(ValueError, match="order"):
        c.node(1, [(byteset(range(128)), x1), (byteset(range(128, 256)), one)])


def test_equal_functions_are_identical():
    c = Context()
    x = c.var(0)
    a = c.apply("add", lambda p, q: (p + q) & 0xFF, 8, x, x)
    b = c.apply("mul2", lambda p: (2 * p) & 0xFF, 8, x)
    assert a is b


def test_ite_shortcuts():
    c = Context()
    x = c.var(0)
    cond = c.apply("odd", lambda v: v & 1, 1, x)
    assert c.ite(cond, c.leaf(1, 1), c.leaf(1, 0)) is cond
    assert c.ite(c.leaf(1, 0), x, cond) is cond


def test_paths_partition_the_space():
    c = Context()
    x, y = c.var(0), c.var(1)
    lt = c.apply("ult", lambda p, q: int(p < q), 1, x, y)
    cubes = c.paths(lt)
    count = 0
    for cube in cubes:
        n = 1
        for i in (0, 1):
            n *= len(members(cube.get(i, FULL)))
        count += n
    assert count == 256 * 255 // 2


def test_lookup_and_values():
    c = Context()
    x = c.var(0)
    sq = c.apply("sq", lambda v: (v * v) & 0xFF, 8, x)
    assert c.lookup(sq, [16]) == 0
    assert c.values(sq) == {(v * v) & 0xFF for v in range(256)}
    assert c.support(sq) == {0}
    with pytest.raises(KeyError):
        c.lookup(c.var(3), [0])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["add", "sub", "mul", "udiv", "urem", "xor", "ult", "eq"]),
       st.integers(0, 255), st.integers(0, 255))
def test_apply_matches_pointwise(kind, k1, k2):
    c = Context()
    x, y = c.var(0), c.var(1)
    a = c.apply(("a", k1), lambda v: (v ^ k1) & 0xFF, 8, x)
    b = c.apply(("b", k2), lambda v: (v + k2) & 0xFF, 8, y)
    w = 1 if kind in ("ult", "eq") else 8
    r = c.apply(kind, lambda p, q: apply_binary(kind, p, q, 8), w, a, b)
    for u, v in itertools.product(range(0, 256, 17), range(256)):
        assert c.lookup(r, [u, v]) == apply_binary(kind, u ^ k1, (v + k2) & 0xFF, 8)


def test_to_expression_evaluates_back():
    c = Context()
    x, y = c.var(0), c.var(1)
    t = c.apply("f", lambda p, q: (p * 3 + (q >> 2)) & 0xFF if p < 40 else q, 8, x, y)
    b = Builder()
    ins = {0: b.state(Bitvec(8), "x"), 1: b.state(Bitvec(8), "y")}
    e = c.to_expression(t, b, ins)
    for s in ins.values():
        b.next(s, s)
    b.bad(b.op("eq", e, b.const(8, 0)))
    st_ = Stepper(b.model)
    for u, v in [(0, 0), (39, 255), (40, 7), (200, 13), (17, 128)]:
        vals = st_.evaluate_all(init_state(b.model, [u, v]))
        assert vals[e] == c.lookup(t, [u, v])
