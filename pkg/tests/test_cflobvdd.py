import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bvddmc.btor2 import Bitvec, Builder
from bvddmc.cflobvdd import Context
from bvddmc.emulator import Stepper, init_state


@pytest.mark.parametrize("b", [1, 2, 4, 8])
def test_constant_has_one_grouping_per_level(b):
    c = Context(2, b)
    k = c.constant(8, 42)
    assert k.is_constant and k.value == 42
    groupings, _ = c.count_structures(k)
    assert groupings == c.level + 1


@pytest.mark.parametrize("b", [1, 2, 4, 8])
def test_var_lookup(b):
    c = Context(2, b)
    x, y = c.var(0), c.var(1)
    for u, v in [(0, 0), (1, 254), (0x5A, 0xA5), (255, 255)]:
        assert c.lookup(x, [u, v]) == u
        assert c.lookup(y, [u, v]) == v


def test_bad_block_size():
    with pytest.raises(ValueError):
        Context(1, 3)
    with pytest.raises(IndexError):
        Context(1, 8).projection(5)


@pytest.mark.parametrize("b", [1, 2, 4, 8])
def test_hash_consing_gives_identity(b):
    c = Context(2, b)
    x = c.var(0)
    a = c.apply("add", lambda p, q: (p + q) & 0xFF, 8, x, x)
    d = c.apply("dbl", lambda p: (2 * p) & 0xFF, 8, x)
    assert a.grouping is d.grouping and a.values == d.values


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([1, 2, 4, 8]), st.integers(0, 255), st.integers(0, 255))
def test_apply_and_ite_pointwise(b, k1, k2):
    c = Context(2, b)
    x, y = c.var(0), c.var(1)
    lt = c.apply("lt", lambda p, q: int(p < q), 1, x, y)
    s = c.apply(("s", k1), lambda p: (p + k1) & 0xFF, 8, x)
    r = c.ite(lt, s, c.apply(("x", k2), lambda q: q ^ k2, 8, y))
    for u, v in itertools.product(range(0, 256, 13), range(0, 256, 7)):
        want = (u + k1) & 0xFF if u < v else v ^ k2
        assert c.lookup(r, [u, v]) == want


@pytest.mark.parametrize("b", [1, 4])
def test_paths_count(b):
    c = Context(2, b)
    x, y = c.var(0), c.var(1)
    eq = c.apply("eq", lambda p, q: int(p == q), 1, x, y)
    total = 0
    for cube in c.paths(eq):
        n = 1
        for i in (0, 1):
            n *= bin(cube.get(i, (1 << 256) - 1)).count("1")
        total += n
    assert total == 256


def test_to_expression_evaluates_back():
    c = Context(2, 2)
    x, y = c.var(0), c.var(1)
    t = c.apply("f", lambda p, q: (p ^ q) if p & 1 else (p + q) & 0xFF, 8, x, y)
    bld = Builder()
    ins = {0: bld.state(Bitvec(8), "x"), 1: bld.state(Bitvec(8), "y")}
    e = c.to_expression(t, bld, ins)
    for s in ins.values():
        bld.next(s, s)
    bld.bad(bld.op("eq", e, bld.const(8, 0)))
    st_ = Stepper(bld.model)
    for u, v in [(0, 0), (1, 3), (0x80, 0x7F), (255, 1)]:
        assert st_.evaluate_all(init_state(bld.model, [u, v]))[e] == c.lookup(t, [u, v])


def test_bit_reversal_is_compact_at_bit_granularity():
    rev = lambda v: int(f"{v:08b}"[::-1], 2)
    sizes = {}
    for b in (1, 8):
        c = Context(1, b)
        r = c.apply("rev", rev, 8, c.var(0))
        sizes[b] = c.count_structures(r)[0]
        assert all(c.lookup(r, [v]) == rev(v) for v in range(256))
    assert sizes[1] <= 16
