import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bvddmc.roabvdd import FULL, byteset
from bvddmc.trackers import InputSet, format_mask, make_backend, parse_mask

masks = st.integers(1, FULL)


def test_format_mask_runs():
    assert format_mask(byteset([0, 1, 2, 5, 6, 0xFF])) == "00-02+05+06+ff"
    assert format_mask(FULL) == "00-ff"


@given(masks)
def test_mask_round_trip(m):
    assert parse_mask(format_mask(m)) == m


def test_inputset_basics():
    assert not InputSet()
    assert InputSet.everything().format() == "{}"
    assert InputSet([{0: 0}]).cubes == []
    assert InputSet().format() == "none"
    s = InputSet([{0: byteset([3])}, {1: byteset([4, 5])}])
    assert s.positions() == {0, 1}
    assert s.count(2) == 256 + 512 - 2
    assert InputSet([{1: byteset([4])}]).expand(1) == set()
    assert InputSet([{1: byteset([0])}]).expand(1) == {(v,) for v in range(256)}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.dictionaries(st.integers(0, 1), masks, max_size=2), max_size=4))
def test_canonical_form_is_order_independent(cubes):
    a, b = InputSet(cubes), InputSet(list(reversed(cubes)))
    assert a.format() == b.format()
    canon = InputSet(a.canonical())
    assert canon.expand(2) == a.expand(2)
    # canonical cubes are disjoint
    pts = [InputSet([c]).expand(2) for c in a.canonical()]
    assert sum(map(len, pts)) == len(set().union(*pts)) if pts else True


def test_make_backend():
    assert type(make_backend("roabvdd", 2)).__name__ == "RoabvddBackend"
    assert type(make_backend("CFLOBVDD", 2, 4)).__name__ == "CflobvddBackend"
    with pytest.raises(ValueError):
        make_backend("bdd", 1)


@pytest.mark.parametrize("kind,b", [("ROABVDD", 8), ("CFLOBVDD", 1), ("CFLOBVDD", 8)])
def test_backend_interface(kind, b):
    be = make_backend(kind, 2, b)
    x, y = be.var(0), be.var(1)
    assert be.constant(be.leaf(8, 9)) == 9 and be.constant(x) is None
    s = be.apply("add", lambda p, q: (p + q) & 0xFF, 8, x, y)
    z = be.apply("eq0", lambda v: int(v == 0), 1, s)
    assert be.same(be.apply("add", lambda p, q: (p + q) & 0xFF, 8, y, x), s)
    got = InputSet(be.paths(z)).expand(2)
    assert got == {(u, v) for u, v in itertools.product(range(256), repeat=2) if (u + v) % 256 == 0}
    assert be.size([z]) > 0
    be.clear_caches()
