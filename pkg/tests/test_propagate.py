import itertools

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from bvddmc.btor2 import Array, Bitvec, Builder
from bvddmc.emulator import ArrayValue, _evaluate_ints
from bvddmc.propagate import (InputArray, Propagator, PropagationError, Residual, SymArray,
                              is_tracker)
from bvddmc.trackers import make_backend

BIN = ["add", "sub", "mul", "xor", "and", "or", "udiv", "urem", "srl", "sll"]

step = st.tuples(st.sampled_from(["bin", "ite", "write", "read", "cmp"]),
                 st.integers(0, 99), st.integers(0, 99), st.integers(0, 99),
                 st.sampled_from(BIN), st.integers(0, 255))


def build(prog, init):
    """x: 8-bit input, y: 4-bit input, mem: 4x8 array initialized to ``init``."""
    b = Builder()
    x = b.state(Bitvec(8), "x")
    y = b.state(Bitvec(4), "y")
    mem = b.state(Array(2, 8), "mem")
    b.init(mem, b.const(8, init))
    for s in (x, y, mem):
        b.next(s, s)
    terms = [x, b.uext(y, 4), b.const(8, 3)]
    arrays = [mem]
    bits = [b.op("ult", x, b.uext(y, 4))]
    for kind, i, j, l, op, c in prog:
        t, u = terms[i % len(terms)], terms[j % len(terms)]
        if kind == "bin":
            terms.append(b.op(op, t, u if c % 3 else b.const(8, c)))
        elif kind == "cmp":
            bits.append(b.op("ult" if c & 1 else "eq", t, u))
        elif kind == "ite":
            terms.append(b.ite(bits[l % len(bits)], t, u))
            if c & 1:
                arrays.append(b.ite(bits[l % len(bits)], arrays[i % len(arrays)],
                                    arrays[j % len(arrays)]))
        elif kind == "write":
            arrays.append(b.op("write", arrays[l % len(arrays)], b.slice(t, 1, 0), u))
        else:
            terms.append(b.op("read", arrays[l % len(arrays)], b.slice(t, 7 - c % 7, 6 - c % 7)))
    root = terms[-1]
    b.bad(b.op("eq", root, b.const(8, 0)))
    return b.model, root, (x, y, mem)


CONFIGS = [(None, 8, 0), ("ROABVDD", 8, 8), ("ROABVDD", 8, 4), ("CFLOBVDD", 2, 8),
           ("CFLOBVDD", 8, 4)]


@pytest.mark.parametrize("kind,bits,p", CONFIGS)
@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(prog=st.lists(step, min_size=1, max_size=10), init=st.integers(0, 255))
def test_status_agrees_with_emulation(kind, bits, p, prog, init):
    m, root, (x, y, mem) = build(prog, init)
    be = make_backend(kind, 2, bits) if kind else None
    eng = Propagator(m, be, p)
    status = eng.evaluate([root], eng.initial())[root]
    node = None if type(status) is int else eng.lower(status, Bitvec(8))
    for u, v in itertools.product(range(0, 256, 15), range(0, 16, 3)):
        want = _evaluate_ints(m, {x: u, y: v, mem: ArrayValue(2, 8, init)}, [root])[root]
        if node is None:
            assert status == want
            continue
        st_ = {s: ArrayValue(m_.index, m_.element, eng.array_consts[s])
               for s in eng.array_consts for m_ in [eng.rb.model[s].sort]}
        st_.update({nid: (u, v)[pos] for pos, nid in eng.invars.items()})
        for s in eng.rb.model.states:
            st_.setdefault(s, 0)
        got = _evaluate_ints(eng.rb.model, st_, [node])[node]
        assert got == want, (u, v)


def _input_model():
    b = Builder()
    x = b.state(Bitvec(8), "x")
    y = b.state(Bitvec(4), "y")
    b.next(x, x)
    b.next(y, y)
    return b, x, y


def test_statuses_by_configuration():
    b, x, y = _input_model()
    assert isinstance(Propagator(b.model, None, 8).initial()[x], Residual)
    f = Propagator(b.model, make_backend("ROABVDD", 2), 4).initial()
    assert isinstance(f[x], Residual) and is_tracker(f[y])
    f = Propagator(b.model, make_backend("ROABVDD", 2), 8).initial()
    assert is_tracker(f[x]) and is_tracker(f[y])


def test_narrow_input_domain():
    b, x, y = _input_model()
    eng = Propagator(b.model, make_backend("ROABVDD", 2), 8)
    live = eng.input_domain()
    assert eng.values(live) == {0, 1}
    assert all(c.get(1, 0) >> 16 == 0 for c in eng.backend.paths(live))


def test_decisions():
    b, x, y = _input_model()
    eng = Propagator(b.model, make_backend("ROABVDD", 2), 8)
    f = eng.initial()
    assert eng.decide_bad(1).kind == "sat" and eng.decide_bad(0).kind == "unsat"
    assert eng.decide_constraint(1).kind == "holds" and eng.decide_constraint(0).kind == "fails"
    hit = eng.eq_const(f[x], 8, 42)
    v = eng.decide_bad(hit)
    assert v.kind == "sat" and v.inputs.expand(1) == {(42,)}
    assert eng.decide_constraint(hit).kind == "restricts"
    assert eng.decide_bad(Residual(eng.input_var(0))).kind == "solver"


def test_constant_write_chain_stays_constant():
    b = Builder()
    mem = b.state(Array(3, 8), "mem")
    b.init(mem, b.const(8, 0))
    a = mem
    for i in range(5):
        a = b.op("write", a, b.const(3, i), b.const(8, i * 7))
    r = b.op("read", a, b.const(3, 4))
    eng = Propagator(b.model, None, 0)
    vals = eng.evaluate([r, a], eng.initial())
    assert vals[r] == 28 and isinstance(vals[a], ArrayValue)


def test_symbolic_element_over_constant_base():
    b = Builder()
    x = b.state(Bitvec(8), "x")
    b.next(x, x)
    mem = b.state(Array(3, 8), "mem")
    b.init(mem, b.const(8, 1))
    a = b.op("write", mem, b.const(3, 2), x)
    eng = Propagator(b.model, None, 0)
    vals = eng.evaluate([b.op("read", a, b.const(3, 2)), b.op("read", a, b.const(3, 5)), a],
                        eng.initial())
    assert isinstance(vals[a], SymArray)
    assert vals[b.op("read", a, b.const(3, 5))] == 1
    assert isinstance(vals[b.op("read", a, b.const(3, 2))], Residual)


def test_input_array_read_at_constant():
    b = Builder()
    arr = b.state(Array(1, 8), "in")
    b.next(arr, arr)
    r = b.op("read", arr, b.const(1, 1))
    eng = Propagator(b.model, make_backend("ROABVDD", 2), 8)
    f = eng.initial()
    assert isinstance(f[arr], InputArray)
    assert eng.values(eng.evaluate([r], f)[r]) == set(range(256))


def test_wide_inputs_rejected():
    b = Builder()
    b.state(Bitvec(16), "w")
    with pytest.raises(PropagationError):
        Propagator(b.model, None, 8)


def test_tracked_index_into_constant_array_stays_tracked():
    b = Builder()
    x = b.state(Bitvec(8), "x")
    b.next(x, x)
    rom = b.state(Array(2, 8), "rom")
    b.init(rom, b.const(8, 9))
    b.next(rom, rom)
    a = b.op("write", rom, b.const(2, 1), b.const(8, 40))
    idx = b.slice(x, 1, 0)
    r = b.op("read", a, idx)
    sym = b.op("read", b.op("write", rom, b.const(2, 3), x), idx)
    eng = Propagator(b.model, make_backend("ROABVDD", 1), 8)
    vals = eng.evaluate([r, sym], eng.initial())
    assert is_tracker(vals[r]) and eng.values(vals[r]) == {9, 40}
    assert is_tracker(vals[sym])
    for v in (0, 1, 2, 3, 0xFF):
        assert eng.backend.ctx.lookup(vals[r], [v]) == (40 if v & 3 == 1 else 9)
        assert eng.backend.ctx.lookup(vals[sym], [v]) == (v if v & 3 == 3 else 9)
