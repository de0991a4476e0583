import pytest

from bvddmc.arrays import convert_arrays, converted_arrays
from bvddmc.btor2 import Array, Bitvec, Builder, dumps, parse
from bvddmc.emulator import run_enumerated
from bvddmc.riscu.benchmarks import sample
from conftest import array_model, corpus_model


def _tables(model, kmax, nbytes):
    return run_enumerated(model, kmax, nbytes).table


@pytest.mark.parametrize("recursive", [False, True])
def test_small_array_model(recursive):
    m = array_model()
    c = convert_arrays(m, 8, recursive)
    assert not any(isinstance(n.sort, Array) for n in c.nodes.values())
    assert _tables(c, 4, 1) == _tables(m, 4, 1)


def test_threshold_leaves_large_arrays():
    m = array_model()
    assert converted_arrays(m, 2) and not converted_arrays(m, 1)
    c = convert_arrays(m, 1)
    assert any(isinstance(n.sort, Array) for n in c.nodes.values())


def test_recursive_uses_bit_slices():
    b = Builder()
    arr = b.state(Array(2, 8), "mem")
    b.init(arr, b.const(8, 5))
    i = b.state(Bitvec(2), "i")
    b.next(i, i)
    b.next(arr, arr)
    b.bad(b.op("eq", b.op("read", arr, i), b.const(8, 5)), "r")
    m = b.model
    it = dumps(convert_arrays(m, 8, False))
    rec = dumps(convert_arrays(m, 8, True))
    assert " slice " in rec and it != rec


def test_array_init_from_array():
    b = Builder()
    a0 = b.state(Array(1, 4), "a0")
    b.init(a0, b.const(4, 3))
    a1 = b.state(Array(1, 4), "a1")
    b.init(a1, a0)
    i = b.state(Bitvec(1), "i")
    b.next(i, i)
    b.next(a0, a0)
    b.next(a1, b.op("write", a1, i, b.const(4, 9)))
    b.bad(b.op("eq", b.op("read", a1, b.const(1, 1)), b.const(4, 9)), "w")
    for rec in (False, True):
        c = convert_arrays(b.model, 4, rec)
        assert _tables(c, 3, 1) == _tables(b.model, 3, 1)


@pytest.mark.parametrize("name", ["division-by-zero", "segmentation-fault", "memory-access-fail"])
def test_corpus_tables_preserved(name):
    m = corpus_model(name)
    s = sample(name)
    ref = _tables(m, s.kmax, 1)
    for rec in (False, True):
        c = parse(dumps(convert_arrays(m, 8, rec)))
        assert _tables(c, s.kmax, 1) == ref
