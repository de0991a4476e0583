import functools
import shutil

import pytest

from bvddmc.btor2 import Array, Bitvec, Builder
from bvddmc.riscu.benchmarks import corpus, sample

HAVE_Z3 = shutil.which("z3") is not None
needs_z3 = pytest.mark.skipif(not HAVE_Z3, reason="z3 binary not on PATH")


@functools.lru_cache(maxsize=None)
def corpus_model(name):
    return sample(name).model()


def small_samples():
    return [s for s in corpus(include_large=False)]


def counter_model(limit=5, width=4):
    """Counter from 0; bad when it reaches ``limit``."""
    b = Builder()
    s = b.state(Bitvec(width), "count")
    b.init(s, b.const(width, 0))
    b.next(s, b.op("inc", s))
    b.bad(b.op("eq", s, b.const(width, limit)), "hit")
    return b.model


def input_model():
    """One input byte x latched into a state; bad when 3*x+1 == 0x40 at step 1."""
    b = Builder()
    x = b.state(Bitvec(8), "x")
    step = b.state(Bitvec(2), "step")
    b.init(step, b.const(2, 0))
    b.next(step, b.op("inc", step))
    b.next(x, x)
    y = b.op("add", b.op("mul", x, b.const(8, 3)), b.const(8, 1))
    at1 = b.op("eq", step, b.const(2, 1))
    b.bad(b.op("and", at1, b.op("eq", y, b.const(8, 0x40))), "target")
    return b.model


def array_model():
    """4-entry memory written at the input index; bad when entry 2 holds 7."""
    b = Builder()
    arr = b.state(Array(2, 8), "mem")
    b.init(arr, b.const(8, 0))
    i = b.state(Bitvec(2), "i")
    b.next(i, i)
    b.next(arr, b.op("write", arr, i, b.const(8, 7)))
    b.bad(b.op("eq", b.op("read", arr, b.const(2, 2)), b.const(8, 7)), "two")
    return b.model
