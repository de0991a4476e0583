import pytest

from bvddmc.btor2 import Builder
from bvddmc.emulator import run_enumerated
from bvddmc.unroll import unroll_to_formula
from conftest import array_model, counter_model, input_model


def _zero_sat(model, nbytes):
    t = run_enumerated(model, 0, nbytes).table
    return {i for i, r in t.items() if r is not None}


def _sat_at(model, k, nbytes):
    from bvddmc.emulator import BatchRunner, enumerate_inputs
    ins = enumerate_inputs(model, nbytes)
    hold = BatchRunner(model).holds_at(ins, k)
    return {tuple(int(v) for v in row[:nbytes]) for row, h in zip(ins, hold) if h}


@pytest.mark.parametrize("mode", ["substitution", "duplication"])
@pytest.mark.parametrize("make,nbytes", [(counter_model, 0), (input_model, 1), (array_model, 1)])
def test_unrolling_matches_k_satisfiability(make, nbytes, mode):
    m = make()
    for k in range(0, 7):
        u = unroll_to_formula(m, k, mode)
        assert not u.nexts
        assert _zero_sat(u, nbytes) == _sat_at(m, k, nbytes), k


def test_substitution_shares_terms():
    m = input_model()
    x = m.states[0]
    b = Builder(m)
    b.constraint(b.op("neq", x, b.const(8, 0)))
    assert len(unroll_to_formula(m, 5).nodes) < len(unroll_to_formula(m, 5, "duplication").nodes)


def test_bad_arguments():
    with pytest.raises(ValueError):
        unroll_to_formula(counter_model(), -1)
    with pytest.raises(ValueError):
        unroll_to_formula(counter_model(), 1, "magic")
