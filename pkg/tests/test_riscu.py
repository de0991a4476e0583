import pytest
from hypothesis import given, strategies as st

from bvddmc.btor2 import dumps, parse
from bvddmc.emulator import run_enumerated
from bvddmc.riscu.benchmarks import corpus, sample
from bvddmc.riscu.isa import AsmError, Insn, assemble, decode, disassemble, encode
from bvddmc.riscu.model import MachineConfig, generate_model, input_bytes, manifest
from bvddmc.riscu.simulator import simulate
from conftest import corpus_model


def test_known_encodings():
    assert encode(Insn("addi", rd=10, imm=1)) == 0x00100513
    assert encode(Insn("ecall")) == 0x00000073
    assert assemble("add a0, a1, a2").code == (0x00C58533,)
    assert assemble("ld t0, 8(sp)").code == (0x00813283,)


regs = st.integers(0, 31)
insns = st.one_of(
    st.builds(Insn, st.just("addi"), regs, regs, st.just(0), st.integers(-2048, 2047)),
    st.builds(Insn, st.just("ld"), regs, regs, st.just(0), st.integers(-2048, 2047)),
    st.builds(Insn, st.just("sd"), st.just(0), regs, regs, st.integers(-2048, 2047)),
    st.builds(Insn, st.sampled_from(["add", "sub", "mul", "divu", "remu", "sltu"]), regs, regs, regs),
    st.builds(Insn, st.just("beq"), st.just(0), regs, regs, st.integers(-1024, 1023).map(lambda v: v * 4)),
    st.builds(Insn, st.just("jal"), regs, st.just(0), st.just(0),
              st.integers(-(1 << 18), (1 << 18) - 1).map(lambda v: v * 4)),
    st.builds(Insn, st.just("lui"), regs, st.just(0), st.just(0), st.integers(0, (1 << 20) - 1)),
)


@given(insns)
def test_encode_decode_round_trip(i):
    assert decode(encode(i)) == i


def test_assemble_disassemble_round_trip():
    for s in corpus():
        p = s.program()
        assert assemble(disassemble(p)).code == p.code


def test_assembler_errors():
    with pytest.raises(AsmError):
        assemble("frobnicate a0")
    with pytest.raises(AsmError):
        assemble("addi a0, a0, 5000")
    with pytest.raises(AsmError):
        assemble("beq a0, a1, nowhere")


def test_simulator_division_by_zero():
    s = sample("division-by-zero")
    t = simulate(s.program(), s.config(), [ord("0")], 30)
    assert t.violation is not None and "division-by-zero" in t.violation[1]
    t = simulate(s.program(), s.config(), [ord("1")], 30)
    assert t.violation is None and t.exit_code == 0


@pytest.mark.parametrize("name", ["division-by-zero", "bad-exit-code", "segmentation-fault",
                                  "memory-access-fail", "bit-inversion-2"])
def test_simulator_matches_model(name):
    s = sample(name)
    table = run_enumerated(corpus_model(name), s.kmax, 1).table
    for v in range(0, 256, 7):
        t = simulate(s.program(), s.config(), [v], s.kmax)
        r = table[(v,)]
        if r is None:
            assert t.violation is None
        else:
            assert t.violation is not None and t.violation[0] == r[0]
            assert set(t.violation[1]) == set(r[1])


def test_toggles_remove_properties():
    p = sample("division-by-zero").program()
    full = generate_model(p, MachineConfig())
    names = {full.property_name(b) for b in full.bads}
    assert "division-by-zero" in names
    off = generate_model(p, MachineConfig(division_by_zero=False, segfaults=False))
    names_off = {off.property_name(b) for b in off.bads}
    assert "division-by-zero" not in names_off
    assert not any(n.endswith("segfault") for n in names_off)


def test_manifest_and_input_bytes():
    s = sample("division-by-zero-2")
    m = corpus_model(s.name)
    assert input_bytes(m) == 2
    info = manifest(s.program(), s.config(), m)
    assert info["bytesToRead"] == 2
    lo, hi = info["segments"]["code"]
    assert lo == info["entryPc"] < hi
    assert parse(dumps(m)).bads == m.bads
