"""Sample RISC-U programs and corpus generation.

Each sample is assembly text plus the number of input bytes it reads.  The
corpus uses small heap and stack allowances so that every segment converts
to bitvectors at ``-array 8``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .. import btor2
from .isa import Program, assemble
from .model import MachineConfig, generate_model, manifest

CORPUS_HEAP = 128
CORPUS_STACK = 256

# heap start via brk(0), then read `count` bytes to the heap start
_PROLOGUE = """
    li a7, 214
    li a0, 0
    ecall
    mv s0, a0
"""


def _read(count, offset=0):
    return f"""
    li a7, 63
    li a0, 0
    addi a1, s0, {offset}
    li a2, {count}
    ecall
"""


def _exit(reg="zero"):
    return f"""
    mv a0, {reg}
    li a7, 93
    ecall
"""


DIVISION_BY_ZERO = _PROLOGUE + _read(1) + """
    ld t0, 0(s0)
    addi t0, t0, -48     ; zero for the digit '0'
    li t1, 7
    divu t2, t1, t0
""" + _exit()

DIVISION_BY_ZERO_2 = _PROLOGUE + _read(2) + """
    ld t0, 0(s0)
    li t1, 256
    remu t2, t0, t1      ; first byte
    divu t3, t0, t1      ; second byte
    sub t4, t2, t3
    li t5, 1000
    divu t6, t5, t4      ; fails when both bytes are equal
""" + _exit()

BAD_EXIT_CODE = _PROLOGUE + _read(1) + """
    ld t0, 0(s0)
    li t1, 65
    sltu a0, t0, t1      ; exit(1) for bytes below 'A'
    li a7, 93
    ecall
"""

EXIT_ZERO = """
    li a0, 0
    li a7, 93
    ecall
"""

SEGMENTATION_FAULT = _PROLOGUE + _read(1) + """
    ld t0, 0(s0)
    addi t1, t0, -122
    beq t1, zero, crash  ; 'z' stores to address 0
""" + _exit() + """
crash:
    sd t0, 0(zero)
""" + _exit()

MEMORY_ACCESS_FAIL = _PROLOGUE + _read(1) + """
    ld t0, 0(s0)
    li t1, 32
    remu t2, t0, t1      ; word offset 0..31, but the heap has 16 words
    li t3, 8
    mul t2, t2, t3
    add t2, s0, t2
    ld t4, 0(t2)
""" + _exit()


def multi_input(x: int) -> str:
    """Reads ``x`` bytes one at a time and exits with 1 iff all of them are '0'."""
    return _PROLOGUE + f"""
    li s1, 0             ; matches
    li s2, 0             ; bytes read
    li s3, {x}
loop:
""" + _read(1) + """
    ld t0, 0(s0)
    addi t0, t0, -48
    beq t0, zero, match
    j next
match:
    addi s1, s1, 1
next:
    addi s2, s2, 1
    beq s2, s3, done
    j loop
done:
    sltu t1, s1, s3
    li t2, 1
    sub a0, t2, t1
    li a7, 93
    ecall
"""


def bit_inversion(x: int) -> str:
    """Reads one byte, reverses its low ``x`` bits with symbolic branches, exits with 1 iff the result is 1."""
    body = [_PROLOGUE, _read(1), """
    ld t0, 0(s0)
    li t1, 2
    li s1, 0
"""]
    for i in range(x):
        body.append(f"""
    remu t2, t0, t1
    divu t0, t0, t1
    add s1, s1, s1
    beq t2, zero, skip{i}
    addi s1, s1, 1
skip{i}:
""")
    body.append("""
    li t3, 2
    sltu t4, s1, t3
    li t3, 1
    sltu t5, s1, t3
    sub a0, t4, t5
    li a7, 93
    ecall
""")
    return "".join(body)


@dataclass(frozen=True)
class Sample:
    name: str
    source: str
    bytes_to_read: int
    kmax: int

    def program(self) -> Program:
        return assemble(self.source)

    def config(self) -> MachineConfig:
        return MachineConfig(bytes_to_read=self.bytes_to_read, heap_allowance=CORPUS_HEAP,
                             stack_allowance=CORPUS_STACK)

    def model(self) -> btor2.Model:
        return generate_model(self.program(), self.config())


def corpus(include_large: bool = True) -> list[Sample]:
    """All samples; ``include_large`` adds the multi-input samples reading more than two bytes."""
    out = [
        Sample("division-by-zero", DIVISION_BY_ZERO, 1, 20),
        Sample("division-by-zero-2", DIVISION_BY_ZERO_2, 2, 25),
        Sample("bad-exit-code", BAD_EXIT_CODE, 1, 20),
        Sample("exit-zero", EXIT_ZERO, 1, 10),
        Sample("segmentation-fault", SEGMENTATION_FAULT, 1, 20),
        Sample("memory-access-fail", MEMORY_ACCESS_FAIL, 1, 25),
    ]
    for x in range(2, 7):
        if x <= 2 or include_large:
            out.append(Sample(f"multi-input-{x}", multi_input(x), x, 25 + 16 * x))
    for x in range(2, 7):
        out.append(Sample(f"bit-inversion-{x}", bit_inversion(x), 1, 25 + 6 * x))
    return out


def sample(name: str) -> Sample:
    for s in corpus():
        if s.name == name:
            return s
    raise KeyError(name)


def generate_benchmarks(out_dir, expected: bool = True) -> list[Path]:
    """Write ``<name>.s``, ``<name>.btor2`` and ``<name>.json`` per sample.

    With ``expected`` the manifest also records the enumeration oracle's
    events for samples reading at most two bytes.
    """
    from ..emulator import run_enumerated

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for s in corpus():
        prog = s.program()
        cfg = s.config()
        model = generate_model(prog, cfg)
        (out / f"{s.name}.s").write_text(s.source.lstrip("\n"))
        path = out / f"{s.name}.btor2"
        path.write_text(btor2.dumps(model))
        info = manifest(prog, cfg, model)
        info["kmax"] = s.kmax
        if expected and s.bytes_to_read <= 2:
            table = run_enumerated(model, s.kmax, s.bytes_to_read)
            info["expected"] = [
                {"k": k, "bad": bad, "inputs": sorted(list(i) for i in table.satisfying(k, bad))}
                for k, bad in table.events()
            ]
        (out / f"{s.name}.json").write_text(json.dumps(info, indent=1) + "\n")
        written.append(path)
    return written
