"""
From assembly to a bad state
============================

Assemble a tiny RISC-U program, turn it into a BTOR2 machine model, and ask
the model checker which input byte makes it divide by zero.
"""

from bvddmc.bmc import Options, check
from bvddmc.btor2 import dumps
from bvddmc.emulator import run_enumerated
from bvddmc.riscu.isa import assemble
from bvddmc.riscu.model import MachineConfig, generate_model

# read one byte into a heap buffer, then compute 7 / (byte - 'A')
SOURCE = """
    li a7, 214
    li a0, 0
    ecall
    mv s0, a0
    li a7, 63
    li a0, 0
    addi a1, s0, 0
    li a2, 1
    ecall
    ld t0, 0(s0)
    addi t0, t0, -65
    li t1, 7
    divu t2, t1, t0
    mv a0, zero
    li a7, 93
    ecall
"""

program = assemble(SOURCE)
model = generate_model(program, MachineConfig(bytes_to_read=1, heap_allowance=128, stack_allowance=256))
print(f"{len(program.code)} instructions, {len(model.nodes)} BTOR2 lines")
print(dumps(model).splitlines()[0], "...")

# domain propagation with byte-level decision diagrams; no solver involved
report = check(model, Options(kmax=30, backend="ROABVDD"))
for event in report.events:
    print(event.line())
print("solver calls:", report.solver_calls, " peak nodes:", report.peak_nodes)

# the same question answered by brute force over all 256 input bytes
table = run_enumerated(model, 30, 1)
hits = sorted(inp[0] for inp, r in table.table.items() if r is not None)
print("enumeration says:", [chr(v) for v in hits])
