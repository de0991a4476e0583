"""Instruction-level RISC-U simulator with the same step accounting as the model.

Every ``read`` transfers one byte per step with pc held, so the step at which
a check fails here is the transition count at which the generated model's bad
property first holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .isa import SYS_BRK, SYS_EXIT, SYS_OPENAT, SYS_READ, SYS_WRITE, Program, decode
from .model import BADS, MachineConfig, layout

M64 = (1 << 64) - 1


@dataclass
class Trace:
    pcs: list[int] = field(default_factory=list)
    syscalls: list[tuple[int, str, tuple[int, ...]]] = field(default_factory=list)
    exit_code: int | None = None
    violation: tuple[int, tuple[str, ...]] | None = None
    steps: int = 0
    instructions: int = 0


def _sext(v, bits):
    return (v - (1 << bits) if v >> (bits - 1) & 1 else v) & M64


class Machine:
    def __init__(self, program: Program, cfg: MachineConfig, inputs):
        self.cfg = cfg
        self.L = layout(program, cfg)
        self.code = list(program.code) + [0] * ((1 << self.L.code_bits) - len(program.code))
        self.pc = program.entry
        self.regs = [0] * 32
        self.regs[2] = self.L.stack_end
        self.mem = {
            "data": dict(enumerate(program.data)),
            "heap": {},
            "stack": {},
        }
        self.brk = self.L.heap_start
        self.fd = 3
        self.remaining = cfg.bytes_to_read
        self.read_bytes = 0
        self.inputs = list(inputs)
        if len(self.inputs) < cfg.bytes_to_read:
            raise ValueError(f"{cfg.bytes_to_read} input bytes required, {len(self.inputs)} given")

    # -- memory --------------------------------------------------------------

    def _segments(self):
        L = self.L
        return [
            ("data", L.data_start, L.data_end, L.data_bits),
            ("heap", L.heap_start, L.heap_end, L.heap_bits),
            ("stack", L.stack_start, L.stack_end, L.stack_bits),
        ]

    def _segment_of(self, addr):
        for name, start, end, bits in self._segments():
            if start <= addr < end:
                return name, start, bits
        return None

    def _index(self, addr, start, bits):
        return ((addr - start) & M64) >> 3 & ((1 << bits) - 1)

    def load(self, addr):
        seg = self._segment_of(addr)
        if seg is None:
            _, start, _, bits = self._segments()[2]
            return self.mem["stack"].get(self._index(addr, start, bits), 0)
        name, start, bits = seg
        return self.mem[name].get(self._index(addr, start, bits), 0)

    # -- decode --------------------------------------------------------------

    def fetch(self):
        L = self.L
        in_code = L.code_start <= self.pc < L.code_end
        aligned = self.pc & 3 == 0
        word = self.code[((self.pc - L.code_start) & M64) >> 2 & ((1 << L.code_bits) - 1)]
        return in_code, aligned, word

    def violations(self) -> tuple[str, ...]:
        """Names of the enabled checks failing in the current state."""
        in_code, aligned, word = self.fetch()
        ok = in_code and aligned
        insn = decode(word) if ok else None
        r = self.regs
        hits = set()
        if not in_code:
            hits.add("fetch-segfault")
        elif not aligned:
            hits.add("fetch-misaligned")
        if ok:
            if insn is None:
                hits.add("unknown-instruction")
            elif insn.op in ("divu", "remu") and r[insn.rs2] == 0:
                hits.add("division-by-zero")
            elif insn.op in ("ld", "sd"):
                addr = (r[insn.rs1] + insn.imm) & M64
                if addr & 7:
                    hits.add("invalid-address")
                if self._segment_of(addr) is None:
                    hits.add("load-segfault" if insn.op == "ld" else "store-segfault")
            elif insn.op == "ecall":
                a0, a1, a2, a7 = r[10], r[11], r[12], r[17]
                if a7 == SYS_EXIT:
                    if a0 != 0:
                        hits.add("bad-exit-code")
                elif a7 == SYS_READ:
                    if self._transferring():
                        ba = (a1 + self.read_bytes) & M64
                        if not self.L.heap_start <= ba < self.L.heap_end:
                            hits.add("read-segfault")
                elif a7 == SYS_WRITE:
                    if a2 != 0 and not self._range_ok(a1, a2):
                        hits.add("write-segfault")
                elif a7 == SYS_OPENAT:
                    if self._segment_of(a1) is None:
                        hits.add("openat-segfault")
                elif a7 != SYS_BRK:
                    hits.add("unknown-syscall")
        enabled = self.cfg.enabled_bads()
        return tuple(n for n, _ in BADS if n in hits and n in enabled)

    def _transferring(self):
        return self.read_bytes < self.regs[12] and self.remaining != 0

    def _range_ok(self, start, count):
        end = (start + count) & M64
        return any(s <= start and end <= e and end >= start for _, s, e, _ in self._segments())

    # -- execute -------------------------------------------------------------

    def step(self, trace: Trace | None = None, k: int = 0):
        """One transition; returns the system call name executed, if any."""
        in_code, aligned, word = self.fetch()
        ok = in_code and aligned
        insn = decode(word)
        r = self.regs
        pc4 = (self.pc + 4) & M64
        if insn is None or not ok:
            self.pc = pc4 if insn is None else self.pc
            return None
        op = insn.op
        rs1, rs2 = r[insn.rs1], r[insn.rs2]
        value, target, next_pc, call = None, insn.rd, pc4, None
        if op == "lui":
            value = _sext(insn.imm << 12, 32)
        elif op == "addi":
            value = (rs1 + insn.imm) & M64
        elif op in ("ld", "sd"):
            addr = (rs1 + insn.imm) & M64
            if op == "ld":
                value = self.load(addr)
            else:
                seg = self._segment_of(addr)
                if seg is not None:
                    name, start, bits = seg
                    self.mem[name][self._index(addr, start, bits)] = rs2
        elif op == "add":
            value = (rs1 + rs2) & M64
        elif op == "sub":
            value = (rs1 - rs2) & M64
        elif op == "mul":
            value = (rs1 * rs2) & M64
        elif op == "divu":
            value = rs1 // rs2 if rs2 else M64
        elif op == "remu":
            value = rs1 % rs2 if rs2 else rs1
        elif op == "sltu":
            value = int(rs1 < rs2)
        elif op == "beq":
            if rs1 == rs2:
                next_pc = (self.pc + insn.imm) & M64
        elif op == "jal":
            value, next_pc = pc4, (self.pc + insn.imm) & M64
        elif op == "jalr":
            value, next_pc = pc4, (rs1 + insn.imm) & M64 & ~1
        elif op == "ecall":
            a0, a1, a2, a7 = r[10], r[11], r[12], r[17]
            target = 10
            if a7 == SYS_EXIT:
                call, next_pc = "exit", self.pc
            elif a7 == SYS_READ:
                if self._transferring():
                    ba = (a1 + self.read_bytes) & M64
                    if self.L.heap_start <= ba < self.L.heap_end:
                        idx = self._index(ba, self.L.heap_start, self.L.heap_bits)
                        sh = 8 * (ba & 7)
                        consumed = self.cfg.bytes_to_read - self.remaining
                        word_ = self.mem["heap"].get(idx, 0) & ~(0xFF << sh) & M64
                        self.mem["heap"][idx] = word_ | (self.inputs[consumed] << sh)
                    self.remaining -= 1
                    self.read_bytes += 1
                    next_pc = self.pc
                else:
                    call, value = "read", self.read_bytes
                    self.read_bytes = 0
            elif a7 == SYS_WRITE:
                call, value = "write", a2
            elif a7 == SYS_OPENAT:
                call, value = "openat", self.fd
                self.fd += 1
            elif a7 == SYS_BRK:
                L = self.L
                if L.heap_start <= a0 <= L.heap_end and a0 & 7 == 0:
                    self.brk = a0
                call, value = "brk", self.brk
            else:
                call, next_pc = "unknown", self.pc
            if call and trace is not None:
                trace.syscalls.append((k, call, (a0, a1, a2)))
        if value is not None and target != 0:
            r[target] = value
        self.pc = next_pc
        return call


def simulate(program: Program, cfg: MachineConfig, inputs, max_steps: int) -> Trace:
    """Run until a check fails, the program exits with code 0, or ``max_steps`` transitions."""
    m = Machine(program, cfg, inputs)
    t = Trace()
    for k in range(max_steps + 1):
        t.pcs.append(m.pc)
        t.steps = k
        bad = m.violations()
        if bad:
            t.violation = (k, bad)
            return t
        in_code, aligned, word = m.fetch()
        if in_code and aligned and word == 0x73 and m.regs[17] == SYS_EXIT:
            t.exit_code = m.regs[10]
            t.syscalls.append((k, "exit", (m.regs[10],)))
            return t
        if k == max_steps:
            break
        before = m.read_bytes
        m.step(t, k)
        if not (m.read_bytes > before):
            t.instructions += 1
    return t
