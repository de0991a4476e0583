"""BTOR2 models of a 64-bit RISC-U machine running a loaded program.

Machine state: pc, a 32-entry register file, code/data/heap/stack segments,
four kernel bitvectors (program break, next file descriptor, input bytes
still to read, bytes read in the current ``read`` call) and an uninitialized
input buffer.  One transition executes one instruction, except that ``read``
moves one byte per transition while pc stalls, and ``exit`` stalls forever.
Safety checks are bad properties evaluated on the state before execution.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..btor2 import CONST_KINDS, Array, Bitvec, Builder, Model
from .isa import (
    CODE_START, INSN, OP_BRANCH, OP_IMM, OP_JAL, OP_JALR, OP_LOAD, OP_LUI, OP_OP, OP_STORE,
    R_TYPE, SYS_BRK, SYS_EXIT, SYS_OPENAT, SYS_READ, SYS_WRITE, WORD, Program, index_bits,
)

# bad properties in declaration order, each with the toggle that enables it
BADS = [
    ("fetch-segfault", "segfaults"),
    ("fetch-misaligned", "invalid_addresses"),
    ("unknown-instruction", "unknown_instructions"),
    ("division-by-zero", "division_by_zero"),
    ("invalid-address", "invalid_addresses"),
    ("load-segfault", "segfaults"),
    ("store-segfault", "segfaults"),
    ("bad-exit-code", "bad_exit_code"),
    ("unknown-syscall", "unknown_instructions"),
    ("read-segfault", "segfaults"),
    ("write-segfault", "segfaults"),
    ("openat-segfault", "segfaults"),
]
SYSCALLS = (SYS_EXIT, SYS_READ, SYS_WRITE, SYS_OPENAT, SYS_BRK)


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class MachineConfig:
    bytes_to_read: int = 1
    heap_allowance: int = 4096
    stack_allowance: int = 2048
    virtual_address_space: int = 32
    bad_exit_code: bool = True
    division_by_zero: bool = True
    # RISC-U has no signed division, so no overflow check is ever generated
    division_overflow: bool = True
    invalid_addresses: bool = True
    segfaults: bool = True
    unknown_instructions: bool = True

    def enabled_bads(self) -> list[str]:
        return [name for name, toggle in BADS if getattr(self, toggle)]


@dataclass(frozen=True)
class Layout:
    code_bits: int
    data_bits: int
    heap_bits: int
    stack_bits: int
    input_bits: int
    code_start: int
    code_end: int
    data_start: int
    data_end: int
    heap_start: int
    heap_end: int
    stack_start: int
    stack_end: int


def layout(program: Program, cfg: MachineConfig) -> Layout:
    c = index_bits(len(program.code))
    d = index_bits(len(program.data))
    h = index_bits(-(-cfg.heap_allowance // WORD))
    s = index_bits(-(-cfg.stack_allowance // WORD))
    i = index_bits(cfg.bytes_to_read)
    code_end = CODE_START + INSN * (1 << c)
    data_end = code_end + WORD * (1 << d)
    heap_end = data_end + WORD * (1 << h)
    stack_end = 1 << cfg.virtual_address_space
    stack_start = stack_end - WORD * (1 << s)
    if heap_end > stack_start:
        raise GenerationError("segments do not fit into the virtual address space")
    if program.entry != CODE_START:
        raise GenerationError("programs must start at the beginning of the code segment")
    return Layout(c, d, h, s, i, CODE_START, code_end, code_end, data_end,
                  data_end, heap_end, stack_start, stack_end)


class _Gen:
    def __init__(self, cfg: MachineConfig):
        self.b = Builder()
        self.cfg = cfg

    def k(self, v, w=64):
        return self.b.const(w, v)

    def op(self, kind, *args, params=()):
        return self.b.op(kind, *args, params=params)

    def and_(self, *xs):
        r = xs[0]
        for x in xs[1:]:
            r = self.op("and", r, x)
        return r

    def or_(self, *xs):
        r = xs[0]
        for x in xs[1:]:
            r = self.op("or", r, x)
        return r

    def not_(self, x):
        return self.op("not", x)

    def eq(self, x, v, w=None):
        if isinstance(v, int) and w is not None:
            v = self.k(v, w)
        return self.op("eq", x, v)

    def field(self, ir, hi, lo):
        return self.b.slice(ir, hi, lo)

    def within(self, a, start, end):
        return self.and_(self.op("ugte", a, self.k(start)), self.op("ult", a, self.k(end)))

    def word_index(self, a, start, bits):
        off = self.op("sub", a, self.k(start))
        return self.b.slice(off, bits + 2, 3)

    def select(self, cases, default):
        r = default
        for cond, val in reversed(cases):
            r = self.b.ite(cond, val, r)
        return r


def generate_model(program: Program, cfg: MachineConfig | None = None) -> Model:
    """BTOR2 model of ``program`` loaded into a RISC-U machine configured by ``cfg``."""
    cfg = cfg or MachineConfig()
    if cfg.bytes_to_read < 0:
        raise GenerationError("bytes to read must not be negative")
    L = layout(program, cfg)
    g = _Gen(cfg)
    b = g.b
    bv64 = Bitvec(64)
    k = g.k

    # -- state ---------------------------------------------------------------
    pc = b.state(bv64, "pc")
    b.init(pc, k(program.entry))

    def segment(name, bits, width, words):
        sort = Array(bits, width)
        zero = b.state(sort, f"zeroed-{name}")
        b.init(zero, k(0, width))
        seg = b.state(sort, name)
        value = zero
        for idx, w in enumerate(words):
            if w:
                value = b.op("write", value, k(idx, bits), k(w, width))
        b.init(seg, value)
        return seg

    regs = segment("register-file", 5, 64, [0, 0, L.stack_end])
    code = segment("code-segment", L.code_bits, 32, program.code)
    data = segment("data-segment", L.data_bits, 64, program.data)
    heap = segment("heap-segment", L.heap_bits, 64, [])
    stack = segment("stack-segment", L.stack_bits, 64, [])
    brk = b.state(bv64, "program-break")
    b.init(brk, k(L.heap_start))
    fd = b.state(bv64, "file-descriptor")
    b.init(fd, k(3))
    remaining = b.state(bv64, "bytes-to-read")
    b.init(remaining, k(cfg.bytes_to_read))
    read_bytes = b.state(bv64, "read-bytes")
    b.init(read_bytes, k(0))
    inbuf = b.state(Array(L.input_bits, 8), "input-buffer")

    # -- fetch and decode ----------------------------------------------------
    in_code = g.within(pc, L.code_start, L.code_end)
    aligned_pc = g.eq(b.slice(pc, 1, 0), 0, 2)
    fetch_ok = g.and_(in_code, aligned_pc)
    cidx = b.slice(g.op("sub", pc, k(L.code_start)), L.code_bits + 1, 2)
    ir = g.op("read", code, cidx)

    opcode = g.field(ir, 6, 0)
    f3 = g.field(ir, 14, 12)
    f7 = g.field(ir, 31, 25)
    rd = g.field(ir, 11, 7)
    rs1 = g.field(ir, 19, 15)
    rs2 = g.field(ir, 24, 20)

    def is_op(code_, funct3=None):
        c = g.eq(opcode, code_, 7)
        return c if funct3 is None else g.and_(c, g.eq(f3, funct3, 3))

    is_lui = is_op(OP_LUI)
    is_addi = is_op(OP_IMM, 0)
    is_ld = is_op(OP_LOAD, 3)
    is_sd = is_op(OP_STORE, 3)
    r_ops = {
        name: g.and_(is_op(OP_OP, f3v), g.eq(f7, f7v, 7)) for name, (f3v, f7v) in R_TYPE.items()
    }
    is_beq = is_op(OP_BRANCH, 0)
    is_jal = is_op(OP_JAL)
    is_jalr = is_op(OP_JALR, 0)
    is_ecall = g.eq(ir, 0x73, 32)
    known = g.or_(is_lui, is_addi, is_ld, is_sd, *r_ops.values(), is_beq, is_jal, is_jalr, is_ecall)
    is_r = g.or_(*r_ops.values())

    imm_i = b.sext(g.field(ir, 31, 20), 52)
    imm_s = b.sext(g.op("concat", f7, g.field(ir, 11, 7)), 52)
    imm_b = b.sext(g.op("concat", g.op("concat", g.op("concat", g.field(ir, 31, 31), g.field(ir, 7, 7)),
                                       g.op("concat", g.field(ir, 30, 25), g.field(ir, 11, 8))),
                        k(0, 1)), 51)
    imm_j = b.sext(g.op("concat", g.op("concat", g.op("concat", g.field(ir, 31, 31), g.field(ir, 19, 12)),
                                       g.op("concat", g.field(ir, 20, 20), g.field(ir, 30, 21))),
                        k(0, 1)), 43)
    imm_u = b.sext(g.op("concat", g.field(ir, 31, 12), k(0, 12)), 32)

    def reg(idx):
        return g.op("read", regs, idx)

    rs1v, rs2v = reg(rs1), reg(rs2)
    a0, a1, a2, a7 = (reg(k(n, 5)) for n in (10, 11, 12, 17))
    pc4 = g.op("add", pc, k(4))

    # -- memory ----------------------------------------------------------------
    segs = [
        (data, L.data_start, L.data_end, L.data_bits),
        (heap, L.heap_start, L.heap_end, L.heap_bits),
        (stack, L.stack_start, L.stack_end, L.stack_bits),
    ]
    addr = g.op("add", rs1v, b.ite(is_sd, imm_s, imm_i))
    in_seg = [g.within(addr, s, e) for _, s, e, _ in segs]
    in_any = g.or_(*in_seg)
    load = g.op("read", stack, g.word_index(addr, L.stack_start, L.stack_bits))
    for (arr, s, _, bits), inside in reversed(list(zip(segs[:2], in_seg[:2]))):
        load = b.ite(inside, g.op("read", arr, g.word_index(addr, s, bits)), load)
    misaligned = g.op("neq", b.slice(addr, 2, 0), k(0, 3))

    # -- system calls ----------------------------------------------------------
    def syscall(n):
        return g.and_(is_ecall, g.eq(a7, n, 64))

    sys_exit, sys_read, sys_write = syscall(SYS_EXIT), syscall(SYS_READ), syscall(SYS_WRITE)
    sys_openat, sys_brk = syscall(SYS_OPENAT), syscall(SYS_BRK)
    sys_unknown = g.and_(is_ecall, g.not_(g.or_(sys_exit, sys_read, sys_write, sys_openat, sys_brk)))

    transferring = g.and_(sys_read, g.op("ult", read_bytes, a2), g.op("neq", remaining, k(0)))
    finishing = g.and_(sys_read, g.not_(transferring))
    byte_addr = g.op("add", a1, read_bytes)
    byte_in_heap = g.within(byte_addr, L.heap_start, L.heap_end)
    consumed = g.op("sub", k(cfg.bytes_to_read), remaining)
    in_byte = g.op("read", inbuf, b.slice(consumed, L.input_bits - 1, 0))
    heap_idx = g.word_index(byte_addr, L.heap_start, L.heap_bits)
    shift = b.uext(g.op("concat", b.slice(byte_addr, 2, 0), k(0, 3)), 58)
    old_word = g.op("read", heap, heap_idx)
    cleared = g.op("and", old_word, g.not_(g.op("sll", k(0xFF), shift)))
    new_word = g.op("or", cleared, g.op("sll", b.uext(in_byte, 56), shift))

    valid_brk = g.and_(g.op("ugte", a0, k(L.heap_start)), g.op("ulte", a0, k(L.heap_end)),
                       g.eq(b.slice(a0, 2, 0), 0, 3))
    new_brk = b.ite(valid_brk, a0, brk)

    # -- transition functions ----------------------------------------------------
    stall = g.or_(sys_exit, transferring, sys_unknown)
    jalr_target = g.op("and", g.op("add", rs1v, imm_i), k((1 << 64) - 2))
    taken = g.and_(is_beq, g.op("eq", rs1v, rs2v))
    b.next(pc, g.select([
        (taken, g.op("add", pc, imm_b)),
        (is_jal, g.op("add", pc, imm_j)),
        (is_jalr, jalr_target),
        (stall, pc),
    ], pc4))

    rd_value = g.select([
        (is_lui, imm_u),
        (is_addi, g.op("add", rs1v, imm_i)),
        (is_ld, load),
        (r_ops["add"], g.op("add", rs1v, rs2v)),
        (r_ops["sub"], g.op("sub", rs1v, rs2v)),
        (r_ops["mul"], g.op("mul", rs1v, rs2v)),
        (r_ops["divu"], g.op("udiv", rs1v, rs2v)),
        (r_ops["remu"], g.op("urem", rs1v, rs2v)),
        (r_ops["sltu"], b.uext(g.op("ult", rs1v, rs2v), 63)),
        (g.or_(is_jal, is_jalr), pc4),
        (finishing, read_bytes),
        (sys_write, a2),
        (sys_openat, fd),
    ], new_brk)
    writes_rd = g.or_(is_lui, is_addi, is_ld, is_r, is_jal, is_jalr)
    writes_a0 = g.or_(finishing, sys_write, sys_openat, sys_brk)
    target = b.ite(writes_a0, k(10, 5), rd)
    do_write = g.and_(g.or_(writes_rd, writes_a0), g.op("neq", target, k(0, 5)), fetch_ok)
    b.next(regs, b.ite(do_write, g.op("write", regs, target, rd_value), regs))

    store = g.and_(fetch_ok, is_sd)
    fill = g.and_(fetch_ok, transferring, byte_in_heap)
    for (arr, s, _, bits), inside in zip(segs, in_seg):
        nxt = b.ite(g.and_(store, inside), g.op("write", arr, g.word_index(addr, s, bits), rs2v), arr)
        if arr == heap:
            nxt = b.ite(fill, g.op("write", heap, heap_idx, new_word), nxt)
        b.next(arr, nxt)

    b.next(brk, b.ite(g.and_(fetch_ok, sys_brk), new_brk, brk))
    b.next(fd, b.ite(g.and_(fetch_ok, sys_openat), g.op("add", fd, k(1)), fd))
    moving = g.and_(fetch_ok, transferring)
    b.next(remaining, b.ite(moving, g.op("sub", remaining, k(1)), remaining))
    b.next(read_bytes, g.select([
        (moving, g.op("add", read_bytes, k(1))),
        (g.and_(fetch_ok, finishing), k(0)),
    ], read_bytes))

    # -- properties --------------------------------------------------------------
    def range_ok(start, count):
        end = g.op("add", start, count)
        return g.or_(*[
            g.and_(g.op("ugte", start, k(s)), g.op("ulte", end, k(e)), g.op("ugte", end, start))
            for _, s, e, _ in segs
        ])

    a1_ok = g.or_(*[g.within(a1, s, e) for _, s, e, _ in segs])
    conds = {
        "fetch-segfault": g.not_(in_code),
        "fetch-misaligned": g.and_(in_code, g.not_(aligned_pc)),
        "unknown-instruction": g.and_(fetch_ok, g.not_(known)),
        "division-by-zero": g.and_(fetch_ok, g.or_(r_ops["divu"], r_ops["remu"]), g.eq(rs2v, 0, 64)),
        "invalid-address": g.and_(fetch_ok, g.or_(is_ld, is_sd), misaligned),
        "load-segfault": g.and_(fetch_ok, is_ld, g.not_(in_any)),
        "store-segfault": g.and_(fetch_ok, is_sd, g.not_(in_any)),
        "bad-exit-code": g.and_(fetch_ok, sys_exit, g.op("neq", a0, k(0))),
        "unknown-syscall": g.and_(fetch_ok, sys_unknown),
        "read-segfault": g.and_(fetch_ok, transferring, g.not_(byte_in_heap)),
        "write-segfault": g.and_(fetch_ok, sys_write, g.op("neq", a2, k(0)), g.not_(range_ok(a1, a2))),
        "openat-segfault": g.and_(fetch_ok, sys_openat, g.not_(a1_ok)),
    }
    for name in cfg.enabled_bads():
        b.bad(conds[name], name)
    b.constraint(g.and_(g.op("ugte", brk, k(L.heap_start)), g.op("ulte", brk, k(L.heap_end))),
                 "heap-bound")
    return b.model


def manifest(program: Program, cfg: MachineConfig, model: Model) -> dict:
    """Generation summary written next to a model file."""
    L = layout(program, cfg)
    return {
        "bytesToRead": cfg.bytes_to_read,
        "properties": [model.property_name(p) for p in model.bads],
        "constraints": [model.property_name(p) for p in model.constraints],
        "entryPc": program.entry,
        "segments": {
            "code": [L.code_start, L.code_end],
            "data": [L.data_start, L.data_end],
            "heap": [L.heap_start, L.heap_end],
            "stack": [L.stack_start, L.stack_end],
        },
    }


def input_bytes(model: Model) -> int | None:
    """Bytes the ``read`` system call may deliver, taken from the kernel counter's init."""
    s = model.find_state("bytes-to-read")
    if s is None or s not in model.inits:
        return None
    node = model[model.inits[s]]
    return node.params[0] if node.kind in CONST_KINDS else None
