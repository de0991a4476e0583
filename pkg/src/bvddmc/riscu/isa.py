"""RISC-U instruction set: encoding, decoding, a small assembler and printer.

RISC-U is the 14-instruction unsigned subset of RV64I/M:
lui addi ld sd add sub mul divu remu sltu beq jal jalr ecall.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CODE_START = 0x10000
WORD = 8  # bytes per memory word
INSN = 4  # bytes per instruction

REGISTERS = [
    "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1",
    "a0", "a1", "a2", "a3", "a4", "a5", "a6", "a7",
    "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9", "s10", "s11",
    "t3", "t4", "t5", "t6",
]
_REGNUM = {name: i for i, name in enumerate(REGISTERS)}
_REGNUM["fp"] = 8
_REGNUM.update({f"x{i}": i for i in range(32)})

# opcode, funct3, funct7 per R-type mnemonic
R_TYPE = {
    "add": (0, 0x00), "sub": (0, 0x20), "mul": (0, 0x01),
    "divu": (5, 0x01), "remu": (7, 0x01), "sltu": (3, 0x00),
}
OP_LUI, OP_IMM, OP_LOAD, OP_STORE, OP_OP = 0x37, 0x13, 0x03, 0x23, 0x33
OP_BRANCH, OP_JAL, OP_JALR = 0x63, 0x6F, 0x67
ECALL = 0x00000073

MNEMONICS = ("lui", "addi", "ld", "sd", *R_TYPE, "beq", "jal", "jalr", "ecall")

SYS_EXIT, SYS_READ, SYS_WRITE, SYS_OPENAT, SYS_BRK = 93, 63, 64, 56, 214


class AsmError(ValueError):
    pass


@dataclass(frozen=True)
class Insn:
    op: str
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    imm: int = 0

    def __str__(self):
        r = REGISTERS
        if self.op == "ecall":
            return "ecall"
        if self.op == "lui":
            return f"lui {r[self.rd]}, {self.imm:#x}"
        if self.op == "addi":
            return f"addi {r[self.rd]}, {r[self.rs1]}, {self.imm}"
        if self.op in ("ld", "jalr"):
            return f"{self.op} {r[self.rd]}, {self.imm}({r[self.rs1]})"
        if self.op == "sd":
            return f"sd {r[self.rs2]}, {self.imm}({r[self.rs1]})"
        if self.op == "beq":
            return f"beq {r[self.rs1]}, {r[self.rs2]}, {self.imm}"
        if self.op == "jal":
            return f"jal {r[self.rd]}, {self.imm}"
        return f"{self.op} {r[self.rd]}, {r[self.rs1]}, {r[self.rs2]}"


def _bits(v, hi, lo):
    return (v >> lo) & ((1 << (hi - lo + 1)) - 1)


def _sext(v, bits):
    return v - (1 << bits) if v >> (bits - 1) & 1 else v


def _check_imm(value, bits, signed=True, what="immediate"):
    lo, hi = (-(1 << (bits - 1)), (1 << (bits - 1)) - 1) if signed else (0, (1 << bits) - 1)
    if not lo <= value <= hi:
        raise AsmError(f"{what} {value} out of range [{lo}, {hi}]")


def encode(i: Insn) -> int:
    op = i.op
    if op == "ecall":
        return ECALL
    if op == "lui":
        _check_imm(i.imm, 20, signed=False)
        return (i.imm << 12) | (i.rd << 7) | OP_LUI
    if op in ("addi", "ld", "jalr"):
        _check_imm(i.imm, 12)
        opcode, f3 = {"addi": (OP_IMM, 0), "ld": (OP_LOAD, 3), "jalr": (OP_JALR, 0)}[op]
        return ((i.imm & 0xFFF) << 20) | (i.rs1 << 15) | (f3 << 12) | (i.rd << 7) | opcode
    if op == "sd":
        _check_imm(i.imm, 12)
        imm = i.imm & 0xFFF
        return ((imm >> 5) << 25) | (i.rs2 << 20) | (i.rs1 << 15) | (3 << 12) | ((imm & 0x1F) << 7) | OP_STORE
    if op in R_TYPE:
        f3, f7 = R_TYPE[op]
        return (f7 << 25) | (i.rs2 << 20) | (i.rs1 << 15) | (f3 << 12) | (i.rd << 7) | OP_OP
    if op == "beq":
        _check_imm(i.imm, 13, what="branch offset")
        if i.imm % INSN:
            raise AsmError(f"branch offset {i.imm} is not instruction aligned")
        m = i.imm & 0x1FFF
        return ((_bits(m, 12, 12) << 31) | (_bits(m, 10, 5) << 25) | (i.rs2 << 20) | (i.rs1 << 15)
                | (_bits(m, 4, 1) << 8) | (_bits(m, 11, 11) << 7) | OP_BRANCH)
    if op == "jal":
        _check_imm(i.imm, 21, what="jump offset")
        if i.imm % INSN:
            raise AsmError(f"jump offset {i.imm} is not instruction aligned")
        m = i.imm & 0x1FFFFF
        return ((_bits(m, 20, 20) << 31) | (_bits(m, 10, 1) << 21) | (_bits(m, 11, 11) << 20)
                | (_bits(m, 19, 12) << 12) | (i.rd << 7) | OP_JAL)
    raise AsmError(f"unknown mnemonic {op!r}")


def decode(word: int) -> Insn | None:
    """The RISC-U instruction encoded by ``word``, or ``None`` if it is not one."""
    if word == ECALL:
        return Insn("ecall")
    opcode = word & 0x7F
    rd, f3 = _bits(word, 11, 7), _bits(word, 14, 12)
    rs1, rs2, f7 = _bits(word, 19, 15), _bits(word, 24, 20), _bits(word, 31, 25)
    imm_i = _sext(_bits(word, 31, 20), 12)
    if opcode == OP_LUI:
        return Insn("lui", rd, imm=_bits(word, 31, 12))
    if opcode == OP_IMM and f3 == 0:
        return Insn("addi", rd, rs1, imm=imm_i)
    if opcode == OP_LOAD and f3 == 3:
        return Insn("ld", rd, rs1, imm=imm_i)
    if opcode == OP_JALR and f3 == 0:
        return Insn("jalr", rd, rs1, imm=imm_i)
    if opcode == OP_STORE and f3 == 3:
        return Insn("sd", 0, rs1, rs2, _sext((f7 << 5) | rd, 12))
    if opcode == OP_OP:
        for name, (g3, g7) in R_TYPE.items():
            if (f3, f7) == (g3, g7):
                return Insn(name, rd, rs1, rs2)
        return None
    if opcode == OP_BRANCH and f3 == 0:
        imm = ((word >> 31) << 12) | (_bits(word, 7, 7) << 11) | (_bits(word, 30, 25) << 5) | (_bits(word, 11, 8) << 1)
        return Insn("beq", 0, rs1, rs2, _sext(imm, 13))
    if opcode == OP_JAL:
        imm = ((word >> 31) << 20) | (_bits(word, 19, 12) << 12) | (_bits(word, 20, 20) << 11) | (_bits(word, 30, 21) << 1)
        return Insn("jal", rd, imm=_sext(imm, 21))
    return None


# -- layout -------------------------------------------------------------------


def index_bits(n: int) -> int:
    """Index width of a segment holding ``n`` entries (at least 1 bit)."""
    return max(1, (max(n, 1) - 1).bit_length())


def data_start(ncode: int) -> int:
    """First data address: right after the code segment padded to a power of two."""
    return CODE_START + INSN * (1 << index_bits(ncode))


@dataclass(frozen=True)
class Program:
    code: tuple[int, ...]
    data: tuple[int, ...] = ()
    entry: int = CODE_START
    labels: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def data_start(self) -> int:
        return data_start(len(self.code))

    def disassemble(self) -> list[Insn | None]:
        return [decode(w) for w in self.code]


# -- assembler ----------------------------------------------------------------

_MEM = re.compile(r"^(-?\w+)\((\w+)\)$")


def _reg(tok):
    r = _REGNUM.get(tok.strip().lower())
    if r is None:
        raise AsmError(f"unknown register {tok!r}")
    return r


def _int(tok):
    tok = tok.strip()
    if len(tok) == 3 and tok[0] == tok[2] == "'":
        return ord(tok[1])
    try:
        return int(tok, 0)
    except ValueError:
        raise AsmError(f"expected integer, got {tok!r}") from None


def _li_words(value):
    """Instructions for loading a 32-bit signed constant."""
    if -2048 <= value < 2048:
        return 1
    return 2


def _split_hi_lo(value):
    lo = _sext(value & 0xFFF, 12)
    hi = ((value - lo) >> 12) & 0xFFFFF
    return hi, lo


def _expand(mnem, ops, pc, labels, line):
    """Base instructions for one source line at address ``pc``."""

    def target(tok):
        tok = tok.strip()
        if tok in labels:
            return labels[tok] - pc
        return _int(tok)

    def mem(tok):
        m = _MEM.match(tok.strip())
        if not m:
            raise AsmError(f"expected offset(register), got {tok!r}")
        return _int(m.group(1)), _reg(m.group(2))

    def want(n):
        if len(ops) != n:
            raise AsmError(f"{mnem} expects {n} operands")

    if mnem == "ecall":
        want(0)
        return [Insn("ecall")]
    if mnem == "nop":
        want(0)
        return [Insn("addi")]
    if mnem == "lui":
        want(2)
        return [Insn("lui", _reg(ops[0]), imm=_int(ops[1]))]
    if mnem == "addi":
        want(3)
        return [Insn("addi", _reg(ops[0]), _reg(ops[1]), imm=_int(ops[2]))]
    if mnem == "mv":
        want(2)
        return [Insn("addi", _reg(ops[0]), _reg(ops[1]))]
    if mnem in ("li", "la"):
        want(2)
        rd = _reg(ops[0])
        if mnem == "la":
            if ops[1].strip() not in labels:
                raise AsmError(f"unknown label {ops[1].strip()!r}")
            value = labels[ops[1].strip()]
            hi, lo = _split_hi_lo(value)
            return [Insn("lui", rd, imm=hi), Insn("addi", rd, rd, imm=lo)]
        value = _int(ops[1])
        if not -(1 << 31) <= value < (1 << 31):
            raise AsmError(f"li constant {value} does not fit 32 bits")
        if _li_words(value) == 1:
            return [Insn("addi", rd, 0, imm=value)]
        hi, lo = _split_hi_lo(value)
        return [Insn("lui", rd, imm=hi), Insn("addi", rd, rd, imm=lo)]
    if mnem in ("ld", "jalr"):
        want(2)
        off, base = mem(ops[1])
        return [Insn(mnem, _reg(ops[0]), base, imm=off)]
    if mnem == "sd":
        want(2)
        off, base = mem(ops[1])
        return [Insn("sd", 0, base, _reg(ops[0]), off)]
    if mnem in R_TYPE:
        want(3)
        return [Insn(mnem, _reg(ops[0]), _reg(ops[1]), _reg(ops[2]))]
    if mnem == "beq":
        want(3)
        return [Insn("beq", 0, _reg(ops[0]), _reg(ops[1]), target(ops[2]))]
    if mnem == "jal":
        if len(ops) == 1:
            return [Insn("jal", 1, imm=target(ops[0]))]
        want(2)
        return [Insn("jal", _reg(ops[0]), imm=target(ops[1]))]
    if mnem == "j":
        want(1)
        return [Insn("jal", 0, imm=target(ops[0]))]
    raise AsmError(f"unknown mnemonic {mnem!r}")


def _size(mnem, ops):
    if mnem == "la":
        return 2
    if mnem == "li":
        return _li_words(_int(ops[1]))
    return 1


def _lines(text):
    """(line number, section, label list, mnemonic, operands) per source line."""
    section = "text"
    out = []
    pending = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].split("#", 1)[0].strip()
        while True:
            m = re.match(r"^([A-Za-z_.$][\w.$]*):\s*(.*)$", line)
            if not m:
                break
            pending.append(m.group(1))
            line = m.group(2)
        if not line:
            continue
        parts = line.split(None, 1)
        mnem = parts[0].lower()
        ops = [o for o in parts[1].split(",")] if len(parts) > 1 else []
        if mnem in (".data", ".text", ".code"):
            section = "data" if mnem == ".data" else "text"
            continue
        out.append((n, section, pending, mnem, ops))
        pending = []
    if pending:
        out.append((None, section, pending, None, []))
    return out


def assemble(text: str) -> Program:
    """Assemble RISC-U source: one instruction per line, ``label:`` and ``;`` comments.

    ``.data`` switches to the data section, where ``.dword v`` emits 64-bit
    words.  Pseudo-instructions ``li``, ``la``, ``mv``, ``j`` and ``nop``
    expand to base instructions.
    """
    lines = _lines(text)
    ncode = 0
    for n, section, _, mnem, ops in lines:
        if mnem is None:
            continue
        try:
            if section == "text":
                ncode += _size(mnem, ops)
        except AsmError as e:
            raise AsmError(f"line {n}: {e}") from None
    dstart = data_start(ncode)
    labels = {}
    pc, dp = CODE_START, dstart
    for n, section, names, mnem, ops in lines:
        for name in names:
            if name in labels:
                raise AsmError(f"line {n}: duplicate label {name!r}")
            labels[name] = pc if section == "text" else dp
        if mnem is None:
            continue
        if section == "text":
            pc += INSN * _size(mnem, ops)
        elif mnem == ".dword":
            dp += WORD * len(ops)
        else:
            raise AsmError(f"line {n}: only .dword is allowed in .data")
    code, data = [], []
    pc = CODE_START
    for n, section, _, mnem, ops in lines:
        if mnem is None:
            continue
        try:
            if section == "data":
                for o in ops:
                    o = o.strip()
                    data.append(labels[o] if o in labels else _int(o) & ((1 << 64) - 1))
                continue
            if mnem == ".word":
                code.append(_int(ops[0]) & 0xFFFFFFFF)
                pc += INSN
                continue
            for insn in _expand(mnem, ops, pc, labels, n):
                code.append(encode(insn))
                pc += INSN
        except AsmError as e:
            raise AsmError(f"line {n}: {e}") from None
    return Program(tuple(code), tuple(data), CODE_START, labels)


def disassemble(program: Program) -> str:
    """Source text using base instructions and numeric offsets only."""
    out = []
    for w in program.code:
        insn = decode(w)
        out.append(str(insn) if insn is not None else f".word {w:#010x}")
    if program.data:
        out.append(".data")
        out.extend(f".dword {v:#x}" for v in program.data)
    return "\n".join(out) + "\n"
