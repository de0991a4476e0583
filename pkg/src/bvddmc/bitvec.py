"""Fixed-width two's-complement bitvectors with SMT-LIB operator semantics.

The integer-level tables (``UNARY``, ``BINARY``) operate on plain Python ints
and are what the emulator and the decision diagrams call in their inner
loops.  ``BitVec`` wraps a value together with its width for everything else.
"""

from __future__ import annotations

MAX_WIDTH = 256


class StructuralError(ValueError):
    """Raised when operand widths or operator parameters are malformed."""


def mask(width: int) -> int:
    return (1 << width) - 1


def to_signed(value: int, width: int) -> int:
    if value >> (width - 1):
        return value - (1 << width)
    return value


# -- integer kernels ----------------------------------------------------------
# Every kernel takes unsigned operands already reduced to `width` bits.


def _sdiv(a: int, b: int, w: int) -> int:
    sa, sb = to_signed(a, w), to_signed(b, w)
    if sb == 0:
        return mask(w) if sa >= 0 else 1
    q = abs(sa) // abs(sb)
    if (sa < 0) != (sb < 0):
        q = -q
    return q & mask(w)


def _srem(a: int, b: int, w: int) -> int:
    sa, sb = to_signed(a, w), to_signed(b, w)
    if sb == 0:
        return a
    r = abs(sa) % abs(sb)
    if sa < 0:
        r = -r
    return r & mask(w)


def _sra(a: int, b: int, w: int) -> int:
    if b >= w:
        return mask(w) if a >> (w - 1) else 0
    return (to_signed(a, w) >> b) & mask(w)


UNARY = {
    "not": lambda a, w: a ^ mask(w),
    "neg": lambda a, w: -a & mask(w),
    "inc": lambda a, w: (a + 1) & mask(w),
    "dec": lambda a, w: (a - 1) & mask(w),
    "redand": lambda a, w: int(a == mask(w)),
    "redor": lambda a, w: int(a != 0),
}

BINARY = {
    "add": lambda a, b, w: (a + b) & mask(w),
    "sub": lambda a, b, w: (a - b) & mask(w),
    "mul": lambda a, b, w: (a * b) & mask(w),
    "udiv": lambda a, b, w: a // b if b else mask(w),
    "urem": lambda a, b, w: a % b if b else a,
    "sdiv": _sdiv,
    "srem": _srem,
    "and": lambda a, b, w: a & b,
    "or": lambda a, b, w: a | b,
    "xor": lambda a, b, w: a ^ b,
    "sll": lambda a, b, w: (a << b) & mask(w) if b < w else 0,
    "srl": lambda a, b, w: a >> b if b < w else 0,
    "sra": _sra,
    "eq": lambda a, b, w: int(a == b),
    "neq": lambda a, b, w: int(a != b),
    "ult": lambda a, b, w: int(a < b),
    "ulte": lambda a, b, w: int(a <= b),
    "ugt": lambda a, b, w: int(a > b),
    "ugte": lambda a, b, w: int(a >= b),
    "slt": lambda a, b, w: int(to_signed(a, w) < to_signed(b, w)),
    "slte": lambda a, b, w: int(to_signed(a, w) <= to_signed(b, w)),
    "sgt": lambda a, b, w: int(to_signed(a, w) > to_signed(b, w)),
    "sgte": lambda a, b, w: int(to_signed(a, w) >= to_signed(b, w)),
}

COMPARISONS = frozenset(
    ["eq", "neq", "ult", "ulte", "ugt", "ugte", "slt", "slte", "sgt", "sgte"]
)
PARAMETRIC_UNARY = frozenset(["sext", "uext", "slice"])
UNARY_KINDS = frozenset(UNARY) | PARAMETRIC_UNARY
BINARY_KINDS = frozenset(BINARY) | {"concat"}


def unary_width(kind: str, width: int, params: tuple[int, ...] = ()) -> int:
    """Result width of a unary operator; ``sext``/``uext`` take the extension amount."""
    if kind in ("redand", "redor"):
        return 1
    if kind in ("sext", "uext"):
        return width + params[0]
    if kind == "slice":
        hi, lo = params
        if not width > hi >= lo >= 0:
            raise StructuralError(f"slice [{hi}:{lo}] out of range for width {width}")
        return hi - lo + 1
    if kind in UNARY:
        return width
    raise StructuralError(f"unknown unary operator {kind!r}")


def binary_width(kind: str, wa: int, wb: int) -> int:
    if kind == "concat":
        return wa + wb
    if kind not in BINARY:
        raise StructuralError(f"unknown binary operator {kind!r}")
    if wa != wb:
        raise StructuralError(f"{kind}: operand widths differ ({wa} vs {wb})")
    return 1 if kind in COMPARISONS else wa


def apply_unary(kind: str, a: int, width: int, params: tuple[int, ...] = ()) -> int:
    """Integer-level unary operator; parameters follow BTOR2 (extension amount, hi/lo)."""
    fn = UNARY.get(kind)
    if fn is not None:
        return fn(a, width)
    if kind == "uext":
        return a
    if kind == "sext":
        if a >> (width - 1):
            return a | (mask(params[0]) << width)
        return a
    if kind == "slice":
        hi, lo = params
        return (a >> lo) & mask(hi - lo + 1)
    raise StructuralError(f"unknown unary operator {kind!r}")


def apply_binary(kind: str, a: int, b: int, width: int, width_b: int | None = None) -> int:
    if kind == "concat":
        return (a << (width if width_b is None else width_b)) | b
    return BINARY[kind](a, b, width)


# -- value type ---------------------------------------------------------------


class BitVec:
    """An immutable ``width``-bit value; ``value`` is always reduced mod 2**width."""

    __slots__ = ("width", "value")

    def __init__(self, width: int, value: int):
        if not 1 <= width <= MAX_WIDTH:
            raise StructuralError(f"bitvector width {width} outside 1..{MAX_WIDTH}")
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "value", value & ((1 << width) - 1))

    def __setattr__(self, name, value):
        raise AttributeError("BitVec is immutable")

    def __eq__(self, other):
        if not isinstance(other, BitVec):
            return NotImplemented
        return self.width == other.width and self.value == other.value

    def __hash__(self):
        return hash((self.width, self.value))

    def __repr__(self):
        return f"BitVec({self.width}, {self.value:#x})"

    def __reduce__(self):
        return (BitVec, (self.width, self.value))

    @property
    def signed(self) -> int:
        return to_signed(self.value, self.width)

    def __bool__(self):
        return self.value != 0


def unary(kind: str, a: BitVec, *params: int) -> BitVec:
    """Apply a unary operator.

    ``sext``/``uext`` take the *target* width and ``slice`` takes ``(hi, lo)``.
    """
    if kind in ("sext", "uext"):
        (target,) = params
        if target < a.width:
            raise StructuralError(f"{kind} to {target} bits narrows a {a.width}-bit value")
        params = (target - a.width,)
    w = unary_width(kind, a.width, params)
    return BitVec(w, apply_unary(kind, a.value, a.width, params))


def binary(kind: str, a: BitVec, b: BitVec) -> BitVec:
    w = binary_width(kind, a.width, b.width)
    return BitVec(w, apply_binary(kind, a.value, b.value, a.width, b.width))


def ite(cond: BitVec, t: BitVec, e: BitVec) -> BitVec:
    if cond.width != 1:
        raise StructuralError(f"ite condition must be 1 bit, got {cond.width}")
    if t.width != e.width:
        raise StructuralError(f"ite branches differ in width ({t.width} vs {e.width})")
    return t if cond.value else e
