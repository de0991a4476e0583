"""BTOR2 models: representation, hash-consing builder, parser, printer, validator."""

from __future__ import annotations

from dataclasses import dataclass, field

from .bitvec import BINARY, COMPARISONS, MAX_WIDTH, UNARY

# -- sorts and nodes ----------------------------------------------------------


@dataclass(frozen=True)
class Bitvec:
    width: int

    def __str__(self):
        return f"bv{self.width}"


@dataclass(frozen=True)
class Array:
    index: int
    element: int

    def __str__(self):
        return f"array[{self.index}->{self.element}]"


Sort = Bitvec | Array

CONST_KINDS = frozenset(["const", "constd", "consth", "zero", "one", "ones"])
EXT_KINDS = frozenset(["sext", "uext"])
UNARY_KINDS = frozenset(UNARY)
BINARY_KINDS = frozenset(BINARY) | {"concat"}
PROPERTY_KINDS = frozenset(["bad", "constraint"])
UNSUPPORTED = {
    "fair": "fairness properties are not supported",
    "justice": "justice/liveness properties are not supported",
    "output": "output nodes are not supported",
}


class BtorError(ValueError):
    """Syntax, reference or sort error while reading a BTOR2 model."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Node:
    """One BTOR2 line.

    ``args`` holds operand node ids; ``params`` holds the integer arguments
    (constant value, extension amount, slice bounds); ``sort_id`` is the id of
    the sort line the node refers to (``None`` for sorts, bads, constraints).
    """

    id: int
    kind: str
    sort: Sort | None
    sort_id: int | None = None
    args: tuple[int, ...] = ()
    params: tuple[int, ...] = ()
    symbol: str | None = None


@dataclass
class Model:
    nodes: dict[int, Node] = field(default_factory=dict)
    states: list[int] = field(default_factory=list)
    inits: dict[int, int] = field(default_factory=dict)
    nexts: dict[int, int] = field(default_factory=dict)
    bads: list[int] = field(default_factory=list)
    constraints: list[int] = field(default_factory=list)

    def __getitem__(self, nid: int) -> Node:
        return self.nodes[nid]

    @property
    def inputs(self) -> list[int]:
        """Uninitialized states, in declaration order."""
        return [s for s in self.states if s not in self.inits]

    def property_name(self, nid: int) -> str:
        node = self.nodes[nid]
        if node.symbol:
            return node.symbol
        group = self.bads if node.kind == "bad" else self.constraints
        return f"{node.kind[0]}{group.index(nid)}"

    def bad_properties(self) -> list[tuple[int, str]]:
        return [(self.nodes[b].args[0], self.property_name(b)) for b in self.bads]

    def constraint_properties(self) -> list[tuple[int, str]]:
        return [(self.nodes[c].args[0], self.property_name(c)) for c in self.constraints]

    def find_state(self, symbol: str) -> int | None:
        for s in self.states:
            if self.nodes[s].symbol == symbol:
                return s
        return None

    def width(self, nid: int) -> int:
        sort = self.nodes[nid].sort
        if not isinstance(sort, Bitvec):
            raise BtorError(f"node {nid} is not a bitvector")
        return sort.width

    def structure(self) -> list[tuple]:
        """Comparable structural fingerprint (ids, kinds, operands, sorts, symbols)."""
        return [
            (n.id, n.kind, n.sort, n.sort_id, n.args, n.params, n.symbol)
            for n in self.nodes.values()
        ]


# -- builder ------------------------------------------------------------------


class Builder:
    """Appends nodes to a model, reusing structurally identical combinational nodes."""

    def __init__(self, model: Model | None = None):
        self.model = model if model is not None else Model()
        self.next_id = max(self.model.nodes, default=0) + 1
        self._sorts: dict[Sort, int] = {}
        self._cons: dict[tuple, int] = {}
        for n in self.model.nodes.values():
            if n.kind == "sort":
                self._sorts.setdefault(n.sort, n.id)

    def _add(self, kind, sort, args=(), params=(), symbol=None) -> int:
        sort_id = self.sort(sort) if sort is not None and kind != "sort" else None
        nid = self.next_id
        self.next_id += 1
        self.model.nodes[nid] = Node(nid, kind, sort, sort_id, tuple(args), tuple(params), symbol)
        return nid

    def sort(self, sort: Sort) -> int:
        sid = self._sorts.get(sort)
        if sid is None:
            if isinstance(sort, Array):
                args, params = (self.sort(Bitvec(sort.index)), self.sort(Bitvec(sort.element))), ()
            else:
                args, params = (), (sort.width,)
            sid = self._add("sort", sort, args, params)
            self._sorts[sort] = sid
        return sid

    def _consed(self, kind, sort, args=(), params=()) -> int:
        key = (kind, sort, tuple(args), tuple(params))
        nid = self._cons.get(key)
        if nid is None:
            nid = self._add(kind, sort, args, params)
            self._cons[key] = nid
        return nid

    def const(self, width: int, value: int) -> int:
        return self._consed("constd", Bitvec(width), (), (value & ((1 << width) - 1),))

    def sort_of(self, nid: int) -> Sort:
        return self.model.nodes[nid].sort

    def width(self, nid: int) -> int:
        return self.model.width(nid)

    def op(self, kind: str, *args: int, params: tuple[int, ...] = ()) -> int:
        """Combinational operator with its result sort inferred from the operands."""
        sorts = [self.sort_of(a) for a in args]
        if kind in UNARY_KINDS:
            sort = Bitvec(1) if kind in ("redand", "redor") else sorts[0]
        elif kind in EXT_KINDS:
            sort = Bitvec(sorts[0].width + params[0])
        elif kind == "slice":
            sort = Bitvec(params[0] - params[1] + 1)
        elif kind == "concat":
            sort = Bitvec(sorts[0].width + sorts[1].width)
        elif kind in COMPARISONS:
            sort = Bitvec(1)
        elif kind in BINARY_KINDS:
            sort = sorts[0]
        elif kind == "ite":
            sort = sorts[1]
        elif kind == "read":
            sort = Bitvec(sorts[0].element)
        elif kind == "write":
            sort = sorts[0]
        else:
            raise BtorError(f"not a combinational operator: {kind}")
        return self._consed(kind, sort, args, params)

    # shorthands used throughout model generation
    def slice(self, a: int, hi: int, lo: int) -> int:
        return self.op("slice", a, params=(hi, lo))

    def uext(self, a: int, extra: int) -> int:
        return a if extra == 0 else self.op("uext", a, params=(extra,))

    def sext(self, a: int, extra: int) -> int:
        return a if extra == 0 else self.op("sext", a, params=(extra,))

    def ite(self, c: int, t: int, e: int) -> int:
        if t == e:
            return t
        return self.op("ite", c, t, e)

    def state(self, sort: Sort, symbol: str | None = None) -> int:
        nid = self._add("state", sort, symbol=symbol)
        self.model.states.append(nid)
        return nid

    def init(self, state: int, value: int) -> int:
        nid = self._add("init", self.sort_of(state), (state, value))
        self.model.inits[state] = value
        return nid

    def next(self, state: int, value: int) -> int:
        nid = self._add("next", self.sort_of(state), (state, value))
        self.model.nexts[state] = value
        return nid

    def bad(self, cond: int, symbol: str | None = None) -> int:
        nid = self._add("bad", None, (cond,), symbol=symbol)
        self.model.bads.append(nid)
        return nid

    def constraint(self, cond: int, symbol: str | None = None) -> int:
        nid = self._add("constraint", None, (cond,), symbol=symbol)
        self.model.constraints.append(nid)
        return nid


# -- parser -------------------------------------------------------------------

_ARITY = {"ite": 3, "read": 2, "write": 3, "init": 2, "next": 2}


def _parse_int(tok: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise BtorError(f"expected integer, got {tok!r}", line) from None


def parse(text: str) -> Model:
    model = Model()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        nid = _parse_int(toks[0], lineno)
        if nid <= 0:
            raise BtorError(f"node id must be positive, got {nid}", lineno)
        if model.nodes and nid <= max(model.nodes):
            raise BtorError(f"node id {nid} does not increase", lineno)
        if len(toks) < 2:
            raise BtorError("missing operator", lineno)
        kind = toks[1]
        node = _parse_line(model, nid, kind, toks[2:], lineno)
        model.nodes[nid] = node
        if kind == "state":
            model.states.append(nid)
        elif kind == "init":
            model.inits[node.args[0]] = node.args[1]
        elif kind == "next":
            model.nexts[node.args[0]] = node.args[1]
        elif kind == "bad":
            model.bads.append(nid)
        elif kind == "constraint":
            model.constraints.append(nid)
    diags = validate(model)
    if diags:
        raise BtorError("; ".join(diags))
    return model


def _ref(model: Model, tok: str, line: int) -> int:
    ref = _parse_int(tok, line)
    if ref < 0:
        raise BtorError("negated operands are not supported", line)
    if ref not in model.nodes:
        raise BtorError(f"reference to undefined node {ref}", line)
    return ref


def _sort_ref(model: Model, tok: str, line: int) -> tuple[int, Sort]:
    sid = _ref(model, tok, line)
    node = model.nodes[sid]
    if node.kind != "sort":
        raise BtorError(f"node {sid} is not a sort", line)
    return sid, node.sort


def _parse_line(model: Model, nid: int, kind: str, rest: list[str], line: int) -> Node:
    if kind in UNSUPPORTED:
        raise BtorError(UNSUPPORTED[kind], line)

    def need(n):
        if len(rest) < n:
            raise BtorError(f"{kind} expects {n} arguments", line)

    def symbol(i):
        return " ".join(rest[i:]) or None

    if kind == "sort":
        need(2)
        if rest[0] == "bitvec":
            w = _parse_int(rest[1], line)
            if not 1 <= w <= MAX_WIDTH:
                raise BtorError(f"bitvector width {w} unsupported", line)
            return Node(nid, kind, Bitvec(w), None, (), (w,), symbol(2))
        if rest[0] == "array":
            need(3)
            isid, isort = _sort_ref(model, rest[1], line)
            esid, esort = _sort_ref(model, rest[2], line)
            if not (isinstance(isort, Bitvec) and isinstance(esort, Bitvec)):
                raise BtorError("nested array sorts are not supported", line)
            return Node(nid, kind, Array(isort.width, esort.width), None, (isid, esid), (), symbol(3))
        raise BtorError(f"unknown sort {rest[0]!r}", line)

    if kind in ("bad", "constraint"):
        need(1)
        return Node(nid, kind, None, None, (_ref(model, rest[0], line),), (), symbol(1))

    need(1)
    sid, sort = _sort_ref(model, rest[0], line)
    rest = rest[1:]
    if kind in CONST_KINDS:
        if not isinstance(sort, Bitvec):
            raise BtorError("constants must have bitvector sort", line)
        w = sort.width
        if kind in ("zero", "one", "ones"):
            value = {"zero": 0, "one": 1, "ones": (1 << w) - 1}[kind]
            return Node(nid, kind, sort, sid, (), (value,), symbol(0))
        need(1)
        tok = rest[0]
        try:
            if kind == "const":
                if len(tok) != w or set(tok) - {"0", "1"}:
                    raise ValueError
                value = int(tok, 2)
            elif kind == "constd":
                value = int(tok)
                if not -(1 << (w - 1)) <= value < (1 << w):
                    raise ValueError
                value &= (1 << w) - 1
            else:
                value = int(tok, 16)
                if value >> w:
                    raise ValueError
        except ValueError:
            raise BtorError(f"bad {kind} literal {tok!r} for width {w}", line) from None
        return Node(nid, kind, sort, sid, (), (value,), symbol(1))
    if kind in ("state", "input"):
        return Node(nid, kind, sort, sid, (), (), symbol(0))
    if kind in UNARY_KINDS:
        need(1)
        return Node(nid, kind, sort, sid, (_ref(model, rest[0], line),), (), symbol(1))
    if kind in EXT_KINDS:
        need(2)
        return Node(nid, kind, sort, sid, (_ref(model, rest[0], line),),
                    (_parse_int(rest[1], line),), symbol(2))
    if kind == "slice":
        need(3)
        return Node(nid, kind, sort, sid, (_ref(model, rest[0], line),),
                    (_parse_int(rest[1], line), _parse_int(rest[2], line)), symbol(3))
    if kind in BINARY_KINDS:
        need(2)
        args = (_ref(model, rest[0], line), _ref(model, rest[1], line))
        return Node(nid, kind, sort, sid, args, (), symbol(2))
    if kind in _ARITY:
        n = _ARITY[kind]
        need(n)
        args = tuple(_ref(model, t, line) for t in rest[:n])
        return Node(nid, kind, sort, sid, args, (), symbol(n))
    raise BtorError(f"unknown operator {kind!r}", line)


# -- printer ------------------------------------------------------------------


def _literal(node: Node) -> str:
    (value,) = node.params
    w = node.sort.width
    if node.kind == "const":
        return format(value, f"0{w}b")
    if node.kind == "constd":
        return str(value)
    return format(value, "x")


def dumps(model: Model) -> str:
    out = []
    for n in model.nodes.values():
        if n.kind == "sort":
            if isinstance(n.sort, Bitvec):
                parts = [str(n.id), "sort", "bitvec", str(n.sort.width)]
            else:
                parts = [str(n.id), "sort", "array", str(n.args[0]), str(n.args[1])]
        elif n.kind in PROPERTY_KINDS:
            parts = [str(n.id), n.kind, str(n.args[0])]
        else:
            parts = [str(n.id), n.kind, str(n.sort_id)]
            if n.kind in ("const", "constd", "consth"):
                parts.append(_literal(n))
            elif n.kind not in CONST_KINDS:
                parts.extend(str(a) for a in n.args)
                parts.extend(str(p) for p in n.params)
        if n.symbol:
            parts.append(n.symbol)
        out.append(" ".join(parts))
    return "\n".join(out) + ("\n" if out else "")


# -- validator ----------------------------------------------------------------


def validate(model: Model) -> list[str]:
    """Structural diagnostics; empty iff the model is well formed."""
    diags: list[str] = []
    seen: set[int] = set()
    inits: dict[int, int] = {}
    nexts: dict[int, int] = {}
    props: dict[str, set[int]] = {"bad": set(), "constraint": set()}
    prev = 0
    for nid, n in model.nodes.items():
        d = _check_node(model, n, seen)
        diags.extend(f"node {nid}: {m}" for m in d)
        if nid <= prev:
            diags.append(f"node {nid}: ids must increase")
        prev = nid
        seen.add(nid)
        if n.kind in ("init", "next") and not d:
            table = inits if n.kind == "init" else nexts
            st = n.args[0]
            if st in table:
                diags.append(f"node {nid}: state {st} has more than one {n.kind}")
            table[st] = n.args[1]
        if n.kind in PROPERTY_KINDS:
            props[n.kind].add(n.args[0])
    if inits != model.inits:
        diags.append("init table does not match init nodes")
    if nexts != model.nexts:
        diags.append("next table does not match next nodes")
    if model.states != [i for i, n in model.nodes.items() if n.kind == "state"]:
        diags.append("state list does not match state nodes")
    if model.bads != [i for i, n in model.nodes.items() if n.kind == "bad"]:
        diags.append("bad list does not match bad nodes")
    if model.constraints != [i for i, n in model.nodes.items() if n.kind == "constraint"]:
        diags.append("constraint list does not match constraint nodes")
    both = props["bad"] & props["constraint"]
    if both:
        diags.append(f"expressions used as both bad and constraint: {sorted(both)}")
    return diags


def _check_node(model: Model, n: Node, seen: set[int]) -> list[str]:
    d: list[str] = []
    for a in n.args:
        if a not in seen:
            d.append(f"operand {a} not defined earlier")
    if d:
        return d
    if n.kind == "sort":
        return d
    if n.kind not in PROPERTY_KINDS:
        sn = model.nodes.get(n.sort_id) if n.sort_id is not None else None
        if sn is None or sn.kind != "sort" or sn.sort != n.sort:
            d.append("sort reference does not match node sort")
    ops = [model.nodes[a] for a in n.args]
    if any(o.kind in ("sort", "init", "next", "bad", "constraint") for o in ops):
        return d + ["operand is not an expression"]
    srt = [o.sort for o in ops]
    k = n.kind

    def bv(s):
        return isinstance(s, Bitvec)

    if k in PROPERTY_KINDS:
        if srt[0] != Bitvec(1):
            d.append(f"{k} argument must be 1-bit")
    elif k in CONST_KINDS or k in ("state", "input"):
        if k in CONST_KINDS and not bv(n.sort):
            d.append("constant must be a bitvector")
    elif k in ("init", "next"):
        target = ops[0]
        if target.kind != "state":
            d.append(f"{k} on a node that is not a state")
        elif n.sort != target.sort:
            d.append(f"{k} sort differs from state sort")
        elif srt[1] != target.sort and not (
            k == "init" and isinstance(target.sort, Array) and srt[1] == Bitvec(target.sort.element)
        ):
            d.append(f"{k} value sort {srt[1]} does not match state sort {target.sort}")
    elif k in UNARY_KINDS:
        want = Bitvec(1) if k in ("redand", "redor") else srt[0]
        if not bv(srt[0]) or n.sort != want:
            d.append(f"{k} sort mismatch")
    elif k in EXT_KINDS:
        if not bv(srt[0]) or n.sort != Bitvec(srt[0].width + n.params[0]):
            d.append(f"{k} sort mismatch")
    elif k == "slice":
        hi, lo = n.params
        if not bv(srt[0]) or not srt[0].width > hi >= lo >= 0:
            d.append(f"slice bounds [{hi}:{lo}] out of range")
        elif n.sort != Bitvec(hi - lo + 1):
            d.append("slice sort mismatch")
    elif k == "concat":
        if not (bv(srt[0]) and bv(srt[1])) or n.sort != Bitvec(srt[0].width + srt[1].width):
            d.append("concat sort mismatch")
    elif k in BINARY_KINDS:
        if not (bv(srt[0]) and srt[0] == srt[1]):
            d.append(f"{k} operand sorts differ")
        elif n.sort != (Bitvec(1) if k in COMPARISONS else srt[0]):
            d.append(f"{k} result sort mismatch")
    elif k == "ite":
        if srt[0] != Bitvec(1):
            d.append("ite condition must be 1-bit")
        if srt[1] != srt[2] or n.sort != srt[1]:
            d.append("ite branch sorts differ")
    elif k == "read":
        if not isinstance(srt[0], Array) or srt[1] != Bitvec(srt[0].index) \
                or n.sort != Bitvec(srt[0].element):
            d.append("read sort mismatch")
    elif k == "write":
        if not isinstance(srt[0], Array) or srt[1] != Bitvec(srt[0].index) \
                or srt[2] != Bitvec(srt[0].element) or n.sort != srt[0]:
            d.append("write sort mismatch")
    else:
        d.append(f"unknown operator {k}")
    return d
