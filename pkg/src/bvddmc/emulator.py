"""Concrete BTOR2 emulation.

Two evaluators share one semantics: a scalar one working on Python ints
(``evaluate``, ``init_state``, ``step``, ``check_properties``) and a batch one
that carries one numpy lane per input assignment so that exhaustive input
enumeration (``run_enumerated``) runs all assignments in lockstep.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import bitvec as bv
from .bitvec import BitVec
from .btor2 import Array, Bitvec, CONST_KINDS, Model


class EvaluationError(RuntimeError):
    pass


# -- concrete values ----------------------------------------------------------


@dataclass(frozen=True)
class ArrayValue:
    """Functional array: ``entries`` overrides ``default``; never mutated."""

    index_width: int
    element_width: int
    default: int = 0
    entries: Mapping[int, int] = field(default_factory=dict)

    def read(self, index: int) -> int:
        return self.entries.get(index, self.default)

    def write(self, index: int, value: int) -> "ArrayValue":
        entries = dict(self.entries)
        entries[index] = value
        return ArrayValue(self.index_width, self.element_width, self.default, entries)

    def normalized(self) -> dict[int, int]:
        return {i: v for i, v in self.entries.items() if v != self.default}

    def __eq__(self, other):
        if not isinstance(other, ArrayValue):
            return NotImplemented
        if (self.index_width, self.element_width) != (other.index_width, other.element_width):
            return False
        if self.default == other.default:
            return self.normalized() == other.normalized()
        size = 1 << self.index_width
        return all(self.read(i) == other.read(i) for i in range(size))

    def __hash__(self):
        return hash((self.index_width, self.element_width, self.default,
                     frozenset(self.normalized().items())))


Value = int | ArrayValue
ConcreteState = dict  # state id -> int | ArrayValue


# -- input layout -------------------------------------------------------------


@dataclass(frozen=True)
class InputSlot:
    """One enumerable input position: a bitvector state or one array element."""

    state: int
    element: int | None
    width: int


def input_slots(model: Model, max_index_bits: int = 16) -> list[InputSlot]:
    """Input positions in declaration order; arrays expand element by element."""
    slots = []
    for s in model.inputs:
        sort = model[s].sort
        if isinstance(sort, Array):
            if sort.index > max_index_bits:
                raise EvaluationError(f"input array {s} too large to enumerate")
            slots.extend(InputSlot(s, k, sort.element) for k in range(1 << sort.index))
        else:
            slots.append(InputSlot(s, None, sort.width))
    return slots


# -- scalar evaluation --------------------------------------------------------


def _cone(model: Model, roots: Iterable[int]) -> list[int]:
    """Combinational nodes reachable from ``roots`` in id (topological) order."""
    seen: set[int] = set()
    stack = list(roots)
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if model[n].kind != "state":
            stack.extend(model[n].args)
    return sorted(seen)


def _eval_op(node, vals, model):
    k = node.kind
    a = node.args
    if k in CONST_KINDS:
        return node.params[0]
    if k == "ite":
        return vals[a[1]] if vals[a[0]] else vals[a[2]]
    if k == "read":
        return vals[a[0]].read(vals[a[1]])
    if k == "write":
        return vals[a[0]].write(vals[a[1]], vals[a[2]])
    if k == "input":
        raise EvaluationError("BTOR2 input nodes are not supported; use uninitialized states")
    w = model[a[0]].sort.width
    if len(a) == 1:
        return bv.apply_unary(k, vals[a[0]], w, node.params)
    return bv.apply_binary(k, vals[a[0]], vals[a[1]], w, model[a[1]].sort.width)


def _evaluate_ints(model: Model, state: ConcreteState, roots: Iterable[int],
                   order: list[int] | None = None) -> dict[int, Value]:
    vals: dict[int, Value] = {}
    for n in order if order is not None else _cone(model, roots):
        node = model[n]
        if node.kind == "state":
            if n not in state:
                raise EvaluationError(f"state {n} ({node.symbol}) has no value")
            vals[n] = state[n]
        else:
            vals[n] = _eval_op(node, vals, model)
    return vals


def _wrap(model: Model, nid: int, value: Value):
    if isinstance(value, ArrayValue):
        return value
    return BitVec(model[nid].sort.width, value)


def evaluate(model: Model, state: ConcreteState, nid: int) -> BitVec | ArrayValue:
    """Value of node ``nid`` in ``state`` (``BitVec`` or ``ArrayValue``)."""
    return _wrap(model, nid, _evaluate_ints(model, state, [nid])[nid])


def _init_order(model: Model) -> list[int]:
    """Initialized states ordered so that inits only read already-initialized states."""
    deps = {}
    for s, e in model.inits.items():
        deps[s] = {n for n in _cone(model, [e]) if model[n].kind == "state"}
    order, done, visiting = [], set(), set()

    def visit(s):
        if s in done:
            return
        if s in visiting:
            raise EvaluationError(f"cyclic init dependency through state {s}")
        visiting.add(s)
        for d in deps.get(s, ()):
            if d in model.inits:
                visit(d)
        visiting.discard(s)
        done.add(s)
        order.append(s)

    for s in model.states:
        if s in model.inits:
            visit(s)
    return order


def _state_value(model, s, value):
    sort = model[s].sort
    if isinstance(sort, Array) and not isinstance(value, ArrayValue):
        return ArrayValue(sort.index, sort.element, value)
    return value


def init_state(model: Model, inputs: Sequence[int] | Sequence[BitVec]) -> ConcreteState:
    """Initial state: inits evaluated, input slots filled from ``inputs`` in order."""
    slots = input_slots(model)
    values = [x.value if isinstance(x, BitVec) else int(x) for x in inputs]
    if len(values) < len(slots):
        raise EvaluationError(f"missing input: {len(slots)} positions, {len(values)} given")
    if len(values) > len(slots):
        raise EvaluationError(f"too many inputs: {len(slots)} positions, {len(values)} given")
    state: ConcreteState = {}
    arrays: dict[int, dict[int, int]] = {}
    for slot, v in zip(slots, values):
        if v >> slot.width or v < 0:
            raise EvaluationError(f"input {v} does not fit {slot.width} bits")
        if slot.element is None:
            state[slot.state] = v
        else:
            arrays.setdefault(slot.state, {})[slot.element] = v
    for s, entries in arrays.items():
        sort = model[s].sort
        state[s] = ArrayValue(sort.index, sort.element, 0, entries)
    for s in _init_order(model):
        e = model.inits[s]
        state[s] = _state_value(model, s, _evaluate_ints(model, state, [e])[e])
    return state


class Stepper:
    """Scalar step/check with the evaluation order computed once per model."""

    def __init__(self, model: Model):
        self.model = model
        roots = list(model.nexts.values())
        roots += [model[p].args[0] for p in model.bads + model.constraints]
        self.order = _cone(model, roots)

    def evaluate_all(self, state: ConcreteState) -> dict[int, Value]:
        return _evaluate_ints(self.model, state, (), self.order)

    def step(self, state: ConcreteState) -> ConcreteState:
        vals = self.evaluate_all(state)
        new = dict(state)
        for s, e in self.model.nexts.items():
            new[s] = _state_value(self.model, s, vals[e])
        return new

    def check(self, state: ConcreteState) -> tuple[set[int], set[int]]:
        vals = self.evaluate_all(state)
        m = self.model
        bads = {b for b in m.bads if vals[m[b].args[0]]}
        violated = {c for c in m.constraints if not vals[m[c].args[0]]}
        return bads, violated


def step(model: Model, state: ConcreteState) -> ConcreteState:
    """All next functions evaluated on the old state, then committed together."""
    return Stepper(model).step(state)


def check_properties(model: Model, state: ConcreteState) -> tuple[set[int], set[int]]:
    """(bad node ids that hold, constraint node ids that are violated)."""
    return Stepper(model).check(state)


def run(model: Model, inputs: Sequence[int], kmax: int):
    """Least k at which a bad holds with all constraints intact so far, and its bad names."""
    st = Stepper(model)
    state = init_state(model, inputs)
    for k in range(kmax + 1):
        bads, violated = st.check(state)
        if violated:
            return None
        if bads:
            return k, tuple(model.property_name(b) for b in model.bads if b in bads)
        if k < kmax:
            state = st.step(state)
    return None


# -- batch evaluation ---------------------------------------------------------


def _mask64(w):
    return np.uint64((1 << w) - 1)


class _Batch:
    """Numpy kernels; bitvectors up to 64 bits are uint64 lanes, wider ones objects."""

    def __init__(self, model: Model, lanes: int):
        self.model = model
        self.lanes = lanes

    def width(self, nid):
        return self.model[nid].sort.width

    @staticmethod
    def wide(x):
        return np.asarray(x).astype(object)

    def op(self, node, vals):
        k = node.kind
        a = node.args
        if k in CONST_KINDS:
            return _const(node.params[0], node.sort.width)
        if k == "ite":
            c = vals[a[0]] != 0
            t, e = vals[a[1]], vals[a[2]]
            if isinstance(self.model[node.id].sort, Array):
                c = np.asarray(c)
                if c.ndim:
                    c = c[:, None]
                if np.ndim(t) == np.ndim(e) == 1 and not np.ndim(c):
                    return t if c else e
            return np.where(c, t, e)
        if k == "read":
            arr, idx = vals[a[0]], np.asarray(vals[a[1]]).astype(np.intp)
            if arr.ndim == 1:
                return arr[idx]
            rows = np.arange(arr.shape[0]) if idx.ndim else slice(None)
            return arr[rows, idx]
        if k == "write":
            arr, idx, v = vals[a[0]], np.asarray(vals[a[1]]).astype(np.intp), vals[a[2]]
            if arr.ndim == 1 and not idx.ndim and not np.ndim(v):
                out = arr.copy()
                out[idx] = v
                return out
            out = np.array(np.broadcast_to(arr, (self.lanes, arr.shape[-1])))
            rows = np.arange(self.lanes)
            out[rows, np.broadcast_to(idx, (self.lanes,))] = v
            return out
        if k == "input":
            raise EvaluationError("BTOR2 input nodes are not supported")
        w = self.width(a[0])
        if len(a) == 1:
            return self.unary(k, vals[a[0]], w, node.params, node.sort.width)
        return self.binary(k, vals[a[0]], vals[a[1]], w, self.width(a[1]))

    def unary(self, k, x, w, params, rw):
        if rw > 64 or w > 64:
            x = self.wide(x)
            f = np.frompyfunc(lambda v: bv.apply_unary(k, v, w, params), 1, 1)
            r = f(x)
            return r if rw > 64 else r.astype(np.uint64)
        m = _mask64(w)
        if k == "not":
            return ~x & m
        if k == "neg":
            return (np.uint64(0) - x) & m
        if k == "inc":
            return (x + np.uint64(1)) & m
        if k == "dec":
            return (x - np.uint64(1)) & m
        if k == "redand":
            return (x == m).astype(np.uint64)
        if k == "redor":
            return (x != 0).astype(np.uint64)
        if k == "uext":
            return x
        if k == "sext":
            sign = (x >> np.uint64(w - 1)) & np.uint64(1)
            return x | (sign * np.uint64(((1 << params[0]) - 1) << w))
        if k == "slice":
            hi, lo = params
            return (x >> np.uint64(lo)) & _mask64(hi - lo + 1)
        raise EvaluationError(f"unknown unary operator {k}")

    def binary(self, k, x, y, w, wb):
        if k == "concat":
            if w + wb > 64:
                return self.wide(x) * (1 << wb) + self.wide(y)
            return (x << np.uint64(wb)) | y
        if w > 64:
            f = np.frompyfunc(lambda p, q: bv.BINARY[k](p, q, w), 2, 1)
            r = f(self.wide(x), self.wide(y))
            return r.astype(np.uint64) if k in bv.COMPARISONS else r
        m = _mask64(w)
        one = np.uint64(1)
        if k == "add":
            return (x + y) & m
        if k == "sub":
            return (x - y) & m
        if k == "mul":
            return (x * y) & m
        if k in ("udiv", "urem"):
            zero = y == 0
            safe = np.where(zero, one, y)
            if k == "udiv":
                return np.where(zero, m, x // safe)
            return np.where(zero, x, x % safe)
        if k in ("sdiv", "srem"):
            top = np.uint64(w - 1)
            na = ((x >> top) & one).astype(bool)
            nb = ((y >> top) & one).astype(bool)
            ua = np.where(na, (np.uint64(0) - x) & m, x)
            ub = np.where(nb, (np.uint64(0) - y) & m, y)
            zero = y == 0
            safe = np.where(zero, one, ub)
            if k == "sdiv":
                q = ua // safe
                q = np.where(na ^ nb, (np.uint64(0) - q) & m, q)
                return np.where(zero, np.where(na, one, m), q)
            r = ua % safe
            r = np.where(na, (np.uint64(0) - r) & m, r)
            return np.where(zero, x, r)
        if k == "and":
            return x & y
        if k == "or":
            return x | y
        if k == "xor":
            return x ^ y
        if k in ("sll", "srl", "sra"):
            big = y >= np.uint64(w)
            s = np.minimum(y, np.uint64(63))
            if k == "sll":
                return np.where(big, np.uint64(0), (x << s) & m)
            if k == "srl":
                return np.where(big, np.uint64(0), x >> s)
            neg = ((x >> np.uint64(w - 1)) & one).astype(bool)
            fill = np.where(neg, m, np.uint64(0))
            sw = np.minimum(y, np.uint64(w - 1))
            return np.where(big, fill, (x >> sw) | (fill & (m ^ (m >> sw))))
        if k in bv.COMPARISONS:
            if k in ("slt", "slte", "sgt", "sgte"):
                flip = np.uint64(1 << (w - 1))
                x, y = x ^ flip, y ^ flip
                k = "u" + k[1:]
            r = {
                "eq": np.equal, "neq": np.not_equal, "ult": np.less, "ulte": np.less_equal,
                "ugt": np.greater, "ugte": np.greater_equal,
            }[k](x, y)
            return np.asarray(r).astype(np.uint64)
        raise EvaluationError(f"unknown binary operator {k}")


def _const(value, width):
    return value if width > 64 else np.uint64(value)


def _array_to_numpy(value: ArrayValue):
    dtype = np.uint64 if value.element_width <= 64 else object
    arr = np.full(1 << value.index_width, value.default, dtype=dtype)
    for i, v in value.entries.items():
        arr[i] = v
    return arr


class BatchRunner:
    """Steps one model over many input assignments at once (one lane each)."""

    def __init__(self, model: Model):
        self.model = model
        roots = list(model.nexts.values())
        roots += [model[p].args[0] for p in model.bads + model.constraints]
        self.order = _cone(model, roots)
        self.slots = input_slots(model)
        last = {}
        for i, n in enumerate(self.order):
            if model[n].kind != "state":
                for a in model[n].args:
                    last[a] = i
        keep = set(model.nexts.values()) | {model[p].args[0] for p in model.bads + model.constraints}
        self.release = {}
        for n, i in last.items():
            if n not in keep and model[n].kind != "state":
                self.release.setdefault(i, []).append(n)

    def initial(self, inputs: np.ndarray) -> dict[int, object]:
        """Initial batch state; ``inputs`` has one row per lane and one column per slot."""
        m = self.model
        lanes = inputs.shape[0]
        padded = [0] * len(self.slots)
        scalar = init_state(m, padded)
        state: dict[int, object] = {}
        for s, v in scalar.items():
            state[s] = _array_to_numpy(v) if isinstance(v, ArrayValue) else _const(v, m[s].sort.width)
        for j, slot in enumerate(self.slots):
            col = inputs[:, j].astype(np.uint64)
            if slot.element is None:
                state[slot.state] = col
            else:
                arr = state[slot.state]
                if arr.ndim == 1:
                    arr = np.array(np.broadcast_to(arr, (lanes, arr.shape[0])))
                    state[slot.state] = arr
                arr[:, slot.element] = col
        return state

    def evaluate(self, state: dict[int, object], lanes: int) -> dict[int, object]:
        m = self.model
        k = _Batch(m, lanes)
        vals: dict[int, object] = {}
        with np.errstate(over="ignore"):
            for i, n in enumerate(self.order):
                node = m[n]
                vals[n] = state[n] if node.kind == "state" else k.op(node, vals)
                for dead in self.release.get(i, ()):
                    del vals[dead]
        return vals

    def run(self, inputs: np.ndarray, kmax: int):
        """Per lane: least k with a bad (constraints intact up to k) or -1, and the bad mask."""
        m = self.model
        lanes = inputs.shape[0]
        state = self.initial(inputs)
        least = np.full(lanes, -1, dtype=np.int64)
        which = np.zeros((lanes, len(m.bads)), dtype=bool)
        alive = np.ones(lanes, dtype=bool)
        for step_k in range(kmax + 1):
            vals = self.evaluate(state, lanes)
            for c in m.constraints:
                alive &= np.broadcast_to(vals[m[c].args[0]] != 0, (lanes,))
            hits = np.zeros((lanes, len(m.bads)), dtype=bool)
            for j, b in enumerate(m.bads):
                hits[:, j] = np.broadcast_to(vals[m[b].args[0]] != 0, (lanes,))
            found = alive & hits.any(axis=1)
            least[found] = step_k
            which[found] = hits[found]
            alive &= ~found
            if not alive.any() or step_k == kmax:
                break
            state = {s: vals[m.nexts[s]] if s in m.nexts else v for s, v in state.items()}
        return least, which

    def holds_at(self, inputs: np.ndarray, k: int) -> np.ndarray:
        """Per lane and bad: the bad holds at step ``k`` with constraints intact at steps 0..k."""
        m = self.model
        lanes = inputs.shape[0]
        state = self.initial(inputs)
        alive = np.ones(lanes, dtype=bool)
        for step_k in range(k + 1):
            vals = self.evaluate(state, lanes)
            for c in m.constraints:
                alive &= np.broadcast_to(vals[m[c].args[0]] != 0, (lanes,))
            if step_k == k:
                out = np.zeros((lanes, len(m.bads)), dtype=bool)
                for j, b in enumerate(m.bads):
                    out[:, j] = alive & np.broadcast_to(vals[m[b].args[0]] != 0, (lanes,))
                return out
            state = {s: vals[m.nexts[s]] if s in m.nexts else v for s, v in state.items()}
        raise AssertionError("unreachable")


def enumerate_inputs(model: Model, nbytes: int) -> np.ndarray:
    """All assignments of the first ``nbytes`` input slots (others zero), one row each."""
    slots = input_slots(model)
    widths = [slots[i].width for i in range(nbytes)]
    space = list(itertools.product(*[range(1 << w) for w in widths]))
    inputs = np.zeros((len(space), len(slots)), dtype=np.uint64)
    if nbytes:
        inputs[:, :nbytes] = np.array(space, dtype=np.uint64).reshape(len(space), nbytes)
    return inputs


@dataclass
class EnumerationResult:
    """Least-k table keyed by the enumerated input bytes."""

    nbytes: int
    table: dict[tuple[int, ...], tuple[int, tuple[str, ...]] | None]

    def satisfying(self, k: int, bad: str | None = None) -> set[tuple[int, ...]]:
        return {
            inp for inp, r in self.table.items()
            if r is not None and r[0] == k and (bad is None or bad in r[1])
        }

    def events(self) -> list[tuple[int, str]]:
        seen = {(r[0], b) for r in self.table.values() if r is not None for b in r[1]}
        return sorted(seen)


def run_enumerated(model: Model, kmax: int, nbytes: int | None = None,
                   chunk: int = 8192) -> EnumerationResult:
    """Exhaustively evaluate every assignment of the first ``nbytes`` input slots.

    Remaining slots are held at zero. At most two varying bytes are accepted.
    """
    slots = input_slots(model)
    if nbytes is None:
        nbytes = len(slots)
    if nbytes > len(slots):
        raise EvaluationError(f"model has only {len(slots)} input positions")
    if nbytes > 2:
        raise EvaluationError("enumeration is limited to two input bytes")
    widths = [slots[i].width for i in range(nbytes)]
    if any(w > 8 for w in widths):
        raise EvaluationError("enumeration requires inputs of at most 8 bits")
    space = list(itertools.product(*[range(1 << w) for w in widths]))
    runner = BatchRunner(model)
    names = [model.property_name(b) for b in model.bads]
    table = {}
    for start in range(0, len(space), chunk):
        part = space[start:start + chunk]
        inputs = np.zeros((len(part), len(slots)), dtype=np.uint64)
        if nbytes:
            inputs[:, :nbytes] = np.array(part, dtype=np.uint64).reshape(len(part), nbytes)
        least, which = runner.run(inputs, kmax)
        for row, inp in enumerate(part):
            if least[row] < 0:
                table[inp] = None
            else:
                table[inp] = (int(least[row]), tuple(n for n, h in zip(names, which[row]) if h))
    return EnumerationResult(nbytes, table)
