"""Domain propagation: per-transition status of every combinational node.

A status is one of

* a Python ``int`` (Constant) or an ``ArrayValue`` (constant array),
* a backend tracker (Tracked): a decision diagram over the input bytes,
* ``Residual``: a node in the residual builder, later handed to a solver,
* ``InputArray``: an unconverted input array, readable at constant indices,
* ``SymArray``: an array known at some constant indices on top of a base array.

Residual expressions are hash-consed in one ``btor2.Builder`` per run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .bitvec import apply_binary, apply_unary, mask
from .btor2 import CONST_KINDS, Array, Bitvec, Builder, Model
from .emulator import ArrayValue, _init_order, input_slots
from .trackers import Backend, InputSet


class PropagationError(ValueError):
    pass


class Residual:
    __slots__ = ("node",)

    def __init__(self, node: int):
        self.node = node

    def __repr__(self):
        return f"Residual({self.node})"


class InputArray:
    """Uninitialized array that was not converted; element k is input position ``slots[k]``."""

    __slots__ = ("state", "slots")

    def __init__(self, state: int, slots: dict[int, int]):
        self.state = state
        self.slots = slots


class SymArray:
    """Array whose elements at the keys of ``entries`` are scalar statuses; ``base`` elsewhere."""

    __slots__ = ("base", "entries")

    def __init__(self, base, entries: dict):
        self.base = base
        self.entries = entries


_PLAIN = (int, ArrayValue, Residual, InputArray, SymArray)
GUARD_LIMIT = 64
_BOOL = frozenset([0, 1])
MAP_BUDGET = 20000


class _Budget(Exception):
    pass


def is_tracker(x) -> bool:
    return not isinstance(x, _PLAIN)


@dataclass(frozen=True)
class Verdict:
    """Outcome of deciding a property status.

    ``kind`` is one of ``unsat``, ``sat``, ``holds``, ``fails``, ``restricts``
    or ``solver``; ``inputs`` is set for ``sat``/``restricts``, ``node`` for
    ``solver``.
    """

    kind: str
    inputs: InputSet | None = None
    node: int | None = None


def _const_of(model: Model, nid: int) -> int | None:
    n = model.nodes[nid]
    return n.params[0] if n.kind in CONST_KINDS else None


def _op_fn(kind: str, params: tuple, widths: tuple[int, ...]):
    w0 = widths[0]
    if len(widths) == 1:
        return lambda a: apply_unary(kind, a, w0, params)
    w1 = widths[1]
    return lambda a, b: apply_binary(kind, a, b, w0, w1)


class Propagator:
    """Status evaluation for one model and one configuration.

    ``p`` is the widest input (in bits) that becomes a tracker; wider or
    all inputs when ``backend`` is ``None`` become residual variables.
    """

    def __init__(self, model: Model, backend: Backend | None, p: int = 8):
        self.m = model
        self.backend = backend
        self.p = p
        self.slots = input_slots(model)
        for pos, sl in enumerate(self.slots):
            if sl.width > 8:
                raise PropagationError(f"input position {pos} is {sl.width} bits wide; at most 8 supported")
        self.rb = Builder()
        self.array_consts: dict[int, int] = {}
        self.invars: dict[int, int] = {}
        self.byte_inputs: dict[int, int] = {}
        self._ops: dict[int, tuple] = {}
        self._lowered: dict[int, tuple[object, int]] = {}
        self._arrays: dict[ArrayValue, int] = {}
        self._guards: dict[int, frozenset | None] = {}
        self._tsize: dict[int, int] = {}
        self._restricted: dict[tuple[int, frozenset], int] = {}

    # -- inputs ---------------------------------------------------------------

    def tracked(self, pos: int) -> bool:
        return self.backend is not None and self.slots[pos].width <= min(self.p, 8)

    def input_var(self, pos: int) -> int:
        """Residual variable for input position ``pos`` (created on first use)."""
        v = self.invars.get(pos)
        if v is None:
            w = self.slots[pos].width
            v = self.rb.state(Bitvec(w), f"in{pos}")
            self.invars[pos] = v
            self.byte_inputs[pos] = self.rb.uext(v, 8 - w)
        return v

    def input_status(self, pos: int):
        w = self.slots[pos].width
        if not self.tracked(pos):
            return Residual(self.input_var(pos))
        t = self.backend.var(pos)
        if w < 8:
            t = self.backend.apply(("slice", w), lambda a: a & mask(w), w, t)
        return t

    def input_domain(self):
        """Live restriction excluding byte values that do not fit narrow tracked inputs."""
        live = 1
        for pos, sl in enumerate(self.slots):
            if sl.width < 8 and self.tracked(pos):
                lim = 1 << sl.width
                ok = self.backend.apply(("lt", lim), lambda a: int(a < lim), 1, self.backend.var(pos))
                live = self.and_(live, ok)
        return live

    def _all_input_bytes(self):
        for pos in range(len(self.slots)):
            self.input_var(pos)

    # -- initial state --------------------------------------------------------

    def initial(self) -> dict[int, object]:
        m = self.m
        frontier: dict[int, object] = {}
        pos = 0
        for s in m.inputs:
            sort = m[s].sort
            if isinstance(sort, Array):
                n = 1 << sort.index
                frontier[s] = InputArray(s, {k: pos + k for k in range(n)})
                pos += n
            else:
                frontier[s] = self.input_status(pos)
                pos += 1
        for s in _init_order(m):
            e = m.inits[s]
            v = self.evaluate([e], frontier)[e]
            sort = m[s].sort
            if isinstance(sort, Array) and isinstance(v, int):
                v = ArrayValue(sort.index, sort.element, v)
            elif isinstance(sort, Array) and not isinstance(v, (ArrayValue, Residual, SymArray)):
                raise PropagationError(f"state {s}: symbolic array initializer")
            frontier[s] = v
        return frontier

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, roots: Iterable[int], frontier: dict, vals: dict | None = None) -> dict:
        """Statuses of ``roots`` (and of whatever their evaluation touched).

        ``ite`` evaluates only the taken branch under a constant condition;
        1-bit ``and``/``or`` skip the second operand when the first decides.
        """
        m = self.m
        vals = {} if vals is None else vals
        for root in roots:
            stack = [root]
            while stack:
                n = stack[-1]
                if n in vals:
                    stack.pop()
                    continue
                node = m.nodes[n]
                k = node.kind
                if k == "state":
                    vals[n] = frontier[n]
                    stack.pop()
                    continue
                if k in CONST_KINDS:
                    vals[n] = node.params[0]
                    stack.pop()
                    continue
                if k == "input":
                    raise PropagationError(f"node {n}: input nodes are not supported; use uninitialized states")
                args = node.args
                if k == "ite":
                    c = args[0]
                    if c not in vals:
                        stack.append(c)
                        continue
                    cv = vals[c]
                    if type(cv) is int:
                        br = args[1] if cv else args[2]
                        if br not in vals:
                            stack.append(br)
                            continue
                        vals[n] = vals[br]
                        stack.pop()
                        continue
                elif (k == "and" or k == "or") and node.sort.width == 1:
                    a = args[0]
                    if a not in vals:
                        stack.append(a)
                        continue
                    av = vals[a]
                    if type(av) is int and (av == 0) == (k == "and"):
                        vals[n] = av
                        stack.pop()
                        continue
                missing = [a for a in args if a not in vals]
                if missing:
                    stack.extend(missing)
                    continue
                vals[n] = self._transfer(n, node, [vals[a] for a in args])
                stack.pop()
        return vals

    def _op(self, nid, node):
        r = self._ops.get(nid)
        if r is None:
            widths = tuple(self.m[a].sort.width for a in node.args)
            key = (node.kind, node.params, widths)
            r = (key, _op_fn(node.kind, node.params, widths), node.sort.width, widths)
            self._ops[nid] = r
        return r

    def _transfer(self, nid, node, ops):
        k = node.kind
        if k == "read":
            return self._read(node, *ops)
        if k == "write":
            return self._write(node, *ops)
        if k == "ite":
            return self._ite(node, *ops)
        key, fn, w, widths = self._op(nid, node)
        if all(type(o) is int for o in ops):
            return fn(*ops)
        if any(type(o) is Residual for o in ops):
            lifted = self._lift(ops, fn, w, k, node.params, widths)
            if lifted is not None:
                return lifted
            if k in ("and", "or") and len(ops) == 2:
                absorb = 0 if k == "and" else mask(w)
                for i, o in enumerate(ops):
                    if type(o) is int:
                        if o == absorb:
                            return o
                        if o == mask(w) - absorb:
                            return ops[1 - i]
            return self._residual(node, ops)
        be = self.backend
        args = [be.leaf(wd, o) if type(o) is int else o for o, wd in zip(ops, widths)]
        return self._norm(be.apply(key, fn, w, *args))

    def _norm(self, t):
        c = self.backend.constant(t)
        return t if c is None else c

    def _ite(self, node, c, t, e):
        # c is not a constant here
        if type(t) is int and type(e) is int and t == e:
            return t
        if type(c) is Residual and isinstance(node.sort, Bitvec):
            if not (is_tracker(t) or is_tracker(e)):
                w = node.sort.width
                lifted = self._lift([c, t, e], lambda c_, t_, e_: t_ if c_ else e_, w,
                                    "ite", (), (1, w, w))
                if lifted is not None:
                    return lifted
                sort = node.sort
                lt, le = self.lower(t, sort), self.lower(e, sort)
                if self._leaves(c.node) is not None:
                    r = self._map(c.node, lambda v, ctx: self._restrict(lt if v else le, ctx))
                    if r is not None:
                        return self._status(r)
                return self._status(self._mkite(c.node, lt, le))
        if isinstance(node.sort, Array) and type(t) is not Residual and type(e) is not Residual:
            merged = self._merge(c, t, e, node.sort)
            if merged is not None:
                return merged
        if type(c) is not Residual and is_tracker(c):
            if t is e or (is_tracker(t) and is_tracker(e) and self.backend.same(t, e)):
                return t
            if isinstance(node.sort, Bitvec) and not (type(t) is Residual or type(e) is Residual):
                w = node.sort.width
                be = self.backend
                tt = be.leaf(w, t) if type(t) is int else t
                ee = be.leaf(w, e) if type(e) is int else e
                return self._norm(be.ite(c, tt, ee))
        return self._residual(node, [c, t, e])

    def _merge(self, c, t, e, sort: Array):
        """Element-wise ite of two arrays sharing a base, or ``None``."""
        if type(t) is ArrayValue and type(e) is ArrayValue and t.default == e.default:
            base = ArrayValue(sort.index, sort.element, t.default)
        else:
            bt, _ = self._split(t)
            be, _ = self._split(e)
            if not self.same(bt, be):
                return None
            base = bt
        keys = set(self._split(t)[1]) | set(self._split(e)[1])
        if type(t) is ArrayValue:
            keys |= set(t.normalized())
        if type(e) is ArrayValue:
            keys |= set(e.normalized())
        entries = {j: self._select(c, self._read_at(t, j, sort), self._read_at(e, j, sort), sort.element)
                   for j in sorted(keys)}
        if all(type(v) is int for v in entries.values()) and type(base) is ArrayValue:
            for j, v in entries.items():
                base = base.write(j, v)
            return base
        return SymArray(base, entries)

    def _read_at(self, arr, idx: int, sort: Array):
        if type(arr) is SymArray:
            if idx in arr.entries:
                return arr.entries[idx]
            arr = arr.base
        if type(arr) is ArrayValue:
            return arr.read(idx)
        if type(arr) is InputArray:
            return self.input_status(arr.slots[idx])
        return Residual(self.rb.op("read", self.lower(arr, sort), self.rb.const(sort.index, idx)))

    def _read(self, node, arr, idx):
        asort = self.m[node.args[0]].sort
        if type(idx) is int and type(arr) is not Residual:
            return self._read_at(arr, idx, asort)
        if type(idx) is Residual and type(arr) is not Residual and self._leaves(idx.node) is not None:
            sort = node.sort

            def leaf(v, _):
                if type(v) is tuple:
                    return self.rb.op("read", self.lower(arr, asort), v[1])
                return self.lower(self._read_at(arr, v, asort), sort)
            r = self._map(idx.node, leaf)
            if r is not None:
                return self._status(r)
        if is_tracker(idx) and type(arr) is not Residual:
            w = node.sort.width
            if type(arr) is ArrayValue:
                return self._norm(self.backend.apply(("read", arr), arr.read, w, idx))
            cands = self._candidates(idx)
            if cands is not None:
                acc = self._read_at(arr, cands[-1], asort)
                for j in reversed(cands[:-1]):
                    acc = self._select(self.eq_const(idx, asort.index, j), self._read_at(arr, j, asort), acc, w)
                return acc
        return self._residual(node, [arr, idx])

    def _split(self, arr):
        """(base, entries) view of a non-residual array status."""
        if type(arr) is SymArray:
            return arr.base, arr.entries
        return arr, {}

    def _candidates(self, idx) -> list[int] | None:
        """Constant values a residual or tracked index may take, when few."""
        if type(idx) is Residual:
            leaves = self._leaves(idx.node)
            if leaves is None or any(type(v) is tuple for v in leaves):
                return None
            return sorted(leaves)
        vals = self.values(idx)
        return None if vals is None or len(vals) > 256 else sorted(vals)

    def _eq(self, x, width: int, value: int):
        if type(x) is Residual:
            r = self._map(x.node, lambda v, _: self.rb.const(1, int(v == value)))
            return Residual(self.rb.op("eq", x.node, self.rb.const(width, value))) if r is None else self._status(r)
        return self.eq_const(x, width, value)

    def _select(self, c, t, e, width: int):
        """Status of ``ite(c, t, e)`` for scalar ``t``/``e`` of the given width."""
        if type(c) is int:
            return t if c else e
        if self.same(t, e):
            return t
        if type(c) is Residual:
            r = self._lift([c, t, e], lambda c_, t_, e_: t_ if c_ else e_, width, "ite", (), (1, width, width))
            if r is not None:
                return r
        elif type(t) is not Residual and type(e) is not Residual:
            be = self.backend
            tt = be.leaf(width, t) if type(t) is int else t
            ee = be.leaf(width, e) if type(e) is int else e
            return self._norm(be.ite(c, tt, ee))
        sort = Bitvec(width)
        return Residual(self._mkite(self.lower(c, Bitvec(1)), self.lower(t, sort), self.lower(e, sort)))

    def _write(self, node, arr, idx, val):
        if type(idx) is not int:
            cands = None if type(arr) is Residual or is_tracker(arr) else self._candidates(idx)
            if cands is None:
                return self._residual(node, [arr, idx, val])
            sort = self.m[node.args[0]].sort
            base, entries = self._split(arr)
            entries = dict(entries)
            for j in cands:
                if j < 1 << sort.index:
                    old = self._read_at(arr, j, sort)
                    entries[j] = self._select(self._eq(idx, sort.index, j), val, old, sort.element)
            return SymArray(base, entries)
        if type(arr) is ArrayValue and type(val) is int:
            return arr.write(idx, val)
        if type(arr) is SymArray:
            entries = {**arr.entries, idx: val}
            if type(arr.base) is ArrayValue and all(type(v) is int for v in entries.values()):
                a = arr.base
                for i, v in entries.items():
                    a = a.write(i, v)
                return a
            return SymArray(arr.base, entries)
        return SymArray(arr, {idx: val})

    # -- residual expressions -------------------------------------------------

    # A residual node is "guarded" when it is an ite tree over residual
    # conditions.  Its leaves are constants (ints) or other terms, tagged
    # ("n", nid).  Operations are applied leaf by leaf, which often folds
    # back to a constant (e.g. a branch target compared against a code
    # address) and keeps per-path terms shared across paths.

    def _leaves(self, nid: int) -> frozenset | None:
        memo, size = self._guards, self._tsize
        if nid in memo:
            return memo[nid]
        nodes = self.rb.model.nodes
        stack = [nid]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            n = nodes[x]
            if n.kind in CONST_KINDS:
                memo[x] = frozenset([n.params[0]])
            elif n.kind == "ite":
                todo = [a for a in n.args[1:] if a not in memo]
                if todo:
                    stack.extend(todo)
                    continue
                t, e = memo[n.args[1]], memo[n.args[2]]
                u = t | e if t is not None and e is not None else None
                size[x] = 1 + size.get(n.args[1], 0) + size.get(n.args[2], 0)
                ok = u is not None and len(u) <= GUARD_LIMIT and size[x] <= MAP_BUDGET
                memo[x] = u if ok else None
            elif n.sort == Bitvec(1):
                memo[x] = _BOOL
            else:
                memo[x] = frozenset([("n", x)])
            size.setdefault(x, 1)
            stack.pop()
        return memo[nid]

    def _atom(self, c: int) -> tuple[int, int]:
        """Condition without leading negations, and its polarity."""
        nodes = self.rb.model.nodes
        pol = 1
        while nodes[c].kind == "not":
            c, pol = nodes[c].args[0], pol ^ 1
        return c, pol

    def _map(self, nid: int, leaf, ctx: frozenset = frozenset(), budget: list | None = None) -> int | None:
        """Rebuild guarded node ``nid`` with each leaf v replaced by ``leaf(v, ctx)``.

        ``ctx`` holds (condition, value) pairs already decided on the current
        path; branches contradicting it are dropped.  Returns ``None`` when
        the rebuild exceeds its budget, which callers may share between calls.
        """
        nodes = self.rb.model.nodes
        if budget is None:
            budget = [MAP_BUDGET]

        def go(x, ctx):
            budget[0] -= 1
            if budget[0] < 0:
                raise _Budget
            n = nodes[x]
            if n.kind in CONST_KINDS:
                return leaf(n.params[0], ctx)
            if n.kind != "ite" and n.sort != Bitvec(1):
                return leaf(("n", x), ctx)
            if n.kind == "ite":
                atom, pol = self._atom(n.args[0])
                hi, lo = (n.args[1], n.args[2]) if pol else (n.args[2], n.args[1])
            else:
                atom, pol = self._atom(x)
                hi = lo = None
            if (atom, 1) in ctx or (atom, 0) in ctx:
                val = int((atom, 1) in ctx)
                if hi is None:
                    r = leaf(val ^ (pol ^ 1), ctx)
                else:
                    r = go(hi if val else lo, ctx)
            else:
                c1, c0 = ctx | {(atom, 1)}, ctx | {(atom, 0)}
                if hi is None:
                    t, e = leaf(pol, c1), leaf(pol ^ 1, c0)
                else:
                    t, e = go(hi, c1), go(lo, c0)
                r = self._mkite(atom, t, e)
            return r

        try:
            return go(nid, ctx)
        except _Budget:
            return None

    def _restrict(self, nid: int, ctx: frozenset) -> int:
        """``nid`` simplified under the decided conditions in ``ctx`` (when guarded)."""
        if not ctx or self._leaves(nid) is None:
            return nid
        key = (nid, ctx)
        if key in self._restricted:
            return self._restricted[key]
        w = self.rb.model[nid].sort.width
        r = self._map(nid, lambda v, _: self._leaf_node(w, v), ctx)
        r = nid if r is None else r
        self._restricted[key] = r
        return r

    def _mkite(self, c: int, t: int, e: int) -> int:
        rb = self.rb
        nodes = rb.model.nodes
        c, pol = self._atom(c)
        if not pol:
            t, e = e, t
        if nodes[t].kind == "ite" and nodes[t].args[0] == c:
            t = nodes[t].args[1]
        if nodes[e].kind == "ite" and nodes[e].args[0] == c:
            e = nodes[e].args[2]
        if t == e:
            return t
        if rb.model[t].sort == Bitvec(1):
            tv, ev = _const_of(rb.model, t), _const_of(rb.model, e)
            if tv == 1 and ev == 0:
                return c
            if tv == 0 and ev == 1:
                return rb.op("not", c)
        return rb.op("ite", c, t, e)

    def _leaf_node(self, w: int, v) -> int:
        return v[1] if type(v) is tuple else self.rb.const(w, v)

    def _status(self, nid: int):
        v = _const_of(self.rb.model, nid)
        return Residual(nid) if v is None else v

    def _lift(self, ops, fn, w, kind, params, widths):
        if any(is_tracker(o) for o in ops):
            return None
        guards = []
        size = 1
        for o in ops:
            if type(o) is Residual and o.node not in guards:
                leaves = self._leaves(o.node)
                if leaves is None:
                    return None
                size *= self._tsize[o.node]
                guards.append(o.node)
        if size > MAP_BUDGET:
            return None
        rb = self.rb
        budget = [MAP_BUDGET]

        def expand(i, env, ctx):
            if i == len(guards):
                vals = [env[o.node] if type(o) is Residual else o for o in ops]
                if not any(type(v) is tuple for v in vals):
                    return rb.const(w, fn(*vals))
                if kind == "ite":
                    return self._leaf_node(w, vals[1] if vals[0] else vals[2])
                args = [self._leaf_node(wd, v) for v, wd in zip(vals, widths)]
                return rb.op(kind, *args, params=params)
            r = self._map(guards[i], lambda v, c: expand(i + 1, {**env, guards[i]: v}, c), ctx, budget)
            if r is None:
                raise _Budget
            return r
        try:
            return self._status(expand(0, {}, frozenset()))
        except _Budget:
            return None

    def _residual(self, node, ops) -> Residual:
        sorts = [self.m[a].sort for a in node.args]
        args = [self.lower(o, s) for o, s in zip(ops, sorts)]
        if node.kind == "ite":
            return Residual(self._mkite(*args))
        return Residual(self.rb.op(node.kind, *args, params=node.params))

    def lower(self, x, sort) -> int:
        """Residual node equal to status ``x`` of the given sort."""
        if type(x) is int:
            return self.rb.const(sort.width, x)
        if type(x) is Residual:
            return x.node
        if type(x) is ArrayValue:
            return self._lower_array(x)
        if type(x) is InputArray:
            return self._lower_input_array(x, sort)
        if type(x) is SymArray:
            return self._lower_sym_array(x, sort)
        hit = self._lowered.get(id(x))
        if hit is None:
            self._all_input_bytes()
            hit = (x, self.backend.to_expression(x, self.rb, self.byte_inputs))
            self._lowered[id(x)] = hit
        return hit[1]

    def _lower_array(self, a: ArrayValue) -> int:
        nid = self._arrays.get(a)
        if nid is None:
            rb = self.rb
            nid = rb.state(Array(a.index_width, a.element_width))
            self.array_consts[nid] = a.default
            for i, v in sorted(a.normalized().items()):
                nid = rb.op("write", nid, rb.const(a.index_width, i), rb.const(a.element_width, v))
            self._arrays[a] = nid
        return nid

    def _lower_sym_array(self, x: SymArray, sort: Array) -> int:
        hit = self._lowered.get(id(x))
        if hit is None:
            rb = self.rb
            nid = self.lower(x.base, sort)
            for i, v in sorted(x.entries.items()):
                nid = rb.op("write", nid, rb.const(sort.index, i), self.lower(v, Bitvec(sort.element)))
            hit = (x, nid)
            self._lowered[id(x)] = hit
        return hit[1]

    def _lower_input_array(self, x: InputArray, sort) -> int:
        key = ("input", x.state)
        nid = self._lowered.get(key)
        if nid is None:
            rb = self.rb
            node = rb.state(sort)
            for k, pos in sorted(x.slots.items()):
                node = rb.op("write", node, rb.const(sort.index, k), self.input_var(pos))
            self._lowered[key] = (x, node)
            return node
        return nid[1]

    # -- Boolean helpers over statuses ---------------------------------------

    def and_(self, a, b):
        if type(a) is int:
            return b if a else 0
        if type(b) is int:
            return a if b else 0
        if type(a) is Residual or type(b) is Residual:
            return Residual(self.rb.op("and", self.lower(a, Bitvec(1)), self.lower(b, Bitvec(1))))
        return self._norm(self.backend.apply(("and", (), (1, 1)), lambda x, y: x & y, 1, a, b))

    def not_(self, a):
        if type(a) is int:
            return a ^ 1
        if type(a) is Residual:
            return Residual(self.rb.op("not", a.node))
        return self._norm(self.backend.apply(("not", (), (1,)), lambda x: x ^ 1, 1, a))

    def or_(self, a, b):
        return self.not_(self.and_(self.not_(a), self.not_(b)))

    def eq_const(self, a, width: int, value: int):
        if type(a) is int:
            return int(a == value)
        if type(a) is Residual:
            return Residual(self.rb.op("eq", a.node, self.rb.const(width, value)))
        return self._norm(self.backend.apply(("eqc", width, value), lambda x: int(x == value), 1, a))

    def same(self, a, b) -> bool:
        if type(a) is not type(b) and not (is_tracker(a) and is_tracker(b)):
            return False
        if type(a) is int or type(a) is ArrayValue:
            return a == b
        if type(a) is Residual:
            return a.node == b.node
        if type(a) is InputArray:
            return a is b
        if type(a) is SymArray:
            return (a.entries.keys() == b.entries.keys() and self.same(a.base, b.base)
                    and all(self.same(v, b.entries[i]) for i, v in a.entries.items()))
        return self.backend.same(a, b)

    def values(self, x) -> set[int] | None:
        """Possible values of a constant or tracked status; ``None`` for residuals."""
        if type(x) is int:
            return {x}
        if is_tracker(x):
            return self.backend.values(x)
        return None

    # -- property decisions ---------------------------------------------------

    def decide_bad(self, status) -> Verdict:
        if type(status) is int:
            return Verdict("sat", InputSet.everything()) if status else Verdict("unsat")
        if type(status) is Residual:
            return Verdict("solver", node=status.node)
        paths = self.backend.paths(status)
        return Verdict("sat", InputSet(paths)) if paths else Verdict("unsat")

    def decide_constraint(self, status) -> Verdict:
        if type(status) is int:
            return Verdict("holds") if status else Verdict("fails")
        if type(status) is Residual:
            return Verdict("solver", node=status.node)
        paths = self.backend.paths(status)
        return Verdict("restricts", InputSet(paths)) if paths else Verdict("fails")

    def tracker_size(self, statuses: Iterable) -> int:
        flat = []
        for x in statuses:
            flat.extend(x.entries.values() if type(x) is SymArray else [x])
        roots = [x for x in flat if is_tracker(x)]
        if not roots or self.backend is None:
            return 0
        return self.backend.size(roots)
