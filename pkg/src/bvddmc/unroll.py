"""k-step unrolling into a combinational model.

The result keeps the uninitialized states of the original (the inputs) and
evaluates every bad at step k, with every constraint repeated for steps
0..k.  Its 0-satisfiability coincides with k-satisfiability of the
original.  Array states initialized by a plain element value cannot be
written as an expression, so they stay as constant states with their init.
"""

from __future__ import annotations

from .btor2 import CONST_KINDS, Array, Builder, Model


def unroll_to_formula(model: Model, k: int, mode: str = "substitution") -> Model:
    """``substitution`` shares equal subterms across steps; ``duplication`` copies each step."""
    if mode not in ("substitution", "duplication"):
        raise ValueError(f"unknown unrolling mode {mode!r}")
    if k < 0:
        raise ValueError("k must be non-negative")
    m = model
    b = Builder()
    share = mode == "substitution"
    memo: dict[tuple[int, int], int] = {}
    base: dict[int, int] = {}

    for s in m.states:
        n = m[s]
        if s not in m.inits:
            base[s] = b.state(n.sort, n.symbol)

    def emit(node, args):
        if node.kind in CONST_KINDS:
            return b.const(node.sort.width, node.params[0])
        if share:
            return b.op(node.kind, *args, params=node.params)
        return b._add(node.kind, node.sort, args, node.params)

    def deps(step, nid):
        n = m[nid]
        if n.kind == "state":
            if step > 0:
                return [(step - 1, m.nexts.get(nid, nid))]
            if nid in base:
                return []
            init = m.inits[nid]
            if isinstance(n.sort, Array) and not isinstance(m[init].sort, Array):
                return []
            return [(0, init)]
        return [(step, a) for a in n.args]

    def finish(step, nid):
        n = m[nid]
        if n.kind == "state":
            if step > 0:
                return memo[(step - 1, m.nexts.get(nid, nid))]
            if nid in base:
                return base[nid]
            init = m.inits[nid]
            if isinstance(n.sort, Array) and not isinstance(m[init].sort, Array):
                s = b.state(n.sort, n.symbol)
                b.init(s, memo_const(init))
                return s
            return memo[(0, init)]
        return emit(n, [memo[(step, a)] for a in n.args])

    def memo_const(nid):
        n = m[nid]
        return b.const(n.sort.width, n.params[0]) if n.kind in CONST_KINDS else translate(0, nid)

    def translate(step, nid):
        stack = [(step, nid)]
        while stack:
            key = stack[-1]
            if key in memo:
                stack.pop()
                continue
            todo = [d for d in deps(*key) if d not in memo]
            if todo:
                stack.extend(todo)
                continue
            memo[key] = finish(*key)
            stack.pop()
        return memo[(step, nid)]

    for i in range(k + 1):
        for arg, name in m.constraint_properties():
            b.constraint(translate(i, arg), f"{name}@{i}")
    for arg, name in m.bad_properties():
        b.bad(translate(k, arg), name)
    return b.model
