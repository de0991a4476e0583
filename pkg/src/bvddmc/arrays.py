"""Replace small arrays by one bitvector state per element.

After conversion, every access to a converted array is plain ite logic over
element states, so constant and domain propagation see through memory.
"""

from __future__ import annotations

from .btor2 import CONST_KINDS, Array, Bitvec, Builder, BtorError, Model


class ConversionError(BtorError):
    pass


def _const_value(model: Model, nid: int) -> int | None:
    n = model[nid]
    return n.params[0] if n.kind in CONST_KINDS else None


def convert_arrays(model: Model, max_index_bits: int = 8, recursive: bool = False) -> Model:
    """Model with every array of index width <= ``max_index_bits`` split into element states.

    Iterative mode selects an element with a chain comparing the whole index
    against each position; recursive mode splits on index bits, MSB first.
    """
    b = Builder()
    out = b.model
    scalar: dict[int, int] = {}
    vec: dict[int, list[int]] = {}

    def convertible(sort):
        return isinstance(sort, Array) and sort.index <= max_index_bits

    def const_of(new):
        return _const_value(out, new)

    def select(elems, idx, iw):
        c = const_of(idx)
        if c is not None:
            return elems[c]
        if recursive:
            def tree(bit, lo):
                if bit < 0:
                    return elems[lo]
                hi = tree(bit - 1, lo + (1 << bit))
                low = tree(bit - 1, lo)
                return b.ite(b.slice(idx, bit, bit), hi, low)
            return tree(iw - 1, 0)
        acc = elems[-1]
        for k in range(len(elems) - 2, -1, -1):
            acc = b.ite(b.op("eq", idx, b.const(iw, k)), elems[k], acc)
        return acc

    for nid, n in model.nodes.items():
        k = n.kind
        if k == "sort":
            if isinstance(n.sort, Array):
                continue
            b.sort(n.sort)
            continue
        if k in CONST_KINDS:
            scalar[nid] = b.const(n.sort.width, n.params[0])
            continue
        if k == "input":
            raise ConversionError(f"node {nid}: input nodes are not supported")
        if k == "state":
            if convertible(n.sort):
                name = n.symbol or f"s{nid}"
                vec[nid] = [b.state(Bitvec(n.sort.element), f"{name}[{i}]")
                            for i in range(1 << n.sort.index)]
            else:
                scalar[nid] = b.state(n.sort, n.symbol)
            continue
        if k in ("init", "next"):
            st, val = n.args
            add = b.init if k == "init" else b.next
            if st in vec:
                vals = vec[val] if val in vec else [scalar[val]] * len(vec[st])
                for e, v in zip(vec[st], vals):
                    add(e, v)
            else:
                add(scalar[st], scalar[val])
            continue
        if k == "bad":
            b.bad(scalar[n.args[0]], n.symbol)
            continue
        if k == "constraint":
            b.constraint(scalar[n.args[0]], n.symbol)
            continue
        if k == "read" and n.args[0] in vec:
            arr = model[n.args[0]].sort
            scalar[nid] = select(vec[n.args[0]], scalar[n.args[1]], arr.index)
            continue
        if k == "write" and n.args[0] in vec:
            elems = vec[n.args[0]]
            idx, v = scalar[n.args[1]], scalar[n.args[2]]
            c = const_of(idx)
            iw = n.sort.index
            if c is not None:
                vec[nid] = [v if i == c else e for i, e in enumerate(elems)]
            else:
                vec[nid] = [b.ite(b.op("eq", idx, b.const(iw, i)), v, e)
                            for i, e in enumerate(elems)]
            continue
        if k == "ite" and n.args[1] in vec:
            c = scalar[n.args[0]]
            cv = const_of(c)
            t, e = vec[n.args[1]], vec[n.args[2]]
            if cv is not None:
                vec[nid] = t if cv else e
            else:
                vec[nid] = [b.ite(c, x, y) for x, y in zip(t, e)]
            continue
        scalar[nid] = b.op(k, *(scalar[a] for a in n.args), params=n.params)
    return out


def converted_arrays(model: Model, max_index_bits: int) -> list[int]:
    """Array states that ``convert_arrays`` would split."""
    return [s for s in model.states
            if isinstance(model[s].sort, Array) and model[s].sort.index <= max_index_bits]
