"""Reduced ordered algebraic bitvector decision diagrams.

Internal nodes branch on one input byte; each outgoing edge is labeled with a
``ByteSet`` (a 256-bit int, bit v set iff byte value v takes the edge).  Leaves
hold bitvector values.  All nodes live in a ``Context`` whose unique table
makes structurally equal diagrams the same Python object, so equality of
functions is identity of nodes.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Mapping

FULL = (1 << 256) - 1


def byteset(values: Iterable[int]) -> int:
    m = 0
    for v in values:
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def ranges(mask: int) -> list[tuple[int, int]]:
    """Maximal runs ``(lo, hi)`` of consecutive members."""
    out = []
    for v in members(mask):
        if out and out[-1][1] == v - 1:
            out[-1] = (out[-1][0], v)
        else:
            out.append((v, v))
    return out


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


class Leaf:
    __slots__ = ("width", "value", "uid")

    def __init__(self, width, value, uid):
        self.width = width
        self.value = value
        self.uid = uid

    index = None
    edges = ()

    def __repr__(self):
        return f"Leaf({self.width}, {self.value:#x})"


class Node:
    __slots__ = ("index", "edges", "width", "uid", "_labels")

    def __init__(self, index, edges, width, uid):
        self.index = index
        self.edges = edges
        self.width = width
        self.uid = uid
        self._labels = None

    def labels(self) -> list[int]:
        """Edge number taken by each of the 256 byte values."""
        if self._labels is None:
            lab = [0] * 256
            for k, (m, _) in enumerate(self.edges):
                for v in members(m):
                    lab[v] = k
            self._labels = lab
        return self._labels

    def __repr__(self):
        return f"Node(#{self.uid} @{self.index}, {len(self.edges)} edges)"


Diagram = Leaf | Node


class Context:
    """Unique tables and apply caches for one family of diagrams."""

    def __init__(self, memoize: bool = True):
        self._leaves: dict[tuple[int, int], Leaf] = {}
        self._nodes: dict[tuple, Node] = {}
        self._cache: dict[tuple, Diagram] = {}
        self._uid = 0
        self.memoize = memoize

    # -- construction -------------------------------------------------------

    def leaf(self, width: int, value: int) -> Leaf:
        value &= (1 << width) - 1
        key = (width, value)
        n = self._leaves.get(key)
        if n is None:
            self._uid += 1
            n = self._leaves[key] = Leaf(width, value, self._uid)
        return n

    def node(self, index: int, edges: Iterable[tuple[int, Diagram]]) -> Diagram:
        """Reduced node: edges to the same child merge, a single edge collapses."""
        merged: dict[int, int] = {}
        kids: dict[int, Diagram] = {}
        for m, child in edges:
            if not m:
                continue
            if child.index is not None and child.index <= index:
                raise ValueError("variable order violated")
            merged[child.uid] = merged.get(child.uid, 0) | m
            kids[child.uid] = child
        if len(merged) == 1:
            return next(iter(kids.values()))
        norm = sorted(((m, kids[u]) for u, m in merged.items()), key=lambda e: lowest(e[0]))
        total = 0
        for m, _ in norm:
            if total & m:
                raise ValueError("edge sets overlap")
            total |= m
        if total != FULL:
            raise ValueError("edge sets do not cover all byte values")
        key = (index, tuple((m, c.uid) for m, c in norm))
        n = self._nodes.get(key)
        if n is None:
            self._uid += 1
            n = self._nodes[key] = Node(index, tuple(norm), norm[0][1].width, self._uid)
        return n

    def var(self, index: int) -> Diagram:
        """Projection onto input byte ``index``."""
        return self.node(index, [(1 << v, self.leaf(8, v)) for v in range(256)])

    # -- operations ---------------------------------------------------------

    def clear_caches(self):
        self._cache.clear()

    def apply(self, key: Hashable, fn: Callable[..., int], width: int, *args: Diagram) -> Diagram:
        """Pointwise ``fn`` over the leaf values of ``args`` (any arity).

        ``key`` identifies ``fn`` in the memo table; ``width`` is the result width.
        """
        memo_key = (key, width) + tuple(a.uid for a in args)
        if self.memoize:
            hit = self._cache.get(memo_key)
            if hit is not None:
                return hit
        idx = min((a.index for a in args if a.index is not None), default=None)
        if idx is None:
            r = self.leaf(width, fn(*(a.value for a in args)))
        else:
            r = self.node(idx, self._cofactors(key, fn, width, args, idx))
        if self.memoize:
            self._cache[memo_key] = r
        return r

    def _cofactors(self, key, fn, width, args, idx):
        top = [a for a in args if a.index == idx]
        size = 1
        for a in top:
            size *= len(a.edges)
        if size <= 64:
            # small products: intersect edge sets directly
            combos = [(FULL, ())]
            for a in args:
                if a.index != idx:
                    combos = [(m, ks + (a,)) for m, ks in combos]
                    continue
                nxt = []
                for m, ks in combos:
                    for em, child in a.edges:
                        mm = m & em
                        if mm:
                            nxt.append((mm, ks + (child,)))
                combos = nxt
            return [(m, self.apply(key, fn, width, *ks)) for m, ks in combos]
        # large products: label each byte value once, linear in 256
        labs = [a.labels() if a.index == idx else None for a in args]
        groups: dict[tuple, int] = {}
        for v in range(256):
            sig = tuple(0 if lab is None else lab[v] for lab in labs)
            groups[sig] = groups.get(sig, 0) | (1 << v)
        out = []
        for sig, m in groups.items():
            kids = tuple(a if lab is None else a.edges[s][1] for a, lab, s in zip(args, labs, sig))
            out.append((m, self.apply(key, fn, width, *kids)))
        return out

    def unary(self, key: Hashable, fn: Callable[[int], int], width: int, t: Diagram) -> Diagram:
        return self.apply(key, fn, width, t)

    def binary(self, key: Hashable, fn: Callable[[int, int], int], width: int,
               a: Diagram, b: Diagram) -> Diagram:
        return self.apply(key, fn, width, a, b)

    def ite(self, c: Diagram, t: Diagram, e: Diagram) -> Diagram:
        if c.index is None:
            return t if c.value else e
        if t is e:
            return t
        if t.index is None and e.index is None and t.width == 1 and t.value == 1 and e.value == 0:
            return c
        return self.apply("ite", lambda x, y, z: y if x else z, t.width, c, t, e)

    # -- queries ------------------------------------------------------------

    def lookup(self, t: Diagram, assignment: Mapping[int, int] | list[int]) -> int:
        while t.index is not None:
            try:
                v = assignment[t.index]
            except (KeyError, IndexError):
                raise KeyError(f"assignment does not cover input byte {t.index}") from None
            for m, child in t.edges:
                if m >> v & 1:
                    t = child
                    break
        return t.value

    def paths(self, t: Diagram, accept: Callable[[int], bool] = bool) -> list[dict[int, int]]:
        """Disjoint cubes (byte index -> ByteSet) covering all inputs whose leaf satisfies ``accept``."""
        memo: dict[int, list[dict[int, int]]] = {}

        def walk(n):
            hit = memo.get(n.uid)
            if hit is not None:
                return hit
            if n.index is None:
                out = [{}] if accept(n.value) else []
            else:
                out = []
                for m, child in n.edges:
                    for p in walk(child):
                        q = {n.index: m}
                        q.update(p)
                        out.append(q)
            memo[n.uid] = out
            return out

        return walk(t)

    def satisfying(self, t: Diagram) -> list[dict[int, int]]:
        return self.paths(t)

    def values(self, t: Diagram) -> set[int]:
        return {n.value for n in reachable([t]) if n.index is None}

    def support(self, t: Diagram) -> set[int]:
        return {n.index for n in reachable([t]) if n.index is not None}

    def to_expression(self, t: Diagram, builder, inputs: Mapping[int, int]) -> int:
        """Equivalent combinational BTOR2 expression built with ``builder``.

        ``inputs`` maps byte positions to 8-bit node ids.
        """
        memo: dict[int, int] = {}

        def build(n):
            hit = memo.get(n.uid)
            if hit is not None:
                return hit
            if n.index is None:
                r = builder.const(n.width, n.value)
            elif n.width == 8 and all(
                c.index is None and m == 1 << c.value for m, c in n.edges
            ):
                r = inputs[n.index]
            else:
                x = inputs[n.index]
                *rest, (_, last) = n.edges
                r = build(last)
                for m, child in reversed(rest):
                    r = builder.ite(member_expr(builder, x, m), build(child), r)
            memo[n.uid] = r
            return r

        return build(t)

    def size(self, roots: Iterable[Diagram]) -> int:
        return len(reachable(roots))

    def dump(self, t: Diagram) -> str:
        lines = []
        for n in sorted(reachable([t]), key=lambda n: n.uid):
            if n.index is None:
                lines.append(f"{n.uid} leaf {n.width} {n.value:#x}")
            else:
                es = " ".join(f"{m:#x}->{c.uid}" for m, c in n.edges)
                lines.append(f"{n.uid} @{n.index} {es}")
        return "\n".join(lines)


def reachable(roots: Iterable[Diagram]) -> set[Diagram]:
    seen: dict[int, Diagram] = {}
    stack = list(roots)
    while stack:
        n = stack.pop()
        if n.uid in seen:
            continue
        seen[n.uid] = n
        stack.extend(c for _, c in n.edges)
    return set(seen.values())


def member_expr(builder, x: int, mask: int) -> int:
    """1-bit expression that holds iff the 8-bit node ``x`` lies in ``mask``."""
    runs = ranges(mask)
    if len(runs) > 2:
        table = builder.const(256, mask)
        shifted = builder.op("srl", table, builder.uext(x, 248))
        return builder.slice(shifted, 0, 0)
    terms = []
    for lo, hi in runs:
        if lo == hi:
            terms.append(builder.op("eq", x, builder.const(8, lo)))
        elif lo == 0:
            terms.append(builder.op("ulte", x, builder.const(8, hi)))
        elif hi == 255:
            terms.append(builder.op("ugte", x, builder.const(8, lo)))
        else:
            terms.append(builder.op("and", builder.op("ugte", x, builder.const(8, lo)),
                                    builder.op("ulte", x, builder.const(8, hi))))
    r = terms[0]
    for t in terms[1:]:
        r = builder.op("or", r, t)
    return r
