"""Context-free-language ordered bitvector decision diagrams.

A grouping of level 0 decides on one ``b``-bit input block and maps each block
value to an exit.  A grouping of level l > 0 covers ``2**l`` blocks: its
A-connection (level l-1) covers the first half and leads to middle vertices,
each of which owns a B-connection (level l-1) for the second half together
with a return tuple mapping the B-connection's exits to the grouping's exits.
Exits are numbered in first-occurrence order, B return tuples are injective,
and a unique table shares equal groupings, which makes the representation
canonical.  A ``Cflobvdd`` is a top-level grouping plus one distinct value per
exit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .roabvdd import member_expr


class Grouping:
    __slots__ = ("level", "base", "a", "bs", "rets", "nexits", "uid")

    def __init__(self, level, base, a, bs, rets, nexits, uid):
        self.level = level
        self.base = base  # level 0: exit index per block value
        self.a = a
        self.bs = bs  # one B-connection per middle vertex
        self.rets = rets  # return tuple per B-connection
        self.nexits = nexits
        self.uid = uid

    def __repr__(self):
        return f"Grouping(#{self.uid} level={self.level} exits={self.nexits})"


@dataclass(frozen=True, eq=False)
class Cflobvdd:
    grouping: Grouping
    values: tuple[int, ...]
    width: int

    @property
    def is_constant(self) -> bool:
        return len(self.values) == 1

    @property
    def value(self) -> int:
        return self.values[0]


def _first_occurrence(seq: Iterable[Hashable]) -> tuple[list[int], list]:
    """Canonical class numbers for ``seq`` and the distinct items in order."""
    index: dict = {}
    out = []
    for x in seq:
        k = index.get(x)
        if k is None:
            k = index[x] = len(index)
        out.append(k)
    return out, list(index)


class Context:
    """Unique table, caches and layout (level, block size) for one run."""

    def __init__(self, nbytes: int, block_bits: int = 8, memoize: bool = True):
        if block_bits not in (1, 2, 4, 8):
            raise ValueError("block size must be 1, 2, 4 or 8 bits")
        self.b = block_bits
        self.nbytes = nbytes
        self.per_byte = 8 // block_bits
        nblocks = max(1, nbytes * self.per_byte)
        self.level = (nblocks - 1).bit_length()
        self.memoize = memoize
        self._unique: dict[tuple, Grouping] = {}
        self._uid = 0
        self._nd: list[Grouping] = []
        self._product: dict[tuple, tuple[Grouping, list[tuple[int, ...]]]] = {}
        self._reduce: dict[tuple, Grouping] = {}
        self._apply: dict[tuple, Cflobvdd] = {}
        self._proj: dict[tuple[int, int], Grouping] = {}
        self._bytes: dict[int, Cflobvdd] = {}
        for lvl in range(self.level + 1):
            if lvl == 0:
                self._nd.append(self._mk0((0,) * (1 << self.b)))
            else:
                below = self._nd[lvl - 1]
                self._nd.append(self._mk(lvl, below, (below,), ((0,),)))

    # -- unique table -------------------------------------------------------

    def _mk0(self, base: tuple[int, ...]) -> Grouping:
        key = (0, base)
        g = self._unique.get(key)
        if g is None:
            self._uid += 1
            g = self._unique[key] = Grouping(0, base, None, (), (), max(base) + 1, self._uid)
        return g

    def _mk(self, level, a, bs, rets) -> Grouping:
        key = (level, a.uid, tuple(b.uid for b in bs), rets)
        g = self._unique.get(key)
        if g is None:
            nexits = 1 + max(max(r) for r in rets)
            self._uid += 1
            g = self._unique[key] = Grouping(level, None, a, tuple(bs), rets, nexits, self._uid)
        return g

    def no_distinction(self, level: int) -> Grouping:
        return self._nd[level]

    def clear_caches(self):
        self._product.clear()
        self._reduce.clear()
        self._apply.clear()

    # -- leaves -------------------------------------------------------------

    def constant(self, width: int, value: int) -> Cflobvdd:
        return Cflobvdd(self._nd[self.level], (value & ((1 << width) - 1),), width)

    def _projection(self, level: int, block: int) -> Grouping:
        key = (level, block)
        g = self._proj.get(key)
        if g is None:
            if level == 0:
                g = self._mk0(tuple(range(1 << self.b)))
            else:
                half = 1 << (level - 1)
                nd = self._nd[level - 1]
                if block < half:
                    a = self._projection(level - 1, block)
                    g = self._mk(level, a, (nd,) * a.nexits, tuple((j,) for j in range(a.nexits)))
                else:
                    b = self._projection(level - 1, block - half)
                    g = self._mk(level, nd, (b,), (tuple(range(b.nexits)),))
            self._proj[key] = g
        return g

    def projection(self, block: int) -> Cflobvdd:
        """The value of one ``b``-bit input block."""
        if not 0 <= block < 1 << self.level:
            raise IndexError(f"block {block} outside the {1 << self.level} blocks of level {self.level}")
        return Cflobvdd(self._projection(self.level, block), tuple(range(1 << self.b)), self.b)

    def var(self, index: int) -> Cflobvdd:
        """Projection onto input byte ``index``, assembled from its blocks (most significant first)."""
        d = self._bytes.get(index)
        if d is None:
            if index >= self.nbytes:
                raise IndexError(f"input byte {index} outside the {self.nbytes} tracked bytes")
            first = index * self.per_byte
            d = self.projection(first)
            for t in range(1, self.per_byte):
                d = self.apply(("cat", self.b), lambda x, y: (x << self.b) | y,
                               self.b * (t + 1), d, self.projection(first + t))
            self._bytes[index] = d
        return d

    # -- product and reduction ---------------------------------------------

    def _prod(self, gs: tuple[Grouping, ...]) -> tuple[Grouping, list[tuple[int, ...]]]:
        """Product grouping and, per exit, the tuple of argument exits it stands for."""
        live = [i for i, g in enumerate(gs) if g.nexits > 1]
        if len(live) <= 1:
            if not live:
                return gs[0], [(0,) * len(gs)]
            i = live[0]
            g = gs[i]
            return g, [tuple(e if j == i else 0 for j in range(len(gs))) for e in range(g.nexits)]
        key = tuple(g.uid for g in gs)
        hit = self._product.get(key)
        if hit is not None:
            return hit
        if gs[0].level == 0:
            exits, pairs = _first_occurrence(zip(*(g.base for g in gs)))
            r = (self._mk0(tuple(exits)), pairs)
        else:
            a, apairs = self._prod(tuple(g.a for g in gs))
            index: dict[tuple, int] = {}
            bs, rets = [], []
            for mid in apairs:
                b, bpairs = self._prod(tuple(g.bs[m] for g, m in zip(gs, mid)))
                ret = []
                for bp in bpairs:
                    top = tuple(g.rets[m][e] for g, m, e in zip(gs, mid, bp))
                    k = index.get(top)
                    if k is None:
                        k = index[top] = len(index)
                    ret.append(k)
                bs.append(b)
                rets.append(tuple(ret))
            r = (self._mk(gs[0].level, a, bs, tuple(rets)), list(index))
        if self.memoize:
            self._product[key] = r
        return r

    def _red(self, g: Grouping, cls: tuple[int, ...]) -> Grouping:
        """Merge exits of ``g`` according to canonical class numbers ``cls``."""
        if cls == tuple(range(g.nexits)):
            return g
        if max(cls) == 0:
            return self._nd[g.level]
        key = (g.uid, cls)
        hit = self._reduce.get(key)
        if hit is not None:
            return hit
        if g.level == 0:
            r = self._mk0(tuple(cls[e] for e in g.base))
        else:
            mids = []
            for b, ret in zip(g.bs, g.rets):
                induced = [cls[e] for e in ret]
                bcls, distinct = _first_occurrence(induced)
                mids.append((self._red(b, tuple(bcls)), tuple(distinct)))
            acls, uniq = _first_occurrence((b.uid, ret) for b, ret in mids)
            a = self._red(g.a, tuple(acls))
            seen = set()
            bs, rets = [], []
            for (b, ret), c in zip(mids, acls):
                if c not in seen:
                    seen.add(c)
                    bs.append(b)
                    rets.append(ret)
            r = self._mk(g.level, a, bs, tuple(rets))
        if self.memoize:
            self._reduce[key] = r
        return r

    def apply(self, key: Hashable, fn: Callable[..., int], width: int, *args: Cflobvdd) -> Cflobvdd:
        """Pointwise ``fn`` over the values of ``args``: one n-ary product, then one reduction."""
        memo_key = (key, width) + tuple((d.grouping.uid, d.values) for d in args)
        hit = self._apply.get(memo_key) if self.memoize else None
        if hit is not None:
            return hit
        g, tuples = self._prod(tuple(d.grouping for d in args))
        mask = (1 << width) - 1
        vals = [fn(*(d.values[e] for d, e in zip(args, t))) & mask for t in tuples]
        cls, distinct = _first_occurrence(vals)
        r = Cflobvdd(self._red(g, tuple(cls)), tuple(distinct), width)
        if self.memoize:
            self._apply[memo_key] = r
        return r

    def unary(self, key, fn, width, t):
        return self.apply(key, fn, width, t)

    def binary(self, key, fn, width, a, b):
        return self.apply(key, fn, width, a, b)

    def ite(self, c: Cflobvdd, t: Cflobvdd, e: Cflobvdd) -> Cflobvdd:
        if c.is_constant:
            return t if c.value else e
        if t is e or (t.grouping is e.grouping and t.values == e.values):
            return t
        return self.apply("ite", lambda x, y, z: y if x else z, t.width, c, t, e)

    # -- queries ------------------------------------------------------------

    def _blocks(self, assignment) -> list[int]:
        per, b = self.per_byte, self.b
        out = [0] * (1 << self.level)
        for i in range(self.nbytes):
            try:
                v = assignment[i]
            except (KeyError, IndexError):
                continue
            for t in range(per):
                out[i * per + t] = (v >> (8 - (t + 1) * b)) & ((1 << b) - 1)
        return out

    def lookup(self, d: Cflobvdd, assignment: Mapping[int, int] | Sequence[int]) -> int:
        blocks = self._blocks(assignment)

        def walk(g, off):
            if g.level == 0:
                return g.base[blocks[off]]
            m = walk(g.a, off)
            half = 1 << (g.level - 1)
            return g.rets[m][walk(g.bs[m], off + half)]

        return d.values[walk(d.grouping, 0)]

    def _block_paths(self, g: Grouping, exit_: int, memo) -> list[tuple[tuple[int, int], ...]]:
        """Disjoint cubes ((block offset, value mask), ...) leading ``g`` to ``exit_``."""
        key = (g.uid, exit_)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if g.nexits == 1:
            out = [()]
        elif g.level == 0:
            m = 0
            for v, e in enumerate(g.base):
                if e == exit_:
                    m |= 1 << v
            out = [((0, m),)] if m else []
        else:
            half = 1 << (g.level - 1)
            out = []
            for mid, (b, ret) in enumerate(zip(g.bs, g.rets)):
                if exit_ not in ret:
                    continue
                left = self._block_paths(g.a, mid, memo)
                if not left:
                    continue
                right = self._block_paths(b, ret.index(exit_), memo)
                shifted = [tuple((o + half, m) for o, m in p) for p in right]
                out.extend(lp + rp for lp in left for rp in shifted)
        memo[key] = out
        return out

    def paths(self, d: Cflobvdd, accept: Callable[[int], bool] = bool) -> list[dict[int, int]]:
        """Disjoint byte-level cubes (byte index -> ByteSet) where the value satisfies ``accept``."""
        memo: dict = {}
        full_block = (1 << (1 << self.b)) - 1
        out = []
        for e, v in enumerate(d.values):
            if not accept(v):
                continue
            for p in self._block_paths(d.grouping, e, memo):
                per_byte: dict[int, list[int]] = {}
                for off, m in p:
                    if m == full_block:
                        continue
                    i, t = divmod(off, self.per_byte)
                    if i >= self.nbytes:
                        continue
                    per_byte.setdefault(i, [full_block] * self.per_byte)[t] = m
                cube = {}
                for i, masks in per_byte.items():
                    cube[i] = self._byte_mask(masks)
                out.append(cube)
        return out

    def _byte_mask(self, masks: list[int]) -> int:
        b = self.b
        m = 0
        for v in range(256):
            if all(masks[t] >> ((v >> (8 - (t + 1) * b)) & ((1 << b) - 1)) & 1
                   for t in range(self.per_byte)):
                m |= 1 << v
        return m

    def satisfying(self, d: Cflobvdd) -> list[dict[int, int]]:
        return self.paths(d)

    def values(self, d: Cflobvdd) -> set[int]:
        return set(d.values)

    def to_expression(self, d: Cflobvdd, builder, inputs: Mapping[int, int]) -> int:
        """Equivalent combinational BTOR2 expression; ``inputs`` maps byte positions to 8-bit nodes."""
        if d.is_constant:
            return builder.const(d.width, d.value)
        if self.b == 8 and d.width == 8 and d.values == tuple(range(256)):
            for i in range(self.nbytes):
                if d.grouping is self._projection(self.level, i):
                    return inputs[i]
        memo: dict = {}

        def block(off):
            i, t = divmod(off, self.per_byte)
            if i >= self.nbytes:
                return builder.const(self.b, 0)
            x = inputs[i]
            if self.b == 8:
                return x
            hi = 8 - t * self.b - 1
            return builder.slice(x, hi, hi - self.b + 1)

        def exits(g, off):
            """Expression for the exit index ``g`` takes, as a ``width(g)``-bit value."""
            key = (g.uid, off)
            hit = memo.get(key)
            if hit is not None:
                return hit
            w = _index_width(g.nexits)
            if g.nexits == 1:
                r = builder.const(w, 0)
            elif g.level == 0:
                x = block(off)
                if self.b == 8:
                    r = _select(builder, w, lambda e: member_expr(
                        builder, x, sum(1 << v for v, k in enumerate(g.base) if k == e)),
                        list(range(g.nexits)), lambda e: builder.const(w, e))
                else:
                    xe = builder.uext(x, 8 - self.b)
                    r = _select(builder, w, lambda e: member_expr(
                        builder, xe, sum(1 << v for v, k in enumerate(g.base) if k == e)),
                        list(range(g.nexits)), lambda e: builder.const(w, e))
            else:
                half = 1 << (g.level - 1)
                m = exits(g.a, off)
                wa = _index_width(g.a.nexits)

                def mid(j):
                    be = exits(g.bs[j], off + half)
                    return _remap(builder, be, _index_width(g.bs[j].nexits), g.rets[j], w)

                r = _select(builder, w, lambda j: builder.op("eq", m, builder.const(wa, j)),
                            list(range(len(g.bs))), mid)
            memo[key] = r
            return r

        top = exits(d.grouping, 0)
        wt = _index_width(d.grouping.nexits)
        return _remap(builder, top, wt, d.values, d.width)

    # -- measurement --------------------------------------------------------

    def groupings(self, roots: Iterable[Cflobvdd]) -> set[Grouping]:
        seen: dict[int, Grouping] = {}
        stack = [d.grouping for d in roots]
        while stack:
            g = stack.pop()
            if g.uid in seen:
                continue
            seen[g.uid] = g
            if g.level:
                stack.append(g.a)
                stack.extend(g.bs)
        return set(seen.values())

    def count_structures(self, d: Cflobvdd) -> tuple[int, int]:
        """(unique groupings, total edges) reachable from ``d``."""
        gs = self.groupings([d])
        edges = 0
        for g in gs:
            edges += len(g.base) if g.level == 0 else 1 + sum(len(r) for r in g.rets)
        return len(gs), edges

    def structure_report(self, d: Cflobvdd) -> str:
        """TSV: level, groupings, edges, values."""
        gs = self.groupings([d])
        lines = ["level\tgroupings\tedges\tvalues"]
        for lvl in range(self.level + 1):
            at = [g for g in gs if g.level == lvl]
            edges = sum(len(g.base) if lvl == 0 else 1 + sum(len(r) for r in g.rets) for g in at)
            vals = len(d.values) if lvl == self.level else 0
            lines.append(f"{lvl}\t{len(at)}\t{edges}\t{vals}")
        return "\n".join(lines)

    def size(self, roots: Iterable[Cflobvdd]) -> int:
        roots = list(roots)
        vals = {(d.width, v) for d in roots for v in d.values}
        return len(self.groupings(roots)) + len(vals)


def _index_width(n: int) -> int:
    return max(1, (n - 1).bit_length())


def _select(builder, width, cond, keys, value):
    """ite chain over ``keys``; the last key is the default."""
    r = value(keys[-1])
    for k in reversed(keys[:-1]):
        r = builder.ite(cond(k), value(k), r)
    return r


def _remap(builder, x, wx, table, width):
    """Expression for ``table[x]`` where ``x`` is a ``wx``-bit index."""
    if list(table) == list(range(len(table))):
        if width >= wx:
            return builder.uext(x, width - wx)
        return builder.slice(x, width - 1, 0)
    keys = list(range(len(table)))
    return _select(builder, width, lambda k: builder.op("eq", x, builder.const(wx, k)), keys,
                   lambda k: builder.const(width, table[k]))
