"""Uniform tracker interface over the two decision-diagram backends, and input sets.

A tracker maps assignments of the input bytes to a bitvector value.  The
propagation engine only talks to ``Backend`` objects, so ROABVDDs and
CFLOBVDDs are interchangeable.  ``InputSet`` is the backend-neutral
description of a set of input assignments as a union of disjoint cubes.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from . import cflobvdd, roabvdd
from .roabvdd import FULL, members, ranges


class Backend:
    name = "abstract"

    def var(self, pos: int): ...

    def leaf(self, width: int, value: int): ...

    def apply(self, key, fn, width, *args): ...

    def ite(self, c, t, e): ...

    def constant(self, t) -> int | None: ...

    def same(self, a, b) -> bool: ...

    def paths(self, t) -> list[dict[int, int]]: ...

    def to_expression(self, t, builder, inputs: Mapping[int, int]) -> int: ...

    def size(self, roots: Iterable) -> int: ...

    def clear_caches(self): ...


class RoabvddBackend(Backend):
    name = "ROABVDD"

    def __init__(self, nbytes: int, memoize: bool = True):
        self.ctx = roabvdd.Context(memoize)
        self.nbytes = nbytes

    def var(self, pos):
        return self.ctx.var(pos)

    def leaf(self, width, value):
        return self.ctx.leaf(width, value)

    def apply(self, key, fn, width, *args):
        return self.ctx.apply(key, fn, width, *args)

    def ite(self, c, t, e):
        return self.ctx.ite(c, t, e)

    def constant(self, t):
        return t.value if t.index is None else None

    def same(self, a, b):
        return a is b

    def paths(self, t):
        return self.ctx.paths(t)

    def to_expression(self, t, builder, inputs):
        return self.ctx.to_expression(t, builder, inputs)

    def size(self, roots):
        return self.ctx.size(roots)

    def values(self, t):
        return self.ctx.values(t)

    def clear_caches(self):
        self.ctx.clear_caches()


class CflobvddBackend(Backend):
    def __init__(self, nbytes: int, block_bits: int = 8, memoize: bool = True):
        self.ctx = cflobvdd.Context(max(nbytes, 1), block_bits, memoize)
        self.nbytes = nbytes
        self.name = f"CFLOBVDD-{block_bits}"

    def var(self, pos):
        return self.ctx.var(pos)

    def leaf(self, width, value):
        return self.ctx.constant(width, value)

    def apply(self, key, fn, width, *args):
        return self.ctx.apply(key, fn, width, *args)

    def ite(self, c, t, e):
        return self.ctx.ite(c, t, e)

    def constant(self, t):
        return t.value if t.is_constant else None

    def same(self, a, b):
        return a is b or (a.grouping is b.grouping and a.values == b.values and a.width == b.width)

    def paths(self, t):
        return self.ctx.paths(t)

    def to_expression(self, t, builder, inputs):
        return self.ctx.to_expression(t, builder, inputs)

    def size(self, roots):
        return self.ctx.size(roots)

    def values(self, t):
        return set(t.values)

    def clear_caches(self):
        self.ctx.clear_caches()


def make_backend(kind: str, nbytes: int, block_bits: int = 8, memoize: bool = True) -> Backend:
    if kind.upper() == "ROABVDD":
        return RoabvddBackend(nbytes, memoize)
    if kind.upper() == "CFLOBVDD":
        return CflobvddBackend(nbytes, block_bits, memoize)
    raise ValueError(f"unknown backend {kind!r}")


# -- input sets -----------------------------------------------------------------


def format_mask(mask: int) -> str:
    """Hex values joined by '+', runs of three or more as 'lo-hi'."""
    parts = []
    for lo, hi in ranges(mask):
        if hi - lo >= 2:
            parts.append(f"{lo:02x}-{hi:02x}")
        else:
            parts.extend(f"{v:02x}" for v in range(lo, hi + 1))
    return "+".join(parts)


def parse_mask(text: str) -> int:
    m = 0
    for part in text.split("+"):
        if "-" in part:
            lo, hi = (int(x, 16) for x in part.split("-"))
            for v in range(lo, hi + 1):
                m |= 1 << v
        else:
            m |= 1 << int(part, 16)
    return m


class InputSet:
    """A set of input assignments as disjoint cubes (position -> ByteSet); absent positions are free."""

    def __init__(self, cubes: Iterable[Mapping[int, int]] = ()):
        self.cubes = [
            {p: m for p, m in c.items() if m != FULL} for c in cubes
            if all(m for m in c.values())
        ]

    @classmethod
    def everything(cls) -> "InputSet":
        return cls([{}])

    def __bool__(self):
        return bool(self.cubes)

    def union(self, other: "InputSet") -> "InputSet":
        return InputSet(self.cubes + other.cubes)

    def positions(self) -> set[int]:
        return {p for c in self.cubes for p in c}

    def expand(self, nbytes: int) -> set[tuple[int, ...]]:
        """Concrete assignments of the first ``nbytes`` positions; later positions must admit 0."""
        out = set()
        for c in self.cubes:
            if any(p >= nbytes and not m & 1 for p, m in c.items()):
                continue
            axes = [members(c.get(p, FULL)) for p in range(nbytes)]
            stack = [()]
            for ax in axes:
                stack = [t + (v,) for t in stack for v in ax]
            out.update(stack)
        return out

    def canonical(self) -> list[dict[int, int]]:
        """Cubes of the unique reduced ordered diagram of the set (order-independent form)."""
        ctx = roabvdd.Context()
        acc = ctx.leaf(1, 0)
        for c in self.cubes:
            cube = ctx.leaf(1, 1)
            for p in sorted(c, reverse=True):
                cube = ctx.node(p, [(c[p], cube), (FULL ^ c[p], ctx.leaf(1, 0))])
            acc = ctx.apply("or", lambda a, b: a | b, 1, acc, cube)
        return ctx.paths(acc)

    def count(self, nbytes: int) -> int:
        return len(self.expand(nbytes))

    def format(self) -> str:
        cubes = self.canonical()
        if not cubes:
            return "none"
        return "|".join(
            "{" + ",".join(f"{p}:{format_mask(c[p])}" for p in sorted(c)) + "}" for c in cubes
        )

    def to_json(self) -> list[dict[str, str]]:
        return [{str(p): format_mask(c[p]) for p in sorted(c)} for c in self.canonical()]

    def __repr__(self):
        return f"InputSet({self.format()})"
