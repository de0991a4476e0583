"""SMT-LIB v2 text interface to an external solver process.

Residual expressions live in a ``btor2.Model``; ``to_smtlib`` prints the cone
of a set of assertions as declarations plus one ``define-fun`` per node.
``Solver.enumerate`` runs one solver session per query and collects every
satisfying assignment of the input variables by adding blocking clauses.
"""

from __future__ import annotations

import os
import selectors
import shlex
import subprocess
import time
from typing import Iterable, Mapping

from .btor2 import CONST_KINDS, Array, Model

DEFAULT_SOLVER = "z3 -in"


class SolverError(RuntimeError):
    """The solver could not decide a query (unknown, timeout, crash or bad reply)."""


class NoSolver(SolverError):
    """A query needs a solver but none is configured."""


def _sort(s) -> str:
    if isinstance(s, Array):
        return f"(Array (_ BitVec {s.index}) (_ BitVec {s.element}))"
    return f"(_ BitVec {s.width})"


def _bool(expr: str) -> str:
    return f"(ite {expr} #b1 #b0)"


_BIN = {
    "add": "bvadd", "sub": "bvsub", "mul": "bvmul", "udiv": "bvudiv", "urem": "bvurem",
    "sdiv": "bvsdiv", "srem": "bvsrem", "and": "bvand", "or": "bvor", "xor": "bvxor",
    "sll": "bvshl", "srl": "bvlshr", "sra": "bvashr", "concat": "concat",
}
_CMP = {
    "ult": "bvult", "ulte": "bvule", "ugt": "bvugt", "ugte": "bvuge",
    "slt": "bvslt", "slte": "bvsle", "sgt": "bvsgt", "sgte": "bvsge",
}


def _name(nid: int) -> str:
    return f"n{nid}"


def literal(width: int, value: int) -> str:
    return f"(_ bv{value & ((1 << width) - 1)} {width})"


def node_term(model: Model, nid: int, array_consts: Mapping[int, int]) -> str | None:
    """SMT-LIB term defining ``nid`` from its operands; ``None`` for declared states."""
    n = model[nid]
    k = n.kind
    a = [_name(x) for x in n.args]
    if k in CONST_KINDS:
        return literal(n.sort.width, n.params[0])
    if k == "state":
        if nid in array_consts:
            return f"((as const {_sort(n.sort)}) {literal(n.sort.element, array_consts[nid])})"
        return None
    if k == "not":
        return f"(bvnot {a[0]})"
    if k == "neg":
        return f"(bvneg {a[0]})"
    if k in ("inc", "dec"):
        op = "bvadd" if k == "inc" else "bvsub"
        return f"({op} {a[0]} {literal(n.sort.width, 1)})"
    if k in ("redand", "redor"):
        w = model[n.args[0]].sort.width
        if k == "redand":
            return _bool(f"(= {a[0]} {literal(w, -1)})")
        return _bool(f"(not (= {a[0]} {literal(w, 0)}))")
    if k == "uext":
        return f"((_ zero_extend {n.params[0]}) {a[0]})"
    if k == "sext":
        return f"((_ sign_extend {n.params[0]}) {a[0]})"
    if k == "slice":
        return f"((_ extract {n.params[0]} {n.params[1]}) {a[0]})"
    if k in _BIN:
        return f"({_BIN[k]} {a[0]} {a[1]})"
    if k == "eq":
        return _bool(f"(= {a[0]} {a[1]})")
    if k == "neq":
        return _bool(f"(not (= {a[0]} {a[1]}))")
    if k in _CMP:
        return _bool(f"({_CMP[k]} {a[0]} {a[1]})")
    if k == "ite":
        return f"(ite (= {a[0]} #b1) {a[1]} {a[2]})"
    if k == "read":
        return f"(select {a[0]} {a[1]})"
    if k == "write":
        return f"(store {a[0]} {a[1]} {a[2]})"
    raise SolverError(f"cannot translate {k} node {nid}")


def cone(model: Model, roots: Iterable[int]) -> list[int]:
    seen: set[int] = set()
    stack = list(roots)
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        stack.extend(model[n].args)
    return sorted(seen)


def to_smtlib(model: Model, assertions: Iterable[int], array_consts: Mapping[int, int] = {},
              terms: Iterable[int] = ()) -> str:
    """Declarations, definitions and assertions (each a 1-bit node required to be 1).

    ``terms`` are extra nodes to define, e.g. for ``get-value``.
    """
    assertions = list(assertions)
    lines = ["(set-option :produce-models true)", "(set-logic QF_ABV)"]
    for nid in cone(model, assertions + list(terms)):
        sort = _sort(model[nid].sort)
        term = node_term(model, nid, array_consts)
        if term is None:
            lines.append(f"(declare-const {_name(nid)} {sort})")
        else:
            lines.append(f"(define-fun {_name(nid)} () {sort} {term})")
    lines.extend(f"(assert (= {_name(a)} #b1))" for a in assertions)
    return "\n".join(lines) + "\n"


def parse_sexpr(text: str):
    """Nested lists of atoms from one s-expression."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    stack: list[list] = [[]]
    for t in tokens:
        if t == "(":
            stack.append([])
        elif t == ")":
            if len(stack) < 2:
                raise SolverError(f"unbalanced reply: {text!r}")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(t)
    if len(stack) != 1 or len(stack[0]) != 1:
        raise SolverError(f"malformed reply: {text!r}")
    return stack[0][0]


def parse_value(atom) -> int:
    if isinstance(atom, list):
        # (_ bvN w)
        if len(atom) == 3 and atom[0] == "_" and atom[1].startswith("bv"):
            return int(atom[1][2:])
        raise SolverError(f"unexpected value {atom!r}")
    if atom.startswith("#b"):
        return int(atom[2:], 2)
    if atom.startswith("#x"):
        return int(atom[2:], 16)
    raise SolverError(f"unexpected value {atom!r}")


class Session:
    """One running solver process with a wall-clock deadline."""

    def __init__(self, argv: list[str], deadline: float | None):
        self.deadline = deadline
        try:
            self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                         stderr=subprocess.DEVNULL, text=True, bufsize=1)
        except OSError as e:
            raise SolverError(f"cannot start solver {argv[0]!r}: {e}") from None
        self.sel = selectors.DefaultSelector()
        self.sel.register(self.proc.stdout, selectors.EVENT_READ)
        self.buf = ""

    def send(self, text: str):
        try:
            self.proc.stdin.write(text)
            self.proc.stdin.flush()
        except OSError as e:
            raise SolverError(f"solver pipe closed: {e}") from None

    def _fill(self):
        wait = None if self.deadline is None else self.deadline - time.monotonic()
        if wait is not None and wait <= 0:
            raise SolverError("solver timeout")
        if not self.sel.select(wait):
            raise SolverError("solver timeout")
        chunk = os.read(self.proc.stdout.fileno(), 65536).decode()
        if not chunk:
            raise SolverError(f"solver exited with status {self.proc.wait()}")
        self.buf += chunk

    def reply(self) -> str:
        """Next complete response: an atom line or a balanced s-expression."""
        while True:
            text = self.buf.lstrip()
            if text:
                if text[0] != "(":
                    if "\n" in text:
                        line, self.buf = text.split("\n", 1)
                        return line.strip()
                else:
                    depth = 0
                    for i, ch in enumerate(text):
                        depth += ch == "("
                        depth -= ch == ")"
                        if depth == 0:
                            self.buf = text[i + 1:]
                            return text[: i + 1]
            self._fill()

    def check(self) -> str:
        self.send("(check-sat)\n")
        r = self.reply()
        if r.startswith("(error"):
            raise SolverError(f"solver error: {r}")
        if r not in ("sat", "unsat"):
            raise SolverError(f"solver answered {r!r}")
        return r

    def close(self):
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        self.proc.kill()
        self.proc.wait()
        self.sel.close()


class Solver:
    """Solver-neutral front end: ``command`` is an argv template such as ``z3 -in``."""

    def __init__(self, command: str | None = DEFAULT_SOLVER, timeout: float | None = None,
                 limit: int = 4096):
        self.argv = shlex.split(command) if command else []
        self.timeout = timeout
        self.limit = limit
        self.calls = 0
        self.started = time.monotonic()

    @property
    def available(self) -> bool:
        return bool(self.argv)

    def _deadline(self):
        return None if self.timeout is None else self.started + self.timeout

    def enumerate(self, model: Model, assertions: list[int], inputs: Mapping[int, int],
                  array_consts: Mapping[int, int] = {},
                  project_all: bool = False) -> tuple[list[dict[int, int]], bool]:
        """All assignments (position -> value) of the inputs the assertions depend on.

        Returns the assignments and whether the enumeration is complete.
        Positions outside the assertions' support are unconstrained.  With
        ``project_all`` every term in ``inputs`` is enumerated.
        """
        if not self.argv:
            raise NoSolver("a residual query needs a solver, but none is configured")
        self.calls += 1
        used = set(cone(model, assertions))
        support = sorted(p for p, nid in inputs.items() if project_all or nid in used)
        s = Session(self.argv, self._deadline())
        try:
            s.send(to_smtlib(model, assertions, array_consts, [inputs[p] for p in support]))
            found: list[dict[int, int]] = []
            while s.check() == "sat":
                if not support:
                    return [{}], True
                names = " ".join(_name(inputs[p]) for p in support)
                s.send(f"(get-value ({names}))\n")
                reply = parse_sexpr(s.reply())
                if not isinstance(reply, list) or len(reply) != len(support):
                    raise SolverError(f"unexpected get-value reply {reply!r}")
                values = {p: parse_value(pair[1]) for p, pair in zip(support, reply)}
                found.append(values)
                if len(found) >= self.limit:
                    return found, False
                width = {p: model[inputs[p]].sort.width for p in support}
                block = " ".join(f"(= {_name(inputs[p])} {literal(width[p], v)})"
                                 for p, v in values.items())
                s.send(f"(assert (not (and {block} true)))\n")
            return found, True
        finally:
            s.close()

    def satisfiable(self, model: Model, assertions: list[int],
                    array_consts: Mapping[int, int] = {}) -> bool:
        if not self.argv:
            raise NoSolver("a residual query needs a solver, but none is configured")
        self.calls += 1
        s = Session(self.argv, self._deadline())
        try:
            s.send(to_smtlib(model, assertions, array_consts))
            return s.check() == "sat"
        finally:
            s.close()

