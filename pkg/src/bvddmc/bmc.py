"""Bounded model checking driver over propagated statuses.

Each step decides the constraints, then (from ``kmin`` on) the bad
properties, optionally asserts the negation of reported bads, and moves
every state to the status of its next expression.  Residual queries go to
an SMT solver; everything else is decided by tracker lookups.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

from .arrays import convert_arrays
from .btor2 import Bitvec, Model
from .propagate import Propagator, Residual, is_tracker
from .smt import DEFAULT_SOLVER, Solver, SolverError
from .trackers import InputSet, make_backend


@dataclass
class Options:
    kmin: int = 0
    kmax: int = 100
    backend: str = "ROABVDD"
    block_bits: int = 8
    propagate: int = 8
    array: int = 8
    recursive_array: bool = False
    check_termination: bool = False
    unconstraining_bad: bool = False
    print_pc: bool = False
    print_transition: bool = False
    branching: bool = False
    solver: str | None = DEFAULT_SOLVER
    timeout: float | None = 900.0
    max_paths: int = 1024
    pc_symbol: str = "pc"


@dataclass
class Event:
    k: int
    bad: str
    inputs: InputSet
    instructions: int | None = None

    def line(self) -> str:
        s = f"k={self.k} bad={self.bad} inputs={self.inputs.format()}"
        if self.instructions is not None:
            s += f" instructions={self.instructions}"
        return s


@dataclass
class Report:
    events: list[Event] = field(default_factory=list)
    status: str = "ok"
    steps: int = 0
    solver_calls: int = 0
    peak_nodes: int = 0
    runtime_s: float = 0.0
    paths: int = 1
    partial: bool = False
    messages: list[str] = field(default_factory=list)

    def least(self) -> int | None:
        return min((e.k for e in self.events), default=None)

    def exit_code(self) -> int:
        if self.status in ("unknown", "timeout"):
            return 3
        return 1 if self.events else 0

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "events": [
                {"k": e.k, "bad": e.bad, "inputs": e.inputs.to_json(), "instructions": e.instructions}
                for e in self.events
            ],
            "steps": self.steps,
            "solver_calls": self.solver_calls,
            "peak_nodes": self.peak_nodes,
            "runtime_s": round(self.runtime_s, 6),
            "paths": self.paths,
            "partial": self.partial,
            "messages": self.messages,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


class _Stop(Exception):
    def __init__(self, status: str, message: str):
        self.status = status
        self.message = message


@dataclass
class _Path:
    k: int
    frontier: dict
    live: object
    assertions: list[int]


class Checker:
    def __init__(self, model: Model, opts: Options, out: Callable[[str], None] | None = None):
        self.opts = opts
        self.out = out or (lambda s: None)
        self.model = convert_arrays(model, opts.array, opts.recursive_array) if opts.array > 0 else model
        m = self.model
        nslots = sum(1 for _ in _slots(m))
        backend = None
        if opts.propagate > 0 and opts.backend:
            backend = make_backend(opts.backend, nslots, opts.block_bits)
        self.eng = Propagator(m, backend, opts.propagate)
        self.solver = Solver(opts.solver, opts.timeout)
        self.report = Report()
        self.found: dict[tuple[int, str], InputSet] = {}
        self.bads = m.bad_properties()
        # simultaneous events are reported in declaration order
        self._order = {name: i for i, (_, name) in reversed(list(enumerate(self.bads)))}
        self.constraints = m.constraint_properties()
        self.pc = m.find_state(opts.pc_symbol)
        self.counter = m.find_state("bytes-to-read")
        self._counter_at: dict[int, int] = {}
        self.deadline = None if opts.timeout is None else time.monotonic() + opts.timeout

    # -- solver helpers -------------------------------------------------------

    def _query(self, path: _Path, cond) -> InputSet:
        """Inputs satisfying ``cond`` under the path's live set and residual assertions."""
        eng = self.eng
        full = eng.and_(path.live, cond)
        if type(full) is int:
            if not full:
                return InputSet()
            if not path.assertions:
                return InputSet.everything()
        elif not isinstance(full, Residual) and not path.assertions:
            return InputSet(eng.backend.paths(full))
        node = eng.lower(full, Bitvec(1))
        eng._all_input_bytes()
        models, complete = self.solver.enumerate(eng.rb.model, path.assertions + [node],
                                                 eng.invars, eng.array_consts)
        if not complete:
            self.report.partial = True
            self.report.messages.append("solver enumeration limit reached")
        return InputSet({p: 1 << v for p, v in a.items()} for a in models)

    def _any(self, path: _Path, conds: list) -> bool:
        eng = self.eng
        acc = 0
        for c in conds:
            acc = eng.or_(acc, c)
        full = eng.and_(path.live, acc)
        if type(full) is int:
            return bool(full)
        node = eng.lower(full, Bitvec(1))
        return self.solver.satisfiable(eng.rb.model, path.assertions + [node], eng.array_consts)

    # -- main loop ------------------------------------------------------------

    def run(self) -> Report:
        t0 = time.monotonic()
        r = self.report
        try:
            eng = self.eng
            frontier = eng.initial()
            live = eng.input_domain()
            self._explore(_Path(0, frontier, live, []))
        except _Stop as s:
            r.status = s.status
            r.messages.append(s.message)
        except SolverError as e:
            r.status = "unknown"
            r.partial = True
            r.messages.append(str(e))
        r.solver_calls = self.solver.calls
        r.runtime_s = time.monotonic() - t0
        r.events = [
            Event(k, bad, inputs, self._instructions(k, bad))
            for (k, bad), inputs in sorted(self.found.items(), key=lambda kv: (kv[0][0], self._order[kv[0][1]]))
        ]
        if r.status == "ok" and r.events:
            r.status = "bad"
        return r

    def _check_time(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Stop("timeout", "wall-clock timeout")

    def _explore(self, path: _Path):
        eng, opts, m, r = self.eng, self.opts, self.model, self.report
        while path.k <= opts.kmax:
            self._check_time()
            k = path.k
            vals: dict = {}
            r.steps = max(r.steps, k)
            if self.counter is not None and type(path.frontier[self.counter]) is int:
                self._counter_at.setdefault(k, path.frontier[self.counter])
            if opts.print_transition:
                self.out(f"transition {k}")
            if opts.print_pc and self.pc is not None:
                self.out(f"k={k} pc={self._show(path.frontier[self.pc])}")
            # constraints
            added = False
            for arg, name in self.constraints:
                st = eng.evaluate([arg], path.frontier, vals)[arg]
                if type(st) is Residual:
                    path.assertions.append(st.node)
                    added = True
                else:
                    path.live = eng.and_(path.live, st)
                if _false(path.live):
                    r.messages.append(f"k={k}: constraint {name} fails for all remaining inputs")
                    return
            if added and not self._any(path, [1]):
                r.messages.append(f"k={k}: constraints unsatisfiable")
                return
            # bads
            if k >= opts.kmin:
                statuses = [(eng.evaluate([arg], path.frontier, vals)[arg], name)
                            for arg, name in self.bads]
                hits = []
                symbolic = [st for st, _ in statuses if type(st) is not int]
                residual = path.assertions or any(type(st) is Residual for st in symbolic)
                skip = residual and len(symbolic) > 1 and not self._any(path, symbolic)
                for st, name in statuses:
                    if skip or st == 0:
                        continue
                    inputs = self._query(path, st)
                    if inputs:
                        key = (k, name)
                        self.found[key] = self.found[key].union(inputs) if key in self.found else inputs
                        hits.append(st)
                if hits and not opts.unconstraining_bad:
                    for st in hits:
                        neg = eng.not_(st)
                        if type(neg) is Residual:
                            path.assertions.append(neg.node)
                        else:
                            path.live = eng.and_(path.live, neg)
                    if _false(path.live):
                        return
            if k == opts.kmax:
                return
            # transition
            nxt = dict(path.frontier)
            roots = list(m.nexts.values())
            eng.evaluate(roots, path.frontier, vals)
            for s, e in m.nexts.items():
                nxt[s] = vals[e]
            r.peak_nodes = max(r.peak_nodes, eng.tracker_size(list(nxt.values()) + [path.live]))
            if opts.check_termination and all(eng.same(nxt[s], path.frontier[s]) for s in m.nexts):
                r.messages.append(f"k={k}: no state change, terminated")
                return
            prev_pc = path.frontier[self.pc] if self.pc is not None else None
            path = _Path(k + 1, nxt, path.live, path.assertions)
            if opts.branching and self.pc is not None and type(nxt[self.pc]) is not int:
                self._fork(path, k, prev_pc if type(prev_pc) is int else None)
                return

    def _fork(self, path: _Path, k: int, prev_pc: int | None):
        """Depth-first over program-counter values, jumps before fall-through."""
        eng, r = self.eng, self.report
        pc = path.frontier[self.pc]
        width = self.model[self.pc].sort.width
        values = eng.values(pc)
        if values is None:
            assignments, complete = self.solver.enumerate(
                eng.rb.model, path.assertions, {0: pc.node}, eng.array_consts, project_all=True)
            if not complete:
                r.partial = True
            values = {a[0] for a in assignments}
        fallthrough = prev_pc + 4 if prev_pc is not None else None
        children = []
        for v in sorted(values, key=lambda v: (v == fallthrough, v)):
            cond = eng.eq_const(pc, width, v)
            live, assertions = path.live, list(path.assertions)
            if type(cond) is Residual:
                assertions.append(cond.node)
                if not self.solver.satisfiable(eng.rb.model, assertions, eng.array_consts):
                    continue
            else:
                live = eng.and_(live, cond)
                if _false(live):
                    continue
            frontier = dict(path.frontier)
            frontier[self.pc] = v
            children.append(_Path(path.k, frontier, live, assertions))
        if r.paths + len(children) - 1 > self.opts.max_paths:
            r.partial = True
            r.messages.append(f"k={k}: path limit reached")
            return
        r.paths += len(children) - 1
        for child in children:
            self._explore(child)

    # -- reporting ------------------------------------------------------------

    def _show(self, st) -> str:
        if type(st) is int:
            return f"{st:#x}"
        if type(st) is Residual:
            return "residual"
        vals = self.eng.values(st)
        return "{" + ",".join(f"{v:#x}" for v in sorted(vals)) + "}"

    def _instructions(self, k: int, bad: str) -> int | None:
        """Transitions minus input bytes transferred so far, for models with a read counter."""
        if self.counter is None:
            return None
        total, remaining = self._counter_at.get(0), self._counter_at.get(k)
        if total is None or remaining is None:
            return None
        return k - (total - remaining)


def _false(x) -> bool:
    return type(x) is int and x == 0


def _slots(m: Model):
    from .emulator import input_slots
    return input_slots(m)


def check(model: Model, opts: Options | None = None, out: Callable[[str], None] | None = None) -> Report:
    return Checker(model, opts or Options(), out).run()
