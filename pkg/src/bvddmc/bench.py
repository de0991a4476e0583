"""Run matrix over the benchmark corpus.

Every sample is checked in four modes (pure solver, constant-only
propagation, ROABVDD and CFLOBVDD propagation) and with three array
conversion sizes.  Results come back as rows for a TSV table.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bmc import Options, check
from .riscu.benchmarks import Sample, corpus, sample

COLUMNS = ("sample", "mode", "array", "runtime_s", "events", "solver_calls", "peak_nodes")

MODES = {
    "p0": dict(propagate=0, backend=None),
    "p1": dict(propagate=1, backend=None),
    "ROABVDD-p8": dict(propagate=8, backend="ROABVDD"),
    "CFLOBVDD-p8": dict(propagate=8, backend="CFLOBVDD"),
}
ARRAYS = (0, 4, 8)


@dataclass
class Row:
    sample: str
    mode: str
    array: int
    runtime_s: float
    events: int
    solver_calls: int
    peak_nodes: int
    status: str = "ok"

    def tsv(self) -> str:
        return "\t".join([self.sample, self.mode, str(self.array), f"{self.runtime_s:.3f}",
                          str(self.events), str(self.solver_calls), str(self.peak_nodes)])


def run_one(name: str, mode: str, array: int, timeout: float | None = None,
            solver: str | None = None, block_bits: int = 8) -> Row:
    s = sample(name)
    opts = Options(kmax=s.kmax, array=array, timeout=timeout, block_bits=block_bits, **MODES[mode])
    if solver is not None:
        opts.solver = solver
    r = check(s.model(), opts)
    return Row(name, mode, array, r.runtime_s, len(r.events), r.solver_calls, r.peak_nodes, r.status)


def matrix(samples: list[Sample] | None = None, modes=tuple(MODES), arrays=ARRAYS,
           timeout: float | None = 300.0, solver: str | None = None, jobs: int = 1,
           block_bits: int = 8):
    """Yield one ``Row`` per (sample, mode, array) in a fixed order."""
    samples = corpus() if samples is None else samples
    jobs_list = [(s.name, m, a) for s in samples for m in modes for a in arrays]
    if jobs <= 1:
        for name, m, a in jobs_list:
            yield run_one(name, m, a, timeout, solver, block_bits)
        return
    with ProcessPoolExecutor(jobs) as pool:
        futures = [pool.submit(run_one, name, m, a, timeout, solver, block_bits)
                   for name, m, a in jobs_list]
        for f in futures:
            yield f.result()
