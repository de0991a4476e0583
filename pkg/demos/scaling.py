"""
Peak diagram size along the benchmark families
==============================================

Runs the multi-input and bit-inversion samples with both backends and
prints peak node counts with their log-linear growth rate.
"""

import numpy as np

from bvddmc.bmc import Options, check
from bvddmc.riscu.benchmarks import sample

for family in ("multi-input", "bit-inversion"):
    print(family)
    peaks = {"ROABVDD": [], "CFLOBVDD": []}
    for x in range(2, 7):
        s = sample(f"{family}-{x}")
        line = f"  X={x}"
        for backend in peaks:
            r = check(s.model(), Options(kmax=s.kmax, backend=backend))
            peaks[backend].append(r.peak_nodes)
            line += f"  {backend} {r.peak_nodes:5} ({r.runtime_s:.1f}s, {len(r.events)} events)"
        print(line)
    for backend, ys in peaks.items():
        slope = np.polyfit(np.arange(2, 7), np.log(ys), 1)[0]
        print(f"  {backend} log-slope {slope:.4f}")
