"""
Two kinds of decision diagram
=============================

The same functions of two input bytes, built as ROABVDDs (one level per
byte) and as CFLOBVDDs at every block size.  Sizes count inner structures
plus terminal values, the measure the model checker reports as peak nodes.
"""

from bvddmc import cflobvdd, roabvdd
from bvddmc.trackers import InputSet


def rev(v):
    return int(f"{v:08b}"[::-1], 2)


FUNCTIONS = {
    "x + y": (lambda x, y: (x + y) & 0xFF, 8),
    "x < y": (lambda x, y: int(x < y), 1),
    "rev(x) ^ y": (lambda x, y: rev(x) ^ y, 8),
    "x == rev(y)": (lambda x, y: int(x == rev(y)), 1),
}

print(f"{'function':14}{'ROABVDD':>9}" + "".join(f"{'CFL b=' + str(b):>10}" for b in (1, 2, 4, 8)))
for name, (fn, width) in FUNCTIONS.items():
    ro = roabvdd.Context()
    t = ro.apply(name, fn, width, ro.var(0), ro.var(1))
    row = f"{name:14}{ro.size([t]):>9}"
    for b in (1, 2, 4, 8):
        cf = cflobvdd.Context(2, b)
        d = cf.apply(name, fn, width, cf.var(0), cf.var(1))
        # sanity: both agree with the function on a few points
        for x, y in [(0, 0), (3, 250), (0x81, 0x18), (255, 254)]:
            assert cf.lookup(d, [x, y]) == ro.lookup(t, [x, y]) == fn(x, y)
        row += f"{cf.size([d]):>10}"
    print(row)

# a CFLOBVDD is a hierarchy of groupings; the structure report lists them level by level
cf = cflobvdd.Context(2, 1)
d = cf.apply("eqrev", FUNCTIONS["x == rev(y)"][0], 1, cf.var(0), cf.var(1))
print(cf.structure_report(d))

# the inputs satisfying x == rev(y), read straight off the diagram as byte cubes
cubes = InputSet(cf.paths(d))
print(len(cubes.cubes), "cubes:", cubes.format()[:60], "...")
