"""
Scanning the determinant hierarchy
==================================

The moment matrix of the partially transposed state is built from moments
of the original state only. Its leading principal minors D_1, D_2, ... are
all nonnegative for separable states; the first negative one proves
entanglement.
"""

from ptwitness import states
from ptwitness.criteria import hierarchy_scan
from ptwitness.moments import MomentTable
from ptwitness.states import build

for label, spec in [
    ("vacuum", states.vacuum((10, 10))),
    ("separable mixture", states.mixture(
        [(0.5, {"kind": "coherent", "alpha": 0.6}, {"kind": "thermal", "nbar": 0.2}),
         (0.5, {"kind": "fock", "n": 1}, {"kind": "coherent", "alpha": [0, -0.4]})],
        (14, 14))),
    ("two-mode squeezed", states.tmsv(0.5, (16, 16))),
]:
    table = MomentTable.from_state(build(spec))
    scan = hierarchy_scan(table, 10)
    print(f"--- {label}: {scan.verdict.kind} (order {scan.verdict.order_reached})")
    print(scan.to_csv())
