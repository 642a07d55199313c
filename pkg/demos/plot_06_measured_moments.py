"""
Working from measured moments
=============================

Experiments deliver moments, not density matrices. A moment table can be
written to JSON, shipped, and tested without any state simulation. Missing
conjugate partners are filled in automatically.
"""

import json

from ptwitness import states
from ptwitness.criteria import hierarchy_scan
from ptwitness.moments import MomentTable
from ptwitness.states import build

# Pretend these came from a detector: all moments up to degree 4
simulated = MomentTable.from_state(build(states.tmsv(0.4, (16, 16))))
payload = simulated.to_json(max_degree=4)
print(len(json.loads(payload)["moments"]), "moments exported")

measured = MomentTable.from_json(payload)
scan = hierarchy_scan(measured, 15)
print("degree available:", measured.max_degree)
print("verdict:", scan.verdict.kind, "at order", scan.verdict.order_reached)

# The same file drives the command line:
#   ptwitness --input measured.json --command scan --nmax 15
