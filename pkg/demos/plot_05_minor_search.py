"""
Searching arbitrary principal minors
====================================

Leading minors can need a high order before turning negative. Picking a
small set of moments and testing every principal minor built from them often
finds a witness much sooner.
"""

from ptwitness import states
from ptwitness.criteria import principal_minor_search
from ptwitness.moments import MomentTable
from ptwitness.opalg import enumerate_indices
from ptwitness.states import build

table = MomentTable.from_state(build(states.entangled_coherent(1, 1, "-", (16, 16))))
pool = enumerate_indices(15)
res = principal_minor_search(table, pool, max_size=3)
print("most negative minor:", res.value)
print("normalized:", res.normalized)
print("built from:", res.indices)
print("exhaustive search:", res.exhaustive)
print("verdict:", res.verdict().kind)
