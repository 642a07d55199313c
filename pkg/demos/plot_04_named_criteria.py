"""
Second-order criteria and the entangled coherent state
======================================================

Simon's criterion is the fifth leading determinant, and Duan's criterion
follows from a 3x3 determinant. Both only involve second moments. They
detect the Gaussian two-mode squeezed vacuum but miss the entangled coherent
state, which a 3x3 minor with a fourth-order moment catches.
"""

import math

import numpy as np

from ptwitness import states
from ptwitness.criteria import det_d, det_s, duan, duan_min, simon_S
from ptwitness.moments import MomentTable
from ptwitness.states import build

# the sign of r selects which quadrature combinations are squeezed
rs = np.concatenate([-np.geomspace(0.1, 10, 41), np.geomspace(0.1, 10, 41)])
for label, spec in [
    ("two-mode squeezed", states.tmsv(0.5, (16, 16))),
    ("entangled coherent", states.entangled_coherent(1, 1, "-", (16, 16))),
]:
    t = MomentTable.from_state(build(spec))
    print(f"--- {label}")
    print(f"  Simon S          {simon_S(t): .5f}")
    print(f"  min_r Duan       {min(duan(t, r) for r in rs): .5f}")
    print(f"  Duan, best r     {duan_min(t): .5f}")
    print(f"  d determinant    {det_d(t): .5f}")
    print(f"  s determinant    {det_s(t): .5f}")

# The s determinant of the odd entangled coherent state has a closed form
x = 2.0
print("closed form s:", -1 / math.tanh(x) / math.sinh(x) ** 2)
