"""
Fock-space states and the partial transpose
===========================================

States are built from small JSON-friendly specs on a truncated Fock space.
The explicit partial transpose gives an eigenvalue oracle for the moment
tests.
"""

from ptwitness import states
from ptwitness.errors import TruncationError
from ptwitness.states import build, min_eigenvalue, partial_transpose, purity, tail_mass

specs = {
    "vacuum": states.vacuum((10, 10)),
    "coherent product": states.coherent_product(0.8, -0.5j, (16, 16)),
    "thermal product": states.thermal_product(0.3, 0.1, (18, 18)),
    "two-mode squeezed": states.tmsv(0.5, (16, 16)),
    "entangled coherent": states.entangled_coherent(1, 1, "-", (16, 16)),
}

# Smallest eigenvalue of the partial transpose: negative means entangled
for name, spec in specs.items():
    state = build(spec)
    eig = min_eigenvalue(partial_transpose(state))
    print(f"{name:20s} purity {purity(state):.4f}  tail {tail_mass(state):.1e}  min PT eigenvalue {eig: .4f}")

# A cutoff that is too small is refused unless explicitly allowed
try:
    build(states.coherent_product(3, 0, (6, 6)))
except TruncationError as exc:
    print("refused:", exc)

# Specs round-trip through JSON
spec = specs["entangled coherent"]
print(spec.to_json())
