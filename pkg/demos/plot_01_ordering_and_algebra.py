"""
Moment ordering and normal-ordered algebra
==========================================

Every two-mode moment is labelled by a multi-index (n, m, k, l) standing for
the normally ordered monomial a†ⁿ aᵐ b†ᵏ bˡ. Indices are sorted by total
degree first and then by a fixed tie-break.
"""

from ptwitness.opalg import (
    A,
    AD,
    B,
    antinormal_to_normal,
    enumerate_indices,
    monomial,
    multiply,
    pt_transform,
    render,
)

NAMES = {0: "", 1: "{}", 2: "{}^2"}


def pretty(u):
    n, m, k, l = u
    parts = [NAMES[n].format("a†"), NAMES[m].format("a"), NAMES[k].format("b†"), NAMES[l].format("b")]
    return "<" + "".join(parts) + ">" if any(u) else "1"


# The first fifteen moments in canonical order
print(", ".join(pretty(u) for u in enumerate_indices(15)))

# Antinormal products a^n a†^m are rewritten in normal order
print("a² a†² =", render(antinormal_to_normal(2, 2)))

# Products of polynomials are reduced on the fly
print("a a†   =", render(multiply(A, AD)))
print("(a+b)² =", render((A + B) ** 2))

# Partial transposition of a moment swaps the b exponents
print("PT(a b) =", render(pt_transform(monomial(0, 1, 0, 1))))
