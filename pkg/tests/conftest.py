import math

import numpy as np
import pytest
from hypothesis import strategies as st

from ptwitness import states
from ptwitness.opalg import NormalPolynomial


# --- independent dense-matrix oracle -------------------------------------


def ladder(dim):
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = math.sqrt(n)
    return a


def dense(p, cutoff):
    """Two-mode matrix of a NormalPolynomial on cutoff x cutoff levels."""
    a = ladder(cutoff)
    ad = a.conj().T
    mp = np.linalg.matrix_power
    out = np.zeros((cutoff**2, cutoff**2), dtype=complex)
    for (n, m, k, l), c in p.terms.items():
        out += c * np.kron(mp(ad, n) @ mp(a, m), mp(ad, k) @ mp(a, l))
    return out


def low_block(mat, cutoff, keep):
    idx = [i * cutoff + j for i in range(keep) for j in range(keep)]
    return mat[np.ix_(idx, idx)]


def random_density(rng, dims, support=(5, 5), rank=None):
    """Random mixed state supported on the lowest ``support`` levels of each mode."""
    sa, sb = support
    dim = sa * sb
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    small = g @ g.conj().T
    small /= np.trace(small).real
    da, db = dims
    full = np.zeros((da, db, da, db), dtype=complex)
    full[:sa, :sb, :sa, :sb] = small.reshape(sa, sb, sa, sb)
    rho = full.reshape(da * db, da * db)
    rho = (rho + rho.conj().T) / 2
    return states.FockState(dims, rho, "random")


def random_mode_spec(rng):
    kind = rng.choice(["coherent", "coherent", "thermal", "vacuum", "fock"])
    if kind == "coherent":
        r, phi = rng.uniform(0, 1.2), rng.uniform(0, 2 * np.pi)
        return {"kind": "coherent", "alpha": [r * np.cos(phi), r * np.sin(phi)]}
    if kind == "thermal":
        return {"kind": "thermal", "nbar": float(rng.uniform(0, 0.3))}
    if kind == "fock":
        return {"kind": "fock", "n": int(rng.integers(0, 3))}
    return {"kind": "vacuum"}


def random_separable_spec(rng, cutoffs=(14, 14), max_components=4):
    ncomp = int(rng.integers(1, max_components + 1))
    w = rng.dirichlet(np.ones(ncomp))
    w[-1] = 1.0 - w[:-1].sum()
    comps = [(float(wi), random_mode_spec(rng), random_mode_spec(rng)) for wi in w]
    return states.mixture(comps, cutoffs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- hypothesis strategies ------------------------------------------------

small_index = st.tuples(*[st.integers(0, 2)] * 4)
small_coeff = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False).map(
    lambda z: complex(round(z.real, 3), round(z.imag, 3))
)
small_poly = (
    st.dictionaries(small_index, small_coeff, min_size=1, max_size=3)
    .map(NormalPolynomial)
    .filter(lambda p: not p.is_zero())
)


# --- acceptance summary ---------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
