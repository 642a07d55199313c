"""Partial-transpose moment matrices, their determinant hierarchy and named special cases.

For an operator basis ``f_1, ..., f_N`` the moment matrix has entries
``M[i, j] = ⟨f_i† f_j⟩`` evaluated in the partially transposed state. Rows
carry the conjugated basis element. The matrix is positive semidefinite for
every separable state, so a negative leading determinant ``D_N`` (or any
negative principal minor) proves that the partial transpose is not positive.
"""

from __future__ import annotations

import csv
import io
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import linalg

from .errors import ContractError, DegreeError
from .opalg import (
    A,
    AD,
    B,
    BD,
    MultiIndex,
    NormalPolynomial,
    adjoint,
    enumerate_indices,
    identity,
    index_key,
    monomial,
    multiply,
    pt_transform,
)

__all__ = [
    "NPT_DETECTED",
    "PT_NONNEGATIVE",
    "INCONCLUSIVE",
    "OperatorBasis",
    "MomentMatrix",
    "Verdict",
    "HierarchyScan",
    "MinorSearch",
    "canonical_basis",
    "symbolic_matrix",
    "build_matrix",
    "determinant",
    "normalized_determinant",
    "hierarchy_scan",
    "principal_minor_search",
    "quadratures",
    "simon_S",
    "duan",
    "duan_min",
    "det_d",
    "det_s",
    "two_term_condition",
    "criterion_report",
    "D_BASIS",
    "S_BASIS",
]

NPT_DETECTED = "npt_detected"
PT_NONNEGATIVE = "pt_nonnegative_up_to_order"
INCONCLUSIVE = "inconclusive"

_HERMITIAN_TOL = 1e-10


def _threads():
    try:
        return max(1, int(os.environ.get("PTWITNESS_THREADS", "1")))
    except ValueError:
        return 1


def _is_scalar_multiple(p, q):
    if set(p.terms) != set(q.terms):
        return False
    u0 = next(iter(p.terms))
    ratio = q.terms[u0] / p.terms[u0]
    return all(abs(q.terms[u] - ratio * c) <= 1e-14 * abs(q.terms[u]) for u, c in p.terms.items())


@dataclass(frozen=True)
class OperatorBasis:
    """Ordered operators ``f_i`` that a test operator ``f = Σ c_i f_i`` is built from.

    Elements may be single monomials or combinations such as ``a + b``.
    """

    elements: tuple
    label: str = ""

    def __post_init__(self):
        elements = tuple(self.elements)
        if not elements:
            raise ContractError("an operator basis needs at least one element")
        for e in elements:
            if not isinstance(e, NormalPolynomial):
                raise TypeError("basis elements must be NormalPolynomials")
            if e.is_zero():
                raise ContractError("basis elements must be nonzero")
        for i, j in combinations(range(len(elements)), 2):
            if _is_scalar_multiple(elements[i], elements[j]):
                raise ContractError(f"basis elements {i} and {j} are linearly dependent")
        object.__setattr__(self, "elements", elements)

    @classmethod
    def from_indices(cls, indices, label=""):
        return cls(tuple(monomial(*u) for u in indices), label)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def degrees(self):
        return [e.degree for e in self.elements]

    def indices(self):
        """Multi-indices of single-monomial elements (``None`` for combinations)."""
        out = []
        for e in self.elements:
            if len(e) == 1:
                u, c = next(iter(e))
                out.append(tuple(u) if c == 1 else None)
            else:
                out.append(None)
        return out


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    entries: np.ndarray = field(repr=False)
    basis: OperatorBasis
    table: object = field(default=None, repr=False)

    def __len__(self):
        return self.entries.shape[0]

    def leading(self, n):
        return self.entries[:n, :n]

    def sub(self, idx):
        idx = list(idx)
        return self.entries[np.ix_(idx, idx)]


@dataclass(frozen=True)
class Verdict:
    """Outcome of a determinant test.

    ``pt_nonnegative_up_to_order`` never means separable: the test simply
    found no negative value up to ``order_reached``.
    """

    kind: str
    witness: tuple | None = None  # (basis positions or indices, determinant)
    order_reached: int = 0

    def __post_init__(self):
        if self.kind not in (NPT_DETECTED, PT_NONNEGATIVE, INCONCLUSIVE):
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        if self.kind == NPT_DETECTED and (self.witness is None or not self.witness[1] < 0):
            raise ValueError("an npt_detected verdict needs a witness with a negative determinant")

    @property
    def npt(self):
        return self.kind == NPT_DETECTED


def canonical_basis(n, table=None):
    """The first ``n`` monomials in canonical order: ``1, a, a†, b, b†, a², ...``."""
    if n < 1:
        raise ValueError("basis size must be >= 1")
    indices = enumerate_indices(n)
    if table is not None:
        top = 2 * max(u.degree for u in indices)
        if top > table.max_degree:
            raise DegreeError(
                f"canonical basis of size {n} needs moments of degree {top}; "
                f"table supports {table.max_degree}"
            )
    return OperatorBasis.from_indices(indices, label=f"canonical({n})")


def symbolic_matrix(basis):
    """Entries as polynomials in original-state moments: ``pt(f_i† f_j)``."""
    return [[pt_transform(multiply(adjoint(fi), fj)) for fj in basis.elements] for fi in basis.elements]


def build_matrix(table, basis, threads=None):
    """Evaluate ``M[i, j] = ⟨f_i† f_j⟩`` in the partially transposed state.

    Rows are independent, so they may be filled concurrently; the result does
    not depend on the thread count. ``threads`` defaults to
    ``$PTWITNESS_THREADS`` (1 when unset).
    """
    elems = basis.elements
    size = len(elems)
    for i in range(size):
        for j in range(i, size):
            deg = elems[i].degree + elems[j].degree
            if deg > table.max_degree:
                raise DegreeError(
                    f"basis pair ({i}, {j}) needs moments of degree {deg}; "
                    f"table supports {table.max_degree}"
                )
    adj = [adjoint(e) for e in elems]

    def row(i):
        return [table.eval_pt(multiply(adj[i], elems[j])) for j in range(size)]

    threads = _threads() if threads is None else max(1, int(threads))
    if threads > 1 and size > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, range(size)))
    else:
        rows = [row(i) for i in range(size)]
    entries = np.array(rows, dtype=complex).reshape(size, size)
    entries.setflags(write=False)
    return MomentMatrix(entries, basis, table)


def _as_array(m):
    return m.entries if isinstance(m, MomentMatrix) else np.asarray(m, dtype=complex)


def _check_hermitian(mat):
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {mat.shape}")
    scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
    if np.max(np.abs(mat - mat.conj().T), initial=0.0) > _HERMITIAN_TOL * scale:
        raise ContractError("moment matrix is not Hermitian")
    return (mat + mat.conj().T) / 2


def _lu_det(mat):
    if mat.shape[0] == 0:
        return 1.0 + 0j
    with warnings.catch_warnings():
        # exactly singular matrices are legitimate here and give det 0
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(mat, check_finite=True)
    sign = (-1) ** int(np.sum(piv != np.arange(len(piv))))
    return sign * np.prod(np.diag(lu))


def _det_and_scale(mat):
    """Determinant, diagonal scale and the determinant of the unit-diagonal rescaling."""
    herm = _check_hermitian(mat)
    diag = np.abs(np.real(np.diag(herm)))
    floor = 1e-14 * max(1.0, float(diag.max(initial=0.0)))
    d = np.where(diag > floor, diag, 1.0)
    s = 1 / np.sqrt(d)
    scaled = herm * s[:, None] * s[None, :]
    ndet = _lu_det(scaled)
    if abs(ndet.imag) > 1e-8 * max(1.0, abs(ndet.real)):
        raise ContractError(f"determinant has imaginary residue {ndet.imag:.3e}")
    scale = float(np.prod(d))
    return float(ndet.real) * scale, scale, float(ndet.real)


def determinant(m):
    """Real determinant of a Hermitian moment matrix via pivoted LU."""
    return _det_and_scale(_as_array(m))[0]


def normalized_determinant(m):
    """``determinant / Π M_ii`` (zero diagonals count as 1); the quantity compared to ``-tol``."""
    return _det_and_scale(_as_array(m))[2]


@dataclass(frozen=True)
class HierarchyScan:
    verdict: Verdict
    determinants: tuple
    scales: tuple
    indices: tuple

    def __iter__(self):
        return iter((self.verdict, list(self.determinants)))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["N", "index", "D_N", "scale", "normalized"])
        for n, (dn, sc) in enumerate(zip(self.determinants, self.scales), start=1):
            u = self.indices[n - 1]
            writer.writerow([n, " ".join(map(str, u)), repr(dn), repr(sc), repr(dn / sc)])
        return buf.getvalue()


def hierarchy_scan(table, n_max, tolerance=1e-8):
    """Evaluate ``D_1 ... D_{n_max}`` on the canonical basis.

    Stops growing the basis when the table cannot supply the needed moment
    degree; the verdict is then ``inconclusive`` with ``order_reached`` set,
    unless a negative determinant was already found.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    indices = enumerate_indices(n_max)
    reachable = [u for u in indices if 2 * u.degree <= table.max_degree]
    n_eff = len(reachable)
    if n_eff == 0:
        return HierarchyScan(Verdict(INCONCLUSIVE, None, 0), (), (), ())
    mat = build_matrix(table, OperatorBasis.from_indices(indices[:n_eff], f"canonical({n_eff})"))
    dets, scales = [], []
    witness = None
    for n in range(1, n_eff + 1):
        dn, scale, norm = _det_and_scale(mat.leading(n))
        dets.append(dn)
        scales.append(scale)
        if witness is None and norm < -tolerance:
            witness = (tuple(tuple(u) for u in indices[:n]), dn)
    if witness is not None:
        verdict = Verdict(NPT_DETECTED, witness, len(witness[0]))
    elif n_eff < n_max:
        verdict = Verdict(INCONCLUSIVE, None, n_eff)
    else:
        verdict = Verdict(PT_NONNEGATIVE, None, n_eff)
    return HierarchyScan(verdict, tuple(dets), tuple(scales), tuple(tuple(u) for u in indices[:n_eff]))


@dataclass(frozen=True)
class MinorSearch:
    """Most negative principal minor found; ``value`` is the raw determinant."""

    value: float
    normalized: float
    indices: tuple
    exhaustive: bool

    def verdict(self, tolerance=1e-8):
        if self.normalized < -tolerance:
            return Verdict(NPT_DETECTED, (self.indices, self.value), len(self.indices))
        return Verdict(PT_NONNEGATIVE, None, len(self.indices))


_EXHAUSTIVE_POOL = 12


def principal_minor_search(table, index_pool, max_size):
    """Search principal minors of the pool's moment matrix for the most negative one.

    Minors are ranked by their normalized determinant. Pools of at most 12
    indices are searched exhaustively over all subsets of size ``<= max_size``;
    larger pools grow greedily from the best 2x2 minor. The pool is put into
    canonical order first, and ties keep the earliest subset, so the result is
    deterministic.
    """
    pool = sorted({MultiIndex(*u) for u in index_pool}, key=index_key)
    if not pool:
        raise ValueError("index pool is empty")
    max_size = max(1, min(int(max_size), len(pool)))
    mat = build_matrix(table, OperatorBasis.from_indices(pool, "pool")).entries

    def score(subset):
        return _det_and_scale(mat[np.ix_(subset, subset)])

    best = None

    def consider(subset):
        nonlocal best
        dn, _, norm = score(subset)
        if best is None or norm < best[1]:
            best = (dn, norm, tuple(subset))

    exhaustive = len(pool) <= _EXHAUSTIVE_POOL
    if exhaustive:
        for size in range(1, max_size + 1):
            for subset in combinations(range(len(pool)), size):
                consider(subset)
    else:
        for i in range(len(pool)):
            consider((i,))
        pairs = list(combinations(range(len(pool)), 2)) if max_size >= 2 else []
        if pairs:
            current = min(pairs, key=lambda s: score(s)[2])
            consider(current)
            while len(current) < max_size:
                rest = [i for i in range(len(pool)) if i not in current]
                if not rest:
                    break
                grown = [tuple(sorted(current + (i,))) for i in rest]
                current = min(grown, key=lambda s: score(s)[2])
                consider(current)
    value, norm, subset = best
    return MinorSearch(value, norm, tuple(tuple(pool[i]) for i in subset), exhaustive)


# ---------------------------------------------------------------------------
# named criteria

_SQRT2 = math.sqrt(2)


def quadratures():
    """``(x1, p1, x2, p2)`` with ``x = (a + a†)/√2`` and ``p = (a - a†)/(i√2)``."""
    x1 = (A + AD) / _SQRT2
    p1 = (A - AD) / (1j * _SQRT2)
    x2 = (B + BD) / _SQRT2
    p2 = (B - BD) / (1j * _SQRT2)
    return x1, p1, x2, p2


def _centered(table, op):
    return op - table.eval(op)


def _sym_cov(table, x, y):
    dx, dy = _centered(table, x), _centered(table, y)
    return (table.eval(multiply(dx, dy) + multiply(dy, dx)) / 2).real


def simon_S(table):
    """Simon's second-moment quantity, from symmetrized quadrature covariances."""
    x1, p1, x2, p2 = quadratures()
    a1 = np.array(
        [[_sym_cov(table, x1, x1), _sym_cov(table, x1, p1)], [_sym_cov(table, p1, x1), _sym_cov(table, p1, p1)]]
    )
    a2 = np.array(
        [[_sym_cov(table, x2, x2), _sym_cov(table, x2, p2)], [_sym_cov(table, p2, x2), _sym_cov(table, p2, p2)]]
    )
    c = np.array(
        [[_sym_cov(table, x1, x2), _sym_cov(table, x1, p2)], [_sym_cov(table, p1, x2), _sym_cov(table, p1, p2)]]
    )
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    det = np.linalg.det
    return float(
        det(a1) * det(a2)
        + (0.25 + det(c)) ** 2
        - np.trace(a1 @ j @ c @ j @ a2 @ j @ c.T @ j)
        - 0.25 * (det(a1) + det(a2))
    )


def _variance(table, op):
    d = _centered(table, op)
    return table.eval(multiply(d, d)).real


def duan(table, r):
    """``⟨(Δu)²⟩ + ⟨(Δv)²⟩ - (r² + r⁻²)`` with ``u = |r|x1 + x2/r``, ``v = |r|p1 - p2/r``."""
    r = float(r)
    if r == 0 or not math.isfinite(r):
        raise ContractError("duan requires a finite nonzero r")
    x1, p1, x2, p2 = quadratures()
    u = abs(r) * x1 + x2 / r
    v = abs(r) * p1 - p2 / r
    return float(_variance(table, u) + _variance(table, v) - (r * r + 1 / (r * r)))


def duan_min(table):
    """``⟨Δa†Δa⟩⟨Δb†Δb⟩ - Re²⟨ΔaΔb⟩``, which has the sign of ``min_r duan(r)``."""
    da, db = _centered(table, A), _centered(table, B)
    na = table.eval(multiply(adjoint(da), da)).real
    nb = table.eval(multiply(adjoint(db), db)).real
    cross = table.eval(multiply(da, db)).real
    return float(na * nb - cross * cross)


D_BASIS = OperatorBasis((identity(), A, B), "d: [1, a, b]")
S_BASIS = OperatorBasis((identity(), B, monomial(0, 1, 0, 1)), "s: [1, b, ab]")


def det_d(table):
    """Determinant of the basis ``[1, a, b]``; nonnegative iff ``⟨Δa†Δa⟩⟨Δb†Δb⟩ >= |⟨ΔaΔb⟩|²``."""
    return determinant(build_matrix(table, D_BASIS))


def det_s(table):
    """Determinant of the basis ``[1, b, ab]``.

    Its entries are ``1, ⟨b†⟩, ⟨ab†⟩ / ⟨b⟩, ⟨b†b⟩, ⟨ab†b⟩ / ⟨a†b⟩, ⟨a†b†b⟩, ⟨a†ab†b⟩``
    in terms of moments of the original state.
    """
    return determinant(build_matrix(table, S_BASIS))


def two_term_condition(table, u, v):
    """2x2 minor for ``f = c1·monomial(u) + c2·monomial(v)``; negative means NPT."""
    u, v = MultiIndex(*u), MultiIndex(*v)
    if u == v:
        # the 2x2 matrix of a repeated element is singular; still check the degree budget
        build_matrix(table, OperatorBasis((monomial(*u),)))
        return 0.0
    mat = build_matrix(table, OperatorBasis.from_indices((u, v))).entries
    return float(mat[0, 0].real * mat[1, 1].real - abs(mat[0, 1]) ** 2)


def criterion_report(criterion, value, threshold=0.0, witness_indices=None, basis_label="", tolerance=1e-9):
    """JSON-ready record; ``value < threshold - tolerance`` counts as a detection."""
    value = float(value)
    return {
        "schema": "v1",
        "criterion": criterion,
        "value": value,
        "threshold": float(threshold),
        "verdict": NPT_DETECTED if value < threshold - tolerance else PT_NONNEGATIVE,
        "witness_indices": [list(u) for u in witness_indices] if witness_indices else [],
        "basis_label": basis_label,
    }
