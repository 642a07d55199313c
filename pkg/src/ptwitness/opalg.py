"""Symbolic algebra of normally ordered two-mode bosonic monomials.

A monomial ``ad^n a^m bd^k b^l`` (creation operators to the left) is labelled
by a :class:`MultiIndex` ``(n, m, k, l)``. A :class:`NormalPolynomial` is a
sparse map from multi-indices to complex coefficients, i.e. the unique normally
ordered form of a polynomial in ``a, a†, b, b†``.

All values are immutable and every function here is pure.
"""

from __future__ import annotations

import re
from collections import namedtuple
from functools import lru_cache
from itertools import product
from types import MappingProxyType

from .errors import DegreeError

__all__ = [
    "MAX_DEGREE",
    "MultiIndex",
    "NormalPolynomial",
    "compare_indices",
    "index_key",
    "enumerate_indices",
    "indices_of_degree",
    "antinormal_to_normal",
    "multiply",
    "adjoint",
    "pt_transform",
    "monomial",
    "identity",
    "render",
    "parse",
    "A",
    "AD",
    "B",
    "BD",
]

#: Largest total monomial degree the reordering coefficients are guaranteed exact for.
MAX_DEGREE = 20


class MultiIndex(namedtuple("MultiIndex", "n m k l")):
    """Exponents ``(n, m, k, l)`` of the monomial ``a†ⁿ aᵐ b†ᵏ bˡ``."""

    __slots__ = ()

    def __new__(cls, n=0, m=0, k=0, l=0):  # noqa: E741
        vals = (n, m, k, l)
        for v in vals:
            if int(v) != v or v < 0:
                raise ValueError(f"multi-index entries must be nonnegative integers, got {vals}")
        return super().__new__(cls, *(int(v) for v in vals))

    @property
    def degree(self):
        return self.n + self.m + self.k + self.l

    def __repr__(self):
        return f"MultiIndex{tuple(self)}"


def index_key(u):
    """Sort key realising :func:`compare_indices`.

    Within a degree block the comparison looks at ``k``, then ``l``, then ``n``,
    then ``m``: the b-mode exponents take precedence.
    """
    n, m, k, l = u  # noqa: E741
    return (n + m + k + l, k, l, n, m)


def compare_indices(u, v):
    """Three-way comparison of two multi-indices: ``-1`` (less), ``0``, ``1`` (greater)."""
    ku, kv = index_key(u), index_key(v)
    return (ku > kv) - (ku < kv)


@lru_cache(maxsize=None)
def indices_of_degree(d):
    """All multi-indices of total degree ``d``, sorted by :func:`index_key`."""
    out = [
        MultiIndex(n, m, k, d - n - m - k)
        for n in range(d + 1)
        for m in range(d + 1 - n)
        for k in range(d + 1 - n - m)
    ]
    return tuple(sorted(out, key=index_key))


def enumerate_indices(count):
    """The first ``count`` multi-indices in canonical order, starting with ``(0,0,0,0)``.

    >>> [tuple(u) for u in enumerate_indices(3)]
    [(0, 0, 0, 0), (0, 1, 0, 0), (1, 0, 0, 0)]
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    d = 0
    while len(out) < count:
        out.extend(indices_of_degree(d))
        d += 1
    return out[:count]


class NormalPolynomial:
    """Normally ordered polynomial in two bosonic modes with complex coefficients.

    Parameters
    ----------
    terms : mapping, optional
        ``MultiIndex`` (or any 4-tuple) to coefficient. Coefficients that are
        exactly zero are dropped; nothing else is pruned.

    Examples
    --------
    >>> p = NormalPolynomial({(1, 1, 0, 0): 1.0, (0, 0, 0, 0): 1.0})
    >>> print(p)
    (1.0,0.0)·ad^0 a^0 bd^0 b^0 + (1.0,0.0)·ad^1 a^1 bd^0 b^0
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, c in dict(terms).items():
                c = complex(c)
                if c != 0:
                    key = key if isinstance(key, MultiIndex) else MultiIndex(*key)
                    clean[key] = clean.get(key, 0) + c
                    if clean[key] == 0:
                        del clean[key]
        self._terms = MappingProxyType(dict(sorted(clean.items(), key=lambda kv: index_key(kv[0]))))
        self._hash = None

    @property
    def terms(self):
        """Read-only view of ``{MultiIndex: complex}`` in canonical index order."""
        return self._terms

    @property
    def degree(self):
        """Largest total degree among the terms (``-1`` for the zero polynomial)."""
        return max((u.degree for u in self._terms), default=-1)

    def is_zero(self):
        return not self._terms

    def coefficient(self, u):
        return self._terms.get(MultiIndex(*u), 0j)

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = NormalPolynomial({(0, 0, 0, 0): other})
        if not isinstance(other, NormalPolynomial):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for u, c in other._terms.items():
            out[u] = out.get(u, 0) + c
        return NormalPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return NormalPolynomial({u: -c for u, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NormalPolynomial):
            return multiply(self, other)
        if isinstance(other, (int, float, complex)):
            return NormalPolynomial({u: c * other for u, c in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * (1 / other)
        return NotImplemented

    def __pow__(self, k):
        out = identity()
        for _ in range(int(k)):
            out = multiply(out, self)
        return out

    def adjoint(self):
        return adjoint(self)

    def pt(self):
        return pt_transform(self)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"NormalPolynomial({render(self)!r})"


def _coerce(x):
    if isinstance(x, NormalPolynomial):
        return x
    if isinstance(x, (int, float, complex)):
        return NormalPolynomial({(0, 0, 0, 0): x})
    return NotImplemented


def monomial(n=0, m=0, k=0, l=0, coeff=1.0):  # noqa: E741
    """Single-term polynomial ``coeff · a†ⁿ aᵐ b†ᵏ bˡ``."""
    return NormalPolynomial({MultiIndex(n, m, k, l): coeff})


def identity():
    return monomial()


A = monomial(0, 1, 0, 0)
AD = monomial(1, 0, 0, 0)
B = monomial(0, 0, 0, 1)
BD = monomial(0, 0, 1, 0)


@lru_cache(maxsize=4096)
def _antinormal_coeffs(n, m):
    # n! m! / (j! (n-j)! (m-j)!) via c_{j+1} = c_j (n-j)(m-j)/(j+1), exact in integers
    coeffs = [1]
    for j in range(min(n, m)):
        coeffs.append(coeffs[-1] * (n - j) * (m - j) // (j + 1))
    return tuple(coeffs)


def antinormal_to_normal(n, m):
    """Normally ordered form of the single-mode product ``aⁿ a†ᵐ``.

    The result is expressed on mode ``a``:
    ``Σ_j n! m! / (j! (n-j)! (m-j)!) · a†^(m-j) a^(n-j)``.

    >>> print(antinormal_to_normal(1, 1))
    (1.0,0.0)·ad^0 a^0 bd^0 b^0 + (1.0,0.0)·ad^1 a^1 bd^0 b^0
    """
    if n < 0 or m < 0:
        raise ValueError("exponents must be nonnegative")
    if n + m > MAX_DEGREE:
        raise DegreeError(f"degree {n + m} exceeds the supported maximum {MAX_DEGREE}")
    return NormalPolynomial(
        {(m - j, n - j, 0, 0): float(c) for j, c in enumerate(_antinormal_coeffs(n, m))}
    )


def _reorder(m, p):
    """Pairs ``(coeff, (p - j, m - j))`` with ``a^m a†^p = Σ coeff a†^(p-j) a^(m-j)``."""
    return [(c, p - j, m - j) for j, c in enumerate(_antinormal_coeffs(m, p))]


@lru_cache(maxsize=65536)
def _multiply_monomials(u, v):
    n, m, k, l = u  # noqa: E741
    p, q, r, s = v
    if u.degree + v.degree > MAX_DEGREE:
        raise DegreeError(
            f"product degree {u.degree + v.degree} exceeds the supported maximum {MAX_DEGREE}"
        )
    # a†ⁿ (aᵐ a†ᵖ) a^q  ⊗  b†ᵏ (bˡ b†ʳ) bˢ ; the two modes commute
    out = {}
    for (ca, da, aa), (cb, db, ab) in product(_reorder(m, p), _reorder(l, r)):
        key = MultiIndex(n + da, aa + q, k + db, ab + s)
        out[key] = out.get(key, 0) + ca * cb
    return tuple((key, float(c)) for key, c in out.items())


def multiply(p, q):
    """Normally ordered form of the operator product ``p · q``."""
    out = {}
    for u, cu in p.terms.items():
        for v, cv in q.terms.items():
            for w, c in _multiply_monomials(u, v):
                out[w] = out.get(w, 0) + cu * cv * c
    return NormalPolynomial(out)


def adjoint(p):
    """Hermitian conjugate: ``c a†ⁿaᵐb†ᵏbˡ -> c* a†ᵐaⁿb†ˡbᵏ``."""
    return NormalPolynomial(
        {MultiIndex(u.m, u.n, u.l, u.k): c.conjugate() for u, c in p.terms.items()}
    )


def pt_transform(p):
    """Partial transposition on mode b at the symbolic level.

    Transposition in the Fock basis maps ``b†ᵏ bˡ`` to ``b†ˡ bᵏ``, so
    ``⟨a†ⁿaᵐb†ᵏbˡ⟩`` of the transposed state equals ``⟨a†ⁿaᵐb†ˡbᵏ⟩`` of the
    original. Coefficients are untouched.
    """
    return NormalPolynomial({MultiIndex(u.n, u.m, u.l, u.k): c for u, c in p.terms.items()})


def _fmt(x):
    return repr(float(x))


def render(p):
    """Text form ``(re,im)·ad^n a^m bd^k b^l + ...``; the zero polynomial renders as ``0``."""
    if p.is_zero():
        return "0"
    return " + ".join(
        f"({_fmt(c.real)},{_fmt(c.imag)})·ad^{u.n} a^{u.m} bd^{u.k} b^{u.l}"
        for u, c in p.terms.items()
    )


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf|nan"
_TERM = re.compile(
    rf"\(\s*({_NUM})\s*,\s*({_NUM})\s*\)\s*[·*]?\s*"
    r"ad\^(\d+)\s*a\^(\d+)\s*bd\^(\d+)\s*b\^(\d+)"
)


def parse(text):
    """Inverse of :func:`render`. ``*`` is accepted in place of ``·``."""
    text = text.strip()
    if text == "0":
        return NormalPolynomial()
    terms = {}
    pos = 0
    for match in _TERM.finditer(text):
        gap = text[pos:match.start()].strip()
        if gap not in ("", "+") or (pos > 0 and gap != "+"):
            raise ValueError(f"cannot parse polynomial near {text[pos:match.start() + 10]!r}")
        re_, im_, *exps = match.groups()
        key = MultiIndex(*(int(e) for e in exps))
        terms[key] = terms.get(key, 0) + complex(float(re_), float(im_))
        pos = match.end()
    if pos == 0 or text[pos:].strip():
        raise ValueError(f"cannot parse polynomial {text!r}")
    return NormalPolynomial(terms)
