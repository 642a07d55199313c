"""Memoized normally ordered moments and their partial-transpose counterparts.

:class:`MomentTable` is the only moment source the criteria see. It can be
backed by a simulated :class:`~ptwitness.states.FockState`, by a closed-form
function, or by a table of measured moments imported from JSON.
"""

from __future__ import annotations

import json
import math
import threading

from .errors import DegreeError, SpecError
from .opalg import MultiIndex, NormalPolynomial, enumerate_indices, indices_of_degree
from .states import FockState, _monomial_expectation

__all__ = [
    "MomentTable",
    "moment",
    "pt_moment",
    "eval_pt",
    "coherent_moment_function",
    "tmsv_moment_function",
]


def _swap_b(u):
    return MultiIndex(u.n, u.m, u.l, u.k)


class MomentTable:
    """Source of ``⟨a†ⁿ aᵐ b†ᵏ bˡ⟩`` with a per-index cache.

    Parameters
    ----------
    provider : callable
        ``provider(MultiIndex) -> complex``.
    max_degree : int
        Largest total degree the provider is trusted for.
    source : object, optional
        The backing state or document, kept for provenance.
    label : str, optional
    cache : bool, optional
        Disable to recompute every request (results are identical).
    """

    def __init__(self, provider, max_degree, source=None, label="", cache=True):
        self._provider = provider
        self.max_degree = int(max_degree)
        self.source = source
        self.label = label
        self._use_cache = cache
        self._cache = {}
        self._lock = threading.Lock()

    @classmethod
    def from_state(cls, state, cache=True):
        """Moments of a Fock-space state; trusted up to degree ``min(Da, Db) - 2``."""
        if not isinstance(state, FockState):
            raise TypeError("from_state expects a FockState")
        return cls(
            lambda u: _monomial_expectation(state, u),
            min(state.dims) - 2,
            source=state,
            label=state.label,
            cache=cache,
        )

    @classmethod
    def from_function(cls, fn, max_degree, label="closed form"):
        return cls(lambda u: complex(fn(u)), max_degree, source=fn, label=label)

    @classmethod
    def from_moments(cls, moments, label="measured"):
        """Table of given moment values, e.g. from an experiment.

        Missing conjugate partners are filled from
        ``M(n,m,k,l) = conj(M(m,n,l,k))``. ``max_degree`` is the largest ``d``
        for which every index of degree ``<= d`` is known. Values are taken as
        exact.
        """
        data = {}
        for key, val in dict(moments).items():
            data[MultiIndex(*key)] = complex(val)
        for u, val in list(data.items()):
            partner = MultiIndex(u.m, u.n, u.l, u.k)
            data.setdefault(partner, val.conjugate())
        data.setdefault(MultiIndex(0, 0, 0, 0), 1.0 + 0j)
        if abs(data[MultiIndex(0, 0, 0, 0)] - 1) > 1e-10:
            raise SpecError("the zeroth moment of a state must be 1")
        top = max((u.degree for u in data), default=0)
        max_degree = -1
        for d in range(top + 1):
            if all(u in data for u in indices_of_degree(d)):
                max_degree = d
            else:
                break

        def lookup(u):
            try:
                return data[u]
            except KeyError:
                raise DegreeError(f"moment {tuple(u)} is not in the table") from None

        return cls(lookup, max_degree, source=data, label=label)

    @classmethod
    def from_json(cls, text, label="measured"):
        """Parse ``[{"index": [n,m,k,l], "value": [re,im]}, ...]``.

        A wrapping object ``{"schema": "v1", "moments": [...]}`` is accepted too.
        """
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from exc
        if isinstance(doc, dict):
            label = doc.get("label", label)
            doc = doc.get("moments")
        if not isinstance(doc, list):
            raise SpecError("moment table must be a list of {index, value} records")
        moments = {}
        try:
            for rec in doc:
                idx = tuple(int(i) for i in rec["index"])
                if len(idx) != 4:
                    raise SpecError(f"index must have four entries, got {rec['index']!r}")
                val = rec["value"]
                moments[idx] = complex(val[0], val[1]) if isinstance(val, list) else complex(val)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed moment record: {exc}") from exc
        return cls.from_moments(moments, label=label)

    def to_records(self, max_degree=None):
        """All moments up to ``max_degree`` (default: the table's own) in canonical order."""
        d = self.max_degree if max_degree is None else max_degree
        count = math.comb(d + 4, 4)
        return [
            {"index": list(u), "value": [v.real, v.imag]}
            for u in enumerate_indices(count)
            for v in (self.moment(u),)
        ]

    def to_json(self, max_degree=None):
        return json.dumps(
            {"schema": "v1", "label": self.label, "moments": self.to_records(max_degree)},
            sort_keys=True,
        )

    def _check(self, u):
        if u.degree > self.max_degree:
            raise DegreeError(
                f"moment {tuple(u)} has degree {u.degree}, beyond the accurate limit "
                f"{self.max_degree} of table {self.label!r}"
            )

    def moment(self, u):
        """``⟨a†ⁿ aᵐ b†ᵏ bˡ⟩`` of the source state."""
        u = u if isinstance(u, MultiIndex) else MultiIndex(*u)
        self._check(u)
        if not self._use_cache:
            return complex(self._provider(u))
        val = self._cache.get(u)
        if val is None:
            val = complex(self._provider(u))
            with self._lock:
                val = self._cache.setdefault(u, val)
        return val

    def pt_moment(self, u):
        """``⟨a†ⁿ aᵐ b†ᵏ bˡ⟩`` of the partially transposed state: ``moment(n, m, l, k)``."""
        u = u if isinstance(u, MultiIndex) else MultiIndex(*u)
        return self.moment(_swap_b(u))

    def eval(self, p):
        """``⟨p⟩`` for a :class:`~ptwitness.opalg.NormalPolynomial`."""
        return sum((c * self.moment(u) for u, c in p.terms.items()), 0j)

    def eval_pt(self, p):
        """``⟨p⟩`` in the partially transposed state."""
        return sum((c * self.pt_moment(u) for u, c in p.terms.items()), 0j)

    def __repr__(self):
        return f"MomentTable(label={self.label!r}, max_degree={self.max_degree})"


def moment(table, u):
    return table.moment(u)


def pt_moment(table, u):
    return table.pt_moment(u)


def eval_pt(table, p):
    if not isinstance(p, NormalPolynomial):
        raise TypeError("eval_pt expects a NormalPolynomial")
    return table.eval_pt(p)


# ---------------------------------------------------------------------------
# closed forms, used as independent oracles in tests


def coherent_moment_function(alpha, beta):
    """Moments of ``|α⟩|β⟩``: ``α*ⁿ αᵐ β*ᵏ βˡ``."""
    alpha, beta = complex(alpha), complex(beta)

    def fn(u):
        n, m, k, l = u  # noqa: E741
        return alpha.conjugate() ** n * alpha**m * beta.conjugate() ** k * beta**l

    return fn


def tmsv_moment_function(xi, terms=2000):
    """Moments of the untruncated two-mode squeezed vacuum ``Σ tanhʲξ/coshξ |jj⟩``.

    Nonzero only when ``n - m == k - l``; evaluated as a convergent series.
    """
    t = math.tanh(xi)
    c0 = 1 / math.cosh(xi)

    def fn(u):
        n, m, k, l = u  # noqa: E741
        if n - m != k - l:
            return 0.0
        # ⟨j'j'| a†ⁿaᵐ b†ᵏbˡ |jj⟩ with j' = j - m + n = j - l + k
        total = 0.0
        start = max(m, l)
        for j in range(start, start + terms):
            jp = j - m + n
            # sqrt(j!/(j-m)! * j'!/(j-m)!) * sqrt(j!/(j-l)! * j'!/(j-l)!)
            la = 0.5 * (math.lgamma(j + 1) + math.lgamma(jp + 1)) - math.lgamma(j - m + 1)
            lb = 0.5 * (math.lgamma(j + 1) + math.lgamma(jp + 1)) - math.lgamma(j - l + 1)
            term = math.exp(la + lb + (j + jp) * math.log(abs(t))) if t else float(j == jp == 0)
            if t < 0 and (j + jp) % 2:
                term = -term
            total += term
            if j > start + 50 and term < 1e-18 * abs(total):
                break
        return c0 * c0 * total

    return fn
