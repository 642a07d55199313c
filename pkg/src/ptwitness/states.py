"""Truncated two-mode Fock-space density operators.

Basis layout: the row/column index of the Fock pair ``|i⟩_a |j⟩_b`` is
``i * Db + j``. The partial transpose and every oracle rely on it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import ContractError, DegreeError, SpecError, TruncationError

__all__ = [
    "FockState",
    "StateSpec",
    "TAIL_THRESHOLD",
    "build",
    "partial_transpose",
    "min_eigenvalue",
    "expectation",
    "tail_mass",
    "purity",
    "lowering",
    "mode_monomial",
    "monomial_matrix",
    "vacuum",
    "coherent_product",
    "entangled_coherent",
    "tmsv",
    "thermal_product",
    "mixture",
    "dump_state",
    "load_state_matrix",
]

#: Construction is refused when more population than this sits in the top two levels.
TAIL_THRESHOLD = 1e-6

_HERMITIAN_TOL = 1e-12
_TRACE_TOL = 1e-10
_POSITIVE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FockState:
    """Density matrix on ``C^Da ⊗ C^Db``.

    Hermiticity and unit trace are checked on construction. Positivity is not,
    because partial transposes are stored in the same container;
    :func:`build` checks it for the states it constructs.
    """

    dims: tuple
    rho: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        da, db = (int(d) for d in self.dims)
        if da < 1 or db < 1:
            raise ContractError(f"dims must be positive, got {self.dims}")
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (da * db, da * db):
            raise ContractError(f"rho has shape {rho.shape}, expected {(da * db,) * 2}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > _HERMITIAN_TOL:
            raise ContractError("rho is not Hermitian")
        if abs(np.trace(rho) - 1) > _TRACE_TOL:
            raise ContractError(f"trace(rho) = {np.trace(rho).real:.3e}, expected 1")
        rho.setflags(write=False)
        object.__setattr__(self, "dims", (da, db))
        object.__setattr__(self, "rho", rho)

    @property
    def tensor(self):
        """``rho`` reshaped to ``(Da, Db, Da, Db)`` as ``[i, j, i', j']``."""
        da, db = self.dims
        return self.rho.reshape(da, db, da, db)

    def to_dict(self):
        return {
            "schema": "v1",
            "label": self.label,
            "dims": list(self.dims),
            "re": self.rho.real.tolist(),
            "im": self.rho.imag.tolist(),
        }


def dump_state(state, path):
    """Write ``state`` to ``path``; ``.npz`` gives a binary dump, anything else JSON."""
    path = str(path)
    if path.endswith(".npz"):
        np.savez(path, rho=state.rho, dims=np.array(state.dims), label=np.array(state.label))
    else:
        with open(path, "w") as fh:
            json.dump(state.to_dict(), fh)


def load_state_matrix(path):
    """Read back a dump written by :func:`dump_state`."""
    path = str(path)
    if path.endswith(".npz"):
        with np.load(path) as data:
            return FockState(tuple(data["dims"].tolist()), data["rho"], str(data["label"]))
    with open(path) as fh:
        doc = json.load(fh)
    rho = np.array(doc["re"]) + 1j * np.array(doc["im"])
    return FockState(tuple(doc["dims"]), rho, doc.get("label", ""))


# ---------------------------------------------------------------------------
# state descriptions

_KINDS = ("vacuum", "coherent_product", "entangled_coherent", "tmsv", "thermal_product", "mixture")
# required and optional parameter names per kind
_PARAMS = {
    "vacuum": ((), ()),
    "coherent_product": (("alpha", "beta"), ()),
    "entangled_coherent": (("alpha", "beta"), ("sign",)),
    "tmsv": (("xi",), ()),
    "thermal_product": (("nbar_a", "nbar_b"), ()),
    "mixture": (("components",), ()),
}
_MODE_KINDS = ("vacuum", "coherent", "thermal", "fock")


def _as_complex(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise SpecError(f"complex numbers are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, dict):
        return complex(float(x.get("re", 0.0)), float(x.get("im", 0.0)))
    try:
        return complex(x)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"not a number: {x!r}") from exc


def _complex_json(z):
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class StateSpec:
    """Description of one of the supported two-mode states.

    ``params`` by kind:

    ======================  =====================================================
    ``vacuum``              none
    ``coherent_product``    ``alpha``, ``beta`` (complex)
    ``entangled_coherent``  ``alpha``, ``beta``, ``sign`` (``"+"`` or ``"-"``)
    ``tmsv``                ``xi`` (real squeeze parameter)
    ``thermal_product``     ``nbar_a``, ``nbar_b`` (mean photon numbers)
    ``mixture``             ``components``: list of ``{"weight", "a", "b"}``
    ======================  =====================================================

    Mixture components are products of single-mode specs
    ``{"kind": "vacuum" | "coherent" | "thermal" | "fock", ...}`` with keys
    ``alpha``, ``nbar`` or ``n`` respectively. Complex numbers serialize as
    ``[re, im]``.
    """

    kind: str
    params: dict
    cutoffs: tuple

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SpecError(f"unknown state kind {self.kind!r}; expected one of {_KINDS}")
        try:
            cutoffs = tuple(int(c) for c in self.cutoffs)
        except (TypeError, ValueError) as exc:
            raise SpecError(f"cutoffs must be two integers, got {self.cutoffs!r}") from exc
        if len(cutoffs) != 2:
            raise SpecError(f"cutoffs must be two integers, got {self.cutoffs!r}")
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "params", dict(self.params or {}))
        required, optional = _PARAMS[self.kind]
        missing = [k for k in required if k not in self.params]
        extra = sorted(set(self.params) - set(required) - set(optional))
        if missing or extra:
            raise SpecError(f"{self.kind}: missing parameters {missing}, unexpected {extra}")
        if self.kind == "mixture":
            comps = self.params.get("components")
            if not comps:
                raise SpecError("mixture needs a non-empty 'components' list")
            weights = [float(c["weight"]) for c in comps]
            if min(weights) < 0:
                raise SpecError("mixture weights must be nonnegative")
            if abs(sum(weights) - 1) > 1e-12:
                raise SpecError(f"mixture weights sum to {sum(weights)!r}, expected 1")
        if self.kind == "entangled_coherent" and self.params.get("sign", "-") not in ("+", "-"):
            raise SpecError("entangled_coherent sign must be '+' or '-'")

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict) or "kind" not in doc or "cutoffs" not in doc:
            raise SpecError("a state spec needs 'kind' and 'cutoffs'")
        return cls(doc["kind"], doc.get("params", {}), doc["cutoffs"])

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self):
        return {"kind": self.kind, "params": _jsonable(self.params), "cutoffs": list(self.cutoffs)}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, complex):
        return _complex_json(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def vacuum(cutoffs=(8, 8)):
    return StateSpec("vacuum", {}, cutoffs)


def coherent_product(alpha, beta, cutoffs=(16, 16)):
    return StateSpec("coherent_product", {"alpha": complex(alpha), "beta": complex(beta)}, cutoffs)


def entangled_coherent(alpha, beta, sign="-", cutoffs=(16, 16)):
    return StateSpec(
        "entangled_coherent",
        {"alpha": complex(alpha), "beta": complex(beta), "sign": sign},
        cutoffs,
    )


def tmsv(xi, cutoffs=(16, 16)):
    return StateSpec("tmsv", {"xi": float(xi)}, cutoffs)


def thermal_product(nbar_a, nbar_b, cutoffs=(16, 16)):
    return StateSpec("thermal_product", {"nbar_a": float(nbar_a), "nbar_b": float(nbar_b)}, cutoffs)


def mixture(components, cutoffs=(16, 16)):
    """``components`` is an iterable of ``(weight, mode_a_spec, mode_b_spec)``."""
    return StateSpec(
        "mixture",
        {"components": [{"weight": float(w), "a": dict(sa), "b": dict(sb)} for w, sa, sb in components]},
        cutoffs,
    )


# ---------------------------------------------------------------------------
# construction


def _coherent_vector(alpha, dim):
    alpha = complex(alpha)
    vec = np.empty(dim, dtype=complex)
    vec[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        vec[n] = vec[n - 1] * alpha / math.sqrt(n)
    return vec


def _normalized(vec):
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise TruncationError("state has no support below the cutoff", tail_mass=1.0)
    return vec / norm


def _pure(vec2d, label=""):
    vec = _normalized(vec2d.reshape(-1))
    return np.outer(vec, vec.conj())


def _ecs_amplitudes(spec, dims):
    """Unnormalized ``|α,β⟩ ± |-α,-β⟩`` as a ``(Da, Db)`` amplitude array."""
    p = spec.params
    alpha, beta = _as_complex(p.get("alpha", 0)), _as_complex(p.get("beta", 0))
    sign = -1.0 if p.get("sign", "-") == "-" else 1.0
    plus = np.outer(_coherent_vector(alpha, dims[0]), _coherent_vector(beta, dims[1]))
    minus = np.outer(_coherent_vector(-alpha, dims[0]), _coherent_vector(-beta, dims[1]))
    return plus + sign * minus


def _mode_density(mspec, dim):
    kind = mspec.get("kind")
    if kind == "vacuum":
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1
        return rho
    if kind == "coherent":
        vec = _normalized(_coherent_vector(_as_complex(mspec.get("alpha", 0)), dim))
        return np.outer(vec, vec.conj())
    if kind == "thermal":
        nbar = float(mspec.get("nbar", 0.0))
        if nbar < 0:
            raise SpecError("thermal nbar must be nonnegative")
        if nbar == 0:
            p = np.zeros(dim)
            p[0] = 1
        else:
            ratio = nbar / (nbar + 1)
            p = ratio ** np.arange(dim)
        return np.diag(p / p.sum()).astype(complex)
    if kind == "fock":
        n = int(mspec.get("n", 0))
        if not 0 <= n < dim:
            raise TruncationError(f"Fock level {n} outside cutoff {dim}", tail_mass=1.0)
        rho = np.zeros((dim, dim), dtype=complex)
        rho[n, n] = 1
        return rho
    raise SpecError(f"unknown single-mode kind {kind!r}; expected one of {_MODE_KINDS}")


def _density(spec):
    da, db = spec.cutoffs
    p = spec.params
    kind = spec.kind
    if kind == "vacuum":
        return np.kron(_mode_density({"kind": "vacuum"}, da), _mode_density({"kind": "vacuum"}, db))
    if kind == "coherent_product":
        va = _coherent_vector(_as_complex(p.get("alpha", 0)), da)
        vb = _coherent_vector(_as_complex(p.get("beta", 0)), db)
        return _pure(np.outer(va, vb), kind)
    if kind == "entangled_coherent":
        return _pure(_ecs_amplitudes(spec, (da, db)))
    if kind == "tmsv":
        xi = float(p.get("xi", 0.0))
        dim = min(da, db)
        t = math.tanh(xi)
        vec = np.zeros((da, db), dtype=complex)
        vec[np.arange(dim), np.arange(dim)] = t ** np.arange(dim) / math.cosh(xi)
        return _pure(vec, kind)
    if kind == "thermal_product":
        return np.kron(
            _mode_density({"kind": "thermal", "nbar": p.get("nbar_a", 0.0)}, da),
            _mode_density({"kind": "thermal", "nbar": p.get("nbar_b", 0.0)}, db),
        )
    if kind == "mixture":
        rho = np.zeros((da * db, da * db), dtype=complex)
        for comp in p["components"]:
            rho += float(comp["weight"]) * np.kron(
                _mode_density(comp["a"], da), _mode_density(comp["b"], db)
            )
        return rho
    raise SpecError(f"unknown state kind {kind!r}")  # pragma: no cover


def _mode_populations(mspec, dim):
    """Untruncated Fock populations of a single-mode spec, first ``dim`` levels."""
    kind = mspec.get("kind")
    if kind == "coherent":
        return np.abs(_coherent_vector(_as_complex(mspec.get("alpha", 0)), dim)) ** 2
    if kind == "thermal":
        nbar = float(mspec.get("nbar", 0.0))
        ratio = nbar / (nbar + 1)
        return (1 - ratio) * ratio ** np.arange(dim)
    return np.real(np.diag(_mode_density(mspec, dim)))


def _raw_tail_mass(spec, pad=40):
    """Population at or beyond the top two retained levels, before renormalization."""
    da, db = spec.cutoffs
    wa, wb = da + pad, db + pad
    p = spec.params
    if spec.kind == "vacuum":
        return 0.0
    if spec.kind == "coherent_product":
        pops = np.outer(
            _mode_populations({"kind": "coherent", "alpha": p.get("alpha", 0)}, wa),
            _mode_populations({"kind": "coherent", "alpha": p.get("beta", 0)}, wb),
        )
    elif spec.kind == "entangled_coherent":
        pops = np.abs(_ecs_amplitudes(spec, (wa, wb))) ** 2
        pops /= pops.sum()
    elif spec.kind == "tmsv":
        t2 = math.tanh(float(p.get("xi", 0.0))) ** 2
        pops = np.diag((1 - t2) * t2 ** np.arange(min(wa, wb)))
    elif spec.kind == "thermal_product":
        pops = np.outer(
            _mode_populations({"kind": "thermal", "nbar": p.get("nbar_a", 0.0)}, wa),
            _mode_populations({"kind": "thermal", "nbar": p.get("nbar_b", 0.0)}, wb),
        )
    else:
        pops = sum(
            float(c["weight"]) * np.outer(_mode_populations(c["a"], wa), _mode_populations(c["b"], wb))
            for c in p["components"]
        )
    return float(max(0.0, 1.0 - pops[: da - 2, : db - 2].sum()))


def build(spec, allow_truncation=False):
    """Construct the density matrix described by ``spec``.

    Pure states are expanded in the Fock basis up to the cutoff and then
    renormalized, so the trace is exactly one.

    Raises
    ------
    TruncationError
        If the tail mass exceeds :data:`TAIL_THRESHOLD` and ``allow_truncation``
        is false.
    """
    if isinstance(spec, dict):
        spec = StateSpec.from_dict(spec)
    da, db = spec.cutoffs
    if da < 2 or db < 2:
        raise SpecError(f"cutoffs must be >= 2, got {spec.cutoffs}")
    rho = _density(spec)
    rho = (rho + rho.conj().T) / 2
    rho /= np.trace(rho).real
    label = spec.kind
    state = FockState((da, db), rho, label)
    if not allow_truncation:
        # the renormalized state can hide a large loss; judge the untruncated populations
        tm = max(tail_mass(state), _raw_tail_mass(spec))
        if tm > TAIL_THRESHOLD:
            raise TruncationError(
                f"cutoffs {spec.cutoffs} too small for {spec.kind}: tail mass {tm:.3e} "
                f"> {TAIL_THRESHOLD:.0e}",
                tail_mass=tm,
            )
    if np.linalg.eigvalsh(rho)[0] < -_POSITIVE_TOL:  # pragma: no cover - constructors are positive
        raise ContractError("constructed rho is not positive semidefinite")
    return state


# ---------------------------------------------------------------------------
# operations


def partial_transpose(state):
    """Transpose mode b: entry ``((i,j),(i',j'))`` becomes input entry ``((i,j'),(i',j))``.

    The result is Hermitian with unit trace but need not be positive.
    """
    da, db = state.dims
    rho_pt = state.tensor.transpose(0, 3, 2, 1).reshape(da * db, da * db)
    return FockState((da, db), rho_pt, f"PT({state.label})")


def min_eigenvalue(m):
    """Smallest eigenvalue of a Hermitian matrix or of a :class:`FockState`'s ``rho``."""
    mat = m.rho if isinstance(m, FockState) else np.asarray(m, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {mat.shape}")
    scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
    if np.max(np.abs(mat - mat.conj().T), initial=0.0) > 1e-10 * scale:
        raise ContractError("matrix is not Hermitian")
    return float(linalg.eigvalsh(mat, subset_by_index=[0, 0])[0])


def purity(state):
    return float(np.real(np.vdot(state.rho.conj().T, state.rho)))


def tail_mass(state):
    """Population with either Fock index in the top two levels of its mode."""
    da, db = state.dims
    pops = np.real(np.diag(state.rho)).reshape(da, db)
    return float(max(0.0, pops.sum() - pops[: max(da - 2, 0), : max(db - 2, 0)].sum()))


def lowering(dim):
    """Truncated annihilation operator on ``dim`` Fock levels."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


_MODE_CACHE = {}


def mode_monomial(dim, n, m):
    """Dense ``a†ⁿ aᵐ`` on ``dim`` levels (exact on the retained subspace)."""
    key = (dim, n, m)
    mat = _MODE_CACHE.get(key)
    if mat is None:
        low = lowering(dim)
        mat = np.linalg.matrix_power(low.conj().T, n) @ np.linalg.matrix_power(low, m)
        mat.setflags(write=False)
        _MODE_CACHE[key] = mat
    return mat


def monomial_matrix(dims, u):
    """Dense two-mode ``a†ⁿ aᵐ b†ᵏ bˡ`` in the ``i * Db + j`` layout."""
    n, m, k, l = u  # noqa: E741
    return np.kron(mode_monomial(dims[0], n, m), mode_monomial(dims[1], k, l))


def _monomial_expectation(state, u):
    n, m, k, l = u  # noqa: E741
    da, db = state.dims
    x = mode_monomial(da, n, m)
    y = mode_monomial(db, k, l)
    # tr(rho X⊗Y) = Σ rho[i,j,i',j'] X[i',i] Y[j',j]
    return complex(np.einsum("ijkl,ki,lj->", state.tensor, x, y, optimize=True))


def expectation(state, p):
    """``tr(rho · p)`` for a :class:`~ptwitness.opalg.NormalPolynomial` ``p``."""
    limit = min(state.dims) - 1
    if p.degree > limit:
        raise DegreeError(
            f"polynomial degree {p.degree} exceeds cutoff margin {limit} for dims {state.dims}"
        )
    return sum((c * _monomial_expectation(state, u) for u, c in p.terms.items()), 0j)
