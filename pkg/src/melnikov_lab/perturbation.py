"""Perturbation data model and the linear maps to Melnikov parameters.

The model system is ``z' = i(z^2 - 1)/2`` with piecewise perturbation
``eps * R^+`` above the real axis and ``eps * R^-`` below, where

    R^{+-}(z, zbar) = sum_{l=0}^{m} sum_{k=0}^{l} conj(a^{+-}_{k,l}) z^{l-k} zbar^k.

For ``m <= 3`` the averaged functions around the two centers are

    r M1(r) = a r + b r^2 + c r^3 + d r^4 + alpha A(r) + beta B(r) + gamma C(r)
    r N1(r) = c r + (b + 2d - kappa + rho) r^2 + a r^3 + (kappa - d) r^4
              + alpha A(r) - beta B(r) + gamma C(r)

with ``A = (r^2-1)^2 atanh r``, ``B = (r^4-1) atanh r``, ``C = r^2 atanh r``.
:func:`melnikov_params` returns the nine reals ``(a, b, c, d, alpha, beta,
gamma, kappa, rho)``.

Coefficient tables
------------------
``_IM_TABLE[(k, l)]`` is the response of ``r I^+_{k,l}(r)`` to ``a_{k,l} = i``
and ``_RE_TABLE[(k, l)]`` the response to ``a_{k,l} = 1``, both expressed in
the basis ``[r, r^2, r^3, r^4, A, B, C]``.  On the lower side the imaginary
response is identical and the real response changes sign, so

    r M1 = sum (Im a^+ - Im a^-) IM + (Re a^+ + Re a^-) RE.

Every entry was checked against direct quadrature of the averaged integral
(see ``tests/test_quadrature.py``).

Right inverse
-------------
:func:`params_to_perturbation` only touches upper-side coefficients
(``a^- = 0``).  Real unknowns are scanned in the pivot order
``a00, a11, a01, a12, a23, a03, a22, a02, a13, a33`` (imaginary part first)
and kept greedily while they raise the rank, which yields a square
nonsingular system on the reachable subspace.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from typing import Iterator

import jsonschema
import numpy as np

from .errors import SpecValidationError, UnreachableTargetError, UnsupportedDegreeError

PI = math.pi

PARAM_NAMES = ("a", "b", "c", "d", "alpha", "beta", "gamma", "kappa", "rho")

# Basis order: r, r^2, r^3, r^4, (r^2-1)^2 atanh, (r^4-1) atanh, r^2 atanh.
_IM_TABLE = {
    (0, 0): (1, 0, -1, 0, 0, 0, 0),
    (0, 1): (-1, 0, -1, 0, 0, 0, 0),
    (1, 1): (1, 0, 1, 0, -2, 0, 0),
    (0, 2): (1, 0, -1, 0, 0, 0, 0),
    (1, 2): (-1, 0, 1, 0, 0, -2, 0),
    (2, 2): (5, 0, -5, 0, 0, 4, 0),
    (0, 3): (-1, 0, -1, 0, 0, 0, 8),
    (1, 3): (1, 0, 1, 0, -2, 0, -8),
    (2, 3): (-5, 0, -5, 0, 4, 0, 8),
    (3, 3): (5, 0, 5, 0, -6, 0, -8),
}
_RE_TABLE = {
    (0, 0): (0, -PI, 0, 0, 0, 0, 0),
    (0, 1): (0, 0, 0, 0, 0, 0, 0),
    (1, 1): (0, PI, 0, -PI, 0, 0, 0),
    (0, 2): (0, PI, 0, 0, 0, 0, 0),
    (1, 2): (0, 0, 0, -PI, 0, 0, 0),
    (2, 2): (0, -PI, 0, 2 * PI, 0, 0, 0),
    (0, 3): (0, -2 * PI, 0, 0, 0, 0, 0),
    (1, 3): (0, -PI, 0, -PI, 0, 0, 0),
    (2, 3): (0, 0, 0, 2 * PI, 0, 0, 0),
    (3, 3): (0, PI, 0, -3 * PI, 0, 0, 0),
}

PIVOT_ORDER = ((0, 0), (1, 1), (0, 1), (1, 2), (2, 3), (0, 3), (2, 2), (0, 2), (1, 3), (3, 3))

_COMPLEX_SCHEMA = {
    "type": "object",
    "properties": {"re": {"type": "number"}, "im": {"type": "number"}},
    "required": ["re", "im"],
    "additionalProperties": False,
}
SPEC_SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "integer", "minimum": 0},
        "holomorphic": {"type": "boolean"},
        "plus": {"type": "array", "items": {"type": "array", "items": _COMPLEX_SCHEMA}},
        "minus": {"type": "array", "items": {"type": "array", "items": _COMPLEX_SCHEMA}},
    },
    "required": ["m", "holomorphic", "plus", "minus"],
    "additionalProperties": False,
}


def _triangle(rows, m, name):
    rows = tuple(tuple(complex(v) for v in row) for row in rows)
    if len(rows) != m + 1:
        raise SpecValidationError(f"{name}: expected {m + 1} rows, got {len(rows)}")
    for l, row in enumerate(rows):
        if len(row) != l + 1:
            raise SpecValidationError(f"{name}: row l={l} must have {l + 1} entries, got {len(row)}")
        for v in row:
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise SpecValidationError(f"{name}: non-finite coefficient in row l={l}")
    return rows


@dataclass(frozen=True)
class PerturbationSpec:
    """Degree ``m`` and the triangular coefficient tables of ``R^+`` and ``R^-``.

    ``plus[l][k]`` holds ``a^+_{k,l}`` for ``0 <= k <= l <= m``.
    """

    m: int
    plus: tuple
    minus: tuple
    holomorphic: bool = False

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 0:
            raise SpecValidationError(f"degree must be a nonnegative integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "plus", _triangle(self.plus, self.m, "plus"))
        object.__setattr__(self, "minus", _triangle(self.minus, self.m, "minus"))
        object.__setattr__(self, "holomorphic", bool(self.holomorphic))
        if self.holomorphic:
            for side, table in (("plus", self.plus), ("minus", self.minus)):
                for l, row in enumerate(table):
                    if any(v != 0 for v in row[1:]):
                        raise SpecValidationError(
                            f"{side}: holomorphic spec has nonzero a_(k,{l}) with k >= 1")

    @classmethod
    def zeros(cls, m, holomorphic=False):
        rows = tuple((0j,) * (l + 1) for l in range(m + 1))
        return cls(m, rows, rows, holomorphic)

    @classmethod
    def from_entries(cls, m, plus=None, minus=None, holomorphic=False):
        """Build a spec from sparse ``{(k, l): value}`` mappings."""
        tables = []
        for entries in (plus or {}, minus or {}):
            rows = [[0j] * (l + 1) for l in range(m + 1)]
            for (k, l), v in entries.items():
                if not 0 <= k <= l <= m:
                    raise SpecValidationError(f"index (k={k}, l={l}) outside 0<=k<=l<={m}")
                rows[l][k] = complex(v)
            tables.append(rows)
        return cls(m, tables[0], tables[1], holomorphic)

    @classmethod
    def random(cls, m, rng, holomorphic=False, scale=1.0):
        tables = []
        for _ in range(2):
            rows = []
            for l in range(m + 1):
                re, im = rng.uniform(-scale, scale, size=(2, l + 1))
                row = re + 1j * im
                if holomorphic:
                    row[1:] = 0
                rows.append(row)
            tables.append(rows)
        return cls(m, tables[0], tables[1], holomorphic)

    def coefficient(self, side, k, l):
        table = self.plus if side == "+" else self.minus
        return table[l][k]

    def entries(self) -> Iterator[tuple[str, int, int, complex]]:
        for side, table in (("+", self.plus), ("-", self.minus)):
            for l, row in enumerate(table):
                for k, v in enumerate(row):
                    yield side, k, l, v

    def combine(self, other, scale=1.0):
        """Return ``scale * self + other`` (same degree required)."""
        if other.m != self.m:
            raise SpecValidationError("cannot combine specs of different degree")
        plus = [[scale * u + v for u, v in zip(r1, r2)] for r1, r2 in zip(self.plus, other.plus)]
        minus = [[scale * u + v for u, v in zip(r1, r2)] for r1, r2 in zip(self.minus, other.minus)]
        return PerturbationSpec(self.m, plus, minus, self.holomorphic and other.holomorphic)

    def to_dict(self):
        def rows(table):
            return [[{"re": v.real, "im": v.imag} for v in row] for row in table]

        return {"m": self.m, "holomorphic": self.holomorphic,
                "plus": rows(self.plus), "minus": rows(self.minus)}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc):
        try:
            jsonschema.validate(doc, SPEC_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SpecValidationError(f"invalid spec document: {exc.message}") from None

        def rows(table):
            return [[complex(e["re"], e["im"]) for e in row] for row in table]

        return cls(doc["m"], rows(doc["plus"]), rows(doc["minus"]), doc["holomorphic"])

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecValidationError(f"spec is not valid JSON: {exc}") from None
        return cls.from_dict(doc)


@dataclass(frozen=True)
class MelnikovParams:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    kappa: float = 0.0
    rho: float = 0.0

    def as_array(self):
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=float)

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (9,):
            raise ValueError(f"expected 9 parameters, got shape {values.shape}")
        return cls(*(float(v) for v in values))

    def to_dict(self):
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def degree_violations(self, m, holomorphic=False, tol=0.0):
        """Names of the linear constraints for ``(m, holomorphic)`` this point violates."""
        p = self.as_array()
        return [name for name, w in reachability_constraints(m, holomorphic)
                if abs(np.dot(w, p)) > tol * max(1.0, np.abs(p).max())]

    def satisfies_degree(self, m, holomorphic=False, tol=0.0):
        return not self.degree_violations(m, holomorphic, tol)

    def holomorphic_view(self):
        """Return ``(a, b, c, alpha, kappa)`` in the holomorphic convention.

        Holomorphic perturbations give ``M1 = a + b r + c r^2 + alpha r atanh r`` and
        ``N1 = c + (b - kappa) r + a r^2 + alpha r atanh r``, so the holomorphic
        ``alpha`` is the general ``gamma`` and the holomorphic ``kappa`` is ``-rho``.
        """
        return (self.a, self.b, self.c, self.gamma, -self.rho)

    @classmethod
    def from_holomorphic(cls, a, b, c, alpha=0.0, kappa=0.0):
        return cls(a=a, b=b, c=c, gamma=alpha, rho=-kappa)


def _unit(i):
    e = np.zeros(9)
    e[i] = 1.0
    return e


def _idx(name):
    return PARAM_NAMES.index(name)


def reachability_constraints(m, holomorphic=False):
    """Linear constraints ``w . p = 0`` cutting out the image of :func:`melnikov_params`."""
    zero = [(f"{n} = 0", _unit(_idx(n))) for n in ("d", "alpha", "beta", "gamma", "kappa", "rho")]
    lookup = dict(zero)
    if m == 0:
        return zero + [("c = -a", _unit(_idx("a")) + _unit(_idx("c")))]
    if m > 3:
        raise UnsupportedDegreeError(f"closed-form parameters exist only for m <= 3, got {m}")
    if holomorphic:
        names = ["d", "alpha", "beta", "kappa"] + ([] if m == 3 else ["gamma", "rho"])
    else:
        names = {1: ["beta", "gamma", "kappa", "rho"], 2: ["gamma", "rho"], 3: []}[m]
    return [(f"{n} = 0", lookup[f"{n} = 0"]) for n in names]


def _r_m1_coefficients(spec):
    coef = np.zeros(7)
    for l in range(spec.m + 1):
        for k in range(l + 1):
            up, lo = spec.plus[l][k], spec.minus[l][k]
            coef += (up.imag - lo.imag) * np.asarray(_IM_TABLE[k, l], dtype=float)
            coef += (up.real + lo.real) * np.asarray(_RE_TABLE[k, l], dtype=float)
    return coef


def reflect(spec: PerturbationSpec) -> PerturbationSpec:
    """Swap the sides and multiply degree-``l`` coefficients by ``(-1)^l``.

    This is the coefficient change induced by ``w(t) = -z(-t)``, which exchanges
    the two centers; hence ``N1(spec) == M1(reflect(spec))``.
    """
    plus = [[(-1) ** l * v for v in row] for l, row in enumerate(spec.minus)]
    minus = [[(-1) ** l * v for v in row] for l, row in enumerate(spec.plus)]
    return PerturbationSpec(spec.m, plus, minus, spec.holomorphic)


def melnikov_params(spec: PerturbationSpec) -> MelnikovParams:
    """Nine real parameters of ``M1`` and ``N1`` for a spec of degree ``m <= 3``."""
    if spec.m > 3:
        raise UnsupportedDegreeError(
            f"closed forms exist only for m <= 3 (got m={spec.m}); use melnikov_quadrature")
    a, b, c, d, alpha, beta, gamma = _r_m1_coefficients(spec)
    n = _r_m1_coefficients(reflect(spec))
    kappa = n[3] + d
    rho = n[1] - b - 2 * d + kappa
    return MelnikovParams.from_array([a, b, c, d, alpha, beta, gamma, kappa, rho])


def _input_slots(m, holomorphic, sides=("+", "-")):
    """Real input coordinates ``(side, k, l, part)`` present for ``(m, holomorphic)``."""
    slots = []
    for side in sides:
        for l in range(m + 1):
            for k in range(1 if holomorphic else l + 1):
                for part in ("re", "im"):
                    slots.append((side, k, l, part))
    return slots


def _slot_spec(m, holomorphic, slot, value=1.0):
    side, k, l, part = slot
    v = value if part == "re" else 1j * value
    entries = {(k, l): v}
    return PerturbationSpec.from_entries(
        m, entries if side == "+" else None, entries if side == "-" else None, holomorphic)


def coefficient_matrix(m, holomorphic=False, sides=("+", "-")):
    """Matrix of the linear map from real coefficient slots to the nine parameters.

    Returns ``(L, slots)`` where column ``j`` is ``melnikov_params`` of the unit
    spec for ``slots[j]``.
    """
    slots = _input_slots(m, holomorphic, sides)
    L = np.column_stack([melnikov_params(_slot_spec(m, holomorphic, s)).as_array() for s in slots])
    return L, slots


def _pivot_slots(m, holomorphic):
    order = []
    for k, l in PIVOT_ORDER:
        if l <= m and not (holomorphic and k > 0):
            order += [("+", k, l, "im"), ("+", k, l, "re")]
    return order


def params_to_perturbation(params: MelnikovParams, m: int, holomorphic: bool = False,
                           tol: float = 1e-12) -> PerturbationSpec:
    """Right inverse of :func:`melnikov_params` on the upper-side pivot slice."""
    if m > 3:
        raise UnsupportedDegreeError(f"closed-form parameters exist only for m <= 3, got {m}")
    p = params.as_array()
    scale = max(1.0, float(np.abs(p).max()))
    for name, w in reachability_constraints(m, holomorphic):
        if abs(np.dot(w, p)) > tol * scale:
            kind = "holomorphic" if holomorphic else "complex"
            raise UnreachableTargetError(
                f"target violates '{name}' required for {kind} degree m={m}")
    chosen, cols = [], []
    for slot in _pivot_slots(m, holomorphic):
        col = melnikov_params(_slot_spec(m, holomorphic, slot)).as_array()
        trial = np.column_stack(cols + [col])
        if np.linalg.matrix_rank(trial, tol=1e-10) > len(cols):
            chosen.append(slot)
            cols.append(col)
    A = np.column_stack(cols)
    x, *_ = np.linalg.lstsq(A, p, rcond=None)
    entries = {}
    for (side, k, l, part), v in zip(chosen, x):
        entries[(k, l)] = entries.get((k, l), 0j) + (v if part == "re" else 1j * v)
    return PerturbationSpec.from_entries(m, entries, None, holomorphic)


# Reference parameter tables, written on the combinations that appear in them:
# "D" multiplies Im(a^+) - Im(a^-) and "S" multiplies Re(a^+) + Re(a^-).
REFERENCE_TABLES = {
    "a": ("D", {(0, 0): 1, (0, 1): -1, (1, 1): 1, (0, 2): 1, (1, 2): -1, (2, 2): 5,
                (0, 3): -1, (1, 3): 1, (2, 3): -5, (3, 3): 5}),
    "b": ("S", {(0, 0): -PI, (1, 1): PI, (0, 2): PI, (2, 2): -PI, (0, 3): -2 * PI,
                (1, 3): -PI, (3, 3): PI}),
    "c": ("D", {(0, 0): -1, (0, 1): -1, (1, 1): 1, (0, 2): -1, (1, 2): 1, (2, 2): -5,
                (1, 3): 1, (2, 3): -5, (3, 3): 5}),
    "d": ("S", {(1, 1): -PI, (1, 2): -PI, (2, 2): 2 * PI, (1, 3): -PI, (2, 3): 2 * PI,
                (3, 3): -3 * PI}),
    "alpha": ("D", {(1, 1): -2, (1, 3): -2, (2, 3): 4, (3, 3): -6}),
    "beta": ("D", {(1, 2): -2, (2, 2): 4}),
    "gamma": ("D", {(0, 3): -1, (1, 3): 1, (2, 3): -1, (3, 3): 1}),
    "kappa": ("S", {(2, 2): 4 * PI, (1, 2): -2 * PI}),
    "rho": ("S", {(0, 3): 4 * PI, (1, 3): 4 * PI, (2, 3): -4 * PI, (3, 3): 4 * PI}),
}


def reference_matrix():
    """The reference tables as a matrix over the same slots as ``coefficient_matrix(3)``."""
    _, slots = coefficient_matrix(3)
    R = np.zeros((9, len(slots)))
    for i, name in enumerate(PARAM_NAMES):
        kind, table = REFERENCE_TABLES[name]
        for j, (side, k, l, part) in enumerate(slots):
            c = table.get((k, l), 0.0)
            if kind == "D" and part == "im":
                R[i, j] = c if side == "+" else -c
            elif kind == "S" and part == "re":
                R[i, j] = c
    return R, slots


@dataclass(frozen=True)
class TableDiscrepancy:
    param: str
    slot: tuple
    tabulated: float
    computed: float


@dataclass(frozen=True)
class TableAudit:
    discrepancies: tuple
    gamma_ratio: float | None
    others_match: bool
    tol: float

    def lines(self):
        out = []
        if self.gamma_ratio is not None:
            out.append(f"gamma: computed = {self.gamma_ratio:g} x tabulated on every entry")
        for d in self.discrepancies:
            if d.param == "gamma" and self.gamma_ratio is not None:
                continue
            side, k, l, part = d.slot
            out.append(f"{d.param}: {part.capitalize()}(a{side}_{k},{l}) tabulated {d.tabulated:.15g}, "
                       f"computed {d.computed:.15g}")
        out.append("other entries match" if self.others_match else "other entries DO NOT match")
        return out


def audit_remarks(tol=1e-12) -> TableAudit:
    """Compare the reference parameter tables with the sums of the closed-form integrals."""
    L, slots = coefficient_matrix(3)
    R, _ = reference_matrix()
    found = []
    for i, name in enumerate(PARAM_NAMES):
        for j, slot in enumerate(slots):
            if abs(L[i, j] - R[i, j]) > tol:
                found.append(TableDiscrepancy(name, slot, float(R[i, j]), float(L[i, j])))
    g = _idx("gamma")
    ratios = {round(L[g, j] / R[g, j], 12) for j in range(len(slots)) if R[g, j] != 0}
    gamma_nonzero_match = all((R[g, j] == 0) == (abs(L[g, j]) <= tol) for j in range(len(slots)))
    gamma_ratio = ratios.pop() if len(ratios) == 1 and gamma_nonzero_match else None
    others = [d for d in found if d.param != "gamma"]
    return TableAudit(tuple(found), gamma_ratio, not others, tol)
