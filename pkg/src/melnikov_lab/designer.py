"""Placing zeros of ``r M1`` and ``r N1`` and checking what was achieved.

Both functions are linear in the averaged-function parameters, so prescribing
zeros is a linear solve once one transcendental (or, without transcendental
terms, one polynomial) coefficient is pinned to 1.  Targets at negative radii
fill the remaining equations without adding zeros in (0, 1).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .closed import m1_function, n1_function
from .errors import DegenerateTargetsError, DomainError, NotSupportedError, UnreachableTargetError
from .perturbation import (PARAM_NAMES, MelnikovParams, PerturbationSpec, melnikov_params,
                           params_to_perturbation)
from .rootkit.polynomial import RationalPolynomial, parametric_root_regions, to_fraction
from .rootkit.zeros import DEFAULT_INTERVAL, ZeroReport, isolate_zeros

COND_LIMIT = 1e12
POLYNOMIAL_BOUNDS = {0: 1, 1: 4, 2: 4, 3: 5}


@dataclass(frozen=True)
class ZeroTarget:
    location: float
    which: str = "f"

    def __post_init__(self):
        loc = float(self.location)
        if not (-1 < loc < 1) or loc == 0:
            raise DomainError(f"target location {loc} must lie in (-1, 1) without 0")
        if self.which not in ("f", "g"):
            raise DomainError("which must be 'f' (r M1) or 'g' (r N1)")
        object.__setattr__(self, "location", loc)


@dataclass(frozen=True)
class Configuration:
    m1: int
    n1: int
    certified: bool
    m1_report: ZeroReport | None = field(default=None, compare=False, repr=False)
    n1_report: ZeroReport | None = field(default=None, compare=False, repr=False)

    @property
    def pair(self):
        return (self.m1, self.n1)

    def __str__(self):
        flag = "certified" if self.certified else "uncertified"
        return f"[[{self.m1},{self.n1}]] {flag}"


@dataclass(frozen=True)
class DesignLayout:
    """Which parameters are pinned and which are solved for."""

    pinned: dict
    unknowns: tuple
    f_cap: int
    g_cap: int

    @property
    def size(self):
        return len(self.unknowns)


def design_layout(m, holomorphic=False) -> DesignLayout:
    if m == 0:
        return DesignLayout({"a": 1.0, "c": -1.0}, ("b",), 1, 1)
    if holomorphic:
        if m in (1, 2):
            return DesignLayout({"c": 1.0}, ("a", "b"), 2, 2)
        if m == 3:
            return DesignLayout({"gamma": 1.0}, ("a", "b", "c", "rho"), 3, 3)
        raise NotSupportedError("designs for holomorphic degree m > 3 are not available")
    if m == 1:
        return DesignLayout({"alpha": 1.0}, ("a", "b", "c", "d"), 4, 4)
    if m == 2:
        return DesignLayout({"beta": 1.0}, ("a", "b", "c", "d", "kappa", "alpha"), 5, 5)
    if m == 3:
        return DesignLayout({"gamma": 1.0}, ("a", "b", "c", "d", "kappa", "rho", "alpha", "beta"), 6, 6)
    raise NotSupportedError("closed forms, hence designs, exist only for m <= 3")


def _params(values: dict) -> MelnikovParams:
    return MelnikovParams(**{k: float(values.get(k, 0.0)) for k in PARAM_NAMES})


def _target_value(params, target, m, holomorphic):
    fn = m1_function if target.which == "f" else n1_function
    return float(fn(params, m, holomorphic).numerator(target.location))


def design(targets, m, holomorphic=False) -> MelnikovParams:
    """Parameters whose ``r M1`` / ``r N1`` vanish at the given targets."""
    layout = design_layout(m, holomorphic)
    targets = [t if isinstance(t, ZeroTarget) else ZeroTarget(*t) for t in targets]
    if len(targets) != layout.size:
        raise DomainError(f"degree {m}{' holomorphic' if holomorphic else ''} needs exactly "
                          f"{layout.size} targets, got {len(targets)}")
    seen = {}
    for i, t in enumerate(targets):
        key = (t.which, t.location)
        if key in seen:
            raise DegenerateTargetsError(f"target {t} is repeated", subset=(seen[key], i))
        seen[key] = i
    A, rhs = _target_system(targets, m, holomorphic, layout)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        u, s, vt = np.linalg.svd(A)
        weights = np.abs(u[:, -1])
        subset = tuple(int(i) for i in np.nonzero(weights > 1e-6 * weights.max())[0])
        raise DegenerateTargetsError(f"target system is singular or ill-conditioned "
                                     f"(condition number {cond:.3g})", subset=subset)
    x = np.linalg.solve(A, rhs)
    values = dict(layout.pinned)
    values.update(zip(layout.unknowns, x))
    params = _params(values)
    residual = max(abs(_target_value(params, t, m, holomorphic)) for t in targets)
    if residual > 1e-10 * max(1.0, float(np.max(np.abs(x)))):
        raise DegenerateTargetsError(f"solve residual {residual:.3g} too large", subset=())
    return params


def verify_configuration(obj, m=None, holomorphic=None, interval=DEFAULT_INTERVAL) -> Configuration:
    """Certified simple-zero counts of ``M1`` and ``N1`` in (0, 1)."""
    if isinstance(obj, PerturbationSpec):
        params = melnikov_params(obj)
        m = obj.m if m is None else m
        holomorphic = obj.holomorphic if holomorphic is None else holomorphic
    else:
        params = obj
        if m is None:
            raise DomainError("m is required when verifying bare parameters")
    holomorphic = bool(holomorphic)
    viol = params.degree_violations(m, holomorphic, tol=1e-9)
    if viol:
        raise UnreachableTargetError(f"parameters violate the degree-{m} constraints: {viol}")
    rep_m = isolate_zeros(m1_function(params, m, holomorphic), interval)
    rep_n = isolate_zeros(n1_function(params, m, holomorphic), interval)
    certified = (rep_m.count_certified and rep_n.count_certified
                 and rep_m.all_simple and rep_n.all_simple)
    return Configuration(rep_m.count, rep_n.count, certified, rep_m, rep_n)


# -- polynomial case -------------------------------------------------------

def third_root_formula(rs, ss):
    """Remaining root of ``N1`` when ``M1`` has roots ``rs`` and ``N1`` has ``ss``."""
    r1, r2, r3 = rs
    s1, s2 = ss
    e1 = r1 + r2 + r3
    return (s1 + s2) * e1 / (r1 * r2 * r3 * s1 * s2 - e1)


@dataclass(frozen=True)
class PolynomialCase:
    configuration: Configuration
    bound_check: bool
    bound: int
    m1_roots: tuple
    n1_roots: tuple
    third_root: float | None = None

    def __iter__(self):
        return iter((self.configuration, self.bound_check))


def polynomial_parts(params: MelnikovParams):
    """Ascending coefficients of ``M1`` and ``N1`` when no atanh terms are present."""
    p = params
    m1 = (p.a, p.b, p.c, p.d)
    n1 = (p.c, p.b + 2 * p.d - p.kappa + p.rho, p.a, p.kappa - p.d)
    return np.array(m1, dtype=float), np.array(n1, dtype=float)


def _exact_roots_in_unit(coeffs):
    P = RationalPolynomial.from_numpy(coeffs)
    if P.degree <= 0:
        return [], False
    ivs = [iv for iv in P.isolate_real_roots(0, 1) if 0 < iv[0] and iv[1] < 1]
    g = P.gcd(P.derivative())
    multiple = g.degree >= 1 and any(
        g.sign_at(iv[0]) != g.sign_at(iv[1]) or g(iv[0]) == 0 for iv in ivs)
    return [float((a + b) / 2) for a, b in ivs], multiple


def polynomial_case_analysis(params: MelnikovParams, m) -> PolynomialCase:
    """Exact configuration when ``alpha = beta = gamma = 0``."""
    if params.alpha != 0 or params.beta != 0 or params.gamma != 0:
        raise DomainError("polynomial case requires alpha = beta = gamma = 0")
    if m not in POLYNOMIAL_BOUNDS:
        raise NotSupportedError("polynomial case analysis covers m <= 3")
    pm, pn = polynomial_parts(params)
    rm, mult_m = _exact_roots_in_unit(pm)
    rn, mult_n = _exact_roots_in_unit(pn)
    conf = Configuration(len(rm), len(rn), not (mult_m or mult_n))
    bound = POLYNOMIAL_BOUNDS[m]
    third = None
    if len(rm) == 3 and len(rn) >= 2 and params.d != 0:
        third = third_root_formula(rm, rn[:2])
    return PolynomialCase(conf, conf.m1 + conf.n1 <= bound, bound, tuple(rm), tuple(rn), third)


def kappa_family(rs):
    """``N1`` as a family in ``kappa`` when ``M1`` is the cubic with roots ``rs``.

    Taking ``d = 1`` and ``M1 = (r - r1)(r - r2)(r - r3)`` (so ``a, b, c`` follow)
    leaves ``kappa`` free; with ``rho = 0`` the coefficients of ``N1`` are affine in it.
    """
    r1, r2, r3 = (to_fraction(x) for x in rs)
    e1, e2, e3 = r1 + r2 + r3, r1 * r2 + r1 * r3 + r2 * r3, r1 * r2 * r3
    return [RationalPolynomial((-e1,)), RationalPolynomial((e2 + 2, -1)),
            RationalPolynomial((-e3,)), RationalPolynomial((-1, 1))]


def kappa_regions(rs, window=(1, float("inf"))):
    """Constant-count regions of ``N1`` zeros in (0, 1) as ``kappa`` sweeps ``window``."""
    return parametric_root_regions(kappa_family(rs), window, (0, 1))


# -- realization -----------------------------------------------------------

def realizable(i, j, m, holomorphic=False):
    """``None`` when ``(i, j)`` is in the supported table, else the blocking bound."""
    if i < 0 or j < 0:
        return "zero counts must be nonnegative"
    if m == 0:
        return None if i + j <= 1 else "degree 0: at most one zero in total (i + j <= 1)"
    if holomorphic:
        if m in (1, 2):
            return None if i + j <= 2 else (
                "holomorphic degree 1-2: N1 roots are reciprocals of M1 roots, so i + j <= 2")
        if m == 3:
            if i > 3 or j > 3:
                return "holomorphic degree 3: each function has at most 3 zeros (ECT bound 2m-3)"
            return None if i + j <= 4 else "holomorphic degree 3: realizable table stops at i + j <= 4"
        return "holomorphic degree m > 3 is not supported by realize()"
    if m > 3:
        return "complex degree m > 3 has no closed forms"
    if i > m + 3 or j > m + 3:
        return f"complex degree {m}: each function has at most m+3 = {m + 3} zeros (ECT bound)"
    if i + j > 2 * m + 2:
        return f"complex degree {m}: realizable table stops at i + j <= 2m+2 = {2 * m + 2}"
    return None


def _canned_targets(i, j, layout: DesignLayout):
    f = [ZeroTarget(k / (i + 1), "f") for k in range(1, i + 1)]
    g = [ZeroTarget(k / (j + 1), "g") for k in range(1, j + 1)]
    return f + g + _pads(i, j, layout, np.linspace(-0.3, -0.8, max(1, layout.size - i - j)))


def _pads(i, j, layout, locations):
    pads = []
    nf, ng = i, j
    for loc in locations[: layout.size - i - j]:
        if (nf <= ng and nf < layout.f_cap) or ng >= layout.g_cap:
            pads.append(ZeroTarget(float(loc), "f"))
            nf += 1
        else:
            pads.append(ZeroTarget(float(loc), "g"))
            ng += 1
    return pads


def _random_targets(i, j, layout, rng):
    def spread(n):
        while True:
            x = np.sort(rng.uniform(0.06, 0.94, n))
            if n < 2 or np.min(np.diff(x)) > 0.05:
                return x
    f = [ZeroTarget(float(x), "f") for x in spread(i)]
    g = [ZeroTarget(float(x), "g") for x in spread(j)]
    negs = -np.sort(rng.uniform(0.05, 0.95, layout.size - i - j))
    return f + g + _pads(i, j, layout, negs)


def _target_system(targets, m, holomorphic, layout):
    base = _params(layout.pinned)
    A = np.empty((len(targets), layout.size))
    rhs = np.empty(len(targets))
    for i, t in enumerate(targets):
        rhs[i] = -_target_value(base, t, m, holomorphic)
        for j, name in enumerate(layout.unknowns):
            A[i, j] = _target_value(_params({name: 1.0}), t, m, holomorphic)
    return A, rhs


def _parity_ok(params, i, j, m, holomorphic):
    """End signs on (0, 1) agree with the parity of the requested counts."""
    ends = np.array([1e-7, 1 - 1e-9])
    for fn, n in ((m1_function, i), (n1_function, j)):
        lo, hi = fn(params, m, holomorphic)(ends)
        if lo == 0 or hi == 0 or (lo * hi < 0) != bool(n % 2):
            return False
    return True


def _null_space_candidate(i, j, m, holomorphic, layout, rng, tries=64):
    """Positive targets only; the leftover freedom is sampled at a random scale.

    Samples failing the end-sign parity test are skipped, up to ``tries`` of them.
    """
    positives = _random_targets(i, j, DesignLayout(layout.pinned, layout.unknowns[: i + j],
                                                   layout.f_cap, layout.g_cap), rng)
    A, rhs = _target_system(positives, m, holomorphic, layout)
    x0, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    _, s, vt = np.linalg.svd(A)
    null = vt[len(s[s > 1e-12 * s[0]]):]
    for _ in range(tries):
        x = x0 + (10.0 ** rng.uniform(-1, 3)) * rng.standard_normal(len(null)) @ null if len(null) else x0
        values = dict(layout.pinned)
        values.update(zip(layout.unknowns, x))
        params = _params(values)
        if not len(null) or _parity_ok(params, i, j, m, holomorphic):
            break
    return params, positives


@dataclass(frozen=True)
class Realization:
    spec: PerturbationSpec
    params: MelnikovParams
    targets: tuple
    configuration: Configuration
    attempts: int


def realize_detailed(i, j, m, holomorphic=False, rng=None, max_attempts=20) -> Realization:
    """Canned layout first, then alternate jittered pads and null-space samples."""
    reason = realizable(i, j, m, holomorphic)
    if reason is not None:
        raise NotSupportedError(f"configuration [[{i},{j}]] is outside the supported table: {reason}")
    if i == 0 and j == 0:
        spec = PerturbationSpec.zeros(m, holomorphic)
        zero = MelnikovParams()
        return Realization(spec, zero, (), verify_configuration(spec), 0)
    rng = rng if rng is not None else np.random.default_rng(0)
    layout = design_layout(m, holomorphic)
    last = None
    for attempt in range(max_attempts + 1):
        try:
            if attempt == 0:
                targets = _canned_targets(i, j, layout)
                params = design(targets, m, holomorphic)
            elif attempt % 2 or i + j == layout.size:
                targets = _random_targets(i, j, layout, rng)
                params = design(targets, m, holomorphic)
            else:
                params, targets = _null_space_candidate(i, j, m, holomorphic, layout, rng)
        except DegenerateTargetsError as exc:
            last = str(exc)
            continue
        spec = params_to_perturbation(params, m, holomorphic)
        conf = verify_configuration(spec)
        if conf.certified and conf.pair == (i, j):
            return Realization(spec, params, tuple(targets), conf, attempt + 1)
        last = f"achieved {conf}"
    raise NotSupportedError(f"no layout realized [[{i},{j}]] for m={m} after "
                            f"{max_attempts + 1} attempts (last: {last})")


def realize(i, j, m, holomorphic=False, rng=None, max_attempts=20) -> PerturbationSpec:
    """A perturbation whose averaged functions have exactly ``i`` and ``j`` simple zeros."""
    return realize_detailed(i, j, m, holomorphic, rng, max_attempts).spec


def realizable_table(m, holomorphic=False):
    if m == 0:
        top = 1
    elif holomorphic:
        top = 2 if m <= 2 else 4
    else:
        top = 2 * m + 2
    return [(i, s - i) for s in range(top + 1) for i in range(s + 1)
            if realizable(i, s - i, m, holomorphic) is None]
