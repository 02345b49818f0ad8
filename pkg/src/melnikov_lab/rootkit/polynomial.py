"""Exact polynomials over the rationals.

Coefficients are :class:`fractions.Fraction` in ascending order.  Floats are
converted exactly (every double is a dyadic rational), so counts computed here
are statements about the float inputs themselves, not approximations of them.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import DegenerateFamilyError, EndpointRootError


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("polynomial coefficients must be finite")
    return Fraction(x)


def _trim(coeffs):
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RationalPolynomial:
    """``sum coefficients[i] * x**i`` with exact rational coefficients."""

    coefficients: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _trim(to_fraction(c) for c in self.coefficients))

    @classmethod
    def from_roots(cls, roots, leading=1):
        p = cls((leading,))
        for r in roots:
            p = p * cls((-to_fraction(r), 1))
        return p

    @classmethod
    def from_numpy(cls, coeffs):
        """Ascending float coefficients (as produced by ``numpy.polynomial``)."""
        return cls(tuple(np.asarray(coeffs, dtype=float)))

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def is_zero(self):
        return not self.coefficients

    @property
    def leading(self):
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def __call__(self, x):
        x = to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def evalf(self, x):
        return np.polynomial.polynomial.polyval(x, [float(c) for c in self.coefficients] or [0.0])

    def sign_at(self, x):
        v = self(x)
        return (v > 0) - (v < 0)

    def sign_at_infinity(self, direction=1):
        if self.is_zero():
            return 0
        s = 1 if self.leading > 0 else -1
        return s if direction > 0 or self.degree % 2 == 0 else -s

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return RationalPolynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return RationalPolynomial(())
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return RationalPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n):
        out = RationalPolynomial((1,))
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def divmod(self, other):
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(0, len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c == 0:
                continue
            quot[i - dq] = c
            for j, b in enumerate(other.coefficients):
                rem[i - dq + j] -= c * b
        return RationalPolynomial(tuple(quot)), RationalPolynomial(tuple(rem[:dq]))

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def derivative(self):
        return RationalPolynomial(tuple(i * c for i, c in enumerate(self.coefficients) if i))

    def monic(self):
        if self.is_zero():
            return self
        return RationalPolynomial(tuple(c / self.leading for c in self.coefficients))

    def gcd(self, other):
        a, b = self, _as_poly(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree(self):
        g = self.gcd(self.derivative())
        return self if g.degree <= 0 else self // g

    def compose_scale(self, factor):
        """``p(factor * x)``."""
        f = to_fraction(factor)
        return RationalPolynomial(tuple(c * f**i for i, c in enumerate(self.coefficients)))

    def to_float(self):
        return np.array([float(c) for c in self.coefficients] or [0.0])

    def __repr__(self):
        return f"RationalPolynomial({[str(c) for c in self.coefficients]})"

    # -- root counting -------------------------------------------------

    def sturm_sequence(self):
        seq = [self, self.derivative()]
        while not seq[-1].is_zero():
            seq.append(-(seq[-2] % seq[-1]))
        return seq[:-1]

    def sturm_count(self, lo, hi):
        """Number of distinct real roots in the open interval ``(lo, hi)``.

        ``lo`` may be ``-inf`` and ``hi`` may be ``+inf``.
        """
        if self.is_zero():
            raise ValueError("the zero polynomial has infinitely many roots")
        finite_lo, finite_hi = _is_finite(lo), _is_finite(hi)
        if finite_lo and finite_hi and to_fraction(lo) >= to_fraction(hi):
            return 0
        for x, finite in ((lo, finite_lo), (hi, finite_hi)):
            if finite and self(x) == 0:
                raise EndpointRootError(f"polynomial vanishes at the endpoint {x}")
        if self.degree == 0:
            return 0
        seq = self.sturm_sequence()
        return _variations(seq, lo, finite_lo, -1) - _variations(seq, hi, finite_hi, 1)

    def descartes_bound(self):
        """Sign variations of the nonzero coefficients (bound on positive roots)."""
        if self.is_zero():
            raise ValueError("descartes_bound of the zero polynomial")
        signs = [1 if c > 0 else -1 for c in self.coefficients if c != 0]
        return sum(1 for s, t in zip(signs, signs[1:]) if s != t)

    def discriminant(self):
        n = self.degree
        if n < 2:
            raise ValueError("discriminant needs degree >= 2")
        sign = -1 if (n * (n - 1) // 2) % 2 else 1
        return sign * resultant(self, self.derivative()) / self.leading

    def isolate_real_roots(self, lo=None, hi=None, width=Fraction(1, 10**12)):
        """Disjoint rational intervals, each holding exactly one distinct real root.

        A root landing exactly on a bisection point yields a degenerate
        interval ``(x, x)``.  Results are sorted.
        """
        p = self.squarefree()
        if p.degree <= 0:
            return []
        bound = cauchy_bound(p)
        lo = -bound if lo is None or not _is_finite(lo) else to_fraction(lo)
        hi = bound if hi is None or not _is_finite(hi) else to_fraction(hi)
        seq = p.sturm_sequence()

        def var(x):
            return _variations(seq, x, True, 0)

        # With zero signs dropped, var(a) - var(b) counts the roots in (a, b].
        out = [(lo, lo)] if p(lo) == 0 else []
        stack = [(lo, hi)]
        while stack:
            a, b = stack.pop()
            k = var(a) - var(b)
            if k == 0:
                continue
            if p(b) == 0:
                out.append((b, b))
                k -= 1
                if k == 0:
                    continue
            elif k == 1 and p(a) != 0:
                # One simple root with a sign change: bisect on the sign of p.
                sa = p.sign_at(a)
                while b - a > width:
                    c = (a + b) / 2
                    sc = p.sign_at(c)
                    if sc == 0:
                        a = b = c
                        break
                    if sc == sa:
                        a = c
                    else:
                        b = c
                out.append((a, b))
                continue
            c = (a + b) / 2
            stack.append((c, b))
            stack.append((a, c))
        return sorted(set(out))

    def real_roots(self, lo=None, hi=None, tol=1e-13):
        """Float approximations of the distinct real roots in ``[lo, hi]``."""
        ivs = self.isolate_real_roots(lo, hi, width=to_fraction(tol))
        return [float((a + b) / 2) for a, b in ivs]


def _as_poly(x):
    return x if isinstance(x, RationalPolynomial) else RationalPolynomial((x,))


def _is_finite(x):
    return x is not None and not (isinstance(x, float) and math.isinf(x))


def _variations(seq, x, finite, direction):
    if finite:
        x = to_fraction(x)
        signs = [p.sign_at(x) for p in seq]
    else:
        signs = [p.sign_at_infinity(direction) for p in seq]
    signs = [s for s in signs if s]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def cauchy_bound(p: RationalPolynomial) -> Fraction:
    lead = abs(p.leading)
    return 1 + max((abs(c) / lead for c in p.coefficients[:-1]), default=Fraction(0))


def resultant(p: RationalPolynomial, q: RationalPolynomial) -> Fraction:
    """Resultant by the Euclidean recursion over the rationals."""
    if p.is_zero() or q.is_zero():
        return Fraction(0)
    n, m = p.degree, q.degree
    if n < m:
        sign = -1 if (n * m) % 2 else 1
        return sign * resultant(q, p)
    if m == 0:
        return q.leading**n
    r = p % q
    if r.is_zero():
        return Fraction(0)
    sign = -1 if (n * m) % 2 else 1
    return sign * q.leading ** (n - r.degree) * resultant(q, r)


def lagrange_interpolate(nodes: Sequence[Fraction], values: Sequence[Fraction]) -> RationalPolynomial:
    out = RationalPolynomial(())
    for i, (xi, yi) in enumerate(zip(nodes, values)):
        if yi == 0:
            continue
        term = RationalPolynomial((yi,))
        for j, xj in enumerate(nodes):
            if j != i:
                term = term * RationalPolynomial((-xj / (xi - xj), 1 / (xi - xj)))
        out = out + term
    return out


# -- one-parameter families ------------------------------------------------

@dataclass(frozen=True)
class RootRegion:
    lo: float
    hi: float
    sample: Fraction
    count: int
    certified: bool
    note: str = ""


def family_at(family, kappa) -> RationalPolynomial:
    """Evaluate a family given as coefficient polynomials in ``kappa``."""
    return RationalPolynomial(tuple(c(kappa) for c in family))


def family_discriminant(family) -> RationalPolynomial:
    """``kappa -> Delta_x(F_kappa)`` computed for the formal degree by exact interpolation."""
    family = [_as_poly(c) for c in family]
    n = len(family) - 1
    if n < 2:
        raise ValueError("family must have formal degree >= 2")
    lead = family[-1]
    if lead.is_zero():
        raise DegenerateFamilyError("leading coefficient of the family is identically zero")
    kdeg = max(c.degree for c in family if not c.is_zero())
    need = (2 * n - 1) * kdeg + 1 if kdeg > 0 else 1
    nodes, values = [], []
    k = 0
    while len(nodes) < need:
        # 0, 1/3, -1/3, 2/3, -2/3, ...
        x = Fraction((k + 1) // 2 * (1 if k % 2 else -1), 3)
        k += 1
        if lead(x) != 0:
            nodes.append(x)
            values.append(family_at(family, x).discriminant())
    return lagrange_interpolate(nodes, values)


def _gap_point(left, right):
    """Rational strictly between two points, either of which may be infinite."""
    if left is None and right is None:
        return Fraction(0)
    if left is None:
        return right - 1
    if right is None:
        return left + 1
    return (left + right) / 2


def parametric_root_regions(family, window, interval, sample_checks=32):
    """Constant root-count regions of a one-parameter polynomial family.

    ``family`` lists the coefficients (ascending in ``x``) as polynomials in
    ``kappa``.  The window is split at the real roots of ``kappa ->
    Delta_x(F_kappa)``, of the leading coefficient and of ``F_kappa(a)``,
    ``F_kappa(b)``.  In each open region the count of distinct roots in
    ``(a, b)`` is constant and all roots are simple; one Sturm count at a
    rational sample gives it.  The hypotheses are additionally spot-checked
    at ``sample_checks`` points per region, and a failing check leaves that
    region uncertified.
    """
    family = [_as_poly(c) for c in family]
    a, b = (to_fraction(v) for v in interval)
    k_lo, k_hi = window
    k_lo = None if not _is_finite(k_lo) else to_fraction(k_lo)
    k_hi = None if not _is_finite(k_hi) else to_fraction(k_hi)
    disc = family_discriminant(family)
    if disc.is_zero():
        raise DegenerateFamilyError("discriminant vanishes identically in kappa")
    at_a = sum((c * RationalPolynomial((a**i,)) for i, c in enumerate(family)), RationalPolynomial(()))
    at_b = sum((c * RationalPolynomial((b**i,)) for i, c in enumerate(family)), RationalPolynomial(()))
    cuts = []
    for poly in (disc, family[-1], at_a, at_b):
        if poly.is_zero():
            raise DegenerateFamilyError("an endpoint value vanishes identically in kappa")
        if poly.degree <= 0:
            continue
        for iv in poly.isolate_real_roots(k_lo, k_hi):
            if (k_lo is None or iv[1] > k_lo) and (k_hi is None or iv[0] < k_hi):
                cuts.append(iv)
    cuts.sort()
    merged = []
    for iv in cuts:
        if merged and iv[0] <= merged[-1][1]:
            # Overlapping isolation boxes: refine would be cleaner; merging keeps it sound.
            merged[-1] = (merged[-1][0], max(merged[-1][1], iv[1]))
        else:
            merged.append(iv)
    bounds = [(k_lo, k_lo)] + merged + [(k_hi, k_hi)]
    regions = []
    for (_, left), (right, _) in zip(bounds, bounds[1:]):
        if left is not None and right is not None and left >= right:
            continue
        s = _gap_point(left, right)
        poly = family_at(family, s)
        count = poly.sturm_count(a, b)
        ok, note = _check_region_hypotheses(family, disc, a, b, left, right, sample_checks)
        lo_f = -math.inf if left is None else float(left)
        hi_f = math.inf if right is None else float(right)
        regions.append(RootRegion(lo_f, hi_f, s, count, ok, note))
    return regions


def _check_region_hypotheses(family, disc, a, b, left, right, n):
    lo = float(left) if left is not None else float(right) - 100.0
    hi = float(right) if right is not None else float(left) + 100.0
    for t in np.linspace(lo, hi, n + 2)[1:-1]:
        k = to_fraction(t)
        if disc(k) == 0:
            return False, f"discriminant vanishes at kappa={t}"
        p = family_at(family, k)
        if p(a) == 0 or p(b) == 0:
            return False, f"endpoint root at kappa={t}"
    return True, ""


def random_nudge(rng: random.Random | None = None) -> Fraction:
    """Random positive rational below ``1e-9`` for shifting Sturm endpoints off roots."""
    rng = rng or random.Random(0)
    return Fraction(rng.randint(1, 999), 10**12)
