"""Certified zero isolation for ``p(r) + q(r) atanh(r)`` on a subinterval of (0, 1).

Away from the roots of ``q`` write ``f = q h`` with ``h = p/q + atanh``.  Then

    h' = N / (q^2 (1 - r^2)),    N = (p' q - p q') (1 - r^2) + q^2,

so ``h`` is strictly monotone between consecutive points of
``C = roots(q) U roots(N)``.  Each piece of the interval cut at ``C`` holds
at most one zero of ``f``, it holds one exactly when ``f`` changes sign across
it, and that zero is simple because ``N`` does not vanish inside the piece.
The roots of ``q`` and ``N`` are counted exactly by Sturm sequences on the
rational polynomials obtained from the float coefficients, so the only
numerical step left is deciding the sign of ``f`` at the cut points.  When
``f`` is within noise of zero there the count is left uncertified.

``|C| + 1`` is the Rolle bound that the found count is compared with.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from ..closed import SpanFunction
from ..errors import DomainError, EndpointRootError
from .polynomial import RationalPolynomial, random_nudge

DEFAULT_INTERVAL = (1e-9, 1 - 1e-9)
_ONE_MINUS_R2 = RationalPolynomial((1, 0, -1))


@dataclass(frozen=True)
class Zero:
    location: float
    half_width: float
    simple: bool


@dataclass(frozen=True)
class ZeroReport:
    zeros: tuple
    count_certified: bool
    ceiling: int | None
    rolle_bound: int | None = None
    notes: tuple = field(default_factory=tuple)

    @property
    def count(self):
        return len(self.zeros)

    @property
    def locations(self):
        return [z.location for z in self.zeros]

    @property
    def all_simple(self):
        return all(z.simple for z in self.zeros)


def _polys(f: SpanFunction):
    p, q = f.parts()
    return RationalPolynomial.from_numpy(p), RationalPolynomial.from_numpy(q)


def _roots_in(poly: RationalPolynomial, lo: Fraction, hi: Fraction):
    """Distinct roots of ``poly`` in ``(lo, hi)``: exact count, float locations."""
    if poly.degree <= 0:
        return []
    sq = poly.squarefree()
    while sq(lo) == 0:
        lo = lo + random_nudge()
    while sq(hi) == 0:
        hi = hi - random_nudge()
    count = sq.sturm_count(lo, hi)
    if count == 0:
        return []
    flo, fhi = float(lo), float(hi)
    cand = np.roots(sq.to_float()[::-1])
    real = np.sort(np.real(cand[(np.abs(np.imag(cand)) < 1e-7 * (1 + np.abs(cand)))]))
    real = real[(real > flo) & (real < fhi)]
    fl = sq.to_float()
    polished = []
    for x in real:
        polished.append(_polish(fl, x, flo, fhi))
    polished = np.unique(np.round(polished, 15))
    if len(polished) == count and _brackets_ok(sq, polished, lo, hi):
        return list(polished)
    ivs = sq.isolate_real_roots(lo, hi, width=Fraction(1, 2**50))
    return [float((a + b) / 2) for a, b in ivs if lo < a and b < hi]


def _polish(coeffs, x, lo, hi):
    for _ in range(3):
        v = np.polynomial.polynomial.polyval(x, coeffs)
        d = np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(coeffs))
        if d == 0 or not np.isfinite(v / d):
            break
        nx = x - v / d
        if not (lo < nx < hi):
            break
        x = nx
    return x


def _brackets_ok(sq: RationalPolynomial, xs, lo, hi):
    """Check exact sign changes between the midpoints separating approximated roots."""
    pts = [lo] + [Fraction((a + b) / 2) for a, b in zip(xs, xs[1:])] + [hi]
    signs = [sq.sign_at(x) for x in pts]
    return all(s != 0 for s in signs) and all(s != t for s, t in zip(signs, signs[1:]))


def _value_function(f: SpanFunction):
    def value(r):
        # Same sign as the averaged function on (0, 1); better scaled near 0
        # because the removable factor r of basis F is cancelled.
        return f(np.clip(r, 1e-300, 1 - 1e-16))

    return value


def isolate_zeros(f: SpanFunction, interval=DEFAULT_INTERVAL, tol=1e-12) -> ZeroReport:
    """Isolate and count the zeros of ``f`` in ``interval``."""
    lo, hi = float(interval[0]), float(interval[1])
    if not (lo >= 1e-9 and hi <= 1 - 1e-9 and lo < hi):
        raise DomainError("interval must satisfy 1e-9 <= lo < hi <= 1 - 1e-9")
    if f.is_zero():
        return ZeroReport((), True, f.ceiling, 0, ("identically zero: no isolated zeros",))
    P, Q = _polys(f)
    flo, fhi = Fraction(lo), Fraction(hi)
    notes = []
    value = _value_function(f)
    scale = f.scale()
    if Q.is_zero():
        cuts = _roots_in(P.derivative(), flo, fhi) if P.degree >= 2 else []
        exact_count = _count_poly(P, flo, fhi)
        multiple = P.gcd(P.derivative())
        has_multiple = multiple.degree >= 1 and bool(_roots_in(multiple, flo, fhi))
    else:
        common = P.gcd(Q)
        if common.degree >= 1 and _roots_in(common, flo, fhi):
            notes.append("p and q share a root in the interval")
        N = (P.derivative() * Q - P * Q.derivative()) * _ONE_MINUS_R2 + Q * Q
        cuts = sorted(set(_roots_in(Q, flo, fhi)) | set(_roots_in(N, flo, fhi)))
        exact_count = None
        has_multiple = bool(notes)
    pts = [lo] + list(cuts) + [hi]
    vals = [float(value(x)) for x in pts]
    noise = 1e3 * np.finfo(float).eps * scale
    zeros = []
    certified = not has_multiple
    for i, (a, b) in enumerate(zip(pts, pts[1:])):
        va, vb = vals[i], vals[i + 1]
        if 0 < i and abs(va) <= max(noise, tol * scale):
            # f is flat-ish at a critical cut point: a double zero cannot be excluded.
            if not any(abs(z.location - a) < 10 * tol for z in zeros):
                zeros.append(Zero(a, max(tol, 1e-8), False))
                notes.append(f"near-zero extremum at r={a:.12g}")
            certified = False
            continue
        if va == 0 or vb == 0 or np.sign(va) == np.sign(vb):
            continue
        x0 = brentq(value, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
        zeros.append(Zero(float(x0), tol, True))
    for end, v in ((lo, vals[0]), (hi, vals[-1])):
        if abs(v) <= max(noise, tol * scale):
            notes.append(f"|f| is at noise level at the interval end r={end:.3g}")
            certified = False
    zeros = _merge_close(zeros, tol)
    if any(not z.simple for z in zeros):
        certified = False
    if exact_count is not None and exact_count != len(zeros):
        notes.append(f"exact polynomial count {exact_count} differs from {len(zeros)} sign changes")
        certified = False
    rolle = len(cuts) + 1
    if f.ceiling is not None and len(zeros) > f.ceiling:
        notes.append(f"found {len(zeros)} zeros above the ceiling {f.ceiling}")
        certified = False
    return ZeroReport(tuple(zeros), certified, f.ceiling, rolle, tuple(notes))


def _count_poly(P, lo, hi):
    if P.degree <= 0:
        return 0
    try:
        return P.sturm_count(lo, hi)
    except EndpointRootError:
        return P.sturm_count(lo + random_nudge(), hi - random_nudge())


def _merge_close(zeros, tol):
    zeros = sorted(zeros, key=lambda z: z.location)
    out = []
    for z in zeros:
        if out and z.location - out[-1].location < 10 * tol:
            prev = out.pop()
            out.append(Zero(0.5 * (prev.location + z.location),
                            max(prev.half_width, z.half_width, 10 * tol), False))
        else:
            out.append(z)
    return out


def count_zeros(f: SpanFunction, interval=DEFAULT_INTERVAL, tol=1e-12):
    rep = isolate_zeros(f, interval, tol)
    return rep.count, rep.count_certified


def polynomial_zero_count(coeffs, lo=0, hi=1):
    """Exact count of distinct roots in ``(lo, hi)`` of a float-coefficient polynomial."""
    P = RationalPolynomial.from_numpy(coeffs)
    if P.is_zero():
        return 0
    return _count_poly(P, Fraction(lo), Fraction(hi)) if not math.isinf(hi) else P.sturm_count(lo, hi)
