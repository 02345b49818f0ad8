"""Closed-form averaged functions for ``z' = i(z^2-1)/2`` and ``m <= 3``.

Two bases are used.  ``F`` spans ``r M1`` and ``r N1`` for general complex
perturbations::

    F = [r, r^2, r^3, r^4, (r^2-1)^2 atanh r, (r^4-1) atanh r, r^2 atanh r]

``G(m)`` spans ``(r^2-1)^(m-3) M1`` for holomorphic perturbations of degree
``m >= 3``::

    G(m) = [1, r, ..., r^(2(m-2)), r (r^2-1)^(m-3) atanh r]

Every element of either span is written as ``p(r) + q(r) atanh(r)`` with
polynomials ``p`` and ``q``; :meth:`SpanFunction.parts` exposes that pair and
the root-counting code works on it.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError, UnsupportedDegreeError
from .perturbation import MelnikovParams

R_CAP = 1.0 - 1e-12
_SERIES_CUT = 1e-2


def atanh(r):
    r = np.asarray(r, dtype=float)
    return np.arctanh(np.clip(r, -R_CAP, R_CAP))


def atanh_over_r(r):
    """``atanh(r) / r`` with the removable point at 0 handled by a series."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < _SERIES_CUT
    safe = np.where(small, 1.0, r)
    r2 = r * r
    series = 1 + r2 / 3 + r2**2 / 5 + r2**3 / 7 + r2**4 / 9
    return np.where(small, series, atanh(safe) / safe)


def atanh_derivative(r, order):
    """``d^order/dr^order atanh(r)`` for ``order >= 0`` (exact partial fractions)."""
    r = np.asarray(r, dtype=float)
    if order == 0:
        return atanh(r)
    j = order
    fact = float(np.prod(np.arange(1, j)))  # (j-1)!
    return 0.5 * fact * ((1 - r) ** (-j) + (-1) ** (j - 1) * (1 + r) ** (-j))


def _check_open_unit(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= 1) or not np.all(np.isfinite(r)):
        raise DomainError("r must lie in the open interval (0, 1)")
    return r


# ``F`` as (p, q) pairs, ascending polynomial coefficients.
_F_PARTS = (
    ((0, 1), ()),
    ((0, 0, 1), ()),
    ((0, 0, 0, 1), ()),
    ((0, 0, 0, 0, 1), ()),
    ((), (1, 0, -2, 0, 1)),
    ((), (-1, 0, 0, 0, 1)),
    ((), (0, 0, 1)),
)


def _g_parts(m):
    n = 2 * (m - 2)
    parts = [(tuple([0] * i + [1]), ()) for i in range(n + 1)]
    q = P.polymul((0, 1), P.polypow((-1, 0, 1), m - 3)) if m > 3 else np.array([0.0, 1.0])
    parts.append(((), tuple(q)))
    return tuple(parts)


def basis_parts(basis, m=None):
    if basis == "F":
        return _F_PARTS
    if basis == "G":
        if m is None or m < 3:
            raise UnsupportedDegreeError("basis G(m) is defined for m >= 3")
        return _g_parts(m)
    raise ValueError(f"unknown basis {basis!r}")


def _combine(parts, coefficients):
    p = np.zeros(1)
    q = np.zeros(1)
    for (pp, qq), c in zip(parts, coefficients):
        if c == 0:
            continue
        if pp:
            p = P.polyadd(p, c * np.asarray(pp, dtype=float))
        if qq:
            q = P.polyadd(q, c * np.asarray(qq, dtype=float))
    return P.polytrim(p, 0.0), P.polytrim(q, 0.0)


@dataclass(frozen=True)
class SpanFunction:
    """Linear combination over ``F`` or ``G(m)``.

    ``numerator`` is the combination itself; the averaged function is the
    numerator divided by ``r`` (basis ``F``) or by ``(r^2-1)^(m-3)`` (basis
    ``G``).  ``ceiling`` is the maximum number of zeros in ``(0, 1)`` that the
    relevant subspace allows (``None`` when unknown).
    """

    basis: str
    coefficients: tuple
    m: int | None = None
    ceiling: int | None = None

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        expected = len(basis_parts(self.basis, self.m))
        if len(coeffs) != expected:
            raise ValueError(f"basis {self.basis} needs {expected} coefficients, got {len(coeffs)}")

    @property
    def prefactor(self):
        return "divide-by-r" if self.basis == "F" else "divide-by-(r^2-1)^(m-3)"

    def parts(self):
        """Polynomials ``(p, q)`` with ``numerator = p + q * atanh``."""
        return _combine(basis_parts(self.basis, self.m), self.coefficients)

    def is_zero(self):
        return not any(self.coefficients)

    def scale(self):
        return max(1.0, max(abs(c) for c in self.coefficients))

    def numerator(self, r):
        p, q = self.parts()
        return P.polyval(r, p) + P.polyval(r, q) * atanh(r)

    def numerator_derivative(self, r, order=1):
        p, q = self.parts()
        r = np.asarray(r, dtype=float)
        out = P.polyval(r, P.polyder(p, order)) if len(p) > order else np.zeros_like(r)
        for j in range(order + 1):
            dq = P.polyder(q, order - j) if order - j else q
            if len(dq) == 0 or not np.any(dq):
                continue
            binom = float(comb(order, j))
            out = out + binom * P.polyval(r, dq) * atanh_derivative(r, j)
        return out

    def __call__(self, r):
        r = _check_open_unit(r)
        if self.basis == "F":
            p, q = self.parts()
            # p(0) = 0 and q * atanh vanishes at 0: cancel r symbolically.
            return P.polyval(r, p[1:] if len(p) > 1 else [0.0]) + P.polyval(r, q) * atanh_over_r(r)
        return self.numerator(r) / (r * r - 1) ** (self.m - 3)

    def derivative(self, r):
        """First derivative of the averaged function (prefactor applied)."""
        r = _check_open_unit(r)
        if self.basis == "F":
            p, q = self.parts()
            p1 = p[1:] if len(p) > 1 else np.array([0.0])
            h = atanh_over_r(r)
            return (P.polyval(r, P.polyder(p1)) if len(p1) > 1 else 0.0) \
                + P.polyval(r, P.polyder(q)) * h + P.polyval(r, q) * _atanh_over_r_prime(r)
        k = self.m - 3
        num = self.numerator(r)
        dnum = self.numerator_derivative(r)
        return (dnum * (r * r - 1) - 2 * k * r * num) / (r * r - 1) ** (k + 1)


def _atanh_over_r_prime(r):
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < _SERIES_CUT
    safe = np.where(small, 1.0, r)
    series = sum(2 * n * r ** (2 * n - 1) / (2 * n + 1) for n in range(1, 7))
    exact = (safe / (1 - safe * safe) - atanh(safe)) / (safe * safe)
    return np.where(small, series, exact)


def ect_ceiling(m, holomorphic=False):
    """Maximum number of zeros in (0, 1) of one averaged function."""
    if m == 0:
        return 1
    if holomorphic:
        if m <= 2:
            return 2
        return 2 * m - 3
    if m > 3:
        return None
    return m + 3


def m1_function(params: MelnikovParams, m=3, holomorphic=False) -> SpanFunction:
    """``M1`` as a span function (``G(3)`` for holomorphic cubic, else ``F``)."""
    p = params
    if holomorphic and m == 3:
        return SpanFunction("G", (p.a, p.b, p.c, p.gamma), m=3, ceiling=ect_ceiling(3, True))
    return SpanFunction("F", (p.a, p.b, p.c, p.d, p.alpha, p.beta, p.gamma),
                        ceiling=ect_ceiling(m, holomorphic))


def n1_params(params: MelnikovParams) -> MelnikovParams:
    """Parameters whose ``M1`` equals the ``N1`` of ``params``."""
    p = params
    return MelnikovParams(a=p.c, b=p.b + 2 * p.d - p.kappa + p.rho, c=p.a, d=p.kappa - p.d,
                          alpha=p.alpha, beta=-p.beta, gamma=p.gamma)


def n1_function(params: MelnikovParams, m=3, holomorphic=False) -> SpanFunction:
    return m1_function(n1_params(params), m, holomorphic)


def eval_M1(params: MelnikovParams, r):
    return m1_function(params)(r)


def eval_N1(params: MelnikovParams, r):
    return eval_M1(n1_params(params), r)


def eval_holomorphic(params, m, which, r):
    """Holomorphic averaged functions from ``(a, b, c, alpha, kappa)``.

    ``M1 = a + b r + c r^2 + alpha r atanh r`` and
    ``N1 = c + (b - kappa) r + a r^2 + alpha r atanh r``.  For ``m <= 2`` both
    ``alpha`` and ``kappa`` must vanish and ``N1(r) = r^2 M1(1/r)``.
    """
    if m > 3:
        raise UnsupportedDegreeError("holomorphic closed forms exist only for m <= 3")
    a, b, c, alpha, kappa = (float(v) for v in params)
    if m <= 2 and (alpha != 0 or kappa != 0):
        raise DomainError("alpha and kappa vanish for holomorphic degree m <= 2")
    if m == 0 and c != -a:
        raise DomainError("degree 0 requires c = -a")
    r = _check_open_unit(r)
    if which == "M1":
        coeffs = (a, b, c)
    elif which == "N1":
        coeffs = (c, b - kappa, a)
    else:
        raise ValueError(f"which must be 'M1' or 'N1', got {which!r}")
    return P.polyval(r, coeffs) + alpha * r * atanh(r)


def eval_I_kl(coefficient, k, l, side, r):
    """One summand ``I^{+-}_{k,l}(r)`` of ``M1^{+-}`` for the model system.

    ``side`` is ``'+'`` or ``'-'``.  The ``1/r`` factors of the ``k >= 1``
    formulas are cancelled against their numerators.
    """
    if not (0 <= k <= l <= 3):
        raise UnsupportedDegreeError(f"closed form for (k={k}, l={l}) not available")
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    r = _check_open_unit(r)
    a = complex(coefficient)
    im, re, s = a.imag, a.real, (1.0 if side == "+" else -1.0)
    pi = np.pi
    r2 = r * r
    h = atanh_over_r(r)
    if (k, l) == (0, 0):
        return -im * (r2 - 1) - s * pi * re * r
    if (k, l) == (0, 1):
        return -im * (1 + r2)
    if (k, l) == (1, 1):
        return -im * (-(1 + r2) + 2 * (r2 - 1) ** 2 * h) - s * pi * re * r * (r2 - 1)
    if (k, l) == (0, 2):
        return -im * (r2 - 1) + s * pi * re * r
    if (k, l) == (1, 2):
        return -im * (1 - r2 + 2 * (r2 * r2 - 1) * h) - s * pi * re * r2 * r
    if (k, l) == (2, 2):
        return -im * (5 * (r2 - 1) - 4 * (r2 * r2 - 1) * h) - s * pi * re * r * (1 - 2 * r2)
    if (k, l) == (0, 3):
        return -im * ((1 + r2) - 8 * r * atanh(r)) - s * 2 * pi * re * r
    if (k, l) == (1, 3):
        return -im * (-(1 + r2) + 2 * (1 + r2) ** 2 * h) - s * pi * re * r * (1 + r2)
    if (k, l) == (2, 3):
        return -im * (5 * (1 + r2) - 4 * (1 + r2 * r2) * h) + s * 2 * pi * re * r2 * r
    return -im * (-5 * (1 + r2) + (6 - 4 * r2 + 6 * r2 * r2) * h) - s * pi * re * r * (3 * r2 - 1)


def eval_M1_from_integrals(spec, r):
    """``M1 = sum_{k,l} I^+_{k,l} - I^-_{k,l}`` evaluated term by term."""
    if spec.m > 3:
        raise UnsupportedDegreeError("closed forms exist only for m <= 3")
    total = 0.0
    for side, k, l, v in spec.entries():
        if v != 0:
            term = eval_I_kl(v, k, l, side, r)
            total = total + (term if side == "+" else -term)
    return total + 0.0 * np.asarray(r, dtype=float)
