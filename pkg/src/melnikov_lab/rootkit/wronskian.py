"""Wronskians of the bases ``F`` and ``G(m)``.

For ``F`` the closed forms of ``W_0 .. W_6`` are evaluated in high precision
(``mpmath``); the atanh terms cancel against the polynomial part to many
digits near ``r = 0``.  The cross-check builds the derivative matrix from
exact derivative formulas and takes its determinant, also in high precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import mpmath as mp
import numpy as np

from ..closed import basis_parts
from ..errors import DomainError

_DPS = 60


def _closed_forms_F(r):
    at = mp.atanh(r)
    r2 = r * r
    w0 = r
    w1 = r2
    w2 = 2 * r**3
    w3 = 12 * r**4
    w4 = 96 * (r * (5 * r2 - 3) + 3 * (r2 - 1) ** 2 * at) / (r2 - 1) ** 2
    w5 = 3072 * (-15 * r + 22 * r**3 - 3 * r**5 + 3 * (r2 - 1) ** 2 * (5 + r2) * at) / (r2 - 1) ** 6
    w6 = (294912 * r * (-r * (105 - 145 * r2 + 15 * r2**2 + 9 * r2**3)
                        + 3 * (r2 - 1) ** 2 * (35 + 10 * r2 + 3 * r2**2) * at) / (r2 - 1) ** 12)
    return [w0, w1, w2, w3, w4, w5, w6]


def _atanh_derivative(r, j):
    if j == 0:
        return mp.atanh(r)
    return mp.mpf(factorial(j - 1)) / 2 * ((1 - r) ** (-j) + (-1) ** (j - 1) * (1 + r) ** (-j))


def _poly_derivative_value(coeffs, order, r):
    total = mp.mpf(0)
    for i, c in enumerate(coeffs):
        if i >= order and c:
            total += mp.mpf(c) * mp.mpf(factorial(i) // factorial(i - order)) * r ** (i - order)
    return total


def element_derivative(parts, order, r):
    """``d^order/dr^order [p + q atanh]`` for one basis element given as ``(p, q)``."""
    p, q = parts
    out = _poly_derivative_value(p, order, r) if p else mp.mpf(0)
    if q:
        for j in range(order + 1):
            out += comb(order, j) * _poly_derivative_value(q, order - j, r) * _atanh_derivative(r, j)
    return out


def numeric_wronskians(parts, r):
    """Leading Wronskians ``W_0 .. W_n`` from the derivative matrix."""
    n = len(parts)
    mat = mp.matrix(n, n)
    for i in range(n):
        for j in range(n):
            mat[i, j] = element_derivative(parts[j], i, r)
    return [mp.det(mat[:k + 1, :k + 1]) for k in range(n)]


@dataclass(frozen=True)
class WronskianReport:
    values: tuple
    cross_check: tuple
    max_relative_gap: float

    def all_positive(self):
        return all(v > 0 for v in self.values)


def wronskians(basis="F", r=0.5, m=None) -> WronskianReport:
    """Leading Wronskians of ``F`` (closed forms) or ``G(m)`` (factorials + last one)."""
    if not (0 < float(r) < 1):
        raise DomainError("r must lie in (0, 1)")
    with mp.workdps(_DPS):
        x = mp.mpf(r)
        parts = basis_parts(basis, m)
        numeric = numeric_wronskians(parts, x)
        if basis == "F":
            values = _closed_forms_F(x)
        else:
            n = len(parts) - 1
            values = [mp.mpf(np.prod([factorial(k) for k in range(j + 1)], dtype=object))
                      for j in range(n)]
            values.append(numeric[-1])
        gap = max(abs(a - b) / max(abs(a), mp.mpf(10) ** (-_DPS + 5)) for a, b in zip(values, numeric))
        return WronskianReport(tuple(float(v) for v in values), tuple(float(v) for v in numeric), float(gap))


def w4_derivative_identity(r):
    """Relative gap between ``W_4'(r) (1 - r^2)^3`` and ``768 r^4``."""
    with mp.workdps(_DPS):
        x = mp.mpf(r)
        d = mp.diff(lambda t: _closed_forms_F(t)[4], x)
        lhs = d * (1 - x * x) ** 3
        rhs = 768 * x**4
        return float(abs(lhs - rhs) / rhs)
