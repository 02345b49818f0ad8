"""Independent reference computations used by the tests.

Nothing here imports the closed forms or the quadrature module, so agreement
with them is a genuine cross-check.
"""
import numpy as np

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(400)


def _poly_value(table, z):
    # R(z) = sum conj(a_{k,l}) z^(l-k) zbar^k
    zb = np.conj(z)
    out = np.zeros_like(z)
    for l, row in enumerate(table):
        for k, a in enumerate(row):
            out = out + np.conj(a) * z ** (l - k) * zb**k
    return out


def averaged_left(plus, minus, r):
    """Averaged radial drift around -1 with w = (1+z)/(1-z), one full turn."""
    total = 0.0
    for lo, hi in ((0.0, np.pi), (np.pi, 2 * np.pi)):
        t = 0.5 * (hi - lo) * _NODES + 0.5 * (hi + lo)
        w = r * np.exp(1j * t)
        z = (w - 1) / (w + 1)
        dphi = 2 / (1 - z) ** 2
        table = plus if np.mean(z.imag) > 0 else minus
        integrand = np.real(dphi * _poly_value(table, z) * np.exp(-1j * t))
        total += 0.5 * (hi - lo) * np.dot(_WEIGHTS, integrand)
    return -total


def averaged_right(plus, minus, r):
    """Same around +1 with w = (1-z)/(1+z); that chart turns the other way."""
    total = 0.0
    for lo, hi in ((0.0, np.pi), (np.pi, 2 * np.pi)):
        t = 0.5 * (hi - lo) * _NODES + 0.5 * (hi + lo)
        w = r * np.exp(1j * t)
        z = (1 - w) / (1 + w)
        dphi = -2 / (1 + z) ** 2
        table = plus if np.mean(z.imag) > 0 else minus
        integrand = np.real(dphi * _poly_value(table, z) * np.exp(-1j * t))
        total += 0.5 * (hi - lo) * np.dot(_WEIGHTS, integrand)
    return total
