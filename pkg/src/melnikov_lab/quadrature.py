"""First-order averaged function by numerical integration.

For a center ``p`` of ``z' = f(z)`` with linearizing conformal map
``w = phi(z)`` (``phi' f = -i phi``) and a piecewise polynomial perturbation
``R^+`` (``Im z > 0``) / ``R^-`` (``Im z < 0``)::

    M1^{+-}(r) = -Im  int_0^{+-pi} conj(phi'(z) R^{+-}(z, zbar)) i e^{i t} dt,
    z = phi^{-1}(r e^{i t}),   M1 = M1^+ - M1^-.

Equivalently ``M1 = -oint Re(L e^{-i t}) dt`` with
``L = phi'(z) R(z, zbar)``.  Systems whose linearization turns the other way
(``phi' f = +i phi``, ``orientation = +1``) are handled by flipping that sign,
which keeps the returned value equal to the averaged function of the
time-reversed problem.  With this convention the radial displacement after
one turn is ``orientation * eps * M1 + O(eps^2)``.

The side (``R^+`` or ``R^-``) used on each half circle is decided by where
``phi^{-1}`` sends it, so maps exchanging the half planes are supported.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec

from .errors import DomainError, QuadratureError
from .perturbation import PerturbationSpec

R_MAX_MODEL = 1.0 - 1e-6


@dataclass(frozen=True)
class LinearizedSystem:
    name: str
    phi: Callable
    phi_prime: Callable
    phi_inverse: Callable
    center: complex
    orientation: int = -1
    domain_note: str = ""
    r_max: float = R_MAX_MODEL
    inverse_poles: tuple = ()
    vector_field: Callable | None = None


@dataclass(frozen=True)
class QuadratureConfig:
    rule: str = "adaptive-gauss-kronrod"
    abs_tol: float = 1e-11
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.rule not in ("adaptive-gauss-kronrod", "composite-simpson"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class QuadratureResult:
    """One-sided integrals, their difference and the error estimate."""

    plus: np.ndarray | float
    minus: np.ndarray | float
    total: np.ndarray | float
    error: float = 0.0

    def __iter__(self):
        return iter((self.plus, self.minus, self.total))


def _left_phi(z):
    return (1 + z) / (1 - z)


def _left_phi_prime(z):
    return 2 / (z - 1) ** 2


def _left_phi_inverse(w):
    return (w - 1) / (w + 1)


def _right_phi(z):
    return (1 - z) / (1 + z)


def _right_phi_prime(z):
    return -2 / (1 + z) ** 2


def _right_phi_inverse(w):
    return (1 - w) / (1 + w)


def model_field(z):
    return 0.5j * (z * z - 1)


_REGISTRY: dict[str, LinearizedSystem] = {}


def _builtin():
    return {
        "iz": LinearizedSystem(
            "iz", lambda z: z, lambda z: np.ones_like(z), lambda w: w, 0j, orientation=+1,
            domain_note="whole plane; f(z) = i z, phi = identity", r_max=np.inf,
            vector_field=lambda z: 1j * z),
        "half-i-z2-minus-1-left": LinearizedSystem(
            "half-i-z2-minus-1-left", _left_phi, _left_phi_prime, _left_phi_inverse, -1 + 0j,
            orientation=-1, domain_note="Re z < 0 (period annulus of -1); |w| < 1",
            inverse_poles=(-1 + 0j,), vector_field=model_field),
        "half-i-z2-minus-1-right": LinearizedSystem(
            "half-i-z2-minus-1-right", _right_phi, _right_phi_prime, _right_phi_inverse, 1 + 0j,
            orientation=+1, domain_note="Re z > 0 (period annulus of +1); |w| < 1",
            inverse_poles=(-1 + 0j,), vector_field=model_field),
    }


def validate_system(system: LinearizedSystem, radii=(0.1, 0.3, 0.5, 0.7, 0.9), tol=1e-12):
    """Check ``phi(phi^{-1}(w)) = w`` on circles and that real points stay real."""
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    for r in radii:
        if r >= system.r_max:
            continue
        w = r * np.exp(1j * t)
        back = system.phi(system.phi_inverse(w))
        if np.max(np.abs(back - w)) > tol * max(1.0, r):
            raise DomainError(f"{system.name}: phi(phi^-1(w)) != w on |w| = {r}")
        x = np.real(system.phi_inverse(np.array([r, -r], dtype=complex)))
        if np.max(np.abs(np.imag(system.phi(x + 0j)))) > tol:
            raise DomainError(f"{system.name}: phi does not map the real axis into itself")
    if system.vector_field is not None:
        w = 0.5 * np.exp(1j * t)
        z = system.phi_inverse(w)
        lhs = system.phi_prime(z) * system.vector_field(z)
        rhs = system.orientation * 1j * system.phi(z)
        if np.max(np.abs(lhs - rhs)) > 1e-10:
            raise DomainError(f"{system.name}: phi' f != {system.orientation:+d} i phi")


def register_system(system: LinearizedSystem, validate=True):
    if validate:
        validate_system(system)
    _REGISTRY[system.name] = system
    return system


def builtin_system(model: str) -> LinearizedSystem:
    if not _REGISTRY:
        for s in _builtin().values():
            _REGISTRY[s.name] = s
    try:
        return _REGISTRY[model]
    except KeyError:
        raise DomainError(f"unknown model {model!r}; known: {sorted(_REGISTRY)}") from None


def perturbation_value(spec: PerturbationSpec, side, z):
    """``R^{side}(z, zbar) = sum conj(a_{k,l}) z^{l-k} zbar^k``."""
    table = spec.plus if side == "+" else spec.minus
    z = np.asarray(z, dtype=complex)
    zb = np.conj(z)
    out = np.zeros_like(z)
    for l, row in enumerate(table):
        for k, a in enumerate(row):
            if a != 0:
                out = out + np.conj(a) * z ** (l - k) * zb**k
    return out


def composite_simpson(func, a, b, n):
    """Composite Simpson rule with ``n`` (even) panels; ``func`` maps arrays of nodes."""
    if n % 2:
        n += 1
    x = np.linspace(a, b, n + 1)
    y = np.asarray(func(x))
    w = np.ones(n + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return (b - a) / (3 * n) * np.tensordot(y, w, axes=([-1], [0]))


def _arc_sides(system, r):
    """Perturbation side used on the upper (t in (0, pi)) and lower half circles."""
    sides = []
    for sgn in (1, -1):
        t = sgn * np.array([0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
        im = np.imag(system.phi_inverse(r * np.exp(1j * t)))
        if np.all(im > 0):
            sides.append("+")
        elif np.all(im < 0):
            sides.append("-")
        else:
            raise DomainError(f"{system.name}: half circle |w|={r} is not mapped into one half plane")
    return sides


def melnikov_quadrature(system: LinearizedSystem, spec: PerturbationSpec, r,
                        cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """Evaluate ``(M1^+, M1^-, M1)`` at one radius or an array of radii."""
    cfg = cfg or QuadratureConfig()
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0) or np.any(r > system.r_max) or not np.all(np.isfinite(r)):
        raise DomainError(f"r must lie in (0, {system.r_max}] for {system.name}")
    for pole in system.inverse_poles:
        if np.any(np.abs(np.abs(pole) - r) < 1e-12):
            raise DomainError(f"phi^-1 has a pole on the circle |w| = {abs(pole)}")
    sides = [_arc_sides(system, ri) for ri in r]
    upper_side = np.array([s[0] for s in sides])
    o = system.orientation

    def integrand(t):
        # Columns: upper arc at t, lower arc at -t, for every radius.
        t = np.asarray(t, dtype=float)
        out = []
        for sgn, col in ((1, 0), (-1, 1)):
            e = np.exp(1j * sgn * np.multiply.outer(t, np.ones_like(r)))
            w = r * e
            z = system.phi_inverse(w)
            vals = np.empty(w.shape)
            for side in ("+", "-"):
                mask = (upper_side == side) if col == 0 else (upper_side != side)
                if np.any(mask):
                    L = system.phi_prime(z[..., mask]) * perturbation_value(spec, side, z[..., mask])
                    vals[..., mask] = np.real(L / e[..., mask])
            out.append(o * vals)
        res = np.concatenate(out, axis=-1)
        if not np.all(np.isfinite(res)):
            raise DomainError("integrand is not finite on the integration circle")
        return res

    if cfg.rule == "adaptive-gauss-kronrod":
        val, err, info = quad_vec(integrand, 0.0, np.pi, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                                  norm="max", limit=cfg.max_subdivisions, quadrature="gk15",
                                  full_output=True)
        if not info.success:
            raise QuadratureError(f"adaptive quadrature failed: {info.message}", estimate=err)
    else:
        n = 16
        prev = composite_simpson(lambda x: integrand(x).T, 0.0, np.pi, n)
        while True:
            n *= 2
            val = composite_simpson(lambda x: integrand(x).T, 0.0, np.pi, n)
            err = float(np.max(np.abs(val - prev))) / 15
            if err <= max(cfg.abs_tol, cfg.rel_tol * float(np.max(np.abs(val)))):
                break
            if n > cfg.max_subdivisions:
                raise QuadratureError(f"composite Simpson did not converge with {n} panels",
                                      estimate=err)
            prev = val
    k = len(r)
    upper, lower = val[:k], val[k:]
    plus = np.where(upper_side == "+", upper, lower)
    minus = -np.where(upper_side == "+", lower, upper)
    total = plus - minus
    if scalar:
        return QuadratureResult(float(plus[0]), float(minus[0]), float(total[0]), float(err))
    return QuadratureResult(plus, minus, total, float(err))
