"""Direct simulation of ``z' = i(z^2-1)/2 + eps R^{+-}(z, zbar)``.

Each open half plane is integrated with its own smooth field, so the
integrator never steps across the discontinuity.  Crossings of
``Sigma = {Im z = 0}`` are located on the dense output and checked for
transversality (Filippov crossing condition): both one-sided normal
components must have the same sign.  Otherwise a :class:`SlidingError` is
raised.

Sections.  The left nest (center -1) uses the segment (-1, 0) and the right
nest (center +1) uses (0, 1).  Starting on either segment the orbit first
enters the lower half plane, crosses Sigma once far out (``|x| > 1``) and
returns through the upper half plane.  The Poincare map is that two-crossing
return.

Orientation.  In the linearizing coordinate ``w`` the radius changes per turn
by ``-eps M1(r)`` around -1 and by ``+eps N1(r)`` around +1, to first order.
So a cycle at a simple zero ``r0`` is attracting iff ``M1'(r0) > 0`` (left)
or ``N1'(r0) < 0`` (right).  ``tests/test_pwsim.py`` checks both signs.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .closed import m1_function, n1_function
from .errors import DomainError, IntegrationError, SlidingError
from .perturbation import PerturbationSpec, melnikov_params
from .rootkit.zeros import isolate_zeros

EPS_GUARD = 0.1
ESCAPE_RADIUS = 1e7


@dataclass(frozen=True)
class SimConfig:
    epsilon: float = 1e-3
    rk_tol: float = 1e-10
    event_tol: float = 1e-12
    max_steps: int = 200_000
    nest: str = "left"
    allow_large_epsilon: bool = False

    def __post_init__(self):
        if self.epsilon < 0:
            raise DomainError("epsilon must be nonnegative")
        if self.epsilon > EPS_GUARD:
            if not self.allow_large_epsilon:
                raise DomainError(f"epsilon > {EPS_GUARD} leaves the averaging regime; "
                                  "set allow_large_epsilon to override")
            warnings.warn("epsilon outside the averaging regime", RuntimeWarning, stacklevel=2)
        if not (self.rk_tol > 0 and self.event_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_steps < 1:
            raise DomainError("max_steps must be >= 1")
        if self.nest not in ("left", "right"):
            raise DomainError("nest must be 'left' or 'right'")


def _linearizer(nest):
    if nest == "left":
        return (lambda z: (1 + z) / (1 - z)), (lambda w: (w - 1) / (w + 1))
    return (lambda z: (1 - z) / (1 + z)), (lambda w: (1 - w) / (1 + w))


def predicted_cycle_location(r0, nest="left"):
    """Point of the section whose linearized radius is ``r0``."""
    if not (0 < r0 < 1):
        raise DomainError("r0 must lie in (0, 1)")
    if nest not in ("left", "right"):
        raise DomainError("nest must be 'left' or 'right'")
    return (r0 - 1) / (r0 + 1) if nest == "left" else (1 - r0) / (1 + r0)


def section_radius(x, nest="left"):
    return abs(_linearizer(nest)[0](x))


def _compile(spec: PerturbationSpec):
    terms = {}
    for side, table in (("+", spec.plus), ("-", spec.minus)):
        terms[side] = [(np.conj(a), l - k, k) for l, row in enumerate(table)
                       for k, a in enumerate(row) if a != 0]
    return terms


def _field(terms, eps, side):
    tt = terms[side]

    def f(z):
        out = 0.5j * (z * z - 1)
        if eps and tt:
            zb = z.conjugate()
            out += eps * sum(c * z**p * zb**q for c, p, q in tt)
        return out

    return f


@dataclass(frozen=True)
class Crossing:
    t: float
    x: float
    from_side: str
    normal_plus: float
    normal_minus: float


@dataclass
class Trajectory:
    t: np.ndarray
    z: np.ndarray
    crossings: list = field(default_factory=list)
    stationary: bool = False


class _Sim:
    def __init__(self, spec, cfg: SimConfig):
        self.cfg = cfg
        terms = _compile(spec)
        self.fields = {s: _field(terms, cfg.epsilon, s) for s in ("+", "-")}

    def normals(self, x):
        z = complex(x, 0.0)
        return self.fields["+"](z).imag, self.fields["-"](z).imag

    def side_from_sigma(self, x):
        up, down = self.normals(x)
        if up > 0 and down > 0:
            return "+"
        if up < 0 and down < 0:
            return "-"
        if up == 0 and down == 0:
            return None
        raise SlidingError(f"Sigma is not crossed transversally at x={x:.12g} "
                           f"(normal components {up:.3g}, {down:.3g})", location=x)

    def flow_to_sigma(self, z0, side, t_max, dense=False):
        f = self.fields[side]

        def rhs(_, y):
            v = f(complex(y[0], y[1]))
            return (v.real, v.imag)

        def hit(_, y):
            return y[1]

        hit.terminal = True
        hit.direction = -1 if side == "+" else 1

        def escape(_, y):
            return ESCAPE_RADIUS - math.hypot(y[0], y[1])

        escape.terminal = True
        tol = self.cfg.rk_tol
        sol = solve_ivp(rhs, (0.0, t_max), (z0.real, z0.imag), method="RK45", rtol=tol,
                        atol=tol, events=(hit, escape), dense_output=dense)
        if sol.status < 0:
            raise IntegrationError(f"integration failed: {sol.message}")
        if len(sol.t) > self.cfg.max_steps:
            raise IntegrationError(f"step budget {self.cfg.max_steps} exhausted")
        if sol.t_events[1].size:
            raise IntegrationError("orbit escaped the period annulus")
        if not sol.t_events[0].size:
            return None, sol
        te = float(sol.t_events[0][0])
        ye = sol.y_events[0][0]
        return (te, float(ye[0])), sol


def integrate_piecewise(spec: PerturbationSpec, cfg: SimConfig, z0: complex, t_max: float) -> Trajectory:
    """Trajectory from ``z0`` up to time ``t_max``, with every Sigma crossing recorded."""
    if t_max <= 0:
        raise DomainError("t_max must be positive")
    sim = _Sim(spec, cfg)
    z0 = complex(z0)
    if z0.imag > 0:
        side = "+"
    elif z0.imag < 0:
        side = "-"
    else:
        side = sim.side_from_sigma(z0.real)
    if side is None or abs(sim.fields["+" if z0.imag >= 0 else "-"](z0)) == 0:
        return Trajectory(np.array([0.0, t_max]), np.array([z0, z0]), [], True)
    ts, zs, crossings = [np.array([0.0])], [np.array([z0])], []
    t = 0.0
    z = z0
    while t < t_max:
        event, sol = sim.flow_to_sigma(z, side, t_max - t)
        ts.append(t + sol.t[1:])
        zs.append(sol.y[0, 1:] + 1j * sol.y[1, 1:])
        if event is None:
            break
        te, x = event
        up, down = sim.normals(x)
        crossings.append(Crossing(t + te, x, side, up, down))
        new_side = sim.side_from_sigma(x)
        if new_side == side or new_side is None:
            raise SlidingError(f"orbit cannot leave Sigma at x={x:.12g}", location=x)
        ts.append(np.array([t + te]))
        zs.append(np.array([complex(x, 0.0)]))
        t += te
        z = complex(x, 0.0)
        side = new_side
    return Trajectory(np.concatenate(ts), np.concatenate(zs), crossings)


def _section(nest):
    return (-1.0, 0.0) if nest == "left" else (0.0, 1.0)


def _return_map(sim: _Sim, x0, nest, t_half=40.0):
    lo, hi = _section(nest)
    if not (lo < x0 < hi):
        raise DomainError(f"x0={x0} is not on the {nest} section {(lo, hi)}")
    side = sim.side_from_sigma(x0)
    if side != "-":
        raise IntegrationError(f"orbit from x0={x0} does not enter the lower half plane")
    event, _ = sim.flow_to_sigma(complex(x0, 0.0), "-", t_half)
    if event is None:
        raise IntegrationError("no crossing of Sigma within the time budget")
    x1 = event[1]
    if sim.side_from_sigma(x1) != "+":
        raise SlidingError(f"orbit cannot cross Sigma at x={x1:.12g}", location=x1)
    event, _ = sim.flow_to_sigma(complex(x1, 0.0), "+", t_half)
    if event is None:
        raise IntegrationError("no return to Sigma within the time budget")
    x2 = event[1]
    if not (lo < x2 < hi):
        raise IntegrationError(f"orbit left the period annulus (returned to x={x2:.6g})")
    sim.side_from_sigma(x2)
    return x2


def poincare_map(spec: PerturbationSpec, cfg: SimConfig, x0: float) -> float:
    """First return to the nest's section after one lower and one upper passage."""
    return _return_map(_Sim(spec, cfg), float(x0), cfg.nest)


@dataclass(frozen=True)
class CycleReport:
    section_point: float
    predicted_r0: float | None
    radius_in_w: float
    deviation: float | None
    stable: bool
    multiplier: float
    crossings: int = 2


class CycleList(list):
    """Reports sorted by radius; ``degenerate_identity`` marks a return map equal to the identity."""

    degenerate_identity: bool = False


def melnikov_zeros(spec: PerturbationSpec, nest="left"):
    """Certified simple zeros of the averaged function governing ``nest``."""
    params = melnikov_params(spec)
    fn = m1_function if nest == "left" else n1_function
    rep = isolate_zeros(fn(params, spec.m, spec.holomorphic))
    return [z.location for z in rep.zeros if z.simple] if rep.count_certified else []


def find_limit_cycles(spec: PerturbationSpec, cfg: SimConfig, search=(0.02, 0.98), n_seeds=64,
                      predicted=None) -> CycleList:
    """Fixed points of the return map with linearized radius in ``search``."""
    r_lo, r_hi = search
    if not (0 < r_lo < r_hi < 1):
        raise DomainError("search window must satisfy 0 < r_lo < r_hi < 1")
    sim = _Sim(spec, cfg)
    phi, phi_inv = _linearizer(cfg.nest)

    def displacement(r):
        x = phi_inv(r)
        return abs(phi(_return_map(sim, x, cfg.nest))) - r

    radii = np.geomspace(r_lo, r_hi, n_seeds)
    d = np.array([displacement(r) for r in radii])
    out = CycleList()
    noise = 100 * cfg.rk_tol
    if np.all(np.abs(d) < noise):
        out.degenerate_identity = True
        return out
    if predicted is None and spec.m <= 3:
        predicted = melnikov_zeros(spec, cfg.nest)
    for k in range(len(radii) - 1):
        if d[k] == 0 or np.sign(d[k]) != np.sign(d[k + 1]):
            if abs(d[k]) < noise and abs(d[k + 1]) < noise:
                continue
            r_star = brentq(displacement, radii[k], radii[k + 1], xtol=cfg.event_tol, maxiter=200)
            out.append(_report(sim, cfg, phi, phi_inv, r_star, predicted))
    out.sort(key=lambda c: c.radius_in_w)
    return out


def _report(sim, cfg, phi, phi_inv, r_star, predicted):
    x = phi_inv(r_star)
    lo, hi = _section(cfg.nest)
    h = 1e-5 * min(1.0, x - lo, hi - x)
    deriv = (_return_map(sim, x + h, cfg.nest) - _return_map(sim, x - h, cfg.nest)) / (2 * h)
    r0 = None
    dev = None
    if predicted:
        r0 = min(predicted, key=lambda p: abs(p - r_star))
        dev = abs(r_star - r0)
    return CycleReport(float(x), r0, float(r_star), dev, bool(abs(deriv) < 1), float(deriv))
