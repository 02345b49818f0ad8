import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from melnikov_lab.closed import SpanFunction, m1_function
from melnikov_lab.designer import kappa_family, kappa_regions
from melnikov_lab.errors import DegenerateFamilyError, DomainError, EndpointRootError
from melnikov_lab.perturbation import MelnikovParams
from melnikov_lab.rootkit import (
    RationalPolynomial,
    family_discriminant,
    isolate_zeros,
    lagrange_interpolate,
    parametric_root_regions,
    resultant,
    wronskians,
)
from melnikov_lab.rootkit.polynomial import family_at
from melnikov_lab.rootkit.wronskian import w4_derivative_identity
from melnikov_lab.rootkit.zeros import polynomial_zero_count

P = RationalPolynomial
small_fracs = st.fractions(min_value=-3, max_value=3, max_denominator=50)


# -- exact polynomials -------------------------------------------------------

def test_sturm_examples():
    p = P.from_roots([Fraction(1, 6), Fraction(1, 4), -2])
    assert p.sturm_count(0, 1) == 2
    assert P((1, 0, 1)).sturm_count(-10, 10) == 0
    assert P.from_roots([Fraction(1, 2)] * 2).sturm_count(0, 1) == 1
    assert P((2, -3, 1)).sturm_count(-math.inf, math.inf) == 2


def test_sturm_endpoint_root():
    with pytest.raises(EndpointRootError):
        P((-1, 1)).sturm_count(1, 2)


def test_descartes_examples():
    assert P((-1, -1, -1, 1)).descartes_bound() == 1
    assert P((1, 2, 3)).descartes_bound() == 0
    assert P((2, -3, 1)).descartes_bound() == 2


def test_discriminant_examples():
    assert P((1, 1, 1)).discriminant() == -3
    assert P.from_roots([1, 2, 3]).discriminant() == 4
    assert P.from_roots([1, 1]).discriminant() == 0
    with pytest.raises(ValueError):
        P((1, 1)).discriminant()


@given(st.lists(small_fracs, min_size=2, max_size=5), st.fractions(1, 5, max_denominator=7))
def test_discriminant_is_product_of_squared_gaps(roots, lead):
    p = P.from_roots(roots, leading=lead)
    n = len(roots)
    prod = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            prod *= (roots[i] - roots[j]) ** 2
    assert p.discriminant() == lead ** (2 * n - 2) * prod


@given(st.lists(small_fracs, min_size=2, max_size=5))
def test_discriminant_vanishes_iff_repeated_root(roots):
    p = P.from_roots(roots)
    repeated = p.gcd(p.derivative()).degree >= 1
    assert (p.discriminant() == 0) == repeated == (len(set(roots)) < len(roots))


@given(st.lists(small_fracs, min_size=1, max_size=4), st.lists(small_fracs, min_size=1, max_size=4))
def test_resultant_is_product_over_roots(rs, ss):
    value = Fraction(1)
    for r in rs:
        for s in ss:
            value *= r - s
    assert resultant(P.from_roots(rs), P.from_roots(ss)) == value


@given(st.lists(small_fracs.filter(lambda r: r not in (0, 1)), min_size=1, max_size=4, unique=True),
       st.booleans())
def test_sturm_against_dense_sampling(roots, with_complex_pair):
    p = P.from_roots(roots)
    if with_complex_pair:
        p = p * P((1, 0, 1))
    # Distinct roots with denominators <= 50 are >= 1/2450 apart, far above the grid step.
    x = np.linspace(0, 1, 200_001)[1:-1]
    vals = np.polynomial.polynomial.polyval(x, p.to_float())
    signs = np.sign(vals[vals != 0])
    changes = int(np.count_nonzero(np.diff(signs)))
    assert p.sturm_count(0, 1) == changes == sum(0 < r < 1 for r in roots)


@given(st.lists(small_fracs, min_size=1, max_size=5))
def test_isolation_intervals_hold_the_roots(roots):
    p = P.from_roots(roots)
    ivs = p.isolate_real_roots(width=Fraction(1, 10**6))
    assert len(ivs) == len(set(roots))
    for r in set(roots):
        assert sum(a <= r <= b for a, b in ivs) == 1


def test_arithmetic():
    p, q = P((1, 2)), P((-1, 0, 3))
    quot, rem = (p * q + P((5,))).divmod(q)
    assert quot == p and rem == P((5,))
    assert (p - p).is_zero()
    assert P((0, 0, 0)).degree < 0 or P((0, 0, 0)).is_zero()
    assert P.from_roots([2, 3]).gcd(P.from_roots([3, 4])).monic() == P((-3, 1))


def test_lagrange_recovers_polynomial():
    p = P((Fraction(1, 3), -2, 0, 5))
    nodes = [Fraction(k) for k in range(4)]
    assert lagrange_interpolate(nodes, [p(x) for x in nodes]) == p


def test_float_coefficients_are_exact():
    assert P.from_numpy([0.1]).coefficients[0] == Fraction(0.1)
    assert polynomial_zero_count([-0.5, 1.0]) == 1


# -- one-parameter families --------------------------------------------------

R_TRIPLE = (Fraction(1, 6), Fraction(1, 4), Fraction(1, 3))


def test_kappa_regions_example():
    regions = kappa_regions(R_TRIPLE)
    assert len(regions) == 3
    assert all(g.count == 1 and g.certified for g in regions)
    big = 1 + sum(a * b for a, b in ((R_TRIPLE[0], R_TRIPLE[1]), (R_TRIPLE[0], R_TRIPLE[2]),
                                     (R_TRIPLE[1], R_TRIPLE[2]))) + 1
    assert regions[0].lo == 1 and regions[0].hi < float(big) < regions[1].hi
    assert regions[2].hi == math.inf


def test_kappa_discriminant_signs():
    r1, r2, r3 = R_TRIPLE
    disc = family_discriminant(kappa_family(R_TRIPLE))
    R = r1 * r2 + r1 * r3 + r2 * r3 + 2
    assert disc(1) > 0 and disc(R) < 0
    assert disc.leading == 4 and disc.degree == 4


def _cubic_factor(r1, r2, r3):
    return (-27 * (r2 + r3) * (1 + r2 * r3) ** 2
            + 27 * r1 * (-1 + r2**3 * r3 - 2 * r3**2 + r2 * r3 * (-6 + r3**2) + r2**2 * (-2 + r3**2))
            + r1**3 * (27 * r2 * r3 - 27 * r3**2 + r2**3 * r3**3 + 9 * r2**2 * (-3 + 2 * r3**2))
            + 9 * r1**2 * (3 * r2 * (-2 + r3**2) - 3 * r3 * (2 + r3**2) + r2**3 * (-3 + 2 * r3**2)
                           + r2**2 * r3 * (3 + 2 * r3**2)))


@given(st.tuples(*[st.fractions(Fraction(1, 100), Fraction(99, 100), max_denominator=100)] * 3))
def test_kappa_discriminant_identity(rs):
    # The discriminant in kappa of the discriminant in r factors completely.
    r1, r2, r3 = rs
    disc = family_discriminant(kappa_family(rs))
    expected = (-256 * (r1**2 - 1) * (r2**2 - 1) * (r3**2 - 1) * (r1 + r2 + r3)
                * _cubic_factor(r1, r2, r3) ** 3)
    assert disc.discriminant() == expected
    assert _cubic_factor(r1, r2, r3) < 0


def test_constant_family_is_one_region():
    coeffs = P.from_roots([Fraction(1, 3), Fraction(1, 2), 5]).coefficients
    regions = parametric_root_regions([P((c,)) for c in coeffs], (-1, 1), (0, 1))
    assert len(regions) == 1 and regions[0].count == 2


def test_degenerate_family():
    fam = [P((0, 1)), P((0, -2)), P((0, 1))]  # k (x - 1)^2
    with pytest.raises(DegenerateFamilyError):
        parametric_root_regions(fam, (-1, 1), (0, 2))


def test_family_evaluation():
    fam = kappa_family(R_TRIPLE)
    assert family_at(fam, 1).degree == 2


# -- transcendental zeros ----------------------------------------------------

def test_degree_zero_zero():
    f = m1_function(MelnikovParams(a=1, b=-0.5, c=-1), 0)
    rep = isolate_zeros(f)
    assert rep.count == 1 and rep.count_certified
    assert rep.locations[0] == pytest.approx(0.7807764064044151, abs=1e-12)


def test_linear_zero():
    f = SpanFunction("F", (-0.5, 1, 0, 0, 0, 0, 0))
    rep = isolate_zeros(f)
    assert rep.locations == pytest.approx([0.5], abs=1e-12)


def test_designed_four_zeros():
    from melnikov_lab.designer import ZeroTarget, design
    params = design([ZeroTarget(j / 5, "f") for j in range(1, 5)], 1)
    rep = isolate_zeros(m1_function(params, 1))
    assert rep.count == 4 and rep.count_certified and rep.count == rep.ceiling
    assert rep.locations == pytest.approx([0.2, 0.4, 0.6, 0.8], abs=1e-10)


def test_double_zero_is_flagged():
    # (r - 1/2)^2 r as a combination of r, r^2, r^3.
    f = SpanFunction("F", (0.25, -1, 1, 0, 0, 0, 0))
    rep = isolate_zeros(f)
    assert not rep.count_certified
    assert any(not z.simple for z in rep.zeros)


def test_close_pair_is_separated():
    f = SpanFunction("F", (0.5 * 0.5001, -(0.5 + 0.5001), 1, 0, 0, 0, 0))
    rep = isolate_zeros(f)
    assert rep.count == 2 and rep.count_certified


def test_identically_zero():
    rep = isolate_zeros(SpanFunction("F", (0,) * 7))
    assert rep.count == 0 and rep.count_certified


@pytest.mark.parametrize("interval", [(0, 0.5), (0.5, 1.0), (0.6, 0.4)])
def test_interval_checks(interval):
    with pytest.raises(DomainError):
        isolate_zeros(SpanFunction("F", (1,) + (0,) * 6), interval)


@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_found_zeros_are_zeros(seed, m):
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=7)
    if m < 3:
        coeffs[[5, 6]] = 0
    f = SpanFunction("F", tuple(coeffs))
    rep = isolate_zeros(f)
    for z in rep.zeros:
        if z.simple:
            lo, hi = z.location - 2 * z.half_width, min(z.location + 2 * z.half_width, 1 - 1e-16)
            assert f(lo) * f(hi) <= 0
    assert rep.count <= rep.rolle_bound


# -- Wronskians --------------------------------------------------------------

def test_wronskian_values():
    w = wronskians("F", 0.5)
    assert w.values[:4] == pytest.approx((0.5, 0.25, 0.25, 0.75), rel=1e-14)
    assert w.max_relative_gap < 1e-20


def test_wronskians_positive_on_grid():
    for r in np.linspace(0.001, 0.999, 999)[::37]:
        assert wronskians("F", r).all_positive()


def test_holomorphic_wronskians():
    w = wronskians("G", 0.3, m=4)
    assert w.values[:5] == (1, 1, 2, 12, 288)


@pytest.mark.parametrize("r", [0.05, 0.3, 0.7, 0.95])
def test_w4_identity(r):
    assert w4_derivative_identity(r) < 1e-8


def test_wronskian_domain():
    with pytest.raises(DomainError):
        wronskians("F", 1.0)
