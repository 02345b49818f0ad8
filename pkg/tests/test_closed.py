import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from melnikov_lab import closed
from melnikov_lab.errors import DomainError, UnsupportedDegreeError
from melnikov_lab.perturbation import MelnikovParams, PerturbationSpec, melnikov_params, reflect
from oracles import averaged_left, averaged_right
from strategies import radii, specs


@given(specs(), radii)
def test_m1_against_direct_integration(spec, r):
    p = melnikov_params(spec)
    assert closed.eval_M1(p, r) == pytest.approx(averaged_left(spec.plus, spec.minus, r), abs=1e-10)


@given(specs(), radii)
def test_n1_against_direct_integration(spec, r):
    p = melnikov_params(spec)
    assert closed.eval_N1(p, r) == pytest.approx(averaged_right(spec.plus, spec.minus, r), abs=1e-10)


@given(specs(), radii)
def test_reflection_identity(spec, r):
    n1 = closed.eval_N1(melnikov_params(spec), r)
    assert n1 == pytest.approx(closed.eval_M1(melnikov_params(reflect(spec)), r), abs=1e-12)


@given(specs(), radii)
def test_integral_sum_matches(spec, r):
    p = melnikov_params(spec)
    assert closed.eval_M1_from_integrals(spec, r) == pytest.approx(closed.eval_M1(p, r), abs=1e-12)


def test_known_values():
    p = melnikov_params(PerturbationSpec.from_entries(0, {(0, 0): 1j}))
    assert closed.eval_M1(p, 0.5) == pytest.approx(0.75, abs=1e-14)
    assert closed.eval_I_kl(1j, 0, 1, "+", 0.5) == pytest.approx(-1.25, abs=1e-14)


@given(specs(holomorphic=True), radii)
def test_holomorphic_forms(spec, r):
    p = melnikov_params(spec)
    view = p.holomorphic_view()
    assert closed.eval_holomorphic(view, spec.m, "M1", r) == pytest.approx(closed.eval_M1(p, r), abs=1e-12)
    assert closed.eval_holomorphic(view, spec.m, "N1", r) == pytest.approx(closed.eval_N1(p, r), abs=1e-12)
    f = closed.m1_function(p, spec.m, True)
    assert f(r) == pytest.approx(closed.eval_M1(p, r), abs=1e-11)


def test_holomorphic_quadratic_root():
    a, b, c = 1.0, -2.6, 1.0
    root = (-b - np.sqrt(b * b - 4 * a * c)) / (2 * a)
    assert closed.eval_holomorphic((a, b, c, 0, 0), 2, "M1", root) == pytest.approx(0, abs=1e-14)
    # Inversion r -> 1/r exchanges the two averaged functions for m <= 2.
    r = 0.3
    assert closed.eval_holomorphic((a, b, c, 0, 0), 2, "N1", r) == pytest.approx(r * r * (a + b / r + c / r**2))


def test_holomorphic_parameter_checks():
    with pytest.raises(DomainError):
        closed.eval_holomorphic((1, 0, 1, 0.5, 0), 2, "M1", 0.5)
    with pytest.raises(DomainError):
        closed.eval_holomorphic((1, 0, 1, 0, 0), 0, "M1", 0.5)
    with pytest.raises(UnsupportedDegreeError):
        closed.eval_holomorphic((1, 0, -1, 0, 0), 4, "M1", 0.5)
    with pytest.raises(ValueError):
        closed.eval_holomorphic((1, 0, -1, 0, 0), 1, "L1", 0.5)


@pytest.mark.parametrize("r", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_domain(r):
    with pytest.raises(DomainError):
        closed.eval_M1(MelnikovParams(a=1), r)


def test_unsupported_integral():
    with pytest.raises(UnsupportedDegreeError):
        closed.eval_I_kl(1, 0, 4, "+", 0.5)


@given(st.floats(1e-4, 0.05))
def test_atanh_series_is_continuous(r):
    assert closed.atanh_over_r(r) == pytest.approx(np.arctanh(r) / r, rel=1e-13)


@given(specs(), st.floats(0.05, 0.95))
def test_derivative_matches_finite_difference(spec, r):
    f = closed.m1_function(melnikov_params(spec), spec.m, spec.holomorphic)
    h = 1e-6
    fd = (f(r + h) - f(r - h)) / (2 * h)
    assert f.derivative(r) == pytest.approx(fd, rel=1e-6, abs=1e-6 * f.scale())


@given(specs(), st.floats(0.05, 0.95))
def test_numerator_is_r_times_value(spec, r):
    f = closed.m1_function(melnikov_params(spec), spec.m)
    assert f.numerator(r) == pytest.approx(r * f(r), abs=1e-12 * f.scale())


def test_ceilings():
    assert [closed.ect_ceiling(m) for m in range(4)] == [1, 4, 5, 6]
    assert [closed.ect_ceiling(m, True) for m in (1, 2, 3)] == [2, 2, 3]
    assert closed.ect_ceiling(5) is None


def test_span_function_length_check():
    with pytest.raises(ValueError):
        closed.SpanFunction("F", (1.0, 2.0))
