import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiclab.model import (
    PhasePolynomial,
    Polynomial1D,
    SymbolModel,
    catalog,
    check_hypotheses,
    eval_symbol,
    find_critical_points,
    get_model,
    window_critical_point,
)

# Closed-form anchors used throughout: V = -x^4 + x^6 has critical points at
# x = 0 (fourth-order maximum, V = 0) and x = +-sqrt(2/3) (minima at -4/27).
SQRT23 = math.sqrt(2.0 / 3.0)
WELL_DEPTH = -4.0 / 27.0


def test_polynomial_eval_and_derivative():
    p = Polynomial1D((1.0, -2.0, 0.0, 3.0))  # 1 - 2x + 3x^3
    assert p(0.0) == 1.0
    assert p(2.0) == 1.0 - 4.0 + 24.0
    d = p.derivative()
    assert d.coefficients == (-2.0, 0.0, 9.0)
    assert p.degree == 3


@settings(max_examples=30, deadline=None)
@given(
    coeffs=st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=7),
    x0=st.floats(-2, 2),
    u=st.floats(-1, 1),
)
def test_taylor_shift_reproduces_values(coeffs, x0, u):
    p = Polynomial1D(tuple(coeffs))
    tay = p.taylor_at(x0)
    direct = p(x0 + u)
    shifted = sum(c * u**k for k, c in enumerate(tay))
    scale = max(1.0, max(abs(c) for c in coeffs)) * max(1.0, abs(x0) + abs(u)) ** 7
    assert abs(direct - shifted) < 1e-9 * scale


def test_phase_polynomial_eval_and_split():
    p = PhasePolynomial(((3, 0, 1.0), (4, 0, 1.0), (0, 3, -1.0), (0, 4, 1.0)))
    assert p(1.0, 1.0) == pytest.approx(2.0)
    assert p(0.0, 0.0) == 0.0
    assert p.is_split()
    fx, g = p.split_parts()
    assert fx(2.0) == pytest.approx(8.0 + 16.0)
    assert g(2.0) == pytest.approx(-8.0 + 16.0)
    mixed = PhasePolynomial(((1, 1, 1.0),))
    assert not mixed.is_split()


def test_phase_polynomial_shift_exact():
    p = PhasePolynomial(((2, 1, 1.5), (0, 3, -2.0)))
    q = p.shifted(0.7, -0.4)
    for x, xi in [(0.0, 0.0), (0.3, 0.9), (-1.1, 0.2)]:
        assert q(x, xi) == pytest.approx(p(0.7 + x, -0.4 + xi), abs=1e-12)


def test_eval_symbol_schrodinger():
    m = get_model("deg-max")
    assert eval_symbol(m, 1.0, 0.0) == pytest.approx(0.0)
    assert eval_symbol(m, 0.0, 0.5) == pytest.approx(0.25)
    vals = eval_symbol(m, np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    assert vals == pytest.approx([0.0, 1.0])


def test_deg_max_critical_points():
    pts = find_critical_points(get_model("deg-max"))
    by_x = {round(p.z0[0], 9): p for p in pts}
    assert set(by_x) == {0.0, round(SQRT23, 9), round(-SQRT23, 9)}
    top = by_x[0.0]
    assert top.kind == "max"
    assert top.order == 4
    assert top.critical_energy == pytest.approx(0.0, abs=1e-12)
    for s in (1, -1):
        well = by_x[round(s * SQRT23, 9)]
        assert well.kind == "min"
        assert well.order == 2
        assert well.critical_energy == pytest.approx(WELL_DEPTH, abs=1e-12)


def test_gradient_annihilated_at_critical_points():
    for name in ("harmonic", "deg-max", "quad-max", "two-max", "pseudo-k3", "pseudo-k4"):
        m = get_model(name)
        for p in m.critical_points:
            if m.family == "phase1d":
                gx, gxi = m.phase_poly.gradient(*p.z0)
                assert math.hypot(gx, gxi) <= 1e-12
            else:
                assert abs(m.potential.derivative()(p.z0[0])) <= 1e-12


def test_two_max_shares_energy():
    m = get_model("two-max")
    tops = [p for p in m.critical_points if p.kind == "max"]
    assert len(tops) == 2
    for p in tops:
        assert p.critical_energy == pytest.approx(4.0 / 27.0, abs=1e-12)
        assert p.order == 2


def test_pseudo_k3_window_point():
    m = get_model("pseudo-k3")
    p = window_critical_point(m, 0.0)
    assert p is not None
    assert p.z0 == pytest.approx((0.0, 0.0), abs=1e-12)
    assert p.order == 3
    assert p.kind == "non-extremal-homogeneous"
    # leading form is x^3 - xi^3
    assert p.leading_form(2.0, 1.0) == pytest.approx(7.0)


def test_pseudo_k4_window_point():
    p = window_critical_point(get_model("pseudo-k4"), 0.0)
    assert p.order == 4
    assert p.kind == "non-extremal-homogeneous"
    assert p.leading_form(1.0, 1.0) == pytest.approx(0.0)


def test_hypotheses_pass_for_deg_max():
    m = get_model("deg-max")
    rep = check_hypotheses(m, e_center=0.0, epsilon0=1.0, box=(-2.0, 2.0))
    assert rep.passed, rep.failures


def test_hypotheses_pass_for_pseudo_models():
    for name in ("pseudo-k3", "pseudo-k4"):
        m = get_model(name)
        rep = check_hypotheses(m, e_center=0.0, epsilon0=1.0, box=(-3.0, 3.0, -3.0, 3.0))
        assert rep.passed, (name, rep.failures)


def test_confinement_fails_for_unbounded_well():
    # V = -(x^2-1)^2 tends to -infinity, so the boundary check must trip.
    V = Polynomial1D((-1.0, 0.0, 2.0, 0.0, -1.0))
    m = SymbolModel(name="inverted", family="schrodinger1d", n=1, potential=V)
    m = m.with_critical_points(find_critical_points(m, (-2.5, 2.5)))
    rep = check_hypotheses(m, e_center=0.0, epsilon0=1.0, box=(-2.5, 2.5))
    assert not rep.passed
    assert any(h == "confinement" for h, _ in rep.failures)


def test_two_maxima_break_isolation():
    m = get_model("two-max")
    rep = check_hypotheses(m, e_center=4.0 / 27.0, epsilon0=1.0, box=(-2.0, 2.0))
    assert not rep.passed
    assert any(h == "isolated-critical-point" for h, _ in rep.failures)


def test_principal_type_violation_detected():
    # xi^2 - well: leading form x^2*xi^0... use p3 = x^2*xi - xi^3/3?  Simpler:
    # form (x^2 - xi^2)^2 is a degree-4 form with degenerate circle zeros.
    bad = PhasePolynomial(((4, 0, 1.0), (2, 2, -2.0), (0, 4, 1.0), (6, 0, 1.0), (0, 6, 1.0)))
    m = SymbolModel(name="degenerate", family="phase1d", n=1, phase_poly=bad)
    m = m.with_critical_points(find_critical_points(m, (-2.0, 2.0, -2.0, 2.0)))
    rep = check_hypotheses(m, e_center=0.0, epsilon0=0.5, box=(-2.0, 2.0, -2.0, 2.0))
    assert not rep.passed
    assert any(h == "principal-type" for h, _ in rep.failures)


def test_radial_model_critical_point():
    m = get_model("radial-deg")
    assert m.n == 2
    assert len(m.critical_points) == 1
    p = m.critical_points[0]
    assert p.z0[0] == 0.0
    assert p.kind == "max"
    assert p.order == 4
    rep = check_hypotheses(m, e_center=0.0, epsilon0=1.0, box=(0.0, 2.0))
    assert rep.passed, rep.failures


def test_catalog_names_stable():
    names = set(catalog())
    assert {
        "harmonic", "deg-max", "quad-max", "quad-max-steep",
        "two-max", "radial-deg", "pseudo-k3", "pseudo-k4",
    } <= names


def test_models_are_immutable():
    m = get_model("harmonic")
    with pytest.raises(Exception):
        m.name = "other"
    with pytest.raises(Exception):
        m.potential.coefficients = (1.0,)
