import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiclab.observables import (
    ObservableParseError,
    parse_observable,
)


def test_parse_constant_routes_position_only():
    obs = parse_observable("1")
    assert obs.routing == "position_only"
    assert obs(0.3, -2.0) == pytest.approx(1.0)


def test_parse_gaussian_is_general():
    obs = parse_observable("exp(-x^2 - xi^2)")
    assert obs.routing == "general"
    assert obs(0.0, 0.0) == pytest.approx(1.0)
    assert obs(1.0, 1.0) == pytest.approx(math.exp(-2.0))


def test_routing_classes():
    assert parse_observable("x^2").routing == "position_only"
    assert parse_observable("xi^2").routing == "momentum_only"
    assert parse_observable("x^2 + xi^2").routing == "split"
    assert parse_observable("exp(-x^2) + xi^2").routing == "split"
    assert parse_observable("x * xi").routing == "general"


def test_error_position_dangling_power():
    with pytest.raises(ObservableParseError) as err:
        parse_observable("x^")
    assert err.value.offset == 2
    assert "integer" in err.value.expected


def test_error_position_bad_token():
    with pytest.raises(ObservableParseError) as err:
        parse_observable("x + * 2")
    assert err.value.offset == 4


def test_error_unknown_name():
    with pytest.raises(ObservableParseError) as err:
        parse_observable("x + y")
    assert err.value.offset == 4


def test_error_unbalanced_paren():
    with pytest.raises(ObservableParseError) as err:
        parse_observable("exp(x")
    assert err.value.offset == 5


def test_leading_minus_allowed():
    obs = parse_observable("-x^2 + 1")
    assert obs(2.0, 0.0) == pytest.approx(-3.0)


def test_precedence_and_power():
    obs = parse_observable("2 * x^3 - xi")
    assert obs(2.0, 5.0) == pytest.approx(11.0)
    obs2 = parse_observable("(x + 1)^2")
    assert obs2(2.0, 0.0) == pytest.approx(9.0)


def test_print_parse_round_trip():
    cases = [
        "1",
        "x",
        "xi^4",
        "exp(-x^2 - xi^2)",
        "2 * x * xi + 3.5",
        "(x + xi)^2 - exp(x)",
        "-x",
        "x - (xi - 1)",
    ]
    for src in cases:
        obs = parse_observable(src)
        printed = obs.id
        reparsed = parse_observable(printed)
        assert reparsed.expr == obs.expr, src
        assert reparsed.id == printed


_leaf = st.sampled_from(["x", "xi", "2", "0.5", "3"])


def _expr_strings(depth: int):
    if depth == 0:
        return _leaf
    sub = _expr_strings(depth - 1)
    return st.one_of(
        _leaf,
        st.tuples(sub, st.sampled_from([" + ", " - ", " * "]), sub).map(lambda t: f"{t[0]}{t[1]}{t[2]}"),
        sub.map(lambda s: f"({s})"),
        sub.map(lambda s: f"exp({s})" if len(s) < 24 else s),
        st.tuples(sub, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
    )


@settings(max_examples=60, deadline=None)
@given(src=_expr_strings(3))
def test_round_trip_random_expressions(src):
    obs = parse_observable(src)
    assert parse_observable(obs.id).expr == obs.expr


@settings(max_examples=40, deadline=None)
@given(
    src=_expr_strings(2),
    x=st.floats(-2, 2, allow_nan=False),
    xi=st.floats(-2, 2, allow_nan=False),
)
def test_vector_eval_matches_reference(src, x, xi):
    obs = parse_observable(src)
    ref = obs.expr.eval_scalar(x, xi)
    vec = float(np.asarray(obs(np.array(x), np.array(xi))))
    assert vec == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_vector_eval_matches_reference_many_points():
    rng = np.random.default_rng(7)
    obs = parse_observable("exp(-x^2 - xi^2) * (x + 2) - 0.25 * xi^3")
    xs = rng.uniform(-3, 3, 100)
    xis = rng.uniform(-3, 3, 100)
    vec = obs(xs, xis)
    for k in range(100):
        assert vec[k] == pytest.approx(obs.expr.eval_scalar(xs[k], xis[k]), rel=1e-12, abs=1e-12)


def test_split_parts_evaluate():
    obs = parse_observable("exp(-x^2) + 2 * xi^2 - 1")
    fx, g = obs.split_parts()
    assert fx is not None and g is not None
    x = np.linspace(-1, 1, 5)
    xi = np.linspace(-1, 1, 5)
    total = obs(x, xi)
    again = fx.eval(x, xi) + g.eval(x, xi)
    np.testing.assert_allclose(total, again, rtol=1e-13)


def test_bound_certificate():
    obs = parse_observable("exp(-x^2 - xi^2)")
    assert obs.bound_on((-3, 3, -3, 3)) == pytest.approx(1.0, abs=1e-6)
    poly = parse_observable("x * xi")
    assert poly.bound_on((-2, 2, -2, 2)) == pytest.approx(4.0, abs=1e-6)
