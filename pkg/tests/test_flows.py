import numpy as np
import pytest

from hamine.exceptions import DegenerateDesign, DimensionMismatch, Underdetermined
from hamine.flows import (
    evaluate_flow,
    fit_flow,
    fit_polynomial,
    monomial_exponents,
    partial_derivatives,
    render_flow,
)
from hamine.models import ChannelSchema, PolynomialFlow, Term
from hamine.synthesis import StateRecord, StateSegment


def _flow(terms, inputs=("x",), degree=2):
    return PolynomialFlow(
        degree=degree,
        inputs=list(inputs),
        outputs={"y": [Term(exponents=list(e), coef=c) for e, c in terms]},
    )


def _coefs(flow, output="y"):
    return [t.coef for t in flow.outputs[output]]


def test_monomial_order():
    assert monomial_exponents(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert monomial_exponents(1, 0) == [(0,)]


def test_quadratic_is_recovered():
    x = np.linspace(-1, 2, 30)
    flow = fit_polynomial(x, 2 + 3 * x - x**2, degree=2)

    np.testing.assert_allclose(_coefs(flow, "y0"), [2, 3, -1], atol=1e-6)
    assert flow.residuals["y0"] < 1e-9


def test_two_input_polynomial_is_recovered():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, size=(60, 2))
    y = 1 + 2 * x[:, 0] - x[:, 1] ** 2 + 0.5 * x[:, 0] * x[:, 1]
    flow = fit_polynomial(x, y, degree=2, inputs=["a", "b"], outputs=["y"])

    np.testing.assert_allclose(_coefs(flow), [1, 2, 0, 0, 0.5, -1], atol=1e-6)


def test_constant_output():
    x = np.linspace(0, 1, 10)
    flow = fit_polynomial(x, np.full(10, 7.0), degree=1)
    np.testing.assert_allclose(_coefs(flow, "y0"), [7, 0], atol=1e-9)


def test_underdetermined():
    with pytest.raises(Underdetermined):
        fit_polynomial([0.0, 1.0], [0.0, 1.0], degree=2)


def test_degenerate_design():
    with pytest.raises(DegenerateDesign):
        fit_polynomial(np.full(5, 0.3), np.arange(5.0), degree=1)


def test_ridge_handles_degenerate_design():
    flow = fit_polynomial(np.full(5, 0.3), np.full(5, 2.0), degree=1, ridge=1e-6)
    assert evaluate_flow(flow, [0.3])[0] == pytest.approx(2.0, abs=1e-4)


def test_ridge_shrinks_coefficients():
    rng = np.random.default_rng(2)
    x = rng.uniform(0, 1, size=(40, 2))
    y = 3 * x[:, 0] - 2 * x[:, 1] ** 2 + rng.normal(0, 0.05, 40)

    norms = [
        np.linalg.norm(_coefs(fit_polynomial(x, y, 2, ridge=r), "y0")[1:])
        for r in (0.0, 0.01, 0.1, 1.0)
    ]
    assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        fit_polynomial(np.zeros(5), np.zeros(4), degree=1)
    with pytest.raises(DimensionMismatch):
        evaluate_flow(_flow([((0,), 1.0)]), [1.0, 2.0])


def test_evaluate():
    flow = _flow([((0,), 0.0), ((2,), 1.0)])
    assert evaluate_flow(flow, [2.0])[0] == pytest.approx(4.0)
    np.testing.assert_allclose(evaluate_flow(flow, [[1.0], [3.0]])[:, 0], [1.0, 9.0])


def test_derivative_of_square():
    (derivative,) = partial_derivatives(_flow([((0,), 5.0), ((2,), 1.0)]))

    assert derivative.degree == 1
    assert evaluate_flow(derivative, [3.0])[0] == pytest.approx(6.0)
    assert _coefs(derivative) == [0.0, 2.0]


def test_derivatives_match_finite_differences():
    rng = np.random.default_rng(4)
    exponents = monomial_exponents(2, 3)
    flow = _flow(zip(exponents, rng.normal(size=len(exponents))), inputs=("a", "b"), degree=3)
    derivatives = partial_derivatives(flow)
    h = 1e-6

    for point in rng.uniform(-1, 1, size=(5, 2)):
        for k, derivative in enumerate(derivatives):
            step = np.zeros(2)
            step[k] = h
            numeric = (evaluate_flow(flow, point + step) - evaluate_flow(flow, point - step)) / (2 * h)
            assert evaluate_flow(derivative, point)[0] == pytest.approx(numeric[0], rel=1e-5, abs=1e-6)


def test_mixed_partials_commute():
    flow = _flow(
        [((0, 0), 1.0), ((1, 1), 2.0), ((2, 1), -1.5), ((0, 2), 0.5)], inputs=("a", "b"), degree=3
    )
    da, db = partial_derivatives(flow)
    dab = partial_derivatives(da)[1]
    dba = partial_derivatives(db)[0]

    for point in ([0.3, -0.2], [1.0, 2.0]):
        assert evaluate_flow(dab, point)[0] == pytest.approx(evaluate_flow(dba, point)[0])


def test_render_flow():
    flow = _flow([((0,), 2.0), ((1,), 3.0), ((2,), -1.0)])
    assert render_flow(flow) == "y = 2 + 3 x - 1 x^2"


def test_render_drops_zero_terms():
    flow = _flow([((0,), 0.0), ((1,), 0.0001), ((2,), 1.5)])
    assert render_flow(flow) == "y = 0 + 1.5 x^2"


def test_state_flow_rebases_clocks():
    schema = ChannelSchema.from_header(["t", "i:clock", "o:x"]).with_clocks(["clock"])
    segments = []
    for start in (0.0, 5.0):
        clock = start + np.linspace(0, 1, 20)
        values = np.column_stack([clock, 1 + 2 * (clock - start)])
        segments.append(StateSegment(0, 0, 19, values, values[:, [1]]))

    flow = fit_flow(StateRecord(id=0, segments=segments), schema, degree=1, ridge=0.0)
    np.testing.assert_allclose(_coefs(flow, "x"), [1, 2], atol=1e-9)
