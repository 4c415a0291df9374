"""Inline expression parsing for maps and metrics."""

from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from biharmonic_lab import jets as jm
from biharmonic_lab.catalog import sphere_model
from biharmonic_lab.errors import ParseError
from biharmonic_lab.expr import parse, parse_map, parse_metric, scalar_field
from biharmonic_lab.geometry import eval_metric, gauss_curvature
from biharmonic_lab.map_calculus import biharmonic_residual


@pytest.mark.parametrize("bad", ["", "x +", "import os", "__import__('os')", "x.real", "foo(x)",
                                 "z + 1", "sin(x, y)", "[x]", "x if y else 1", "lambda: 1", "'a'",
                                 "True"])
def test_rejects_bad_input(bad):
    with pytest.raises(ParseError):
        parse(bad)


def test_parse_error_is_a_value_error():
    with pytest.raises(ValueError):
        parse("x ** ")


def test_caret_is_power_and_constants():
    assert parse("x^2 + y^3")(2.0, 3.0) == 31.0
    assert parse("2*pi + e")(0.0, 0.0) == pytest.approx(2 * np.pi + np.e)
    assert parse("-x + +y")(1.0, 5.0) == 4.0
    assert parse("x*y").used == {"x", "y"}
    assert parse("3").used == set()


def test_functions_on_arrays():
    x = np.linspace(0.1, 1, 7)
    y = np.linspace(-1, 1, 7)
    got = parse("exp(x)*sin(y) + ln(x) - sqrt(x)/cosh(y) + tanh(x*y) + abs(y)")(x, y)
    want = np.exp(x) * np.sin(y) + np.log(x) - np.sqrt(x) / np.cosh(y) + np.tanh(x * y) + np.abs(y)
    np.testing.assert_allclose(got, want, rtol=1e-14)


def test_jets_match_sympy():
    text = "exp(x)*cos(y) + x^3*y/(1 + x^2 + y^2) + log(2 + sin(x*y))"
    X, Y = sp.symbols("x y")
    f = sp.sympify(text.replace("^", "**"))
    p = (0.3, -0.7)
    J = scalar_field(text).jet(np.array(p[0]), np.array(p[1]), 4)
    for i in range(5):
        for j in range(5 - i):
            want = float(sp.diff(f, X, i, Y, j).subs({X: p[0], Y: p[1]}))
            assert J.partial(i, j) == pytest.approx(want, rel=1e-11, abs=1e-11)


def test_parse_map_forms():
    for text in ["x^2 - y^2; 2*x*y", "u = x^2 - y^2; v = 2*x*y"]:
        m = parse_map(text)
        u, v = m(np.array([1.0, 2.0]), np.array([1.0, 0.5]))
        np.testing.assert_allclose(u, [0.0, 3.75])
        np.testing.assert_allclose(v, [2.0, 2.0])
        assert m.analytic
    with pytest.raises(ParseError):
        parse_map("x")
    with pytest.raises(ParseError):
        parse_map("x; y; x")


def test_parse_metric_forms():
    p = (np.array([0.2]), np.array([-0.4]))
    flat = eval_metric(parse_metric("flat"), p)
    np.testing.assert_array_equal(flat.g[0], np.eye(2))
    sph = parse_metric("conformal: 2/(1 + x^2 + y^2)")
    np.testing.assert_allclose(eval_metric(sph, p).g, eval_metric(sphere_model().metric, p).g, rtol=1e-15)
    np.testing.assert_allclose(gauss_curvature(sph, p), 1.0, rtol=1e-12)
    hel = parse_metric("warped: sqrt(1 + x^2)")
    np.testing.assert_allclose(gauss_curvature(hel, p), -1 / (1 + 0.04) ** 2, rtol=1e-12)
    hyp = parse_metric("general: exp(-2*y); 0; 1")
    np.testing.assert_allclose(gauss_curvature(hyp, p), -1.0, rtol=1e-12)


@pytest.mark.parametrize("bad", ["conformal", "warped: x*y", "general: 1; 0", "riemannian: 1",
                                 "conformal: q"])
def test_parse_metric_errors(bad):
    with pytest.raises(ParseError):
        parse_metric(bad)


def test_parsed_holomorphic_map_is_harmonic():
    m = parse_map("x^2 - y^2; 2*x*y")
    g = parse_metric("flat")
    r = biharmonic_residual(m, g, g, (np.array([0.3, -0.2]), np.array([0.1, 0.5])))
    assert r.tension_norm.max() <= 1e-12 and r.bitension_norm.max() <= 1e-12


def test_constant_subexpressions_in_jets():
    J = scalar_field("2 + 0*x").jet(np.array(0.1), np.array(0.2), 2)
    assert isinstance(J, jm.Jet) and J.value == 2.0 and J.partial(1, 0) == 0.0
