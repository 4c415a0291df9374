"""Named constructors, closed-form predicates and the catalog registry."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from biharmonic_lab import jets as jm
from biharmonic_lab.catalog import (CATALOG, COEFF_ZERO, HyperbolicLinearClass, LinearMapCoeffs,
                                    SphereLinearClass, antibianalytic_rect, eq14_lhs, eq25_system,
                                    get_entry, gu8_residual, hyperbolic_linear_is_biharmonic,
                                    hyperbolic_model, list_entries, make_antibianalytic_sigma,
                                    make_linear_map, sphere_linear_is_biharmonic)
from biharmonic_lab.errors import ParameterError, UnknownFamily
from biharmonic_lab.fields import Rect
from biharmonic_lab.harness import GridSpec, classify_entry, scan_rows
from biharmonic_lab.map_calculus import bitension_general, wirtinger_jet
from biharmonic_lab.policy import Verdict

coef = st.floats(-3, 3)


# linear maps ----------------------------------------------------------------
def test_identity_coefficients():
    m = make_linear_map((1, 0, 0, 1))
    u, v = m(np.array([0.3, -2.0]), np.array([1.5, 0.2]))
    np.testing.assert_array_equal(u, [0.3, -2.0])
    np.testing.assert_array_equal(v, [1.5, 0.2])


@given(coef, coef, coef, coef)
def test_phi_z_phi_zbar_product(a, b, c, d):
    j = wirtinger_jet(make_linear_map((a, b, c, d)), 0.2 + 0.1j)
    A1, A2 = np.array([a, b]), np.array([c, d])
    want = 0.25 * (A1 @ A1 - A2 @ A2 + 2j * (A1 @ A2))
    assert j.phi_z * j.phi_zbar == pytest.approx(want, abs=1e-12)
    for k in range(5):
        for l in range(5 - k):
            if k + l >= 2:
                assert abs(j.d(k, l)) < 1e-13


def test_2001_derivatives():
    c = LinearMapCoeffs(2, 0, 0, 1)
    assert c.phi_z == 1.5 and c.phi_zbar == 0.5


# anti-bianalytic factor -------------------------------------------------------
def test_flat_and_unit_factor():
    s = make_antibianalytic_sigma(1.0, 0.0)
    assert s(np.array(3.0), np.array(-4.0)) == 1.0
    t = make_antibianalytic_sigma(1.0, 1.0)
    assert t(np.array(1.0), np.array(2.0)) == pytest.approx(6.0)


def test_sigma_ww_vanishes_at_2_3i():
    s = make_antibianalytic_sigma(1.0, 1.0)
    J = jm.to_complex_basis(s.jet(np.array(2.0), np.array(3.0), 2))
    assert abs(J.partial(2, 0)) < 1e-12
    assert J.partial(1, 1) == pytest.approx(1.0)     # sigma_{w wbar} = q


def test_sigma_ww_random_points(rng):
    for p, q in [(1.0, 1.0), (2.0, 0.5), (1.0, -0.1)]:
        s = make_antibianalytic_sigma(p, q, Rect(-2, 2, -2, 2))
        u, v = rng.uniform(-2, 2, (2, 100))
        J = jm.to_complex_basis(s.jet(u, v, 2))
        assert np.abs(J.partial(2, 0)).max() <= 1e-12


def test_nonpositive_factor_rejected():
    with pytest.raises(ParameterError):
        make_antibianalytic_sigma(1.0, -1.0)                    # unbounded plane
    with pytest.raises(ParameterError):
        make_antibianalytic_sigma(1.0, -1.0, Rect(-1, 1, -1, 1))  # corner: 1 - 2 < 0
    make_antibianalytic_sigma(1.0, -0.4, Rect(-1, 1, -1, 1))
    with pytest.raises(ParameterError):
        make_antibianalytic_sigma(-1.0, 0.0)


def test_negative_q_fixture_stays_in_positive_region():
    for abcd in [(2, 0, 0, 1), (-2, 2, 2, -2), (0.1, 0, 0, 0)]:
        params = dict(zip("abcd", abcd), p=1.0, q=-0.1)
        fix = get_entry("antibianalytic-linear").build(params)
        r = antibianalytic_rect(abcd, 1.0, -0.1)
        assert fix.rect == r
        x, y = np.meshgrid(np.linspace(r.x0, r.x1, 11), np.linspace(r.y0, r.y1, 11))
        u, v = fix.map(x, y)
        assert np.all(1 - 0.1 * (u * u + v * v) > 0)
        fix.target.rect.check(u, v)


# closed-form predicates ----------------------------------------------------------
def test_sphere_predicate_examples():
    assert sphere_linear_is_biharmonic((0, 0, 0, 0)) is SphereLinearClass.CONSTANT
    assert sphere_linear_is_biharmonic((1, 0, 0, 1)) is SphereLinearClass.CONFORMAL
    assert sphere_linear_is_biharmonic((0, -2, 2, 0)) is SphereLinearClass.CONFORMAL
    assert sphere_linear_is_biharmonic((1, 0, 0, 2)) is SphereLinearClass.NOT
    assert sphere_linear_is_biharmonic((1, 0, 0, 1 + 0.1 * COEFF_ZERO)) is SphereLinearClass.CONFORMAL


def test_sphere_1002_grid_residual_at_z1():
    rep = classify_entry("sphere-linear", dict(a=1, b=0, c=0, d=2), GridSpec(Rect(0.5, 1.0, -0.5, 0.0), 3, 3))
    at = [p for p in rep.points if p["x"] == 1.0 and p["y"] == 0.0]
    assert at and at[0]["bitau_norm"] > 1e-3
    assert rep.verdict == Verdict.NOT.value


def test_hyperbolic_predicate_examples():
    assert hyperbolic_linear_is_biharmonic((0, 0, 3, 2)) == (HyperbolicLinearClass.AB0, True)
    assert hyperbolic_linear_is_biharmonic((0, 0, 3, 0)) == (HyperbolicLinearClass.AB0, False)
    assert hyperbolic_linear_is_biharmonic((-1, 0, 0, 1)) == (HyperbolicLinearClass.IDENTITY, False)
    assert hyperbolic_linear_is_biharmonic((1, 0, 0, 1)) == (HyperbolicLinearClass.IDENTITY, False)
    assert hyperbolic_linear_is_biharmonic((1, 0, 0, 2))[0] is HyperbolicLinearClass.NOT
    assert abs(eq14_lhs((1, 0, 0, 2), 0.3, 0.1)[1]) > 1e-3


def test_hyperbolic_ab0_constant_tension():
    rep = classify_entry("hyperbolic-linear", dict(a=0, b=0, c=3, d=2))
    tn = rep.column("tau_norm")
    assert rep.verdict == Verdict.PROPER.value
    np.testing.assert_allclose(tn, 2.0, rtol=1e-12)


# the polynomial identity and its coefficient system ------------------------------------
def test_eq25_examples():
    assert eq25_system((0, 0, 0, 0)) == (0, 0, 0, 0, 0, 0)
    assert eq25_system((1, 0, 0, 1))[0] == pytest.approx(1.0)


def _gu8_vanishes(c):
    xs = np.linspace(-1, 1, 5)
    z = (xs[:, None] + 1j * xs[None, :]).ravel()
    return np.abs(gu8_residual(c, z)).max() <= 1e-9


@given(coef, coef, coef, coef)
def test_gu8_equivalent_to_coefficient_system(a, b, c, d):
    zero25 = max(abs(v) for v in eq25_system((a, b, c, d))) <= 1e-9
    assert _gu8_vanishes((a, b, c, d)) == zero25


def test_gu8_equivalence_nontrivial_cases():
    for c in [(0, 0, 0, 0), (1, 0, 0, 1), (1, 2, 0, 0), (0, 1, 1, 0)]:
        assert _gu8_vanishes(c) == (max(abs(v) for v in eq25_system(c)) <= 1e-12)
    assert _gu8_vanishes((0, 0, 0, 0))
    assert not _gu8_vanishes((1, 0, 0, 1))


def test_eq14_ab0_zero_and_matches_bitension(rng):
    x, y = rng.uniform(-1, 1, (2, 20))
    l1, l2 = eq14_lhs((0, 0, 1.3, -0.7), x, y)
    np.testing.assert_allclose(l1, 0, atol=1e-15)
    np.testing.assert_allclose(l2, 0, atol=1e-15)
    hyp = hyperbolic_model().metric
    for _ in range(10):
        c = rng.uniform(-2, 2, 4)
        b = bitension_general(make_linear_map(c), hyp, hyp, (x, y))
        l1, l2 = eq14_lhs(c, x, y)
        np.testing.assert_allclose(b.v1, l1, rtol=1e-10, atol=1e-9)
        np.testing.assert_allclose(b.v2, l2, rtol=1e-10, atol=1e-9)


# predicate vs numerical classification ---------------------------------------------
def _random_tuples(rng, n):
    tuples = rng.uniform(-3, 3, (n, 4))
    special = np.array([[0, 0, 0, 0], [1, 0, 0, 1], [2, -1, 1, 2], [1, 1, -1, 1], [0, 0, 2, 1],
                        [-1, 0, 0, 1], [1, 0, 0, 1], [0, 0, 0, 0], [0, 0, -1, 0]], dtype=float)
    return np.vstack([special, tuples])


def test_sphere_predicate_agrees_with_numerics(rng):
    rows = [dict(zip("abcd", t)) for t in _random_tuples(rng, 500)]
    table = scan_rows("sphere-linear", rows)
    for row in table.rows:
        c = tuple(row.params[k] for k in "abcd")
        cls = sphere_linear_is_biharmonic(c)
        assert (cls is SphereLinearClass.NOT) == (row.verdict == Verdict.NOT.value)
        assert (cls is not SphereLinearClass.NOT) == (row.verdict == Verdict.HARMONIC.value)


def test_hyperbolic_predicate_agrees_with_numerics(rng):
    rows = [dict(zip("abcd", t)) for t in _random_tuples(rng, 500)]
    table = scan_rows("hyperbolic-linear", rows)
    assert [r.verdict for r in table.rows] == [r.expected for r in table.rows]


# registry -------------------------------------------------------------------
@pytest.mark.parametrize("fid", list(CATALOG))
def test_every_entry_gets_its_verdict(fid):
    entry = get_entry(fid)
    rep = classify_entry(fid)
    assert rep.verdict == entry.expected_verdict()
    assert rep.aggregates["n_errors"] == 0


@pytest.mark.parametrize("fid", [k for k, e in CATALOG.items() if e.build().conformal])
def test_conformal_entries_both_routes(fid):
    rep = classify_entry(fid, method="both")
    assert rep.verdict == get_entry(fid).expected_verdict()
    assert rep.aggregates["max_gap"] <= 1e-6 * (1 + rep.aggregates["max_bitau_norm"])


def test_unknown_ids_and_params():
    with pytest.raises(UnknownFamily):
        get_entry("torus-linear")
    with pytest.raises(ParameterError):
        get_entry("sphere-linear").params({"e": 1.0})
    ids = [e.id for e in list_entries()]
    assert ids == list(CATALOG) and len(set(ids)) == len(ids)
    for required in ("sphere-linear", "helicoid-profile", "identity-rational"):
        assert required in ids


def test_paper_entries_cover_all_families():
    paper = {e.id for e in list_entries() if e.provenance == "paper"}
    assert {"sphere-linear", "hyperbolic-linear", "antibianalytic-linear", "lemaire-profile",
            "helicoid-profile", "cone-profile", "identity-rational", "identity-trigonometric",
            "identity-hyperbolic"} <= paper
