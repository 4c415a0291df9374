"""Tension and bitension by the coordinate route and the complex route."""

from __future__ import annotations

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from biharmonic_lab import jets as jm
from biharmonic_lab.catalog import (CATALOG, hyperbolic_conformal_target, hyperbolic_model,
                                    make_antibianalytic_sigma, make_linear_map, sphere_model)
from biharmonic_lab.errors import DomainError, OrderUnavailable, PrecisionLoss, UnsupportedForm
from biharmonic_lab.fields import Rect, ScalarField2
from biharmonic_lab.geometry import conformal
from biharmonic_lab.map_calculus import (SmoothMap2, biharmonic_residual, bitension_conformal,
                                         bitension_general, tension_conformal, tension_general,
                                         wirtinger_jet)
from biharmonic_lab.policy import Verdict, decide
from biharmonic_lab.warped import lemaire_warp

FLAT = conformal(1.0, Rect.everywhere(), name="flat")
SPHERE = sphere_model().metric
HYP = hyperbolic_model().metric
ONE = ScalarField2(lambda x, y: 1.0 + 0 * x)
coef = st.floats(-2, 2)


def linear(a, b, c, d, analytic=True):
    if analytic:
        return make_linear_map((a, b, c, d))
    return SmoothMap2(lambda x, y: (a * x + b * y, c * x + d * y), analytic=False)


def pt(x, y):
    return (np.array(x, dtype=float), np.array(y, dtype=float))


# ---------------------------------------------------------------------------
# independent oracles, written out from the closed-form expressions
# ---------------------------------------------------------------------------
def hyperbolic_linear_lhs(a, b, c, d, x, y):
    """Both left-hand sides of the hyperbolic linear-map system, expanded by hand."""
    v = c * x + d * y
    E = np.exp
    l1 = ((-4 * a * c + 4 * a * c * d) * E(2 * y) + 8 * a**3 * c * E(4 * y - 2 * v)
          + (8 * a * b * b * c - 2 * a * a * b + 8 * a * a * b * d) * E(2 * y - 2 * v)
          + (8 * b**3 * d + 2 * b**3) * E(-2 * v) - 2 * b * d - 4 * b * d * d)
    l2 = ((8 * b * b * d + 8 * b * b * d * d + b * b) * E(-2 * v) + 8 * a * a * c * c * E(4 * y - 2 * v)
          - 2 * b**4 * E(-4 * v) - 4 * a * a * b * b * E(2 * y - 4 * v) - 2 * a**4 * E(4 * y - 4 * v)
          + (2 * a * a + 4 * b * b * c * c - 4 * a * a * d + 4 * a * a * d * d - 4 * a * b * c
             + 8 * a * b * c * d) * E(2 * y - 2 * v))
    return l1, l2


def sphere_linear_bracket(a, b, c, d, z):
    """rho^2/4 times the complex bitension of a linear map between stereographic spheres.

    The conjugate-map derivatives are d_z(wbar) = conj(phi_zbar) and
    d_zbar(wbar) = conj(phi_z).
    """
    pz = 0.5 * (a + d) + 0.5j * (c - b)
    pzb = 0.5 * (a - d) + 0.5j * (c + b)
    w = pz * z + pzb * np.conj(z)
    zb, wb = np.conj(z), np.conj(w)
    Z, W = 1 + z * zb, 1 + w * wb
    cpz, cpzb = np.conj(pzb), np.conj(pz)
    s = (-12 * z * zb * wb * W**2 * pz * pzb - 4 * (1 - z * zb) * wb * W**2 * pz * pzb
         + 4 * Z * zb * wb**2 * W * pz * pzb**2 - 4 * Z * zb * W * pz * pzb * cpzb
         + 4 * Z * z * wb**2 * W * pz**2 * pzb - 4 * Z**2 * wb**3 * pz**2 * pzb**2
         + 4 * Z**2 * wb * pz**2 * pzb * cpzb - 4 * Z * z * W * pz * pzb * cpz
         + 4 * Z**2 * wb * pz * pzb**2 * cpz + 4 * Z**2 * w * pz * pzb * cpz * cpzb
         + 8 * zb * Z * wb**2 * W * pz * pzb**2 - 8 * Z**2 * wb**3 * pz**2 * pzb**2
         + 4 * Z**2 * wb * pz * pzb**2 * cpz + 8 * z * Z * wb**2 * W * pz**2 * pzb
         + 4 * Z**2 * wb * pz**2 * pzb * cpzb + 4 * Z**2 * w * pz * pzb * cpz * cpzb
         - 12 * Z**2 * wb**3 * pz**2 * pzb**2)
    return s / W**3


_w, _wb = sp.symbols("w wb")


def log_sigma_derivs(sigma_uv):
    """Wirtinger derivatives of ln sigma, from sympy, as numeric callables of w."""
    u, v = sp.symbols("u v", real=True)
    L = sp.log(sigma_uv(u, v)).subs({u: (_w + _wb) / 2, v: (_w - _wb) / (2 * sp.I)})
    names = {"w": (1, 0), "wb": (0, 1), "ww": (2, 0), "wwb": (1, 1), "www": (3, 0),
             "wwwb": (2, 1), "wwbwb": (1, 2)}
    out = {}
    for k, (i, j) in names.items():
        e = sp.diff(L, _w, i, _wb, j)
        f = sp.lambdify((_w, _wb), e, "numpy")
        out[k] = lambda w, f=f: complex(f(w, np.conj(w)))
    return out


def linear_reduction_bracket(pz, pzb, Ld):
    """phi_z phi_zbar times the bracket obtained for linear maps of the flat plane."""
    cz, czb = np.conj(pzb), np.conj(pz)          # d_z wbar, d_zbar wbar
    P = pz * pzb
    br = (8 * Ld["www"] * P + 8 * Ld["wwwb"] * (pz * czb + pzb * cz) + 8 * Ld["wwbwb"] * cz * czb
          + 48 * Ld["w"] * Ld["ww"] * P + 16 * Ld["w"] * Ld["wwb"] * (pzb * cz + pz * czb)
          + 16 * Ld["wb"] * Ld["wwb"] * cz * czb + 32 * Ld["w"] ** 3 * P)
    return P * br


# ---------------------------------------------------------------------------
# Wirtinger jets
# ---------------------------------------------------------------------------
def test_identity_wirtinger():
    j = wirtinger_jet(make_linear_map((1, 0, 0, 1)), 0.3 - 0.2j)
    assert j.phi_z == pytest.approx(1.0) and abs(j.phi_zbar) < 1e-15
    for a in range(5):
        for b in range(5 - a):
            if a + b >= 2:
                assert abs(j.d(a, b)) < 1e-15


@given(coef, coef, coef, coef)
def test_linear_wirtinger(a, b, c, d):
    j = wirtinger_jet(make_linear_map((a, b, c, d)), 0.5 + 0.1j)
    assert j.phi_z == pytest.approx(0.5 * (a + d) + 0.5j * (c - b), abs=1e-14)
    assert j.phi_zbar == pytest.approx(0.5 * (a - d) + 0.5j * (c + b), abs=1e-14)


def test_wirtinger_second_order_against_fd():
    m = SmoothMap2(lambda x, y: (x * x, 0 * x))
    z = 0.4 + 0.7j
    j = wirtinger_jet(m, z)
    assert j.phi_zzbar == pytest.approx(0.5)
    h = 1e-4
    f = lambda x, y: x * x
    fxx = (f(z.real + h, z.imag) - 2 * f(z.real, z.imag) + f(z.real - h, z.imag)) / h**2
    assert j.phi_zzbar == pytest.approx(fxx / 4, abs=1e-6)
    assert j.phi_zz == pytest.approx(fxx / 4, abs=1e-6)


def test_conjugate_jet_symmetry():
    m = SmoothMap2(lambda x, y: (x * y + jm.sin(x), jm.exp(y) - x ** 3))
    j = wirtinger_jet(m, 0.3 + 0.4j)
    for a in range(5):
        for b in range(5 - a):
            assert j.dbar(a, b) == pytest.approx(np.conj(j.d(b, a)), abs=1e-12)


def test_order_unavailable():
    m = SmoothMap2(lambda x, y: (x, y))
    with pytest.raises(OrderUnavailable):
        wirtinger_jet(m, 0j, 5)
    fd = SmoothMap2(lambda x, y: (x, y), analytic=False)
    with pytest.raises(OrderUnavailable):
        wirtinger_jet(fd, 0j, 3)
    assert wirtinger_jet(fd, 0j, 2).phi_z == pytest.approx(1.0)


def test_map_domain_is_checked():
    m = SmoothMap2(lambda x, y: (x, y), domain=Rect(0, 1, 0, 1))
    with pytest.raises(DomainError):
        wirtinger_jet(m, -0.5 + 0.5j)


# ---------------------------------------------------------------------------
# tension
# ---------------------------------------------------------------------------
def test_warped_target_tension():
    w = lemaire_warp(3.0)
    m = SmoothMap2(lambda x, y: (jm.sin(x) * 2, y))
    x = np.array([0.1, 0.7, -1.1])
    t = tension_general(m, FLAT, w.metric(), (x, 0 * x + 0.3))
    f, f2 = 2 * np.sin(x), -2 * np.sin(x)
    np.testing.assert_allclose(t.v1, f2 - (-f), atol=1e-13)        # sigma' sigma = -u
    np.testing.assert_allclose(t.v2, 0, atol=1e-13)


@given(coef, coef, coef, coef, st.floats(-1, 1), st.floats(-1, 1))
def test_hyperbolic_linear_tension(a, b, c, d, x, y):
    t = tension_general(linear(a, b, c, d), HYP, HYP, pt(x, y))
    v = c * x + d * y
    assert float(t.v1) == pytest.approx(-b - 2 * b * d - 2 * a * c * np.exp(2 * y), rel=1e-10, abs=1e-10)
    assert float(t.v2) == pytest.approx(-d + a * a * np.exp(2 * y - 2 * v) + b * b * np.exp(-2 * v),
                                        rel=1e-10, abs=1e-10)


def test_identity_flat_tension_zero():
    t = tension_general(linear(1, 0, 0, 1), FLAT, FLAT, pt(0.3, 0.2))
    assert t.v1 == 0 and t.v2 == 0


@given(coef, coef, coef, coef)
def test_flat_domain_linear_tension_formula(a, b, c, d):
    sig = make_antibianalytic_sigma(1.0, 1.0)
    z = 0.3 - 0.6j
    j = wirtinger_jet(linear(a, b, c, d), z)
    w = j.phi
    lw = np.conj(w) / (1 + abs(w) ** 2)          # (ln sigma)_w for sigma = 1 + w wbar
    want = 8 * lw * j.phi_z * j.phi_zbar
    assert tension_conformal(j, ONE, sig) == pytest.approx(want, abs=1e-12)
    general_t = tension_general(linear(a, b, c, d), FLAT, conformal(sig), pt(z.real, z.imag))
    assert general_t.as_complex() == pytest.approx(want, abs=1e-11)


def test_holomorphic_map_has_zero_tension():
    m = SmoothMap2(lambda x, y: (x * x - y * y + x, 2 * x * y + y))
    j = wirtinger_jet(m, 0.2 + 0.3j)
    sig = ScalarField2(lambda u, v: jm.exp(u * v) + 1)
    assert abs(tension_conformal(j, ONE, sig)) < 1e-14
    sph = ScalarField2(lambda x, y: 2 / (1 + x * x + y * y))
    j = wirtinger_jet(linear(1, 0, 0, 1), 0.5 + 0.5j)
    assert abs(tension_conformal(j, sph, sph)) < 1e-14


# ---------------------------------------------------------------------------
# bitension, coordinate route
# ---------------------------------------------------------------------------
def test_harmonic_map_bitension_zero():
    b = bitension_general(linear(1, 0, 0, 1), SPHERE, SPHERE, pt(0.3, -0.1))
    assert b.v1 == pytest.approx(0, abs=1e-14) and b.v2 == pytest.approx(0, abs=1e-14)


@given(coef, st.floats(0.1, 2))
def test_hyperbolic_ab0_biharmonic(c, d):
    b = bitension_general(linear(0, 0, c, d), HYP, HYP, pt(0.2, 0.4))
    assert abs(b.v1) < 1e-9 and abs(b.v2) < 1e-9


def test_hyperbolic_2x_y_not_biharmonic():
    b = bitension_general(linear(2, 0, 0, 1), HYP, HYP, pt(0.0, 0.0))
    l1, l2 = hyperbolic_linear_lhs(2, 0, 0, 1, 0.0, 0.0)
    assert abs(l2) > 1
    assert float(b.v1) == pytest.approx(l1, abs=1e-10)
    assert float(b.v2) == pytest.approx(l2, rel=1e-12)


@given(coef, coef, coef, coef, st.floats(-1, 1), st.floats(-1, 1))
def test_hyperbolic_bitension_matches_expanded_system(a, b, c, d, x, y):
    bt = bitension_general(linear(a, b, c, d), HYP, HYP, pt(x, y))
    l1, l2 = hyperbolic_linear_lhs(a, b, c, d, x, y)
    scale = 1 + abs(l1) + abs(l2)
    assert float(bt.v1) == pytest.approx(l1, abs=1e-9 * scale)
    assert float(bt.v2) == pytest.approx(l2, abs=1e-9 * scale)


# ---------------------------------------------------------------------------
# bitension, complex route
# ---------------------------------------------------------------------------
def test_complex_harmonic_zero():
    sph = ScalarField2(lambda x, y: 2 / (1 + x * x + y * y))
    j = wirtinger_jet(linear(1, 0, 0, 1), 0.3 + 0.1j)
    assert abs(bitension_conformal(j, sph, sph)) < 1e-14


@given(coef, coef, coef, coef)
def test_antibianalytic_linear_biharmonic(a, b, c, d):
    sig = make_antibianalytic_sigma(2.0, 0.5)
    j = wirtinger_jet(linear(a, b, c, d), 0.4 - 0.3j)
    assert abs(bitension_conformal(j, ONE, sig)) < 1e-9 * (1 + abs(a) + abs(b) + abs(c) + abs(d)) ** 4


def test_sphere_1002_nonzero_at_z1():
    sph = ScalarField2(lambda x, y: 2 / (1 + x * x + y * y))
    z = 1.0 + 0j
    j = wirtinger_jet(linear(1, 0, 0, 2), z)
    bt = bitension_conformal(j, sph, sph)
    assert abs(bt) > 1e-3
    rho2 = (2 / (1 + abs(z) ** 2)) ** 2
    assert bt * rho2 / 4 == pytest.approx(sphere_linear_bracket(1, 0, 0, 2, z), rel=1e-12)


@given(coef, coef, coef, coef, st.floats(-1, 1), st.floats(-1, 1))
def test_sphere_linear_matches_bracket(a, b, c, d, x, y):
    sph = ScalarField2(lambda x, y: 2 / (1 + x * x + y * y))
    z = x + 1j * y
    bt = bitension_conformal(wirtinger_jet(linear(a, b, c, d), z), sph, sph)
    want = sphere_linear_bracket(a, b, c, d, z)
    rho2 = (2 / (1 + abs(z) ** 2)) ** 2
    assert bt * rho2 / 4 == pytest.approx(want, abs=1e-10 * (1 + abs(want)))


@pytest.mark.parametrize("sigma_uv", [
    lambda u, v: 1 + u**2 + v**2,
    lambda u, v: 1 + u**2 + 2 * v**2,
    lambda u, v: sp.exp(u) + v**2,
], ids=["antibianalytic", "anisotropic", "exponential"])
def test_linear_map_reduction_bracket(sigma_uv, rng):
    Ld = log_sigma_derivs(sigma_uv)
    mod = {"exp": jm.exp}
    sig = ScalarField2(sp.lambdify(sp.symbols("u v"), sigma_uv(*sp.symbols("u v")), [mod, "numpy"]))
    for _ in range(10):
        a, b, c, d = rng.uniform(-1.5, 1.5, 4)
        z = complex(*rng.uniform(-1, 1, 2))
        j = wirtinger_jet(linear(a, b, c, d), z)
        got = bitension_conformal(j, ONE, sig)
        Lw = {k: f(j.phi) for k, f in Ld.items()}
        want = 4 * linear_reduction_bracket(j.phi_z, j.phi_zbar, Lw)
        assert got == pytest.approx(want, abs=1e-8 * (1 + abs(want)))


def test_conjugation_symmetry(rng):
    """Conjugating the map conjugates the bitension when sigma depends on |w| only."""
    sph = ScalarField2(lambda x, y: 2 / (1 + x * x + y * y))
    phi = SmoothMap2(lambda x, y: (x * x - y + 0.3 * x * y, x + y ** 3))
    psi = SmoothMap2(lambda x, y: (x * x - y + 0.3 * x * y, -(x + y ** 3)))
    for _ in range(10):
        z = complex(*rng.uniform(-1, 1, 2))
        a = bitension_conformal(wirtinger_jet(phi, z), sph, sph)
        b = bitension_conformal(wirtinger_jet(psi, z), sph, sph)
        assert b == pytest.approx(np.conj(a), abs=1e-10 * (1 + abs(a)))


CONFORMAL_FIXTURES = [k for k, e in CATALOG.items() if e.build().conformal]


@pytest.mark.parametrize("fid", CONFORMAL_FIXTURES)
def test_formula_equivalence_random_points(fid, rng):
    fix = CATALOG[fid].build()
    r = fix.rect
    x = rng.uniform(r.x0, r.x1, 500)
    y = rng.uniform(r.y0, r.y1, 500)
    res = biharmonic_residual(fix.map, fix.domain, fix.target, (x, y), "both")
    assert np.all(res.gap <= 1e-6 * (1 + res.gap_scale))


# ---------------------------------------------------------------------------
# residual reports
# ---------------------------------------------------------------------------
def test_flat_identity_residual():
    r = biharmonic_residual(linear(1, 0, 0, 1), FLAT, FLAT, pt(0.2, 0.3))
    assert r.tension_norm == 0 and r.bitension_norm == 0
    assert r.classification[()] == Verdict.HARMONIC.value


def test_antibianalytic_2x_y_proper():
    tgt = hyperbolic_conformal_target(1.0, 1.0).metric
    x, y = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5))
    r = biharmonic_residual(linear(2, 0, 0, 1), FLAT, tgt, (x.ravel(), y.ravel()), "both")
    assert np.all(r.bitension_norm <= r.bitension_tol)
    assert np.any(r.tension_norm > 10 * r.tension_tol)
    v = decide(r.tension_norm, r.tension_tol, r.bitension_norm, r.bitension_tol, r.fd_err)
    assert v[()] == Verdict.PROPER.value


def test_tension_norm_uses_target_metric():
    r = biharmonic_residual(linear(0, 0, 0.5, 2), HYP, HYP, pt(0.3, 0.2))
    # tau = (0, -d) and h22 = 1
    assert float(r.tension_norm) == pytest.approx(2.0)
    sph = biharmonic_residual(SmoothMap2(lambda x, y: (x + x * x, y)), SPHERE, SPHERE, pt(0.3, 0.2))
    u, v = 0.3 + 0.09, 0.2
    h = (2 / (1 + u * u + v * v)) ** 2
    assert float(sph.tension_norm) == pytest.approx(np.sqrt(h) * np.hypot(*sph.tension), rel=1e-12)


def test_method_validation():
    with pytest.raises(UnsupportedForm):
        biharmonic_residual(linear(1, 0, 0, 1), HYP, HYP, pt(0, 0), "conformal")
    with pytest.raises(ValueError):
        biharmonic_residual(linear(1, 0, 0, 1), FLAT, FLAT, pt(0, 0), "symbolic")


def test_conformal_method_matches_general():
    fix = CATALOG["sphere-poly"].build()
    x, y = np.linspace(-0.8, 0.8, 7), np.linspace(0.5, -0.5, 7)
    a = biharmonic_residual(fix.map, fix.domain, fix.target, (x, y), "general")
    b = biharmonic_residual(fix.map, fix.domain, fix.target, (x, y), "conformal")
    np.testing.assert_allclose(a.bitension, b.bitension, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(a.tension_norm, b.tension_norm, rtol=1e-12)


# ---------------------------------------------------------------------------
# finite-difference inputs
# ---------------------------------------------------------------------------
def test_fd_harmonic_implies_biharmonic(rng):
    """Bitension of a harmonic FD map stays within its error estimate plus the FD tolerance."""
    m = SmoothMap2(lambda x, y: (x * x - y * y, 2 * x * y), analytic=False)
    x, y = rng.uniform(-0.8, 0.8, (2, 40))
    for method in ("general", "conformal"):
        r = biharmonic_residual(m, SPHERE, SPHERE, (x, y), method)
        assert np.all(r.bitension_norm <= np.maximum(r.fd_err, r.bitension_tol))
        verdict = decide(r.tension_norm, r.tension_tol, r.bitension_norm, r.bitension_tol, r.fd_err)[()]
        assert verdict in (Verdict.HARMONIC.value, Verdict.INCONCLUSIVE.value)


def test_fd_detects_non_biharmonic():
    m = linear(1, 0, 0, 2, analytic=False)
    x, y = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5))
    for method in ("general", "conformal"):
        r = biharmonic_residual(m, SPHERE, SPHERE, (x.ravel(), y.ravel()), method)
        v = decide(r.tension_norm, r.tension_tol, r.bitension_norm, r.bitension_tol, r.fd_err)[()]
        assert v == Verdict.NOT.value


def test_fd_agrees_with_analytic():
    a = linear(1, 0.3, -0.2, 2)
    b = linear(1, 0.3, -0.2, 2, analytic=False)
    p = (np.array([0.2, -0.5]), np.array([0.1, 0.4]))
    ra = biharmonic_residual(a, SPHERE, SPHERE, p)
    rb = biharmonic_residual(b, SPHERE, SPHERE, p)
    assert np.all(np.abs(ra.bitension - rb.bitension).max(axis=-1) <= 10 * rb.fd_err + 1e-6)


def test_fd_precision_loss():
    """A map whose finite-difference noise swamps a tiny residual is flagged."""
    eps = 1e-9
    m = SmoothMap2(lambda x, y: (x + eps * x ** 3, y), analytic=False, fd_step=1e-7)
    with pytest.raises(PrecisionLoss):
        bitension_general(m, SPHERE, SPHERE, pt(0.3, 0.2))
