"""Named metrics, maps and closed-form classifications.

Every entry of :data:`CATALOG` is addressed by a stable string id and builds a
:class:`Fixture` (map, domain metric, target metric, recommended rectangle)
from a parameter dict, together with the verdict the closed-form results
predict for those parameters.

Identifier mapping to the results being checked:

* ``antibianalytic-linear``: linear maps of the flat plane into
  ``(p + q(u^2 + v^2))^2 (du^2 + dv^2)``, biharmonic because sigma_ww = 0;
* ``sphere-linear``: linear maps between stereographic 2-spheres,
  biharmonic only when constant or conformal;
* ``hyperbolic-linear``: linear maps of ``e^{-2y} dx^2 + dy^2``, biharmonic iff
  a = b = 0 or (a, b, c, d) = (+-1, 0, 0, 1);
* ``*-profile``: maps ``(f(x), y)`` into warped products;
* ``identity-*``: the identity into ``dx^2 + sigma(x)^2 dy^2``;
* ``*-isothermal`` and ``*-poly``: conformal fixtures for comparing the two
  bitension formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import jets as jm
from .errors import ParameterError, UnknownFamily
from .fields import Rect, ScalarField2
from .geometry import Metric2, conformal, general
from .map_calculus import SmoothMap2
from .policy import Verdict
from .warped import (FLAT_PLANE, IdentityFactorCase, ProfileFunction, WarpProfile, cone_family,
                     cone_warp, helicoid_family, helicoid_warp, identity_factor, identity_map,
                     lemaire_family, lemaire_warp)

#: coefficient-level zero threshold for the algebraic predicates
COEFF_ZERO = 1e-12

INF = math.inf


# ---------------------------------------------------------------------------
# linear maps
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LinearMapCoeffs:
    """``(x, y) -> (a x + b y, c x + d y)``; rows ``A1 = (a, b)``, ``A2 = (c, d)``."""

    a: float
    b: float
    c: float
    d: float

    @property
    def A1(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=float)

    @property
    def A2(self) -> np.ndarray:
        return np.array([self.c, self.d], dtype=float)

    def as_tuple(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def phi_z(self) -> complex:
        return 0.5 * (self.a + self.d) + 0.5j * (self.c - self.b)

    @property
    def phi_zbar(self) -> complex:
        return 0.5 * (self.a - self.d) + 0.5j * (self.c + self.b)


def _coeffs(c) -> LinearMapCoeffs:
    if isinstance(c, LinearMapCoeffs):
        return c
    return LinearMapCoeffs(*c)


def make_linear_map(c) -> SmoothMap2:
    """Linear map with exact jets.  Coefficients may be arrays (batched families)."""
    c = _coeffs(c)
    a, b, cc, d = c.a, c.b, c.c, c.d
    return SmoothMap2(lambda x, y: (x * a + y * b, x * cc + y * d), name=f"linear{c.as_tuple()!r}")


def _disc_range(rect: Rect) -> tuple[float, float]:
    """Range of u^2 + v^2 over a closed rectangle."""
    def nearest(lo, hi):
        return 0.0 if lo <= 0 <= hi else min(abs(lo), abs(hi))
    rmin = nearest(rect.x0, rect.x1) ** 2 + nearest(rect.y0, rect.y1) ** 2
    rmax = max(abs(rect.x0), abs(rect.x1)) ** 2 + max(abs(rect.y0), abs(rect.y1)) ** 2
    return rmin, rmax


def make_antibianalytic_sigma(p: float, q: float, rect: Rect | None = None) -> ScalarField2:
    """``sigma = p + q (u^2 + v^2)`` after checking positivity on ``rect`` and sigma_ww = 0."""
    rect = rect or Rect.everywhere()
    rmin, rmax = _disc_range(rect)
    lo = min(p + q * rmin, p + q * rmax) if math.isfinite(rmax) else (p + q * rmin if q >= 0 else -INF)
    if not lo > 0:
        raise ParameterError(f"sigma = {p!r} + {q!r}(u^2+v^2) is not positive on {rect.as_tuple()}")
    field_ = ScalarField2(lambda u, v: p + q * (u * u + v * v), name=f"antibianalytic(p={p!r},q={q!r})")
    probe = jm.to_complex_basis(field_.jet(np.array(0.3), np.array(-0.2), 2))
    if abs(probe.partial(2, 0)) > COEFF_ZERO * (1 + abs(q)):
        raise ParameterError("sigma_ww does not vanish")  # cannot happen for this form
    return field_


# ---------------------------------------------------------------------------
# named geometries
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class NamedGeometry:
    tag: str
    metric: Metric2
    params: dict = field(default_factory=dict)


def flat_plane() -> NamedGeometry:
    return NamedGeometry("FlatPlane", FLAT_PLANE)


def sphere_model() -> NamedGeometry:
    """Stereographic unit sphere, ``4 (dx^2 + dy^2) / (1 + x^2 + y^2)^2``."""
    m = conformal(lambda x, y: 2 / (1 + x * x + y * y), Rect.everywhere(), name="sphere")
    return NamedGeometry("SphereModel", m)


def hyperbolic_conformal_target(p: float, q: float, rect: Rect | None = None) -> NamedGeometry:
    rect = rect or Rect.everywhere()
    sigma = make_antibianalytic_sigma(p, q, rect)
    return NamedGeometry("HyperbolicConformalTarget",
                         conformal(sigma, rect, name=f"antibianalytic(p={p!r},q={q!r})"), dict(p=p, q=q))


def hyperbolic_model() -> NamedGeometry:
    """Upper-half-plane model in the chart ``e^{-2y} dx^2 + dy^2``."""
    m = general(lambda x, y: jm.exp(-2 * y), 0.0, 1.0, Rect.everywhere(), name="hyperbolic")
    return NamedGeometry("HyperbolicWarpedModel", m)


def lemaire_target(a: float) -> NamedGeometry:
    return NamedGeometry("LemaireTarget", lemaire_warp(a).metric(), dict(a=a))


def helicoid(a: float) -> NamedGeometry:
    return NamedGeometry("Helicoid", helicoid_warp(a).metric(), dict(a=a))


def cone(side: int = 1) -> NamedGeometry:
    return NamedGeometry("Cone", cone_warp(side).metric(), dict(side=side))


# ---------------------------------------------------------------------------
# closed-form classifications
# ---------------------------------------------------------------------------
class SphereLinearClass(str, Enum):
    CONSTANT = "ConstantMap"
    CONFORMAL = "HarmonicConformal"
    NOT = "NotBiharmonic"

    def __str__(self) -> str:
        return self.value


class HyperbolicLinearClass(str, Enum):
    AB0 = "BiharmonicFamily_ab0"
    IDENTITY = "IdentityBranch"
    NOT = "NotBiharmonic"

    def __str__(self) -> str:
        return self.value


def _zero(v) -> bool:
    return abs(v) <= COEFF_ZERO


def sphere_linear_is_biharmonic(c) -> SphereLinearClass:
    """Biharmonic linear maps between stereographic spheres are constant or conformal."""
    c = _coeffs(c)
    if all(_zero(v) for v in c.as_tuple()):
        return SphereLinearClass.CONSTANT
    A1, A2 = c.A1, c.A2
    if _zero(A1 @ A1 - A2 @ A2) and _zero(A1 @ A2):
        return SphereLinearClass.CONFORMAL
    return SphereLinearClass.NOT


def hyperbolic_linear_is_biharmonic(c) -> tuple[HyperbolicLinearClass, bool]:
    """Class of a linear self-map of the hyperbolic chart and whether it is proper."""
    c = _coeffs(c)
    if _zero(c.a) and _zero(c.b):
        return HyperbolicLinearClass.AB0, not _zero(c.d)
    if _zero(abs(c.a) - 1) and _zero(c.b) and _zero(c.c) and _zero(c.d - 1):
        return HyperbolicLinearClass.IDENTITY, False
    return HyperbolicLinearClass.NOT, False


def sphere_expected_verdict(c) -> str:
    cls = sphere_linear_is_biharmonic(c)
    return Verdict.NOT.value if cls is SphereLinearClass.NOT else Verdict.HARMONIC.value


def hyperbolic_expected_verdict(c) -> str:
    cls, proper = hyperbolic_linear_is_biharmonic(c)
    if cls is HyperbolicLinearClass.NOT:
        return Verdict.NOT.value
    return Verdict.PROPER.value if proper else Verdict.HARMONIC.value


def gu8_residual(c, z):
    """``-2 w^2 + 3 zbar w phi_zbar + 3 z w phi_z - 6 z zbar phi_z phi_zbar`` with w = phi(z)."""
    c = _coeffs(c)
    z = np.asarray(z, dtype=complex)
    pz, pzb = c.phi_z, c.phi_zbar
    zb = np.conj(z)
    w = pz * z + pzb * zb
    return -2 * w * w + 3 * zb * w * pzb + 3 * z * w * pz - 6 * z * zb * pz * pzb


def eq25_system(c) -> tuple:
    """The six coefficient polynomials equivalent to the gu8 identity, in printed order."""
    a, b, cc, d = _coeffs(c).as_tuple()
    return (
        -0.5 * a * a - 1.5 * b * b + 0.5 * cc * cc + 1.5 * d * d,
        2 * a * b - 2 * cc * d,
        -1.5 * a * a - 0.5 * b * b + 1.5 * cc * cc + 0.5 * d * d,
        -a * cc - 3 * b * d,
        2 * b * cc + 2 * a * d,
        -3 * a * cc - b * d,
    )


def eq14_lhs(c, x, y) -> tuple:
    """Both component equations of the hyperbolic linear-map bitension system.

    They coincide with the two components of the coordinate bitension at
    ``(x, y)``, with ``v = c x + d y`` the second image coordinate.
    """
    a, b, cc, d = _coeffs(c).as_tuple()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = cc * x + d * y
    e = np.exp
    first = ((-4 * a * cc + 4 * a * cc * d) * e(2 * y) + 8 * a**3 * cc * e(4 * y - 2 * v)
             + (8 * a * b * b * cc - 2 * a * a * b + 8 * a * a * b * d) * e(2 * y - 2 * v)
             + (8 * b**3 * d + 2 * b**3) * e(-2 * v) - 2 * b * d - 4 * b * d * d)
    second = ((8 * b * b * d + 8 * b * b * d * d + b * b) * e(-2 * v)
              + 8 * a * a * cc * cc * e(4 * y - 2 * v) - 2 * b**4 * e(-4 * v)
              - 4 * a * a * b * b * e(2 * y - 4 * v) - 2 * a**4 * e(4 * y - 4 * v)
              + (2 * a * a + 4 * b * b * cc * cc - 4 * a * a * d + 4 * a * a * d * d
                 - 4 * a * b * cc + 8 * a * b * cc * d) * e(2 * y - 2 * v))
    return first, second


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------
@dataclass
class Fixture:
    """Everything needed to classify one concrete map."""

    map: SmoothMap2
    domain: Metric2
    target: Metric2
    rect: Rect
    rho: ScalarField2 | None = None      # conformal factors when both metrics are conformal
    sigma: ScalarField2 | None = None

    @property
    def conformal(self) -> bool:
        return self.domain.form == "conformal" and self.target.form == "conformal"


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    title: str
    defaults: dict
    builder: Callable
    expected: Callable           # params -> verdict string
    provenance: str              # "paper", "derived" or "trivial"
    linear: bool = False         # map is linear with coefficients a, b, c, d
    note: str = ""

    def params(self, overrides: dict | None = None) -> dict:
        out = dict(self.defaults)
        for k, v in (overrides or {}).items():
            if k not in out:
                raise ParameterError(f"{self.id} has no parameter {k!r}; known: {sorted(out)}")
            out[k] = float(v)
        return out

    def build(self, overrides: dict | None = None) -> Fixture:
        return self.builder(self.params(overrides))

    def expected_verdict(self, overrides: dict | None = None) -> str:
        return self.expected(self.params(overrides))


def _square(h: float) -> Rect:
    return Rect(-h, h, -h, h)


def _abcd(p) -> LinearMapCoeffs:
    return LinearMapCoeffs(p["a"], p["b"], p["c"], p["d"])


def _conformal_fixture(fmap, gM, gN, rect) -> Fixture:
    return Fixture(fmap, gM, gN, rect, gM.rho, gN.rho)


# flat identity ---------------------------------------------------------------
def _flat_identity(p):
    return _conformal_fixture(identity_map(), FLAT_PLANE, FLAT_PLANE, _square(1.0))


# sphere ----------------------------------------------------------------------
SPHERE = sphere_model().metric


def _sphere_linear(p):
    return _conformal_fixture(make_linear_map(_abcd(p)), SPHERE, SPHERE, _square(1.0))


# anti-bianalytic target --------------------------------------------------------
#: fraction of p/|q| allowed for u^2 on the target square when q < 0
ANTIBIANALYTIC_FILL = 0.45
#: keeps images clear of the grid margin at the target edge
TARGET_CLEARANCE = 0.15


def antibianalytic_target_half(p: float, q: float) -> float:
    """Half-width of the target square for q < 0; sigma >= (1 - 2 fill) p on it."""
    return math.sqrt(ANTIBIANALYTIC_FILL * p / abs(q))


def antibianalytic_rect(c, p: float, q: float) -> Rect:
    """Square domain whose image stays inside the target square when q < 0."""
    c = _coeffs(c)
    if q >= 0:
        return _square(1.0)
    reach = max(abs(c.a) + abs(c.b), abs(c.c) + abs(c.d))
    if reach == 0:
        return _square(1.0)
    s = antibianalytic_target_half(p, q)
    room = s - TARGET_CLEARANCE if s > 2 * TARGET_CLEARANCE else 0.5 * s
    return _square(min(1.0, room / reach))


def antibianalytic_expected(c, q: float) -> str:
    c = _coeffs(c)
    pq = c.phi_z * c.phi_zbar
    if _zero(q) or _zero(abs(pq)):
        return Verdict.HARMONIC.value
    return Verdict.PROPER.value


def _antibianalytic_linear(p):
    c = _abcd(p)
    rect = antibianalytic_rect(c, p["p"], p["q"])
    if p["q"] < 0:
        trect = _square(antibianalytic_target_half(p["p"], p["q"]))
    else:
        trect = Rect.everywhere()
    target = hyperbolic_conformal_target(p["p"], p["q"], trect).metric
    return _conformal_fixture(make_linear_map(c), FLAT_PLANE, target, rect)


# hyperbolic ------------------------------------------------------------------
HYPERBOLIC = hyperbolic_model().metric


def _hyperbolic_linear(p):
    return Fixture(make_linear_map(_abcd(p)), HYPERBOLIC, HYPERBOLIC, _square(1.0))


# warped profiles -------------------------------------------------------------
PROFILE_X = 2.0
PROFILE_MARGIN = 0.1


def _profile_rect(interval, half: float = PROFILE_X) -> Rect:
    lo, hi = interval
    x0 = max(-half, lo + PROFILE_MARGIN)
    x1 = min(half, hi - PROFILE_MARGIN)
    if not x1 > x0:
        raise ParameterError(f"profile interval {interval} leaves no room for a grid")
    return Rect(x0, x1, -1.0, 1.0)


def _profile_fixture(f: ProfileFunction, w: WarpProfile) -> Fixture:
    return Fixture(f.as_map(), FLAT_PLANE, w.metric(), _profile_rect(f.interval))


def _lemaire_profile(p):
    f = lemaire_family(p["A"], p["B"], p["C"], p["D"], p["a"])
    return _profile_fixture(f, lemaire_warp(p["a"]))


def _helicoid_profile(p):
    return _profile_fixture(helicoid_family(p["A"], p["B"], p["C"], p["D"]), helicoid_warp(p["a"]))


def _cone_side(f: ProfileFunction) -> int:
    lo, hi = f.interval
    mid = 0.5 * (max(lo, -PROFILE_X) + min(hi, PROFILE_X))
    return 1 if f(mid) > 0 else -1


def _cone_profile(p):
    f = cone_family(p["A"], p["B"], p["C"], p["D"])
    return _profile_fixture(f, cone_warp(_cone_side(f)))


def _lemaire_expected(p):
    return Verdict.HARMONIC.value if _zero(p["C"]) else Verdict.PROPER.value


def _bd_expected(p):
    return Verdict.HARMONIC.value if _zero(p["B"]) and _zero(p["D"]) else Verdict.PROPER.value


# isothermal versions of the warped targets (both routes apply) -----------------
def _isothermal_fixture(f: ProfileFunction, rho_target: Callable, to_s: Callable, srange) -> Fixture:
    """``(s(f(x)), y)`` into ``rho_target(s)^2 (ds^2 + dv^2)``."""
    lo, hi = srange
    target = conformal(lambda s, v: rho_target(s), Rect(lo, hi, -INF, INF), name="isothermal")
    fmap = SmoothMap2(lambda x, y: (to_s(f.f(x)), y), name=f"isothermal({f.name})")
    return _conformal_fixture(fmap, FLAT_PLANE, target, _profile_rect(f.interval))


def _helicoid_isothermal(p):
    # u = a sinh s turns du^2 + (a^2 + u^2) dv^2 into (a cosh s)^2 (ds^2 + dv^2)
    a = p["a"]
    f = helicoid_family(p["A"], p["B"], p["C"], p["D"])
    return _isothermal_fixture(f, lambda s: a * jm.cosh(s), lambda u: jm.arcsinh(u / a), (-INF, INF))


def _lemaire_isothermal(p):
    # u = a sin s turns du^2 + (a^2 - u^2) dv^2 into (a cos s)^2 (ds^2 + dv^2)
    a = p["a"]
    f = lemaire_family(p["A"], p["B"], p["C"], p["D"], a)
    return _isothermal_fixture(f, lambda s: a * jm.cos(s), lambda u: jm.arcsin(u / a),
                               (-math.pi / 2, math.pi / 2))


def _cone_isothermal(p):
    # |u| = e^{s/r2} turns du^2 + (u^2/2) dv^2 into (e^{s/r2}/r2)^2 (ds^2 + dv^2)
    r2 = math.sqrt(2.0)
    f = cone_family(p["A"], p["B"], p["C"], p["D"])
    side = _cone_side(f)
    return _isothermal_fixture(f, lambda s: jm.exp(s / r2) / r2, lambda u: r2 * jm.log(u * side),
                               (-INF, INF))


# polynomial conformal fixtures ---------------------------------------------------
def _poly_map(p):
    k = p["k"]
    return SmoothMap2(lambda x, y: (x + k * x * y - 0.3 * y * y * y, y + 0.5 * k * x * x + 0.2 * x * y),
                      name=f"poly(k={k!r})")


def _sphere_poly(p):
    return _conformal_fixture(_poly_map(p), SPHERE, SPHERE, _square(1.0))


def _antibianalytic_poly(p):
    target = hyperbolic_conformal_target(1.0, 1.0).metric
    return _conformal_fixture(_poly_map(p), FLAT_PLANE, target, _square(1.0))


def _sphere_holomorphic(p):
    # z -> z^2 + k z is holomorphic, hence harmonic between any conformal metrics
    k = p["k"]
    fmap = SmoothMap2(lambda x, y: (x * x - y * y + k * x, 2 * x * y + k * y), name="holomorphic")
    return _conformal_fixture(fmap, SPHERE, SPHERE, _square(1.0))


def _flat_poly(p):
    # x |z|^2 has harmonic Laplacian 8x, so the map is biharmonic between flat planes
    k = p["k"]
    fmap = SmoothMap2(lambda x, y: (x + k * x * (x * x + y * y), y), name=f"flat-poly(k={k!r})")
    return _conformal_fixture(fmap, FLAT_PLANE, FLAT_PLANE, _square(1.0))


def _flat_poly_expected(p):
    return Verdict.HARMONIC.value if _zero(p["k"]) else Verdict.PROPER.value


# identity into warped factors ----------------------------------------------------
def _identity_rect(domain) -> Rect:
    lo, hi = domain
    lo, hi = max(lo, -PROFILE_X), min(hi, PROFILE_X)
    margin = min(PROFILE_MARGIN, 0.1 * (hi - lo))
    return Rect(lo + margin, hi - margin, -1.0, 1.0)


def identity_case(kind: str, p) -> IdentityFactorCase:
    if kind == "rational":
        return IdentityFactorCase.rational(p["c1"], anchor=p["anchor"] if "anchor" in p else None)
    if kind == "trigonometric":
        return IdentityFactorCase.trigonometric(p["a"], p["c1"], p["c2"], p["anchor"])
    return IdentityFactorCase.hyperbolic(p["b"], p["c1"], p["c2"], p["anchor"])


def _identity_builder(kind):
    def build(p):
        fac = identity_factor(identity_case(kind, p))
        return Fixture(identity_map(), FLAT_PLANE, fac.warp.metric(), _identity_rect(fac.domain))
    return build


def _const(verdict: Verdict):
    return lambda p: verdict.value


_ENTRIES = [
    CatalogEntry("flat-identity", "identity map of the flat plane", {}, _flat_identity,
                 _const(Verdict.HARMONIC), "trivial"),
    CatalogEntry("sphere-linear", "linear map between stereographic spheres",
                 dict(a=1.0, b=0.0, c=0.0, d=2.0), _sphere_linear,
                 lambda p: sphere_expected_verdict(_abcd(p)), "paper", linear=True),
    CatalogEntry("hyperbolic-linear", "linear map of the hyperbolic chart e^{-2y}dx^2+dy^2",
                 dict(a=0.0, b=0.0, c=3.0, d=2.0), _hyperbolic_linear,
                 lambda p: hyperbolic_expected_verdict(_abcd(p)), "paper", linear=True),
    CatalogEntry("antibianalytic-linear", "linear map of the flat plane into (p+q(u^2+v^2))^2|dw|^2",
                 dict(a=2.0, b=0.0, c=0.0, d=1.0, p=1.0, q=1.0), _antibianalytic_linear,
                 lambda p: antibianalytic_expected(_abcd(p), p["q"]), "paper", linear=True),
    CatalogEntry("lemaire-profile", "(A cos(x+B) + C x cos(x+D), y) into du^2+(a^2-u^2)dv^2",
                 dict(A=1.0, B=0.0, C=0.1, D=0.0, a=3.0), _lemaire_profile, _lemaire_expected, "paper"),
    CatalogEntry("helicoid-profile", "((A+Bx)e^x + (C+Dx)e^-x, y) into du^2+(a^2+u^2)dv^2",
                 dict(A=1.0, B=1.0, C=0.0, D=0.0, a=1.0), _helicoid_profile, _bd_expected, "paper"),
    CatalogEntry("cone-profile", "((A+Bx)e^{x/r2} + (C+Dx)e^{-x/r2}, y) into du^2+(u^2/2)dv^2",
                 dict(A=1.0, B=1.0, C=0.0, D=0.0), _cone_profile, _bd_expected, "paper"),
    CatalogEntry("identity-rational", "identity into dx^2 + (-4 ln|x+c1|) dy^2",
                 dict(c1=0.0), _identity_builder("rational"), _const(Verdict.PROPER), "paper"),
    CatalogEntry("identity-trigonometric", "identity into dx^2 + (c2 - 4 ln|cos(a x/2 + c1)|) dy^2",
                 dict(a=2.0, c1=0.0, c2=10.0, anchor=0.0), _identity_builder("trigonometric"),
                 _const(Verdict.PROPER), "paper"),
    CatalogEntry("identity-hyperbolic",
                 "identity into dx^2 + (c2 - 4 ln|e^{bx/2} - c1 e^{-bx/2}|) dy^2",
                 dict(b=1.0, c1=-1.0, c2=5.0, anchor=0.0), _identity_builder("hyperbolic"),
                 _const(Verdict.PROPER), "paper",
                 note="sigma^2 integrates 2y exactly; the printed factor b is dropped"),
    CatalogEntry("helicoid-isothermal", "helicoid profile map in isothermal target coordinates",
                 dict(A=1.0, B=1.0, C=0.0, D=0.0, a=1.0), _helicoid_isothermal, _bd_expected, "derived"),
    CatalogEntry("lemaire-isothermal", "sphere-chart profile map in isothermal target coordinates",
                 dict(A=1.0, B=0.0, C=0.1, D=0.0, a=3.0), _lemaire_isothermal, _lemaire_expected,
                 "derived"),
    CatalogEntry("cone-isothermal", "cone profile map in isothermal target coordinates",
                 dict(A=1.0, B=1.0, C=0.0, D=0.0), _cone_isothermal, _bd_expected, "derived"),
    CatalogEntry("sphere-poly", "cubic polynomial map between stereographic spheres",
                 dict(k=0.7), _sphere_poly, _const(Verdict.NOT), "derived"),
    CatalogEntry("antibianalytic-poly", "cubic polynomial map into (1+u^2+v^2)^2|dw|^2",
                 dict(k=0.7), _antibianalytic_poly, _const(Verdict.NOT), "derived"),
    CatalogEntry("sphere-holomorphic", "z -> z^2 + k z between stereographic spheres",
                 dict(k=0.5), _sphere_holomorphic, _const(Verdict.HARMONIC), "trivial"),
    CatalogEntry("flat-poly", "(x + k x (x^2+y^2), y) between flat planes",
                 dict(k=0.5), _flat_poly, _flat_poly_expected, "derived"),
]

CATALOG: dict[str, CatalogEntry] = {e.id: e for e in _ENTRIES}


def get_entry(family_id: str) -> CatalogEntry:
    try:
        return CATALOG[family_id]
    except KeyError:
        raise UnknownFamily(f"unknown catalog id {family_id!r}; known: {', '.join(CATALOG)}") from None


def list_entries() -> list[CatalogEntry]:
    return list(CATALOG.values())
