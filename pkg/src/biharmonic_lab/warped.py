"""Maps ``(x, y) -> (f(x), y)`` into warped products ``du^2 + sigma(u)^2 dv^2``.

For such maps from the flat plane the bitension has one nontrivial
component, which reduces to the fourth-order ODE

    (f'' - S(f))'' - (f'' - S(f)) S'(f) = 0,      S = sigma sigma' = (sigma^2 / 2)'.

This module evaluates that residual from exact jets, provides the closed-form
solution families for the round-sphere (sigma^2 = a^2 - u^2), helicoid
(sigma^2 = a^2 + u^2) and cone (sigma^2 = u^2 / 2) targets, and the conformal
factors that make the identity map biharmonic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as jm
from .errors import DomainError, EmptyDomain, ParameterError
from .fields import Rect
from .geometry import WarpedMetric, conformal
from .jets import Jet
from .map_calculus import FieldVector2, SmoothMap2, bitension_general

INF = math.inf


def _jet1(func: Callable, x, order: int) -> Jet:
    """Jet of a one-variable jet-aware callable in the first slot."""
    X = Jet.variable(np.asarray(x, dtype=float), 0, order)
    out = func(X)
    if not isinstance(out, Jet):
        out = Jet.constant(np.broadcast_to(np.asarray(out, dtype=float), X.shape), order)
    return out


def _derivs1(func: Callable, x, order: int) -> list[np.ndarray]:
    j = _jet1(func, x, order)
    return [j.partial(k, 0) for k in range(order + 1)]


def _check_open(interval, x, what):
    lo, hi = interval
    x = np.asarray(x, dtype=float)
    ok = (x > lo) & (x < hi)
    if not np.all(ok):
        raise DomainError(f"{what} outside the open interval ({lo}, {hi})")


@dataclass(frozen=True)
class WarpProfile:
    """Warp ``sigma(u)`` (jet-aware) with its open validity interval."""

    sigma: Callable
    interval: tuple = (-INF, INF)
    name: str = "warp"
    #: closed form of sigma^2 valid for every u (lets the ODE be read formally)
    sigma_sq: Callable | None = None

    def sigma_sq_half(self, u):
        if self.sigma_sq is not None:
            return self.sigma_sq(u) * 0.5
        s = self.sigma(u)
        return s * s * 0.5

    def s_derivs(self, u, order: int = 3) -> list[np.ndarray]:
        """``[sigma^2/2, S, S', S'']`` at ``u`` where ``S = sigma sigma'``."""
        return _derivs1(self.sigma_sq_half, u, order)

    def check(self, u) -> None:
        _check_open(self.interval, u, f"warp argument u for {self.name}")

    def metric(self) -> WarpedMetric:
        lo, hi = self.interval
        return WarpedMetric(self.sigma, Rect(lo, hi, -INF, INF), self.name)


@dataclass(frozen=True)
class ProfileFunction:
    """Profile ``f(x)`` (jet-aware) with its open validity interval."""

    f: Callable
    interval: tuple = (-INF, INF)
    name: str = "profile"
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.f(np.asarray(x, dtype=float))

    def derivs(self, x, order: int = 4) -> list[np.ndarray]:
        return _derivs1(self.f, x, order)

    def check(self, x) -> None:
        _check_open(self.interval, x, f"x for profile {self.name}")

    def as_map(self) -> SmoothMap2:
        return SmoothMap2(lambda x, y: (self.f(x), y), name=f"({self.name}, y)")


# ---------------------------------------------------------------------------
# warps
# ---------------------------------------------------------------------------
def lemaire_warp(a: float) -> WarpProfile:
    """sigma^2 = a^2 - u^2 on |u| < a (the round sphere of radius a)."""
    if a <= 0:
        raise ParameterError("a must be positive")
    return WarpProfile(lambda u: jm.sqrt(a * a - u * u), (-a, a), f"lemaire(a={a!r})",
                       lambda u: a * a - u * u)


def helicoid_warp(a: float) -> WarpProfile:
    """sigma^2 = a^2 + u^2, the helicoid in its ruled parametrization."""
    if a <= 0:
        raise ParameterError("a must be positive")
    return WarpProfile(lambda u: jm.sqrt(a * a + u * u), (-INF, INF), f"helicoid(a={a!r})",
                       lambda u: a * a + u * u)


def cone_warp(side: int = 1) -> WarpProfile:
    """sigma^2 = u^2 / 2 on one side of the apex u = 0."""
    if side not in (1, -1):
        raise ParameterError("side must be +1 or -1")
    k = side / math.sqrt(2.0)
    interval = (0.0, INF) if side > 0 else (-INF, 0.0)
    return WarpProfile(lambda u: u * k, interval, "cone" if side > 0 else "cone(u<0)",
                       lambda u: u * u * 0.5)


# ---------------------------------------------------------------------------
# the reduced ODE
# ---------------------------------------------------------------------------
def se1_residual(f: ProfileFunction, w: WarpProfile, x, formal: bool = False):
    """``(f'' - S(f))'' - (f'' - S(f)) S'(f)`` by the chain rule on exact jets.

    With ``formal=True`` and a warp that carries a closed-form ``sigma_sq``
    the image may leave the warp interval: the ODE only involves sigma^2.
    """
    f.check(x)
    d = f.derivs(x, 4)
    if not (formal and w.sigma_sq is not None):
        w.check(d[0])
    _, s1, s2, s3 = w.s_derivs(d[0], 3)
    t = d[2] - s1
    t2 = d[4] - s3 * d[1] ** 2 - s2 * d[2]
    return t2 - t * s2


def reduced_tension(f: ProfileFunction, w: WarpProfile, x):
    """First tension component ``f'' - sigma'(f) sigma(f)``; the second is zero."""
    f.check(x)
    d = f.derivs(x, 2)
    w.check(d[0])
    return d[2] - w.s_derivs(d[0], 1)[1]


FLAT_PLANE = conformal(1.0, Rect.everywhere(), name="flat")


def reduced_map_bitension(f: ProfileFunction, w: WarpProfile, p) -> FieldVector2:
    """Bitension of ``(x, y) -> (f(x), y)`` through the general coordinate formula."""
    x, y = p
    f.check(x)
    w.check(f(x))
    return bitension_general(f.as_map(), FLAT_PLANE, w.metric(), (x, y))


# ---------------------------------------------------------------------------
# solution families
# ---------------------------------------------------------------------------
def lemaire_family(A: float, B: float, C: float, D: float, a: float) -> ProfileFunction:
    """``f = A cos(x + B) + C x cos(x + D)``; solves f'''' + 2 f'' + f = 0.

    The interval ``|x| < (a - |A|) / |C|`` keeps ``|f| < a``.
    """
    if a <= 0:
        raise ParameterError("a must be positive")
    if abs(A) >= a:
        raise ParameterError(f"|A| = {abs(A)!r} must be below a = {a!r}")
    r = (a - abs(A)) / abs(C) if C != 0 else INF
    return ProfileFunction(lambda x: A * jm.cos(x + B) + C * x * jm.cos(x + D), (-r, r),
                           "lemaire", dict(A=A, B=B, C=C, D=D, a=a))


def helicoid_family(A: float, B: float, C: float, D: float) -> ProfileFunction:
    """``f = (A + B x) e^x + (C + D x) e^-x``; solves f'''' - 2 f'' + f = 0."""
    return ProfileFunction(lambda x: (A + B * x) * jm.exp(x) + (C + D * x) * jm.exp(-x),
                           (-INF, INF), "helicoid", dict(A=A, B=B, C=C, D=D))


CONE_SEARCH = 50.0


def cone_family(A: float, B: float, C: float, D: float, interval=None,
                anchor: float = 0.0) -> ProfileFunction:
    """``f = (A + B x) e^{x/r2} + (C + D x) e^{-x/r2}``; solves f'''' - f'' + f/4 = 0.

    The image must avoid the apex u = 0.  With ``interval=None`` the maximal
    interval around ``anchor`` on which f has no zero is used (searched
    within ``|x - anchor| <= 50``); an explicit interval containing a zero of
    f raises :class:`ParameterError`.
    """
    k = 1 / math.sqrt(2.0)

    def f(x):
        return (A + B * x) * jm.exp(x * k) + (C + D * x) * jm.exp(-x * k)

    # f e^{x k} is the quadratic (A + Bx) e^{2kx} ... simpler to locate zeros numerically
    params = dict(A=A, B=B, C=C, D=D)
    if interval is not None:
        lo, hi = interval
        zeros = _sign_changes(f, max(lo, -1e3), min(hi, 1e3))
        if zeros or _touches_zero(f, lo, hi):
            raise ParameterError(f"cone profile vanishes inside ({lo}, {hi}); the apex u = 0 is singular")
        return ProfileFunction(f, (lo, hi), "cone", params)
    if f(anchor) == 0:
        raise ParameterError("cone profile vanishes at the anchor point")
    lo, hi = anchor - CONE_SEARCH, anchor + CONE_SEARCH
    for z in _sign_changes(f, lo, hi):
        if z < anchor:
            lo = max(lo, z)
        else:
            hi = min(hi, z)
    return ProfileFunction(f, (lo, hi), "cone", params)


def _sign_changes(f, lo, hi, n: int = 20001) -> list[float]:
    """Zeros of ``f`` on ``[lo, hi]`` located by sign changes and bisection."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi = max(lo, -CONE_SEARCH), min(hi, CONE_SEARCH)
    xs = np.linspace(lo, hi, n)
    with np.errstate(over="ignore", invalid="ignore"):
        v = np.asarray(f(xs), dtype=float)
    out = []
    s = np.sign(v)
    for i in np.nonzero(s[:-1] * s[1:] <= 0)[0]:
        if s[i] == 0:
            out.append(float(xs[i]))
            continue
        out.append(_bisect(lambda t: np.sign(f(t)) == s[i], float(xs[i]), float(xs[i + 1])))
    return sorted(set(out))


def _touches_zero(f, lo, hi) -> bool:
    # tangential zeros (double roots) do not change sign; catch them by value
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi = max(lo, -CONE_SEARCH), min(hi, CONE_SEARCH)
    xs = np.linspace(lo, hi, 20001)[1:-1]
    return bool(np.any(np.asarray(f(xs)) == 0.0))


def _bisect(good: Callable, inside: float, outside: float, tol: float = 1e-12) -> float:
    """Boundary between a point where ``good`` holds and one where it fails."""
    while abs(outside - inside) > tol * max(1.0, abs(inside)):
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        if good(mid):
            inside = mid
        else:
            outside = mid
    return inside


# ---------------------------------------------------------------------------
# identity map into dx^2 + sigma(x)^2 dy^2
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class IdentityFactorCase:
    """One branch of the conformal factors making the identity biharmonic.

    ``kind`` is ``"rational"`` (y = -2/(x+c1)), ``"trigonometric"``
    (y = a tan(a x/2 + c1)) or ``"hyperbolic"``
    (y = -b (e^{bx/2} + c1 e^{-bx/2}) / (e^{bx/2} - c1 e^{-bx/2})), with
    ``y = sigma sigma' = (sigma^2/2)'``.  ``anchor`` selects which interval
    of positivity is used.
    """

    kind: str
    c1: float = 0.0
    a: float | None = None
    b: float | None = None
    c2: float = 0.0
    anchor: float = 0.0

    @classmethod
    def rational(cls, c1: float, anchor: float | None = None) -> IdentityFactorCase:
        return cls("rational", c1=c1, anchor=(0.5 - c1) if anchor is None else anchor)

    @classmethod
    def trigonometric(cls, a: float, c1: float, c2: float, anchor: float = 0.0) -> IdentityFactorCase:
        return cls("trigonometric", c1=c1, a=a, c2=c2, anchor=anchor)

    @classmethod
    def hyperbolic(cls, b: float, c1: float, c2: float, anchor: float = 0.0) -> IdentityFactorCase:
        return cls("hyperbolic", c1=c1, b=b, c2=c2, anchor=anchor)

    def __post_init__(self):
        if self.kind not in ("rational", "trigonometric", "hyperbolic"):
            raise ParameterError(f"unknown identity-factor case {self.kind!r}")
        if self.kind == "trigonometric" and not self.a:
            raise ParameterError("the trigonometric case needs a != 0")
        if self.kind == "hyperbolic" and not self.b:
            raise ParameterError("the hyperbolic case needs b != 0")

    def sigma2(self, x):
        """sigma^2(x); the hyperbolic branch is the antiderivative of 2y (see notes)."""
        c1, c2 = self.c1, self.c2
        if self.kind == "rational":
            return -4 * jm.log(jm.absolute(x + c1))
        if self.kind == "trigonometric":
            return -4 * jm.log(jm.absolute(jm.cos(x * (self.a / 2) + c1))) + c2
        b = self.b
        return -4 * jm.log(jm.absolute(jm.exp(x * (b / 2)) - c1 * jm.exp(x * (-b / 2)))) + c2

    def y(self, x):
        c1 = self.c1
        if self.kind == "rational":
            return -2 / (x + c1)
        if self.kind == "trigonometric":
            return self.a * jm.tan(x * (self.a / 2) + c1)
        b = self.b
        e, ei = jm.exp(x * (b / 2)), jm.exp(x * (-b / 2))
        return -b * (e + c1 * ei) / (e - c1 * ei)

    def singularities(self, lo: float, hi: float) -> list[float]:
        """Points of ``[lo, hi]`` where the formulas blow up."""
        if self.kind == "rational":
            pts = [-self.c1]
        elif self.kind == "trigonometric":
            a, c1 = self.a, self.c1
            # a x / 2 + c1 = pi/2 + k pi
            ks = np.arange(math.floor((min(a * lo, a * hi) / 2 + c1) / math.pi) - 1,
                           math.ceil((max(a * lo, a * hi) / 2 + c1) / math.pi) + 1)
            pts = list((math.pi / 2 + ks * math.pi - c1) * 2 / a)
        else:
            pts = [math.log(self.c1) / self.b] if self.c1 > 0 else []
        return sorted(float(p) for p in pts if lo <= p <= hi)

    def warp(self, domain: tuple | None = None) -> WarpProfile:
        s2 = self.sigma2
        return WarpProfile(lambda u: jm.sqrt(s2(u)), domain or (-INF, INF), f"identity-{self.kind}")


@dataclass(frozen=True)
class IdentityFactor:
    case: IdentityFactorCase
    domain: tuple
    sigma2: Callable
    y: Callable
    warp: WarpProfile


IDENTITY_SEARCH = 1e3


def identity_factor(case: IdentityFactorCase) -> IdentityFactor:
    """sigma^2, y and the maximal open interval around ``case.anchor`` where sigma^2 > 0.

    The ends are located by bisection to 1e-12.
    """
    x0 = float(case.anchor)

    def good(t):
        with np.errstate(all="ignore"):
            v = case.sigma2(np.float64(t))
        return bool(np.isfinite(v) and v > 0)

    lo_cap, hi_cap = x0 - IDENTITY_SEARCH, x0 + IDENTITY_SEARCH
    sing = case.singularities(lo_cap, hi_cap)
    if any(abs(s - x0) <= 1e-12 * max(1.0, abs(x0)) for s in sing) or not good(x0):
        raise EmptyDomain(f"sigma^2 is not positive at the anchor x = {x0!r} for {case.kind} case")
    left = max([lo_cap] + [s for s in sing if s < x0])
    right = min([hi_cap] + [s for s in sing if s > x0])
    ends = []
    for edge in (left, right):
        # march from the anchor towards the edge; the first failing sample brackets the end
        ts = x0 + (edge - x0) * (1 - np.geomspace(1, 1e-14, 400))
        prev = x0
        end = edge
        for t in ts[1:]:
            if not good(t):
                end = _bisect(good, prev, float(t))
                break
            prev = float(t)
        ends.append(end)
    lo, hi = ends
    if not hi > lo:
        raise EmptyDomain(f"no interval with sigma^2 > 0 around x = {x0!r}")
    return IdentityFactor(case, (lo, hi), case.sigma2, case.y, case.warp((lo, hi)))


def gd01_residual(y: Callable, x, interval: tuple | None = None):
    """``y'' - y y'`` for a jet-aware one-variable callable."""
    if interval is not None:
        _check_open(interval, x, "x")
    d = _derivs1(y, x, 2)
    return d[2] - d[0] * d[1]


def identity_map() -> SmoothMap2:
    return SmoothMap2(lambda x, y: (x, y), name="identity")
