"""Metrics on 2D charts: components, Christoffel symbols, curvature.

Index conventions (0-based in code, 1-based in the docs):

* ``gamma[..., k, i, j]`` is the Christoffel symbol Gamma^k_{ij};
* ``r[..., l, k, i, j]`` is R^l_{kij}, the d/dx^l component of
  R(d_i, d_j) d_k with R(X, Y) Z = [nabla_X, nabla_Y] Z - nabla_[X, Y] Z.

With this sign a surface of Gauss curvature K has R^1_{212} = K g_22.
All evaluators are vectorized: ``p = (x, y)`` may hold arrays of any
broadcastable shape, and results carry those batch axes first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as jm
from .errors import SingularMetric, UnsupportedForm
from .fields import DEFAULT_RECT, Rect, ScalarField2, as_field, fd_jet
from .jets import Jet


class Metric2:
    """Riemannian metric on a 2D chart with an explicit validity rectangle."""

    form = "general"

    rect: Rect

    @property
    def analytic(self) -> bool:
        raise NotImplementedError

    def component_jets(self, x, y, order: int) -> tuple[Jet, Jet, Jet]:
        """Jets of ``(g11, g12, g22)`` about the points ``(x, y)``."""
        raise NotImplementedError

    def check_domain(self, x, y) -> None:
        self.rect.check(x, y, what=f"{self.form} metric point")


@dataclass(frozen=True, eq=False)
class ConformalMetric(Metric2):
    """``rho(x, y)**2 (dx**2 + dy**2)``; the chart is read as ``z = x + i y``."""

    rho: ScalarField2
    rect: Rect = DEFAULT_RECT
    name: str = "conformal"
    form = "conformal"

    @property
    def analytic(self) -> bool:
        return self.rho.analytic

    def component_jets(self, x, y, order):
        r = self.rho.jet(x, y, order)
        if np.any(~(r.value > 0)):
            raise SingularMetric(f"conformal factor of {self.name!r} is not positive at a query point")
        r2 = r * r
        return r2, r2 * 0.0, r2


@dataclass(frozen=True, eq=False)
class WarpedMetric(Metric2):
    """``du**2 + sigma(u)**2 dv**2`` with ``sigma`` a function of ``u`` alone."""

    sigma: Callable
    rect: Rect = DEFAULT_RECT
    name: str = "warped"
    analytic_sigma: bool = True
    form = "warped"

    @property
    def analytic(self) -> bool:
        return self.analytic_sigma

    def component_jets(self, x, y, order):
        if self.analytic_sigma:
            U = Jet.variable(np.asarray(x, dtype=float), 0, order)
            shape = np.broadcast_shapes(np.shape(x), np.shape(y))
            s = self.sigma(U)
            G = s * s
            G = Jet(np.array(np.broadcast_to(G.c, shape + G.c.shape[-2:])), order)
        else:
            G = fd_jet(lambda u, v: self.sigma(u) ** 2 + 0 * v, x, y, order)
        one = Jet.constant(np.ones(G.shape), order)
        return one, one * 0.0, G


@dataclass(frozen=True, eq=False)
class GeneralMetric(Metric2):
    """Arbitrary symmetric ``g11 dx**2 + 2 g12 dx dy + g22 dy**2``."""

    g11: ScalarField2
    g12: ScalarField2
    g22: ScalarField2
    rect: Rect = DEFAULT_RECT
    name: str = "general"
    form = "general"

    @property
    def analytic(self) -> bool:
        return self.g11.analytic and self.g12.analytic and self.g22.analytic

    def component_jets(self, x, y, order):
        return (self.g11.jet(x, y, order), self.g12.jet(x, y, order), self.g22.jet(x, y, order))


def conformal(rho, rect: Rect | None = None, name: str = "conformal") -> ConformalMetric:
    return ConformalMetric(as_field(rho), rect or DEFAULT_RECT, name)


def warped(sigma: Callable, rect: Rect | None = None, name: str = "warped",
           analytic: bool = True) -> WarpedMetric:
    return WarpedMetric(sigma, rect or DEFAULT_RECT, name, analytic)


def general(g11, g12, g22, rect: Rect | None = None, name: str = "general") -> GeneralMetric:
    return GeneralMetric(as_field(g11), as_field(g12), as_field(g22), rect or DEFAULT_RECT, name)


def as_general(m: Metric2) -> GeneralMetric:
    """The same metric re-expressed through its three components."""
    def component(index):
        def f(x, y):
            if isinstance(x, Jet):
                return m.component_jets(x.value, y.value, x.order)[index].compose(x, y)
            return m.component_jets(x, y, 0)[index].value
        return ScalarField2(f, analytic=m.analytic)
    return GeneralMetric(component(0), component(1), component(2), m.rect, f"{m.name}-as-general")


# ---------------------------------------------------------------------------
# jet-level building blocks shared with the map calculus
# ---------------------------------------------------------------------------
@dataclass
class MetricJets:
    g: list            # g[i][j] jets
    ginv: list         # inverse metric jets
    det: Jet
    gamma: list | None = field(default=None)  # gamma[k][i][j] jets, one order lower


def metric_jets(m: Metric2, x, y, order: int, with_christoffel: bool = True) -> MetricJets:
    """Component, inverse and Christoffel jets; validates domain and definiteness."""
    m.check_domain(x, y)
    g11, g12, g22 = m.component_jets(x, y, order)
    det = g11 * g22 - g12 * g12
    check_positive(g11.value, det.value, m)
    inv_det = det.reciprocal()
    g = [[g11, g12], [g12, g22]]
    ginv = [[g22 * inv_det, -g12 * inv_det], [-g12 * inv_det, g11 * inv_det]]
    out = MetricJets(g, ginv, det)
    if with_christoffel and order >= 1:
        out.gamma = christoffel_jets(g, ginv)
    return out


def check_positive(g11, det, m: Metric2 | None = None) -> None:
    ok = (np.asarray(g11) > 0) & (np.asarray(det) > 0)
    if not np.all(ok):
        label = f" ({m.name})" if m is not None else ""
        raise SingularMetric(f"metric{label} not positive-definite at {np.count_nonzero(~ok)} point(s)")


def christoffel_jets(g, ginv) -> list:
    """Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij), one order lower."""
    n = g[0][0].order - 1
    dg = [[[g[i][j].deriv(l) for l in range(2)] for j in range(2)] for i in range(2)]
    gi = [[ginv[a][b].truncate(n) for b in range(2)] for a in range(2)]
    first = [[[(dg[j][l][i] + dg[i][l][j] - dg[i][j][l]) * 0.5 for j in range(2)]
              for i in range(2)] for l in range(2)]  # first[l][i][j]
    return [[[gi[k][0] * first[0][i][j] + gi[k][1] * first[1][i][j] for j in range(2)]
             for i in range(2)] for k in range(2)]


def stack(nested) -> np.ndarray:
    """Nested lists of jets (or arrays) -> array of base values, index axes last."""
    def value(obj):
        if isinstance(obj, Jet):
            return obj.value, 0
        if isinstance(obj, (list, tuple)):
            parts = [value(o) for o in obj]
            return np.stack(np.broadcast_arrays(*[a for a, _ in parts]), axis=0), parts[0][1] + 1
        return np.asarray(obj), 0
    arr, depth = value(nested)
    return np.moveaxis(arr, tuple(range(depth)), tuple(range(-depth, 0)))


def riemann_from_gamma(gamma_jets) -> np.ndarray:
    """R^l_{kij} values from order >= 1 Christoffel jets."""
    gam = stack(gamma_jets)                      # [..., k, i, j]
    dgam = stack([[[[gamma_jets[k][i][j].deriv(a) for a in range(2)] for j in range(2)]
                   for i in range(2)] for k in range(2)])  # [..., l, j, k, a] = d_a Gamma^l_jk
    # R^l_kij = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    r = (np.einsum("...ljki->...lkij", dgam) - np.einsum("...likj->...lkij", dgam)
         + np.einsum("...lim,...mjk->...lkij", gam, gam)
         - np.einsum("...ljm,...mik->...lkij", gam, gam))
    return r


# ---------------------------------------------------------------------------
# public evaluators
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class MetricValues:
    g: np.ndarray      # [..., 2, 2]
    ginv: np.ndarray   # [..., 2, 2]
    det: np.ndarray


@dataclass(frozen=True)
class Christoffel2:
    gamma: np.ndarray  # [..., k, i, j]

    def __getitem__(self, idx):
        k, i, j = idx
        return self.gamma[..., k, i, j]


@dataclass(frozen=True)
class Curvature2:
    r: np.ndarray      # [..., l, k, i, j]

    def __getitem__(self, idx):
        l, k, i, j = idx
        return self.r[..., l, k, i, j]


def _xy(p):
    x, y = p
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def eval_metric(m: Metric2, p) -> MetricValues:
    x, y = _xy(p)
    mj = metric_jets(m, x, y, 0, with_christoffel=False)
    return MetricValues(stack(mj.g), stack(mj.ginv), mj.det.value)


def christoffel(m: Metric2, p) -> Christoffel2:
    x, y = _xy(p)
    mj = metric_jets(m, x, y, 1)
    return Christoffel2(stack(mj.gamma))


def curvature(m: Metric2, p) -> Curvature2:
    x, y = _xy(p)
    mj = metric_jets(m, x, y, 2)
    return Curvature2(riemann_from_gamma(mj.gamma))


def gauss_curvature(m: Metric2, p, formula: str | None = None) -> np.ndarray:
    """Gauss curvature by one of three routes.

    ``"complex"``: K = -4 rho^-2 (ln rho)_{z zbar}, conformal metrics only.
    ``"efg"``: the orthogonal-coordinates formula in E, G (conformal, warped).
    ``"riemann"``: K = R_{1212} / det g from the curvature tensor, any form.
    The default picks the first route that applies.
    """
    if formula is None:
        formula = {"conformal": "complex", "warped": "efg"}.get(m.form, "riemann")
    x, y = _xy(p)
    if formula == "complex":
        if m.form != "conformal":
            raise UnsupportedForm(f"complex curvature formula needs a conformal metric, got {m.form}")
        m.check_domain(x, y)
        rho = m.rho.jet(x, y, 2)
        check_positive(rho.value, rho.value, m)
        L = jm.log(rho)
        lap = 2 * L.coeff(2, 0) + 2 * L.coeff(0, 2)       # 4 (ln rho)_{z zbar}
        return -lap / rho.value ** 2
    if formula == "efg":
        if m.form not in ("conformal", "warped"):
            raise UnsupportedForm("the E, G formula needs an orthogonal (conformal or warped) metric")
        mj = metric_jets(m, x, y, 2, with_christoffel=False)
        sE = jm.sqrt(mj.g[0][0])
        sG = jm.sqrt(mj.g[1][1])
        a = (sG.deriv(0) / sE.truncate(1)).deriv(0)
        b = (sE.deriv(1) / sG.truncate(1)).deriv(1)
        return -(a.value + b.value) / (sE.value * sG.value)
    if formula == "riemann":
        mj = metric_jets(m, x, y, 2)
        r = riemann_from_gamma(mj.gamma)
        g = stack(mj.g)
        r_low = np.einsum("...a,...a->...", g[..., 0, :], r[..., :, 1, 0, 1])
        return r_low / mj.det.value
    raise ValueError(f"unknown curvature formula {formula!r}")
