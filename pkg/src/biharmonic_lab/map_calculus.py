"""Tension and bitension fields of maps between surfaces.

Two independent routes are implemented:

* the coordinate route works for any pair of metrics and evaluates
  tau^s = g^{ij} (phi^s_ij - Gamma^k_ij phi^s_k + Gbar^s_ab phi^a_i phi^b_j)
  and the component form of the bitension
  Delta tau^s + 2 g(grad tau^a, grad phi^b) Gbar^s_ab + tau^a Delta phi^b Gbar^s_ab
  + tau^a g(grad phi^b, grad phi^r) (d_r Gbar^s_ab + Gbar^n_ab Gbar^s_nr)
  - tau^n g(grad phi^a, grad phi^b) Rbar^s_{b a n};
* the complex route works for conformal metrics rho^2 |dz|^2 -> sigma^2 |dw|^2
  with w = u + i v and the Wirtinger form
  tau = 4 rho^-2 [w_{z zbar} + 2 (ln sigma)_w w_z w_zbar] and
  tau2 = 4 rho^-2 {tau_{z zbar} + 2 (ln sigma)_w [tau_z w_zbar + tau_zbar w_z
  + rho^2 tau^2 / 4] + 2 conj(tau) (ln sigma)_{w wbar} w_z w_zbar
  + 2 tau (ln sigma)_{ww} w_z w_zbar}, tau^2 being the complex square.

With exact jets the derivatives of tau come from Taylor-mode expansion, so
nothing is truncated.  Maps or metrics given as black boxes fall back to
finite differences of the tension field with Richardson extrapolation, and
the spread between the two step sizes is reported as an error estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets as jm
from .errors import DomainError, OrderUnavailable, PrecisionLoss, UnsupportedForm
from .fields import FD_STEP, Rect, ScalarField2, fd_jet
from .geometry import Metric2, metric_jets, riemann_from_gamma, stack
from .jets import Jet
from .policy import DEFAULT_TOLERANCES, Tolerances, point_class

#: outer step for differentiating a finite-difference tension field
FD_TENSION_STEP = 1e-2


class SmoothMap2:
    """A map ``(x, y) -> (u, v)`` between 2D charts.

    ``func(x, y)`` returns the pair of image coordinates.  When ``analytic``
    it must be jet-aware (see :mod:`biharmonic_lab.jets`) and jets of any
    order are exact; otherwise jets are synthesized by finite differences
    up to order 2.
    """

    def __init__(self, func: Callable, analytic: bool = True, name: str | None = None,
                 domain: Rect | None = None, fd_step: float = FD_STEP):
        self.func = func
        self.analytic = analytic
        self.name = name or getattr(func, "__name__", "map")
        self.domain = domain
        self.fd_step = fd_step

    @classmethod
    def from_components(cls, phi1: ScalarField2, phi2: ScalarField2, name: str | None = None):
        analytic = phi1.analytic and phi2.analytic
        return cls(lambda x, y: (phi1.func(x, y), phi2.func(x, y)), analytic, name)

    @property
    def jets_analytic(self) -> bool:
        return self.analytic

    def __call__(self, x, y):
        u, v = self.func(x, y)
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))
        return (np.broadcast_to(np.asarray(u, dtype=float), shape),
                np.broadcast_to(np.asarray(v, dtype=float), shape))

    def jets(self, x, y, order: int) -> tuple[Jet, Jet]:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.domain is not None:
            self.domain.check(x, y, what="map domain point")
        if not self.analytic:
            return (fd_jet(lambda a, b: self.func(a, b)[0], x, y, order, self.fd_step),
                    fd_jet(lambda a, b: self.func(a, b)[1], x, y, order, self.fd_step))
        X = Jet.variable(x, 0, order)
        Y = Jet.variable(y, 1, order)
        shape = np.broadcast_shapes(X.shape, Y.shape)
        return tuple(_full(c, order, shape) for c in self.func(X, Y))

    def __repr__(self) -> str:
        return f"SmoothMap2({self.name!r})"


def _full(obj, order, shape) -> Jet:
    if isinstance(obj, Jet):
        if obj.shape == tuple(shape):
            return obj
        full = np.broadcast_shapes(obj.shape, tuple(shape))
        return Jet(np.array(np.broadcast_to(obj.c, full + obj.c.shape[-2:])), obj.order)
    return Jet.constant(np.broadcast_to(np.asarray(obj, dtype=float), shape), order)


@dataclass(frozen=True)
class FieldVector2:
    """Components of a vector along d/du, d/dv at the image point."""

    v1: np.ndarray
    v2: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.v1, self.v2), axis=-1)

    def as_complex(self) -> np.ndarray:
        return self.v1 + 1j * self.v2

    def norm(self, h: np.ndarray) -> np.ndarray:
        """Length measured with the 2x2 target metric ``h`` (index axes last)."""
        v = self.as_array()
        return np.sqrt(np.einsum("...a,...ab,...b->...", v, h, v))


# ---------------------------------------------------------------------------
# coordinate route
# ---------------------------------------------------------------------------
@dataclass
class _TensionJets:
    tau: list          # tau[s] jets of order n
    scale: np.ndarray  # [..., 2] magnitude of the summed terms
    dphi: np.ndarray   # [..., a, i]
    lap_phi: np.ndarray
    M: np.ndarray      # g(grad phi^a, grad phi^b)
    ginv: np.ndarray
    gamma: np.ndarray  # domain Christoffel at p
    h: np.ndarray      # target metric at phi(p)
    target: object     # target MetricJets about phi(p)
    image: tuple


def _tension_jets(fmap: SmoothMap2, gM: Metric2, gN: Metric2, x, y, n: int,
                  target_order: int | None = None) -> _TensionJets:
    """Tension components as order-``n`` jets about ``(x, y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    P = fmap.jets(x, y, n + 2)
    dom = metric_jets(gM, x, y, n + 1)
    q1, q2 = P[0].value, P[1].value
    tgt = metric_jets(gN, q1, q2, target_order or n + 1)

    dP = [[P[a].deriv(i) for i in range(2)] for a in range(2)]
    ddP = [[[dP[a][i].deriv(j) for j in range(2)] for i in range(2)] for a in range(2)]
    dP = [[dP[a][i].truncate(n) for i in range(2)] for a in range(2)]
    ginv = [[dom.ginv[i][j].truncate(n) for j in range(2)] for i in range(2)]
    gam = [[[dom.gamma[k][i][j].truncate(n) for j in range(2)] for i in range(2)] for k in range(2)]

    if n == 0:
        gbar = [[[Jet.constant(tgt.gamma[s][a][b].value, 0) for b in range(2)] for a in range(2)]
                for s in range(2)]
    else:
        mons = jm.substitution_monomials(P[0], P[1], n)
        gbar = [[[tgt.gamma[s][a][b].compose(P[0], P[1], mons) for b in range(2)]
                 for a in range(2)] for s in range(2)]

    M = [[None, None], [None, None]]
    for a in range(2):
        for b in range(a, 2):
            acc = None
            for i in range(2):
                for j in range(2):
                    term = ginv[i][j] * (dP[a][i] * dP[b][j])
                    acc = term if acc is None else acc + term
            M[a][b] = M[b][a] = acc

    lap = []
    lap_scale = []
    for s in range(2):
        acc = None
        mag = 0.0
        for i in range(2):
            for j in range(2):
                hess = ddP[s][i][j] - gam[0][i][j] * dP[s][0] - gam[1][i][j] * dP[s][1]
                term = ginv[i][j] * hess
                acc = term if acc is None else acc + term
                mag = mag + np.abs(ginv[i][j].value) * (
                    np.abs(ddP[s][i][j].value) + np.abs(gam[0][i][j].value * dP[s][0].value)
                    + np.abs(gam[1][i][j].value * dP[s][1].value))
        lap.append(acc)
        lap_scale.append(mag)

    tau = []
    scale = []
    for s in range(2):
        acc = lap[s]
        mag = lap_scale[s]
        for a in range(2):
            for b in range(2):
                term = gbar[s][a][b] * M[a][b]
                acc = acc + term
                mag = mag + np.abs(term.value)
        tau.append(acc)
        scale.append(mag)

    return _TensionJets(
        tau=tau,
        scale=np.stack(np.broadcast_arrays(*scale), axis=-1),
        dphi=stack(dP),
        lap_phi=stack(lap),
        M=stack(M),
        ginv=stack(ginv),
        gamma=stack(gam),
        h=stack(tgt.g),
        target=tgt,
        image=(q1, q2),
    )


def _assemble_bitension(tau, dtau, ddtau, tj: _TensionJets, gbar, dgbar, rbar):
    """Bitension components from tension derivatives and geometry at one level."""
    ginv, gam, dphi, M = tj.ginv, tj.gamma, tj.dphi, tj.M
    lap_tau = (np.einsum("...ij,...sij->...s", ginv, ddtau)
               - np.einsum("...ij,...kij,...sk->...s", ginv, gam, dtau))
    grad = np.einsum("...ij,...ai,...bj->...ab", ginv, dtau, dphi)
    t2 = 2 * np.einsum("...sab,...ab->...s", gbar, grad)
    t3 = np.einsum("...a,...b,...sab->...s", tau, tj.lap_phi, gbar)
    inner = dgbar + np.einsum("...nab,...snr->...sabr", gbar, gbar)
    t4 = np.einsum("...a,...br,...sabr->...s", tau, M, inner)
    t5 = -np.einsum("...n,...ab,...sban->...s", tau, M, rbar)
    total = lap_tau + t2 + t3 + t4 + t5
    scale = (np.einsum("...ij,...sij->...s", np.abs(ginv), np.abs(ddtau))
             + np.einsum("...ij,...kij,...sk->...s", np.abs(ginv), np.abs(gam), np.abs(dtau))
             + np.abs(t2) + np.abs(t3) + np.abs(t4) + np.abs(t5))
    return total, scale


def _target_tables(tj: _TensionJets):
    gam_jets = tj.target.gamma
    gbar = stack(gam_jets)
    dgbar = stack([[[[gam_jets[s][a][b].deriv(r) for r in range(2)] for b in range(2)]
                    for a in range(2)] for s in range(2)])
    rbar = riemann_from_gamma(gam_jets)
    return gbar, dgbar, rbar


@dataclass
class _GeneralResult:
    tension: np.ndarray     # [..., 2]
    bitension: np.ndarray   # [..., 2]
    tension_scale: np.ndarray
    bitension_scale: np.ndarray
    fd_err: np.ndarray      # h-norm of the finite-difference error estimate
    h: np.ndarray
    image: tuple
    analytic: bool


def _is_analytic(fmap, gM, gN) -> bool:
    return fmap.analytic and gM.analytic and gN.analytic


def _general(fmap, gM, gN, x, y, fd_step: float = FD_TENSION_STEP) -> _GeneralResult:
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if _is_analytic(fmap, gM, gN):
        tj = _tension_jets(fmap, gM, gN, x, y, 2, target_order=3)
        tau = stack(tj.tau)
        dtau = stack([[t.coeff(1, 0), t.coeff(0, 1)] for t in tj.tau])
        ddtau = stack([[[2 * t.coeff(2, 0), t.coeff(1, 1)], [t.coeff(1, 1), 2 * t.coeff(0, 2)]]
                       for t in tj.tau])
        gbar, dgbar, rbar = _target_tables(tj)
        bit, bscale = _assemble_bitension(tau, dtau, ddtau, tj, gbar, dgbar, rbar)
        return _GeneralResult(tau, bit, tj.scale, bscale, np.zeros(x.shape), tj.h, tj.image, True)

    tj = _tension_jets(fmap, gM, gN, x, y, 0, target_order=2)
    gbar, dgbar, rbar = _target_tables(tj)

    def tension_at(a, b):
        return stack(_tension_jets(fmap, gM, gN, a, b, 0).tau)

    tau, d_fine, d_rich = _stencil_derivatives(tension_at, x, y, fd_step)
    bit, bscale = _assemble_bitension(tau, d_rich[0], d_rich[1], tj, gbar, dgbar, rbar)
    bit_fine, _ = _assemble_bitension(tau, d_fine[0], d_fine[1], tj, gbar, dgbar, rbar)
    # rounding noise of the tension, pushed through the stencil weights
    dt = _noise_probe(tension_at, x, y, tau, d_rich[0], fd_step)
    w1, w2 = _stencil_gain(x, y, fd_step)
    ag = np.abs(tj.ginv)
    noise = dt * (np.einsum("...ij,...ij->...", ag, w2)
                  + np.einsum("...ij,...kij,...j->...", ag, np.abs(tj.gamma), w1)
                  + 2 * np.einsum("...sab,...ij,...i,...bj->...s", np.abs(gbar), ag, w1,
                                  np.abs(tj.dphi)).max(axis=-1)
                  + np.abs(gbar).sum(axis=(-3, -2, -1)) * np.abs(tj.lap_phi).sum(axis=-1)
                  + np.abs(dgbar).sum(axis=(-4, -3, -2, -1)) * np.abs(tj.M).sum(axis=(-2, -1))
                  + np.abs(rbar).sum(axis=(-4, -3, -2, -1)) * np.abs(tj.M).sum(axis=(-2, -1)))
    h_scale = np.sqrt(np.abs(tj.h).sum(axis=(-2, -1)))
    err = _hnorm(bit - bit_fine, tj.h) + h_scale * noise
    return _GeneralResult(tau, bit, tj.scale, bscale, err, tj.h, tj.image, False)


def _hnorm(v, h):
    return np.sqrt(np.abs(np.einsum("...a,...ab,...b->...", np.conj(v), h, v)))


#: safety factor on the probed rounding noise
NOISE_SAFETY = 4.0


def _noise_probe(fn, x, y, centre, d1, step):
    """Rounding-noise level of ``fn`` near ``(x, y)``.

    ``fn`` is sampled at two tiny offsets; after removing the first-order
    change predicted by ``d1`` what remains is noise (the offsets are small
    enough for curvature to be invisible).
    """
    hx = 1e-3 * step * (1.0 + np.abs(x))
    hy = 1e-3 * step * (1.0 + np.abs(y))
    f = fn(np.stack([x + hx, x], axis=-1), np.stack([y, y + hy], axis=-1))
    rx = f[..., 0, :] - centre - d1[..., 0] * hx[..., None]
    ry = f[..., 1, :] - centre - d1[..., 1] * hy[..., None]
    return NOISE_SAFETY * np.maximum(np.abs(rx), np.abs(ry)).max(axis=-1)


def _stencil_gain(x, y, step):
    """Sum of |weights| of the extrapolated first and second difference stencils."""
    hx = step * (1.0 + np.abs(x))
    hy = step * (1.0 + np.abs(y))
    w1 = np.stack([3 / hx, 3 / hy], axis=-1)
    diag = (4 * 16 + 4) / 3
    mixed = (4 * 4 + 1) / 3
    w2 = np.stack([np.stack([diag / hx**2, mixed / (hx * hy)], -1),
                   np.stack([mixed / (hx * hy), diag / hy**2], -1)], -2)
    return w1, w2


def _stencil_derivatives(fn, x, y, step):
    """First and second partials of a vector-valued ``fn`` by central differences.

    Returns the centre value, the derivatives at the finer step ``step / 2``
    and their Richardson extrapolation from ``step`` and ``step / 2``.
    """
    hx = step * (1.0 + np.abs(x))
    hy = step * (1.0 + np.abs(y))

    def at(h_scale):
        ex, ey = hx * h_scale, hy * h_scale
        offs = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
        xs = np.stack([x + a * ex for a, _ in offs], axis=-1)
        ys = np.stack([y + b * ey for _, b in offs], axis=-1)
        f = fn(xs, ys)                                # [..., 9, k]
        f = np.moveaxis(f, -2, 0)
        c, xp, xm, yp, ym, pp, pm, mp, mm = f
        ex_ = ex[..., None]
        ey_ = ey[..., None]
        d1 = np.stack([(xp - xm) / (2 * ex_), (yp - ym) / (2 * ey_)], axis=-1)
        dxx = (xp - 2 * c + xm) / ex_**2
        dyy = (yp - 2 * c + ym) / ey_**2
        dxy = (pp - pm - mp + mm) / (4 * ex_ * ey_)
        d2 = np.stack([np.stack([dxx, dxy], -1), np.stack([dxy, dyy], -1)], -2)
        return c, d1, d2

    c, d1c, d2c = at(1.0)
    _, d1f, d2f = at(0.5)
    rich = ((4 * d1f - d1c) / 3, (4 * d2f - d2c) / 3)
    return c, (d1f, d2f), rich


def tension_general(fmap: SmoothMap2, gM: Metric2, gN: Metric2, p) -> FieldVector2:
    """Tension field components along d/du, d/dv at ``phi(p)``."""
    tj = _tension_jets(fmap, gM, gN, *p, 0)
    return FieldVector2(tj.tau[0].value, tj.tau[1].value)


def bitension_general(fmap: SmoothMap2, gM: Metric2, gN: Metric2, p,
                      tolerances: Tolerances = DEFAULT_TOLERANCES,
                      check_precision: bool = True) -> FieldVector2:
    """Bitension components from the coordinate formula.

    For finite-difference inputs a :class:`PrecisionLoss` is raised where the
    error estimate exceeds both the residual and the finite-difference
    tolerance, i.e. where neither "zero" nor "nonzero" can be claimed.
    """
    res = _general(fmap, gM, gN, *p)
    if check_precision and not res.analytic:
        norm = _hnorm(res.bitension, res.h)
        bad = (res.fd_err > norm) & (res.fd_err > tolerances.fd_abs)
        if np.any(bad):
            raise PrecisionLoss(f"finite-difference error estimate dominates at {np.count_nonzero(bad)} point(s)")
    return FieldVector2(res.bitension[..., 0], res.bitension[..., 1])


# ---------------------------------------------------------------------------
# complex route
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ComplexJet:
    """Wirtinger jet of ``w = phi^1 + i phi^2`` about ``z``.

    ``w`` and ``wbar`` are jets in the variables ``(dz, dz_bar)``, so
    ``d(a, b)`` is d^a/dz^a d^b/dz_bar^b of w.  ``source`` keeps the map for
    the finite-difference fallback when only low orders are available.
    """

    z: np.ndarray
    w: Jet
    wbar: Jet
    order: int
    source: SmoothMap2 | None = None

    def d(self, a: int, b: int) -> np.ndarray:
        return self.w.partial(a, b)

    def dbar(self, a: int, b: int) -> np.ndarray:
        """Derivative of the conjugate map wbar."""
        return self.wbar.partial(a, b)

    @property
    def phi(self):
        return self.w.value

    @property
    def phi_z(self):
        return self.d(1, 0)

    @property
    def phi_zbar(self):
        return self.d(0, 1)

    @property
    def phi_zz(self):
        return self.d(2, 0)

    @property
    def phi_zzbar(self):
        return self.d(1, 1)

    @property
    def phi_zbarzbar(self):
        return self.d(0, 2)


def wirtinger_jet(fmap: SmoothMap2, z, order: int = 4) -> ComplexJet:
    """All d^a/dz^a d^b/dz_bar^b of ``w = phi^1 + i phi^2`` with ``a + b <= order``."""
    if order > 4 or order < 0:
        raise OrderUnavailable(f"Wirtinger jets are provided up to order 4, requested {order}")
    if not fmap.analytic and order > 2:
        raise OrderUnavailable(f"map {fmap.name!r} has finite-difference jets only up to order 2")
    z = np.asarray(z, dtype=complex)
    P1, P2 = fmap.jets(z.real, z.imag, order)
    W = jm.to_complex_basis(P1 + P2 * 1j)
    Wb = jm.to_complex_basis(P1 - P2 * 1j)
    return ComplexJet(z, W, Wb, order, fmap)


def _log_sigma_wirtinger(sigma: ScalarField2, w0, order: int) -> Jet:
    """ln(sigma) about ``w0`` in the variables ``(dw, dw_bar)``."""
    s = sigma.jet(w0.real, w0.imag, order)
    if np.any(s.value <= 0):
        raise DomainError("conformal factor must be positive at the image point")
    return jm.to_complex_basis(jm.log(s))


def _positive(rho_val, what):
    if np.any(rho_val <= 0):
        raise DomainError(f"{what} conformal factor must be positive")


def tension_conformal(jet: ComplexJet, rho: ScalarField2, sigma: ScalarField2, z=None) -> np.ndarray:
    """Complex tension ``tau^1 + i tau^2`` for conformal metrics."""
    z = jet.z if z is None else np.asarray(z, dtype=complex)
    r = np.asarray(rho(z.real, z.imag), dtype=float)
    _positive(r, "domain")
    L = _log_sigma_wirtinger(sigma, jet.phi, 1)
    lw = L.coeff(1, 0)
    return 4 / r**2 * (jet.phi_zzbar + 2 * lw * jet.phi_z * jet.phi_zbar)


@dataclass
class _ConformalResult:
    tension: np.ndarray      # complex
    bitension: np.ndarray    # complex
    tension_scale: np.ndarray
    bitension_scale: np.ndarray
    fd_err: np.ndarray
    sigma: np.ndarray        # target factor at the image
    analytic: bool


def _bts(rho2, tau, tz, tzb, tzzb, L, wz, wzb):
    """Assemble the bracketed Wirtinger bitension expression and its term scale."""
    lw = L.coeff(1, 0)
    lww = 2 * L.coeff(2, 0)
    lwwb = L.coeff(1, 1)
    pq = wz * wzb
    terms = [
        tzzb,
        2 * lw * tz * wzb,
        2 * lw * tzb * wz,
        2 * lw * rho2 * tau**2 / 4,
        2 * np.conj(tau) * lwwb * pq,
        2 * tau * lww * pq,
    ]
    total = sum(terms)
    scale = sum(np.abs(t) for t in terms)
    return 4 / rho2 * total, 4 / rho2 * scale


def _conformal(jet: ComplexJet, rho: ScalarField2, sigma: ScalarField2,
               fd_step: float = FD_TENSION_STEP) -> _ConformalResult:
    z = jet.z
    x, y = z.real, z.imag
    analytic = jet.order >= 4 and rho.analytic and sigma.analytic
    w0 = jet.phi
    if analytic:
        W, Wb = jet.w, jet.wbar
        wz = W.deriv(0).truncate(2)
        wzb = W.deriv(1).truncate(2)
        wzzb = W.deriv(0).deriv(1).truncate(2)
        r = rho.jet(x, y, 2)
        _positive(r.value, "domain")
        rinv2 = jm.to_complex_basis(r.reciprocal() ** 2)
        L = _log_sigma_wirtinger(sigma, w0, 3)
        lw_on_map = L.deriv(0).compose(W.truncate(2), Wb.truncate(2))
        core = lw_on_map * wz * wzb
        T = rinv2 * (wzzb + core * 2) * 4
        tau = T.value
        rho2 = r.value**2
        bit, bscale = _bts(rho2, tau, T.coeff(1, 0), T.coeff(0, 1), T.coeff(1, 1), L,
                           wz.value, wzb.value)
        tscale = 4 / rho2 * (np.abs(wzzb.value) + 2 * np.abs(core.value))
        sig = np.exp(L.value.real)
        return _ConformalResult(tau, bit, tscale, bscale, np.zeros(np.shape(tau)), sig, True)

    if jet.source is None:
        raise OrderUnavailable("bitension needs an order-4 Wirtinger jet or the source map")
    fmap = jet.source

    def tension_at(a, b):
        zz = a + 1j * b
        j2 = wirtinger_jet(fmap, zz, 2)
        t = tension_conformal(j2, rho, sigma)
        return np.stack([t.real, t.imag], axis=-1)

    c, fine, rich = _stencil_derivatives(tension_at, np.asarray(x, float), np.asarray(y, float), fd_step)

    def from_derivs(d1, d2):
        tx = d1[..., 0, 0] + 1j * d1[..., 1, 0]
        ty = d1[..., 0, 1] + 1j * d1[..., 1, 1]
        txx = d2[..., 0, 0, 0] + 1j * d2[..., 1, 0, 0]
        tyy = d2[..., 0, 1, 1] + 1j * d2[..., 1, 1, 1]
        return (tx - 1j * ty) / 2, (tx + 1j * ty) / 2, (txx + tyy) / 4

    tau = c[..., 0] + 1j * c[..., 1]
    r = np.asarray(rho(x, y), dtype=float)
    _positive(r, "domain")
    rho2 = r**2
    L = _log_sigma_wirtinger(sigma, w0, 2)
    j2 = jet if jet.order >= 2 else wirtinger_jet(fmap, z, 2)
    bit, bscale = _bts(rho2, tau, *from_derivs(*rich), L, j2.phi_z, j2.phi_zbar)
    bit_fine, _ = _bts(rho2, tau, *from_derivs(*fine), L, j2.phi_z, j2.phi_zbar)
    sig = np.exp(L.value.real)
    tscale = 4 / rho2 * (np.abs(j2.phi_zzbar) + 2 * np.abs(L.coeff(1, 0) * j2.phi_z * j2.phi_zbar))
    dt = np.sqrt(2) * _noise_probe(tension_at, x, y, c, rich[0], fd_step)
    w1, w2 = _stencil_gain(x, y, fd_step)
    pq = np.abs(j2.phi_z * j2.phi_zbar)
    noise = 4 / rho2 * dt * (
        (w2[..., 0, 0] + w2[..., 1, 1]) / 4
        + 2 * np.abs(L.coeff(1, 0)) * (np.abs(j2.phi_z) + np.abs(j2.phi_zbar)) * np.hypot(*np.moveaxis(w1, -1, 0))
        + np.abs(L.coeff(1, 0)) * rho2 * np.abs(tau)
        + 2 * (np.abs(L.coeff(1, 1)) + 2 * np.abs(L.coeff(2, 0))) * pq)
    err = sig * (np.abs(bit - bit_fine) + noise)
    return _ConformalResult(tau, bit, tscale, bscale, err, sig, False)


def bitension_conformal(jet: ComplexJet, rho: ScalarField2, sigma: ScalarField2, z=None,
                        tolerances: Tolerances = DEFAULT_TOLERANCES,
                        check_precision: bool = True) -> np.ndarray:
    """Complex bitension ``(tau2)^1 + i (tau2)^2`` for conformal metrics."""
    if z is not None and not np.allclose(np.asarray(z), jet.z):
        raise ValueError("z does not match the base point of the jet")
    res = _conformal(jet, rho, sigma)
    if check_precision and not res.analytic:
        norm = res.sigma * np.abs(res.bitension)
        bad = (res.fd_err > norm) & (res.fd_err > tolerances.fd_abs)
        if np.any(bad):
            raise PrecisionLoss(f"finite-difference error estimate dominates at {np.count_nonzero(bad)} point(s)")
    return res.bitension


# ---------------------------------------------------------------------------
# residual report for one batch of points
# ---------------------------------------------------------------------------
@dataclass
class PointResidual:
    """Tension, bitension and their target-metric norms at a batch of points."""

    x: np.ndarray
    y: np.ndarray
    method: str
    tension: np.ndarray           # [..., 2]
    bitension: np.ndarray         # [..., 2], coordinate route unless method == "conformal"
    tension_norm: np.ndarray
    bitension_norm: np.ndarray
    tension_tol: np.ndarray
    bitension_tol: np.ndarray
    fd_err: np.ndarray
    analytic: bool
    bitension_conformal: np.ndarray | None = None   # complex, method == "both"
    gap: np.ndarray | None = None                   # |conformal - general|, method == "both"
    gap_scale: np.ndarray | None = None

    @property
    def classification(self) -> np.ndarray:
        return point_class(self.tension_norm, self.tension_tol, self.bitension_norm,
                           self.bitension_tol, self.fd_err)


def _require_conformal(*metrics):
    for m in metrics:
        if m.form != "conformal":
            raise UnsupportedForm(f"the complex route needs conformal metrics, got {m.form} ({m.name})")


def biharmonic_residual(fmap: SmoothMap2, gM: Metric2, gN: Metric2, p, method: str = "general",
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> PointResidual:
    """Evaluate the biharmonicity residual at ``p`` by one or both routes."""
    method = method.lower()
    if method not in ("general", "conformal", "both"):
        raise ValueError(f"unknown method {method!r}")
    x, y = np.broadcast_arrays(np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float))
    if method in ("conformal", "both"):
        _require_conformal(gM, gN)

    conf = None
    if method in ("conformal", "both"):
        gM.check_domain(x, y)
        order = 4 if fmap.analytic else 2
        jet = wirtinger_jet(fmap, x + 1j * y, order)
        gN.check_domain(jet.phi.real, jet.phi.imag)
        conf = _conformal(jet, gM.rho, gN.rho)

    if method == "conformal":
        tension = np.stack([conf.tension.real, conf.tension.imag], axis=-1)
        bit = np.stack([conf.bitension.real, conf.bitension.imag], axis=-1)
        tn = conf.sigma * np.abs(conf.tension)
        bn = conf.sigma * np.abs(conf.bitension)
        ttol = tolerances.threshold(conf.sigma * conf.tension_scale, conf.analytic)
        btol = tolerances.threshold(conf.sigma * conf.bitension_scale, conf.analytic)
        return PointResidual(x, y, method, tension, bit, tn, bn, ttol, btol, conf.fd_err, conf.analytic)

    res = _general(fmap, gM, gN, x, y)
    tn = _hnorm(res.tension, res.h)
    bn = _hnorm(res.bitension, res.h)
    ttol = tolerances.threshold(_hnorm(res.tension_scale, res.h), res.analytic)
    btol = tolerances.threshold(_hnorm(res.bitension_scale, res.h), res.analytic)
    out = PointResidual(x, y, method, res.tension, res.bitension, tn, bn, ttol, btol,
                        res.fd_err, res.analytic)
    if conf is not None:
        gen_c = res.bitension[..., 0] + 1j * res.bitension[..., 1]
        out.bitension_conformal = conf.bitension
        out.gap = np.abs(conf.bitension - gen_c)
        out.gap_scale = np.maximum(np.hypot(*np.moveaxis(res.bitension_scale, -1, 0)),
                                   conf.bitension_scale)
        if not conf.analytic:
            out.fd_err = np.maximum(out.fd_err, conf.fd_err)
    return out
