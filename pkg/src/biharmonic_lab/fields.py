"""Scalar fields on 2D charts, validity rectangles and finite-difference jets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, OrderUnavailable
from .jets import Jet

#: relative step for synthesized metric/map derivatives, scaled by 1 + |coordinate|
FD_STEP = 1e-4


@dataclass(frozen=True)
class Rect:
    """Closed rectangle ``[x0, x1] x [y0, y1]``; infinite bounds are allowed."""

    x0: float = -10.0
    x1: float = 10.0
    y0: float = -10.0
    y1: float = 10.0

    def __post_init__(self):
        if not (self.x0 <= self.x1 and self.y0 <= self.y1):
            raise ValueError(f"degenerate rectangle {self}")

    @classmethod
    def everywhere(cls) -> Rect:
        return cls(-math.inf, math.inf, -math.inf, math.inf)

    def contains(self, x, y) -> np.ndarray:
        x = np.asarray(x)
        y = np.asarray(y)
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)

    def check(self, x, y, what: str = "point") -> None:
        inside = self.contains(x, y)
        if not np.all(inside):
            bad = np.count_nonzero(~np.broadcast_to(inside, np.broadcast_shapes(np.shape(x), np.shape(y))))
            raise DomainError(f"{bad} {what}(s) outside validity rectangle {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.x1, self.y0, self.y1)


DEFAULT_RECT = Rect()


def _fd_weights():
    # 4th-order central stencils on offsets -2..2
    d1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
    d2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    return d1, d2


def fd_jet(func: Callable, x, y, order: int, step: float = FD_STEP) -> Jet:
    """Order <= 2 jet of a black-box ``func(x, y)`` from central differences.

    The step along each axis is ``step * (1 + |coordinate|)``.
    """
    if order > 2:
        raise OrderUnavailable(f"finite-difference jets stop at order 2, requested {order}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hx = step * (1.0 + np.abs(x))
    hy = step * (1.0 + np.abs(y))
    offsets = np.arange(-2, 3)
    # samples[..., a, b] = func(x + a hx, y + b hy)
    xs = x[..., None, None] + offsets[:, None] * hx[..., None, None]
    ys = y[..., None, None] + offsets[None, :] * hy[..., None, None]
    xs, ys = np.broadcast_arrays(xs, ys)
    samples = np.asarray(func(xs, ys), dtype=float)
    samples = np.broadcast_to(samples, xs.shape)
    value = samples[..., 2, 2]
    jet = Jet.constant(value, order)
    if order == 0:
        return jet
    d1, d2 = _fd_weights()
    fx = np.einsum("...a,a->...", samples[..., :, 2], d1) / hx
    fy = np.einsum("...b,b->...", samples[..., 2, :], d1) / hy
    jet.c[..., 1, 0] = fx
    jet.c[..., 0, 1] = fy
    if order == 2:
        fxx = np.einsum("...a,a->...", samples[..., :, 2], d2) / hx**2
        fyy = np.einsum("...b,b->...", samples[..., 2, :], d2) / hy**2
        fxy = np.einsum("...ab,a,b->...", samples, d1, d1) / (hx * hy)
        jet.c[..., 2, 0] = fxx / 2
        jet.c[..., 1, 1] = fxy
        jet.c[..., 0, 2] = fyy / 2
    return jet


class ScalarField2:
    """A real function of two variables that can report its own Taylor jet.

    With ``analytic=True`` the callable must accept :class:`~biharmonic_lab.jets.Jet`
    arguments (write it with the functions from :mod:`biharmonic_lab.jets`);
    jets of any order are then exact.  Otherwise the callable only needs to
    accept numpy arrays and jets are synthesized by finite differences up to
    order 2.
    """

    def __init__(self, func: Callable, analytic: bool = True, name: str | None = None,
                 fd_step: float = FD_STEP):
        self.func = func
        self.analytic = analytic
        self.name = name or getattr(func, "__name__", "field")
        self.fd_step = fd_step

    def __call__(self, x, y):
        return _broadcast_value(self.func(x, y), x, y)

    def jet(self, x, y, order: int) -> Jet:
        if not self.analytic:
            return fd_jet(self.func, x, y, order, self.fd_step)
        X = Jet.variable(np.asarray(x, dtype=float), 0, order)
        Y = Jet.variable(np.asarray(y, dtype=float), 1, order)
        out = self.func(X, Y)
        shape = np.broadcast_shapes(X.shape, Y.shape)
        return _as_jet(out, order, shape)

    def jet_at(self, X: Jet, Y: Jet) -> Jet:
        """Evaluate on jets directly (analytic fields only)."""
        return _as_jet(self.func(X, Y), X.order, np.broadcast_shapes(X.shape, Y.shape))

    def __repr__(self) -> str:
        kind = "analytic" if self.analytic else "fd"
        return f"ScalarField2({self.name!r}, {kind})"


def _as_jet(out, order: int, shape) -> Jet:
    if isinstance(out, Jet):
        if out.shape != tuple(shape):
            full = np.broadcast_shapes(out.shape, tuple(shape))
            return Jet(np.array(np.broadcast_to(out.c, full + out.c.shape[-2:])), out.order)
        return out
    return Jet.constant(np.broadcast_to(np.asarray(out, dtype=float), shape), order)


def _broadcast_value(out, x, y):
    return np.broadcast_to(np.asarray(out), np.broadcast_shapes(np.shape(out), np.shape(x), np.shape(y)))


def as_field(value, name: str | None = None) -> ScalarField2:
    """Wrap a constant, a callable or an existing field as a :class:`ScalarField2`."""
    if isinstance(value, ScalarField2):
        return value
    if callable(value):
        return ScalarField2(value, name=name)
    const = float(value)
    return ScalarField2(lambda x, y: const + 0 * x, name=name or repr(const))
