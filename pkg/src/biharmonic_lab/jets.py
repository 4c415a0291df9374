"""Truncated bivariate Taylor polynomials ("jets") with vectorized coefficients.

A :class:`Jet` of order ``N`` stores the Taylor coefficients

    f(p + (s, t)) = sum_{i + j <= N} c[i, j] s**i t**j + O(|(s, t)|**(N+1))

for a whole batch of base points at once.  Coefficients live in an array of
shape ``batch + (N+1, N+1)`` so that batch axes broadcast like ordinary numpy
arrays; entries with ``i + j > N`` are kept at zero.

Closed-form fields are written as plain Python callables using the functions
exported here (``exp``, ``log``, ``sqrt`` ...).  Called with floats or arrays
they return values; called with jets they return jets, which is how every
analytic derivative in the package is produced.  The two variables are
abstract: they are ``(dx, dy)`` for real charts and ``(dz, dz_bar)`` after
:func:`to_complex_basis`.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "Jet",
    "exp", "log", "sqrt", "sin", "cos", "tan", "sinh", "cosh", "tanh",
    "arcsin", "arcsinh", "arctan", "absolute",
    "to_complex_basis", "to_real_basis", "substitution_monomials",
]


@lru_cache(maxsize=None)
def _triangle(order: int) -> np.ndarray:
    i, j = np.indices((order + 1, order + 1))
    return i + j <= order


@lru_cache(maxsize=None)
def _pairs(order: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(order + 1) for j in range(order + 1 - i))


#: batch size above which products run coefficient by coefficient
_LOOP_THRESHOLD = 512


def _coeff_major(c: np.ndarray, batch) -> np.ndarray:
    c = np.broadcast_to(c, tuple(batch) + c.shape[-2:])
    return np.ascontiguousarray(np.moveaxis(c, (-2, -1), (0, 1)))


@lru_cache(maxsize=None)
def _product_plan(order: int):
    """Gather indices for the truncated Cauchy product on flattened coefficients."""
    size = order + 1
    p, q, r, starts = [], [], [], []
    for i, j in _pairs(order):
        starts.append(len(p))
        r.append(i * size + j)
        for i1 in range(i + 1):
            for j1 in range(j + 1):
                p.append(i1 * size + j1)
                q.append((i - i1) * size + (j - j1))
    return np.array(p), np.array(q), np.array(r), np.array(starts)


def _batch(c: np.ndarray) -> tuple[int, ...]:
    return c.shape[:-2]


class Jet:
    """Order-``N`` Taylor jet in two variables over a batch of base points."""

    __slots__ = ("c", "order")
    __array_ufunc__ = None  # let ndarray <op> Jet defer to the reflected method

    def __init__(self, coeffs, order: int):
        self.c = coeffs
        self.order = order

    # construction -----------------------------------------------------------
    @classmethod
    def constant(cls, value, order: int) -> Jet:
        value = np.asarray(value)
        dtype = np.result_type(value.dtype, float)
        c = np.zeros(value.shape + (order + 1, order + 1), dtype=dtype)
        c[..., 0, 0] = value
        return cls(c, order)

    @classmethod
    def variable(cls, value, index: int, order: int) -> Jet:
        """The coordinate function ``index`` (0 or 1) expanded about ``value``."""
        jet = cls.constant(value, order)
        if order >= 1:
            jet.c[..., 1 - index, index] = 1.0
        return jet

    @classmethod
    def coerce(cls, value, order: int) -> Jet:
        if isinstance(value, Jet):
            return value if value.order == order else value.truncate(order)
        return cls.constant(value, order)

    # inspection -------------------------------------------------------------
    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0, 0]

    @property
    def shape(self) -> tuple[int, ...]:
        return _batch(self.c)

    @property
    def real(self) -> Jet:
        return Jet(self.c.real.copy(), self.order)

    @property
    def imag(self) -> Jet:
        return Jet(self.c.imag.copy(), self.order)

    def conj(self) -> Jet:
        """Complex conjugate of the coefficients (not of the variables)."""
        return Jet(np.conj(self.c), self.order)

    def coeff(self, i: int, j: int) -> np.ndarray:
        if i + j > self.order:
            raise ValueError(f"coefficient ({i},{j}) exceeds jet order {self.order}")
        return self.c[..., i, j]

    def partial(self, i: int, j: int) -> np.ndarray:
        """Mixed partial derivative d^(i+j) / ds^i dt^j at the base point."""
        return self.coeff(i, j) * (math.factorial(i) * math.factorial(j))

    def truncate(self, order: int) -> Jet:
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        c = self.c[..., : order + 1, : order + 1].copy()
        c[..., ~_triangle(order)] = 0
        return Jet(c, order)

    def deriv(self, axis: int) -> Jet:
        """Partial derivative along variable ``axis``; the order drops by one."""
        n = self.order
        if n == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        if axis == 0:
            c = self.c[..., 1:, :-1] * np.arange(1, n + 1)[:, None]
        else:
            c = self.c[..., :-1, 1:] * np.arange(1, n + 1)[None, :]
        c = np.array(c)
        c[..., ~_triangle(n - 1)] = 0
        return Jet(c, n - 1)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.shape})"

    # arithmetic -------------------------------------------------------------
    def _other(self, other):
        if not isinstance(other, Jet):
            return self, None
        n = min(self.order, other.order)
        a = self.truncate(n) if self.order > n else self
        b = other.truncate(n) if other.order > n else other
        return a, b

    def __neg__(self) -> Jet:
        return Jet(-self.c, self.order)

    def __pos__(self) -> Jet:
        return self

    def __add__(self, other) -> Jet:
        a, b = self._other(other)
        if b is not None:
            return Jet(a.c + b.c, a.order)
        other = np.asarray(other)
        shape = np.broadcast_shapes(a.shape, other.shape)
        c = np.array(np.broadcast_to(a.c, shape + a.c.shape[-2:]),
                     dtype=np.result_type(a.c.dtype, other.dtype))
        c[..., 0, 0] += other
        return Jet(c, a.order)

    __radd__ = __add__

    def __sub__(self, other) -> Jet:
        return self + (-other)

    def __rsub__(self, other) -> Jet:
        return (-self) + other

    def __mul__(self, other) -> Jet:
        a, b = self._other(other)
        if b is None:
            return Jet(a.c * np.asarray(other)[..., None, None], a.order)
        n = a.order
        m = (n + 1) ** 2
        batch = np.broadcast_shapes(a.shape, b.shape)
        size = math.prod(batch)
        if size < _LOOP_THRESHOLD:
            p, q, r, starts = _product_plan(n)
            terms = a.c.reshape(a.shape + (m,))[..., p] * b.c.reshape(b.shape + (m,))[..., q]
            out = np.zeros(batch + (m,), dtype=terms.dtype)
            out[..., r] = np.add.reduceat(terms, starts, axis=-1)
            return Jet(out.reshape(batch + (n + 1, n + 1)), n)
        # big batches: coefficient-major contiguous layout, one vector op per term
        A = _coeff_major(a.c, batch)
        B = _coeff_major(b.c, batch)
        out = np.zeros((n + 1, n + 1) + batch, dtype=np.result_type(A.dtype, B.dtype))
        for i, j in _pairs(n):
            acc = out[i, j]
            for i1 in range(i + 1):
                for j1 in range(j + 1):
                    acc += A[i1, j1] * B[i - i1, j - j1]
        return Jet(np.moveaxis(out, (0, 1), (-2, -1)), n)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Jet:
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.c / np.asarray(other)[..., None, None], self.order)

    def __rtruediv__(self, other) -> Jet:
        return self.reciprocal() * other

    def reciprocal(self) -> Jet:
        x0 = self.value
        coeffs = [(-1.0) ** k / x0 ** (k + 1) for k in range(self.order + 1)]
        return _apply_series(self, coeffs)

    def __pow__(self, p) -> Jet:
        if isinstance(p, Jet):
            return exp(p * log(self))
        if isinstance(p, (int, np.integer)) or (np.ndim(p) == 0 and float(p).is_integer() and abs(p) < 64):
            k = int(p)
            if k < 0:
                return self.reciprocal() ** (-k)
            result = Jet.constant(np.ones(self.shape, dtype=self.c.dtype), self.order)
            base = self
            while k:
                if k & 1:
                    result = result * base
                k >>= 1
                if k:
                    base = base * base
            return result
        p = np.asarray(p, dtype=float)
        x0 = self.value
        coeffs = [_binom(p, k) * x0 ** (p - k) for k in range(self.order + 1)]
        return _apply_series(self, coeffs)

    def __rpow__(self, base) -> Jet:
        return exp(self * np.log(base))

    # composition ------------------------------------------------------------
    def compose(self, a: Jet, b: Jet, monomials: np.ndarray | None = None) -> Jet:
        """Substitute jets ``a``, ``b`` for the two displacement variables.

        ``self`` is expanded in displacement variables about some point; the
        constant terms of ``a`` and ``b`` are dropped and the result is the
        Taylor expansion of the composite in the variables of ``a`` and ``b``,
        valid to ``min(self.order, a.order, b.order)``.  Pass the output of
        :func:`monomials` to reuse it across several compositions.
        """
        n = min(self.order, a.order, b.order)
        if monomials is None:
            monomials = substitution_monomials(a, b, n)
        return _compose_with(self, monomials, n)


def substitution_monomials(a: Jet, b: Jet, order: int) -> np.ndarray:
    """Stack of ``(a - a0)**i (b - b0)**j`` for ``i + j <= order``, in :func:`_pairs` order."""
    a = a.truncate(order) if a.order > order else a
    b = b.truncate(order) if b.order > order else b
    a = a - a.value
    b = b - b.value
    pa = [Jet.constant(np.ones((), dtype=float), order)]
    pb = [pa[0]]
    for _ in range(order):
        pa.append(pa[-1] * a)
        pb.append(pb[-1] * b)
    mons = []
    for i, j in _pairs(order):
        if i == 0:
            mons.append(pb[j])
        elif j == 0:
            mons.append(pa[i])
        else:
            mons.append(pa[i] * pb[j])
    shape = np.broadcast_shapes(*[m.shape for m in mons])
    return np.stack([np.broadcast_to(m.c, shape + m.c.shape[-2:]) for m in mons], axis=-3)


def _compose_with(jet: Jet, monomials: np.ndarray, n: int) -> Jet:
    idx = _pairs(n)
    ii = np.array([i for i, _ in idx])
    jj = np.array([j for _, j in idx])
    coeffs = jet.c[..., ii, jj]
    return Jet(np.einsum("...k,...kpq->...pq", coeffs, monomials), n)


def _binom(p, k: int):
    out = np.ones_like(p, dtype=float)
    for m in range(k):
        out = out * (p - m) / (m + 1)
    return out


def _apply_series(x: Jet, coeffs) -> Jet:
    """Evaluate sum_k coeffs[k] (x - x0)**k by Horner's rule."""
    n = x.order
    delta = x - x.value
    result = Jet.constant(np.asarray(coeffs[n]) * np.ones(x.shape), n)
    for k in range(n - 1, -1, -1):
        result = result * delta + coeffs[k]
    return result


def _integrated_series(x: Jet, value0, derivative) -> Jet:
    """Series of ``F`` at ``x`` given ``F(x0)`` and a jet-aware ``F'``."""
    n = x.order
    if n == 0:
        return Jet.constant(value0, 0)
    d = derivative(Jet.variable(x.value, 0, n - 1))
    coeffs = [value0] + [d.c[..., k - 1, 0] / k for k in range(1, n + 1)]
    return _apply_series(x, coeffs)


# elementary functions -------------------------------------------------------
def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    e = np.exp(x.value)
    return _apply_series(x, [e / math.factorial(k) for k in range(x.order + 1)])


def log(x):
    if not isinstance(x, Jet):
        return np.log(x)
    x0 = x.value
    coeffs = [np.log(x0)] + [(-1.0) ** (k + 1) / (k * x0 ** k) for k in range(1, x.order + 1)]
    return _apply_series(x, coeffs)


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    return x ** 0.5


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x)
    x0 = x.value
    return _apply_series(x, [np.sin(x0 + k * np.pi / 2) / math.factorial(k) for k in range(x.order + 1)])


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x)
    x0 = x.value
    return _apply_series(x, [np.cos(x0 + k * np.pi / 2) / math.factorial(k) for k in range(x.order + 1)])


def tan(x):
    if not isinstance(x, Jet):
        return np.tan(x)
    return sin(x) / cos(x)


def sinh(x):
    if not isinstance(x, Jet):
        return np.sinh(x)
    return (exp(x) - exp(-x)) * 0.5


def cosh(x):
    if not isinstance(x, Jet):
        return np.cosh(x)
    return (exp(x) + exp(-x)) * 0.5


def tanh(x):
    if not isinstance(x, Jet):
        return np.tanh(x)
    return sinh(x) / cosh(x)


def arcsin(x):
    if not isinstance(x, Jet):
        return np.arcsin(x)
    return _integrated_series(x, np.arcsin(x.value), lambda t: (1 - t * t) ** -0.5)


def arcsinh(x):
    if not isinstance(x, Jet):
        return np.arcsinh(x)
    return _integrated_series(x, np.arcsinh(x.value), lambda t: (1 + t * t) ** -0.5)


def arctan(x):
    if not isinstance(x, Jet):
        return np.arctan(x)
    return _integrated_series(x, np.arctan(x.value), lambda t: 1 / (1 + t * t))


def absolute(x):
    """|x|; for jets the sign of the base value is frozen (smooth off zero)."""
    if not isinstance(x, Jet):
        return np.abs(x)
    return x * np.sign(x.value)


# change of variables --------------------------------------------------------
@lru_cache(maxsize=None)
def _linear_pair(order: int, kind: str) -> tuple[Jet, Jet]:
    s = Jet.variable(np.zeros(()), 0, order)
    t = Jet.variable(np.zeros(()), 1, order)
    if kind == "to_complex":
        # dx = (dz + dzb)/2, dy = (dz - dzb)/(2i)
        return (s + t) * 0.5, (s - t) * (-0.5j)
    # dz = dx + i dy, dzb = dx - i dy
    return s + t * 1j, s - t * 1j


@lru_cache(maxsize=None)
def _linear_monomials(order: int, kind: str) -> np.ndarray:
    a, b = _linear_pair(order, kind)
    return substitution_monomials(a, b, order)


def to_complex_basis(jet: Jet) -> Jet:
    """Re-expand a ``(dx, dy)`` jet in the Wirtinger variables ``(dz, dz_bar)``.

    In the new basis ``partial(a, b)`` is d^a/dz^a d^b/dz_bar^b of the field.
    """
    return _compose_with(jet, _linear_monomials(jet.order, "to_complex"), jet.order)


def to_real_basis(jet: Jet) -> Jet:
    """Inverse of :func:`to_complex_basis`."""
    return _compose_with(jet, _linear_monomials(jet.order, "to_real"), jet.order)
