"""Truncated bivariate Taylor-jet arithmetic.

A jet stores the Taylor coefficients ``c[i, j] = d_x^i d_y^j f / (i! j!)`` of a
smooth function of two variables at a base point, for every ``i + j <= order``.
Sums, products, quotients and analytic-function composition act on the
coefficient vectors directly, so every partial derivative extracted from a jet
is exact for the retained orders (no finite-difference error).

Coefficients are kept in Taylor-normalized form (divided by factorials) to
keep magnitudes balanced in high-order products, and stored densely over the
triangle ``i + j <= order``.

Jets are immutable values; every operation returns a new jet and is safe to
call concurrently.
"""

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "Jet",
    "JetSpace",
    "jet_space",
    "JetError",
    "DegenerateDivision",
    "DomainError",
    "OrderExceeded",
    "compose_series",
    "exp",
    "ln",
    "sqrt",
    "sin",
    "cos",
    "power",
]


class JetError(Exception):
    """Base class for jet arithmetic failures."""

    def __init__(self, message, base=None):
        super().__init__(message)
        self.base = base


class DegenerateDivision(JetError):
    """Division by a jet whose value at the base point is zero."""


class DomainError(JetError):
    """Analytic composition outside the function domain (ln/sqrt of <= 0)."""


class OrderExceeded(JetError):
    """A derivative beyond the truncation order was requested.

    Signals that the global jet order must be raised.
    """


class JetSpace:
    """Index tables for jets of a fixed truncation order.

    Holds the flat layout of the coefficient triangle plus precomputed
    gather/scatter tables for multiplication and coordinate derivatives.
    One instance is shared by every jet of the same order (see
    :func:`jet_space`).
    """

    __slots__ = (
        "order",
        "size",
        "pairs",
        "index",
        "_mul_a",
        "_mul_b",
        "_mul_out",
        "_dx_src",
        "_dx_dst",
        "_dx_fac",
        "_dy_src",
        "_dy_dst",
        "_dy_fac",
    )

    def __init__(self, order):
        if order < 0:
            raise ValueError("jet order must be >= 0")
        self.order = order
        self.pairs = [(i, d - i) for d in range(order + 1) for i in range(d, -1, -1)]
        self.size = len(self.pairs)
        self.index = {p: k for k, p in enumerate(self.pairs)}

        mul_a, mul_b, mul_out = [], [], []
        for ka, (ia, ja) in enumerate(self.pairs):
            for kb, (ib, jb) in enumerate(self.pairs):
                if ia + ib + ja + jb <= order:
                    mul_a.append(ka)
                    mul_b.append(kb)
                    mul_out.append(self.index[(ia + ib, ja + jb)])
        self._mul_a = np.asarray(mul_a, dtype=np.intp)
        self._mul_b = np.asarray(mul_b, dtype=np.intp)
        self._mul_out = np.asarray(mul_out, dtype=np.intp)

        self._dx_src, self._dx_dst, self._dx_fac = self._deriv_tables(0)
        self._dy_src, self._dy_dst, self._dy_fac = self._deriv_tables(1)

    def _deriv_tables(self, axis):
        src, dst, fac = [], [], []
        for (i, j) in self.pairs:
            if i + j >= self.order:
                continue
            shifted = (i + 1, j) if axis == 0 else (i, j + 1)
            src.append(self.index[shifted])
            dst.append(self.index[(i, j)])
            fac.append(shifted[axis])
        return (
            np.asarray(src, dtype=np.intp),
            np.asarray(dst, dtype=np.intp),
            np.asarray(fac, dtype=float),
        )

    def mul_vec(self, a, b):
        return np.bincount(
            self._mul_out, weights=a[self._mul_a] * b[self._mul_b], minlength=self.size
        )


@lru_cache(maxsize=None)
def jet_space(order):
    return JetSpace(order)


class Jet:
    """Truncated Taylor expansion of a scalar at a base point."""

    __slots__ = ("space", "vec", "order", "base")

    def __init__(self, space, vec, order=None, base=None):
        self.space = space
        self.vec = vec
        self.order = space.order if order is None else order
        self.base = base

    @classmethod
    def constant(cls, space, value, base=None):
        vec = np.zeros(space.size)
        vec[0] = value
        return cls(space, vec, base=base)

    @classmethod
    def variable(cls, space, axis, value, base=None):
        """Jet of the coordinate function x (axis 0) or y (axis 1)."""
        vec = np.zeros(space.size)
        vec[0] = value
        if space.order >= 1:
            vec[space.index[(1, 0) if axis == 0 else (0, 1)]] = 1.0
        return cls(space, vec, base=base)

    @property
    def value(self):
        return self.vec[0]

    def coeff(self, i, j):
        """Taylor-normalized coefficient for the (i, j) monomial."""
        if i < 0 or j < 0 or i + j > self.space.order:
            raise OrderExceeded(f"coefficient ({i},{j}) beyond order {self.space.order}")
        return self.vec[self.space.index[(i, j)]]

    def partial(self, i, j):
        """Value of d_x^i d_y^j at the base point (coefficient times i! j!)."""
        if i + j > self.order:
            raise OrderExceeded(
                f"partial ({i},{j}) requested from a jet valid to order {self.order}; "
                "raise the jet order"
            )
        return self.coeff(i, j) * math.factorial(i) * math.factorial(j)

    def d_dx(self):
        return self._derivative(0)

    def d_dy(self):
        return self._derivative(1)

    def _derivative(self, axis):
        if self.order < 1:
            raise OrderExceeded("cannot differentiate an order-0 jet")
        sp = self.space
        vec = np.zeros(sp.size)
        if axis == 0:
            vec[sp._dx_dst] = self.vec[sp._dx_src] * sp._dx_fac
        else:
            vec[sp._dy_dst] = self.vec[sp._dy_src] * sp._dy_fac
        return Jet(sp, vec, self.order - 1, self.base)

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets have different truncation orders")
            return other
        if isinstance(other, (int, float)):
            return None  # scalar fast path
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            vec = self.vec.copy()
            vec[0] += other
            return Jet(self.space, vec, self.order, self.base)
        return Jet(self.space, self.vec + o.vec, min(self.order, o.order), self.base or o.base)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            vec = self.vec.copy()
            vec[0] -= other
            return Jet(self.space, vec, self.order, self.base)
        return Jet(self.space, self.vec - o.vec, min(self.order, o.order), self.base or o.base)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Jet(self.space, -self.vec, self.order, self.base)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.space, self.vec * other, self.order, self.base)
        return Jet(
            self.space,
            self.space.mul_vec(self.vec, o.vec),
            min(self.order, o.order),
            self.base or o.base,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.space, self.vec / other, self.order, self.base)
        return self * _reciprocal(o)

    def __rtruediv__(self, other):
        return _reciprocal(self) * other

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        return power(self, exponent)

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.vec[0]!r})"


def _reciprocal(j):
    v = j.value
    if v == 0.0:
        raise DegenerateDivision("division by a jet with zero value", base=j.base)
    series = [(-1.0) ** k / v ** (k + 1) for k in range(j.order + 1)]
    return compose_series(series, j)


def compose_series(series, g):
    """Compose an analytic univariate function with a jet.

    ``series`` holds Taylor coefficients of f about ``g.value`` (length at
    least ``g.order + 1``); returns the jet of f(g) at the same truncation.
    Horner evaluation on the nilpotent part of ``g``.
    """
    n = g.order
    if len(series) < n + 1:
        raise ValueError(f"series too short: need {n + 1} coefficients, got {len(series)}")
    shifted = g.vec.copy()
    shifted[0] = 0.0
    s = Jet(g.space, shifted, g.order, g.base)
    acc = Jet.constant(g.space, series[n], g.base)
    acc.order = g.order
    for c in series[n - 1 :: -1]:
        acc = acc * s + c
    return acc


def exp(j):
    e = math.exp(j.value)
    series, term = [], e
    for k in range(j.order + 1):
        series.append(term)
        term /= k + 1
    return compose_series(series, j)


def ln(j):
    v = j.value
    if v <= 0.0:
        raise DomainError(f"ln of nonpositive value {v!r}", base=j.base)
    series = [math.log(v)]
    for k in range(1, j.order + 1):
        series.append((-1.0) ** (k - 1) / (k * v**k))
    return compose_series(series, j)


def sqrt(j):
    v = j.value
    if v <= 0.0:
        raise DomainError(f"sqrt of nonpositive value {v!r}", base=j.base)
    series, c = [], math.sqrt(v)
    for k in range(j.order + 1):
        series.append(c)
        c *= (0.5 - k) / ((k + 1) * v)
    return compose_series(series, j)


def _trig(j, phase):
    v = j.value
    series, fact = [], 1.0
    for k in range(j.order + 1):
        series.append(math.sin(v + phase + k * math.pi / 2.0) / fact)
        fact *= k + 1
    return compose_series(series, j)


def sin(j):
    return _trig(j, 0.0)


def cos(j):
    return _trig(j, math.pi / 2.0)


def power(j, exponent):
    """Raise a jet to a real power.

    Integer exponents work for any base value (negative exponents require a
    nonzero value); non-integer exponents require a positive value.
    """
    if isinstance(exponent, int) or float(exponent).is_integer():
        n = int(exponent)
        if n < 0:
            return _reciprocal(_int_power(j, -n))
        return _int_power(j, n)
    v = j.value
    if v <= 0.0:
        raise DomainError(f"non-integer power of nonpositive value {v!r}", base=j.base)
    series, c = [], v**exponent
    for k in range(j.order + 1):
        series.append(c)
        c *= (exponent - k) / ((k + 1) * v)
    return compose_series(series, j)


def _int_power(j, n):
    if n == 0:
        one = Jet.constant(j.space, 1.0, j.base)
        one.order = j.order
        return one
    result = None
    b = j
    while True:
        if n & 1:
            result = b if result is None else result * b
        n >>= 1
        if n == 0:
            return result
        b = b * b
