"""
Three-term q-difference operators.

The q-Heun operator A4 and its degree-three and degree-four variants
A3 and A2 act on a function of x through

    (A f)(x) = a(x) f(x/q) + b(x) f(x) + c(x) f(q x),

with Laurent-polynomial coefficients a, b, c fixed by a parameter
bundle.  The accessory parameter E is never part of the bundle; it is
passed separately wherever an eigen-equation ``A f = E f`` is formed.
"""
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from .exceptions import InexactPower, InvalidArgument, OffLattice
from .utilities import Bunch

HALF = Fraction(1, 2)

default_a4 = {
    "h1": 0,
    "h2": 0,
    "l1": 0,
    "l2": 0,
    "alpha1": 0,
    "alpha2": 0,
    "beta": 0,
    "t1": 1,
    "t2": 1,
}

default_a3 = {
    "h1": 0,
    "h2": 0,
    "h3": 0,
    "l1": 0,
    "l2": 0,
    "l3": 0,
    "alpha": 0,
    "beta": 0,
    "t1": 1,
    "t2": 1,
    "t3": 1,
}

default_a2 = {
    "h1": 0,
    "h2": 0,
    "h3": 0,
    "h4": 0,
    "l1": 0,
    "l2": 0,
    "l3": 0,
    "l4": 0,
    "alpha": 0,
    "t1": 1,
    "t2": 1,
    "t3": 1,
    "t4": 1,
}


class _Params(Bunch):
    family = None
    defaults = {}
    rank = 0

    def __init__(self, q, **values):
        super().__init__(self.defaults)
        self.update_values(strict=True, **values)
        for key in self.exponent_keys():
            self[key] = q.exponent(self[key])
        for key in self.t_keys():
            self[key] = q.scalar(self[key])
            if q.is_zero(self[key]):
                raise InvalidArgument(f"{key} must be nonzero")
        if q.exact:
            for key in self.exponent_keys():
                if (self[key] * q.root).denominator != 1:
                    raise InexactPower(
                        f"exact backend with root {q.root} needs {key} in (1/{q.root})Z, got {self[key]}"
                    )
        self.q = q

    @classmethod
    def t_keys(cls):
        return [f"t{n}" for n in range(1, cls.rank + 1)]

    @classmethod
    def exponent_keys(cls):
        return [k for k in cls.defaults if not k.startswith("t")]

    def as_dict(self):
        return {k: v for k, v in self.items() if k != "q"}

    def replace(self, **changes):
        """Copy with *changes* applied and revalidated."""
        return type(self)(self.q, **{**self.as_dict(), **changes})

    def hs(self):
        return [self[f"h{n}"] for n in range(1, self.rank + 1)]

    def ls(self):
        return [self[f"l{n}"] for n in range(1, self.rank + 1)]

    def ts(self):
        return [self[f"t{n}"] for n in range(1, self.rank + 1)]


class A4Params(_Params):
    """Parameters of the q-Heun operator A4 (h1, h2, l1, l2, alpha1, alpha2, beta, t1, t2)."""

    family = "a4"
    defaults = default_a4
    rank = 2


class A3Params(_Params):
    """Parameters of the degree-three variant A3 (h1..h3, l1..l3, alpha, beta, t1..t3)."""

    family = "a3"
    defaults = default_a3
    rank = 3


class A2Params(_Params):
    """Parameters of the degree-four variant A2 (h1..h4, l1..l4, alpha, t1..t4)."""

    family = "a2"
    defaults = default_a2
    rank = 4


FAMILIES = {"a4": A4Params, "a3": A3Params, "a2": A2Params}


def make_params(family, q, **values):
    try:
        cls = FAMILIES[family]
    except KeyError as err:
        raise ValueError(f"family must be one of {sorted(FAMILIES)}, got {family!r}") from err
    return cls(q, **values)


class LatticeFunction:
    """
    A function known at the points ``base * q**n``.

    Either a plain rule ``x -> value`` (numeric evaluation anywhere the
    rule is defined) or an indexed rule ``n -> value`` which resolves
    each argument to its lattice index first.  Indexed rules are how
    the exact backend represents products that are only known up to a
    constant factor.
    """

    def __init__(self, rule, base=None, q=None, label=None):
        self.rule = rule
        self.base = base
        self.q = q
        self.label = label
        self._indexed = None

    @classmethod
    def on_lattice(cls, rule_n, base, q, label=None):
        f = cls(None, base=q.scalar(base), q=q, label=label)
        f._indexed = rule_n
        return f

    @classmethod
    def from_samples(cls, samples, base, q, label=None):
        """Sampled-grid adapter: *samples* maps lattice index to value."""
        samples = dict(samples)

        def rule_n(n):
            try:
                return samples[n]
            except KeyError as err:
                raise OffLattice(f"no sample at lattice index {n}") from err

        return cls.on_lattice(rule_n, base, q, label=label)

    @property
    def indexed(self):
        return self._indexed is not None

    def __call__(self, x):
        if self._indexed is not None:
            return self._indexed(self.q.lattice_index(x, self.base))
        return self.rule(x)

    def at(self, n):
        """Value at ``base * q**n``."""
        if self._indexed is not None:
            return self._indexed(n)
        return self.rule(self.base * self.q.q ** int(n))

    def samples(self, indices):
        return {n: self.at(n) for n in indices}

    def _combine(self, other, op, label):
        if isinstance(other, LatticeFunction):
            return LatticeFunction(lambda x: op(self(x), other(x)), self.base, self.q, label)
        return LatticeFunction(lambda x: op(self(x), other), self.base, self.q, label)

    def __add__(self, other):
        return self._combine(other, lambda u, v: u + v, "sum")

    def __sub__(self, other):
        return self._combine(other, lambda u, v: u - v, "difference")

    def __mul__(self, other):
        return self._combine(other, lambda u, v: u * v, "product")

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __repr__(self):
        kind = "indexed" if self.indexed else "rule"
        return f"LatticeFunction({self.label or kind}, base={self.base})"


def zero_function(q, base=1):
    return LatticeFunction(lambda x: q.scalar(0), base=q.scalar(base), q=q, label="zero")


def _check_x(p, x):
    x = p.q.scalar(x)
    if p.q.is_zero(x):
        raise InvalidArgument("the operators are singular at x = 0")
    return x


def coefficients_a4(p, x):
    """The coefficients (a, b, c) of A4 at x."""
    q = p.q
    x = _check_x(p, x)
    t1, t2 = p.t1, p.t2
    a = (x - q.pow(p.h1 + HALF) * t1) * (x - q.pow(p.h2 + HALF) * t2) / x
    c = q.pow(p.alpha1 + p.alpha2) * (x - q.pow(p.l1 - HALF) * t1) * (x - q.pow(p.l2 - HALF) * t2) / x
    total = p.h1 + p.h2 + p.l1 + p.l2 + p.alpha1 + p.alpha2
    b = -(q.pow(p.alpha1) + q.pow(p.alpha2)) * x - (
        q.pow((total + p.beta) / 2) + q.pow((total - p.beta) / 2)
    ) * t1 * t2 / x
    return a, b, c


def _divided_product(x, roots, scale, power):
    """``scale * prod (x - r) / x**power``, dividing while multiplying."""
    out = scale
    for i, r in enumerate(roots):
        out = out * (x - r)
        if i < power:
            out = out / x
    return out


def coefficients_a3(p, x):
    """The coefficients (a, b, c) of A3 at x."""
    q = p.q
    x = _check_x(p, x)
    a = _divided_product(x, [q.pow(h + HALF) * t for h, t in zip(p.hs(), p.ts())], x**0, 1)
    c = _divided_product(x, [q.pow(l - HALF) * t for l, t in zip(p.ls(), p.ts())], q.pow(2 * p.alpha + 1), 1)
    total = sum(p.hs()) + sum(p.ls())
    tprod = p.t1 * p.t2 * p.t3
    linear = sum((q.pow(h) + q.pow(l)) * t for h, l, t in zip(p.hs(), p.ls(), p.ts()))
    b = q.pow(p.alpha + HALF) * (
        -(q.pow(HALF) + q.pow(-HALF)) * x * x
        + linear * x
        + (q.pow((total + p.beta) / 2) + q.pow((total - p.beta) / 2)) * tprod / x
    )
    return a, b, c


def coefficients_a2(p, x):
    """The coefficients (a, b, c) of A2 at x."""
    q = p.q
    x = _check_x(p, x)
    a = _divided_product(x, [q.pow(h + HALF) * t for h, t in zip(p.hs(), p.ts())], x**0, 2)
    c = _divided_product(x, [q.pow(l - HALF) * t for l, t in zip(p.ls(), p.ts())], q.pow(2 * p.alpha + 1), 2)
    total = sum(p.hs()) + sum(p.ls())
    tprod = p.t1 * p.t2 * p.t3 * p.t4
    linear = sum((q.pow(h) + q.pow(l)) * t for h, l, t in zip(p.hs(), p.ls(), p.ts()))
    inverse = sum((q.pow(-h) + q.pow(-l)) / t for h, l, t in zip(p.hs(), p.ls(), p.ts()))
    qsum = q.pow(HALF) + q.pow(-HALF)
    low = q.pow(total / 2) * tprod * (inverse - qsum / x) / x
    b = q.pow(p.alpha + HALF) * (-qsum * x * x + linear * x + low)
    return a, b, c


_COEFFICIENTS = {"a4": coefficients_a4, "a3": coefficients_a3, "a2": coefficients_a2}


def coefficients(p, x):
    return _COEFFICIENTS[p.family](p, x)


def operator_terms(p, f, x):
    """The three terms a f(x/q), b f(x), c f(qx) of (A f)(x)."""
    a, b, c = coefficients(p, x)
    x = p.q.scalar(x)
    q = p.q.q
    return a * f(x / q), b * f(x), c * f(q * x)


def apply(p, f, x):
    """(A f)(x) for the operator selected by the type of *p*."""
    ta, tb, tc = operator_terms(p, f, x)
    return ta + tb + tc


def _apply_family(family, p, f, x):
    if p.family != family:
        raise TypeError(f"expected {family.upper()} parameters, got {type(p).__name__}")
    return apply(p, f, x)


def apply_a4(p, f, x):
    """
    Apply the q-Heun operator A4 to *f* at *x*.

    Parameters
    ----------
    p : A4Params
    f : LatticeFunction or callable
        Must be evaluable at x/q, x and qx.
    x : scalar, nonzero

    Returns
    -------
    a(x) f(x/q) + b(x) f(x) + c(x) f(qx)
    """
    return _apply_family("a4", p, f, x)


def apply_a3(p, f, x):
    """Apply the degree-three variant A3 to *f* at *x*."""
    return _apply_family("a3", p, f, x)


def apply_a2(p, f, x):
    """Apply the degree-four variant A2 to *f* at *x*."""
    return _apply_family("a2", p, f, x)


def residual(p, E, f, points):
    """
    Eigen-residuals ``(A f)(x) - E f(x)`` at each point.

    The maximum absolute value over the points is the eigen-residual
    of the pair (f, E).
    """
    E = p.q.scalar(E)
    return [apply(p, f, x) - E * f(x) for x in points]


def relative_residual(p, E, f, points):
    """
    Max eigen-residual divided by the largest individual term.

    The terms are a f(x/q), b f(x), c f(qx) and E f(x) over all points,
    so cancellation between large terms cannot hide an error.
    """
    E = p.q.scalar(E)
    worst = 0.0
    scale = 0.0
    for x in points:
        terms = operator_terms(p, f, x)
        ex = E * f(x)
        worst = max(worst, abs(complex(sum(terms) - ex)))
        scale = max(scale, abs(complex(ex)), *(abs(complex(t)) for t in terms))
    if scale == 0:
        return 0.0
    return worst / scale


def exponents_a4(p):
    """
    Exponents of the A4 equation at s = 0 and s = infinity.

    At infinity the pair (alpha1, alpha2) stands for the behaviors
    x**-alpha1 and x**-alpha2; at zero lambda_+- stands for x**lambda.

    Returns
    -------
    Bunch with ``at_infinity`` and ``at_zero`` (``(lambda_plus, lambda_minus)``)
    """
    core = p.h1 + p.h2 - p.l1 - p.l2 - p.alpha1 - p.alpha2 + 2
    return Bunch(
        at_infinity=(p.alpha1, p.alpha2),
        at_zero=((core + p.beta) / 2, (core - p.beta) / 2),
    )


def exponents_a3(p):
    """Exponents of the A3 equation; at infinity (alpha, alpha + 1)."""
    core = sum(p.hs()) - sum(p.ls()) - 2 * p.alpha + 2
    return Bunch(
        at_infinity=(p.alpha, p.alpha + 1),
        at_zero=((core + p.beta) / 2, (core - p.beta) / 2),
    )


def exponents_a2(p):
    """Exponents of the A2 equation; both singular points are non-logarithmic."""
    lam = (sum(p.hs()) - sum(p.ls()) - 2 * p.alpha + 2) / 2
    return Bunch(at_infinity=(p.alpha, p.alpha + 1), at_zero=(lam, lam + 1))


_EXPONENTS = {"a4": exponents_a4, "a3": exponents_a3, "a2": exponents_a2}


def exponents(p):
    return _EXPONENTS[p.family](p)


def laurent_coefficients(p):
    """
    Laurent coefficient arrays of a, b and c (numeric).

    Entry i of each array multiplies ``x**(offset + i)``.
    """
    q = p.q

    def qp(e):
        return complex(q.pow(e))

    ts = [complex(t) for t in p.ts()]
    offset = -2 if p.family == "a2" else -1
    a = npoly.polyfromroots([qp(h + HALF) * t for h, t in zip(p.hs(), ts)])
    c = npoly.polyfromroots([qp(l - HALF) * t for l, t in zip(p.ls(), ts)])
    tprod = np.prod(ts)
    if p.family == "a4":
        c = qp(p.alpha1 + p.alpha2) * c
        total = sum(p.hs()) + sum(p.ls()) + p.alpha1 + p.alpha2
        low = -(qp((total + p.beta) / 2) + qp((total - p.beta) / 2)) * tprod
        b = np.array([low, 0, -(qp(p.alpha1) + qp(p.alpha2))])
    else:
        c = qp(2 * p.alpha + 1) * c
        total = sum(p.hs()) + sum(p.ls())
        linear = sum((qp(h) + qp(l)) * t for h, l, t in zip(p.hs(), p.ls(), ts))
        qsum = qp(HALF) + qp(-HALF)
        if p.family == "a3":
            low = [(qp((total + p.beta) / 2) + qp((total - p.beta) / 2)) * tprod]
        else:
            inverse = sum((qp(-h) + qp(-l)) / t for h, l, t in zip(p.hs(), p.ls(), ts))
            low = [-qsum * qp(total / 2) * tprod, qp(total / 2) * tprod * inverse]
        b = qp(p.alpha + HALF) * np.array(low + [0, linear, -qsum])
    return Bunch(offset=offset, a=np.asarray(a, complex), b=np.asarray(b, complex), c=np.asarray(c, complex))


def indicial_coefficient(p, rho, point):
    """
    Leading coefficient of ``A x**rho`` at ``point`` ("zero" or "infinity").

    At infinity the trial is ``x**-rho`` so that the roots coincide
    with the exponents returned by ``exponents``.
    """
    lc = laurent_coefficients(p)
    if point == "zero":
        i, power = 0, rho
    elif point == "infinity":
        i, power = len(lc.a) - 1, -rho
    else:
        raise ValueError(f"point must be 'zero' or 'infinity', got {point!r}")
    qpow = np.exp(power * np.log(complex(p.q.q)))
    return lc.a[i] / qpow + lc.b[i] + lc.c[i] * qpow


def solve_indicial(p, point, bracket):
    """A real exponent at *point* inside *bracket*, found with brentq."""
    return brentq(lambda rho: indicial_coefficient(p, rho, point).real, *bracket, xtol=1e-14)
