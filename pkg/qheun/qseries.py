"""
q-series primitives.

Scalar backends (numeric complex and exact rational), q-Pochhammer
symbols, the theta function, the two kernel functions and generic
(bilateral) basic hypergeometric sums.  Everything else in the
package is built on these.
"""
import math
from fractions import Fraction
from numbers import Rational

import numpy as np

from .exceptions import (
    InexactPower,
    InvalidArgument,
    InvalidQ,
    NonConvergent,
    OffLattice,
    PoleEncountered,
)
from .utilities import Bunch

default_policy = {
    "tail_epsilon": 1e-17,
    "max_terms": 10000,
}

# Consecutive negligible terms needed to close a tail.
_RUN = 8

# |1 - a q^j| below this is treated as a vanishing factor.
_POLE_TOL = 1e-14


class TruncationPolicy(Bunch):
    """
    Stopping rule for infinite products and sums.

    Parameters
    ----------
    tail_epsilon : float
        A product stops at the first j with ``|q**j * a| < tail_epsilon``;
        a sum stops once 8 consecutive terms fall below
        ``tail_epsilon`` times the largest term seen so far.
    max_terms : int
        Hard cap on the number of factors or terms per direction.
    """

    def __init__(self, **kw):
        super().__init__(default_policy)
        self.update_values(strict=True, **kw)
        self.tail_epsilon = float(self.tail_epsilon)
        self.max_terms = int(self.max_terms)
        if not self.tail_epsilon > 0:
            raise ValueError(f"tail_epsilon must be positive, got {self.tail_epsilon}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be at least 1, got {self.max_terms}")


def as_policy(policy=None):
    if policy is None:
        return TruncationPolicy()
    if isinstance(policy, TruncationPolicy):
        return policy
    return TruncationPolicy(**policy)


class QBase:
    """
    The base q together with its scalar backend.

    ``QBase(q=0.5)`` selects the numeric backend: scalars are
    ``numpy.complex128`` and powers use the principal branch.
    ``QBase(r=Fraction(1, 2))`` selects the exact backend over
    ``fractions.Fraction`` with ``q = r**root``; ``q**e`` is then exact
    whenever ``e * root`` is an integer.  The default ``root=2`` admits
    half-integer exponents; ``root=4`` admits quarter-integers.
    """

    def __init__(self, q=None, r=None, root=2):
        if (q is None) == (r is None):
            raise InvalidQ("give exactly one of q (numeric backend) or r (exact backend)")
        if r is not None:
            if not isinstance(r, (Rational, str, Fraction)):
                raise InvalidQ(f"exact backend needs a rational r, got {r!r}")
            root = int(root)
            if root < 1:
                raise InvalidQ(f"root must be a positive integer, got {root}")
            self.exact = True
            self.r = Fraction(r)
            self.root = root
            self.q = self.r**root
            absq = abs(self.q)
        else:
            self.exact = False
            self.r = None
            self.root = None
            self.q = np.complex128(q)
            if not np.isfinite(self.q):
                raise InvalidQ(f"q must be finite, got {q!r}")
            absq = abs(self.q)
        if not 0 < absq < 1:
            raise InvalidQ(f"q must satisfy 0 < |q| < 1, got {self.q}")
        if self.exact:
            self._log_absq = math.log(abs(self.q.numerator)) - math.log(self.q.denominator)
        else:
            self._logq = np.log(self.q)
            self._log_absq = float(np.log(absq))

    def __repr__(self):
        if self.exact:
            return f"QBase(r={self.r}, root={self.root})"
        return f"QBase(q={self.q!r})"

    def __eq__(self, other):
        if not isinstance(other, QBase):
            return NotImplemented
        if self.exact != other.exact:
            return False
        if self.exact:
            return self.r == other.r and self.root == other.root
        return self.q == other.q

    def __hash__(self):
        return hash((self.exact, self.q, self.root))

    def scalar(self, value):
        """Coerce *value* into the backend scalar type."""
        if self.exact:
            if isinstance(value, (complex, np.complexfloating)):
                if complex(value).imag != 0:
                    raise InvalidArgument(f"exact backend needs rational values, got {value!r}")
                value = complex(value).real
            return Fraction(value)
        if isinstance(value, Fraction):
            value = float(value)
        return np.complex128(value)

    def exponent(self, value):
        """Coerce an exponent: Fraction in exact mode, float (or complex) otherwise."""
        if self.exact:
            return Fraction(value)
        if isinstance(value, Fraction):
            return float(value)
        if isinstance(value, (complex, np.complexfloating)) and complex(value).imag != 0:
            return complex(value)
        return float(np.real(value))

    def is_zero(self, value):
        if self.exact:
            return value == 0
        return abs(value) == 0

    def pow(self, e):
        """q**e."""
        if self.exact:
            n = Fraction(e) * self.root
            if n.denominator != 1:
                raise InexactPower(f"q**({e}) is not rational for q = ({self.r})**{self.root}")
            return self.r ** int(n)
        return np.exp(e * self._logq)

    def power(self, x, e):
        """x**e on the principal branch (exact mode: integer e only)."""
        if self.exact:
            e = Fraction(e)
            if e.denominator != 1:
                raise InexactPower(f"x**({e}) is not rational in general; use a lattice rule")
            if x == 0 and e < 0:
                raise InvalidArgument("0 raised to a negative power")
            return Fraction(x) ** int(e)
        x = np.complex128(x)
        if x == 0:
            if np.real(e) > 0:
                return np.complex128(0)
            raise InvalidArgument("0 raised to a non-positive power")
        return np.exp(e * np.log(x))

    def lattice_index(self, x, base):
        """The integer n with x = base * q**n."""
        if self.is_zero(base) or self.is_zero(x):
            raise OffLattice(f"{x} is not on the lattice through {base}")
        ratio = x / base
        if self.exact:
            ratio = Fraction(ratio)
            log_abs = math.log(abs(ratio.numerator)) - math.log(ratio.denominator)
            n = round(log_abs / self._log_absq)
            if self.q**n != ratio:
                raise OffLattice(f"{x} is not on the lattice through {base} with q = {self.q}")
            return n
        n = int(round(float(np.log(abs(ratio))) / self._log_absq))
        if abs(ratio - self.q**n) > 1e-9 * abs(ratio):
            raise OffLattice(f"{x} is not on the lattice through {base} with q = {self.q}")
        return n


def _finite(value, what):
    if not np.isfinite(complex(value)):
        raise NonConvergent(f"{what} overflowed")
    return value


def _fsum(values):
    """Compensated sum; exact for Fractions."""
    values = list(values)
    if values and isinstance(values[0], Fraction):
        return sum(values, Fraction(0))
    arr = np.asarray(values, dtype=np.complex128)
    return np.complex128(complex(math.fsum(arr.real), math.fsum(arr.imag)))


def _factor_count(args, q, policy):
    """Number of factors needed before every |q**j a| drops below tail_epsilon."""
    amax = max((abs(complex(a)) for a in args), default=0.0)
    if amax < policy.tail_epsilon:
        return 0
    count = int(math.floor(math.log(policy.tail_epsilon / amax) / q._log_absq)) + 1
    if count > policy.max_terms:
        raise NonConvergent(
            f"product needs {count} factors for |a| = {amax:g}, more than max_terms = {policy.max_terms}"
        )
    return count


def _exact_product_ratio(numer, denom, q, policy):
    value = Fraction(1)
    qj = Fraction(1)
    j = 0
    while True:
        big = [a for a in list(numer) + list(denom) if abs(a * qj) >= policy.tail_epsilon]
        if not big:
            return value, j
        if j >= policy.max_terms:
            raise NonConvergent(f"exact product did not reach tail_epsilon within {policy.max_terms} factors")
        for a in numer:
            value *= 1 - a * qj
        for b in denom:
            factor = 1 - b * qj
            if factor == 0:
                raise PoleEncountered(f"factor (1 - {b} q^{j}) of a denominator product vanishes")
            value /= factor
        qj *= q.q
        j += 1


def qpoch_ratio(numer, denom, q, policy=None, full_output=False):
    """
    Ratio of infinite q-Pochhammer products.

    Evaluates ``prod (a;q)_inf over numer / prod (b;q)_inf over denom``
    factor by factor, so large individual products do not overflow.

    Parameters
    ----------
    numer, denom : sequences of scalar
    q : QBase
    policy : TruncationPolicy, dict, optional
    full_output : bool
        If True, also return the truncation index.

    Returns
    -------
    value : scalar
        In exact mode, the ratio of the truncated partial products.
    nterms : int
        Only if *full_output*.
    """
    policy = as_policy(policy)
    if q.exact:
        value, nterms = _exact_product_ratio(
            [Fraction(a) for a in numer], [Fraction(b) for b in denom], q, policy
        )
        return (value, nterms) if full_output else value

    a = np.asarray([complex(v) for v in numer], dtype=np.complex128)
    b = np.asarray([complex(v) for v in denom], dtype=np.complex128)
    nterms = _factor_count(np.concatenate([a, b]), q, policy)
    powers = q.q ** np.arange(nterms)
    den = 1 - np.outer(b, powers)
    if den.size and np.min(np.abs(den)) < _POLE_TOL:
        j = int(np.argmin(np.min(np.abs(den), axis=0)))
        raise PoleEncountered(f"denominator factor vanishes at j = {j}")
    per_j = np.prod(1 - np.outer(a, powers), axis=0) / np.prod(den, axis=0)
    value = np.prod(per_j)
    # first-order tail: exp(-sum_{j>=J} q^j a) for each product
    qJ = q.q**nterms
    value = value * np.exp(-(a.sum() - b.sum()) * qJ / (1 - q.q))
    value = _finite(np.complex128(value), "q-Pochhammer product")
    return (value, nterms) if full_output else value


def qpoch_inf(a, q, policy=None, full_output=False):
    """
    Infinite q-Pochhammer symbol (a;q)_inf.

    The product stops at the first j with ``|q**j a| < tail_epsilon``;
    the numeric backend applies a first-order tail correction, the
    exact backend returns the truncated partial product.

    Parameters
    ----------
    a : scalar
    q : QBase
    policy : TruncationPolicy, dict, optional
    full_output : bool
        If True, return ``(value, nterms)``.
    """
    return qpoch_ratio([a], [], q, policy, full_output=full_output)


def qpoch_n(a, q, n):
    """
    Finite q-Pochhammer symbol (a;q)_n for any integer n.

    For n < 0 this is ``1 / prod_{j=1}^{-n} (1 - a q**-j)``, consistent
    with ``(a;q)_n = (a;q)_inf / (a q**n;q)_inf``.  Exact in both
    backends.
    """
    n = int(n)
    a = q.scalar(a)
    one = q.scalar(1)
    if n >= 0:
        value = one
        qj = one
        for _ in range(n):
            value *= 1 - a * qj
            qj *= q.q
        return value
    value = one
    qinv = 1 / q.q
    qj = qinv
    for j in range(1, -n + 1):
        factor = 1 - a * qj
        if (q.exact and factor == 0) or (not q.exact and abs(factor) < _POLE_TOL):
            raise PoleEncountered(f"(a;q)_{n} has a vanishing factor 1 - a q^-{j} for a = {a}")
        value *= factor
        qj *= qinv
    return one / value


def theta_q(t, q, policy=None):
    """
    Theta function theta_q(t) = (t, q/t, q; q)_inf.

    Satisfies ``theta_q(q t) = -theta_q(t) / t``.
    """
    t = q.scalar(t)
    if q.is_zero(t):
        raise InvalidArgument("theta_q is undefined at t = 0")
    return qpoch_inf(t, q, policy) * qpoch_inf(q.q / t, q, policy) * qpoch_inf(q.q, q, policy)


def theta_ratio(t, u, q, policy=None):
    """theta_q(t) / theta_q(u), evaluated as one product."""
    t = q.scalar(t)
    u = q.scalar(u)
    if q.is_zero(t) or q.is_zero(u):
        raise InvalidArgument("theta_q is undefined at 0")
    return qpoch_ratio([t, q.q / t], [u, q.q / u], q, policy)


def p1_kernel(mu, mu0, x, s, q, policy=None):
    """
    First kernel function P1(x, s) = (q**mu s/x;q)_inf / (q**mu0 s/x;q)_inf.
    """
    x = q.scalar(x)
    if q.is_zero(x):
        raise InvalidArgument("p1_kernel needs x != 0")
    z = q.scalar(s) / x
    return qpoch_ratio([q.pow(mu) * z], [q.pow(mu0) * z], q, policy)


def p2_kernel(mu, mu0, x, s, q, policy=None):
    """
    Second kernel function
    P2(x, s) = (x/s)**(mu - mu0) (q**(1-mu0) x/s;q)_inf / (q**(1-mu) x/s;q)_inf.

    The power uses the principal branch.
    """
    s = q.scalar(s)
    if q.is_zero(s):
        raise InvalidArgument("p2_kernel needs s != 0")
    w = q.scalar(x) / s
    ratio = qpoch_ratio([q.pow(1 - mu0) * w], [q.pow(1 - mu) * w], q, policy)
    return q.power(w, mu - mu0) * ratio


class QProduct:
    """
    A function ``x -> scale * x**power * prod (u x**e;q)_inf / prod (v x**e;q)_inf``.

    *numer* and *denom* are sequences of ``(u, e)`` pairs with e = +1 or
    -1.  Called directly it evaluates numerically; ``lattice_ratio``
    gives the exact value at ``base q**k`` relative to the value at
    ``base``, which is a finite Pochhammer ratio.
    """

    def __init__(self, q, power=0, numer=(), denom=(), scale=1):
        self.q = q
        self.power = q.exponent(power)
        self.numer = [(q.scalar(u), int(e)) for u, e in numer]
        self.denom = [(q.scalar(u), int(e)) for u, e in denom]
        for _, e in self.numer + self.denom:
            if e not in (1, -1):
                raise ValueError(f"QProduct exponents must be +1 or -1, got {e}")
        self.scale = q.scalar(scale)

    def _args(self, pairs, x):
        return [u * (x if e == 1 else 1 / x) for u, e in pairs]

    def __call__(self, x, policy=None):
        q = self.q
        x = q.scalar(x)
        if q.is_zero(x):
            raise InvalidArgument("QProduct is undefined at x = 0")
        ratio = qpoch_ratio(self._args(self.numer, x), self._args(self.denom, x), q, policy)
        return self.scale * q.power(x, self.power) * ratio

    def lattice_ratio(self, base, k):
        q = self.q
        base = q.scalar(base)
        value = self.scale * q.pow(k * self.power)
        for u, e in self.numer:
            value /= qpoch_n(u * (base if e == 1 else 1 / base), q, e * k)
        for u, e in self.denom:
            value *= qpoch_n(u * (base if e == 1 else 1 / base), q, e * k)
        return value


def _tail_estimate(values):
    """Geometric tail bound from the last decade of terms."""
    mags = [abs(complex(v)) for v in values[-10:]]
    if not mags or mags[-1] == 0:
        return 0.0
    if len(mags) < 2 or mags[0] == 0:
        return mags[-1] * _RUN
    rho = (mags[-1] / mags[0]) ** (1.0 / (len(mags) - 1))
    if rho >= 1:
        return mags[-1] * _RUN
    return mags[-1] * rho / (1 - rho)


def _one_side(first, step_fn, start, step, policy, peak=0.0):
    """
    Walk terms from *start* in direction *step* until 8 consecutive terms
    are below tail_epsilon times the running maximum.
    """
    values = []
    t = first
    n = start
    quiet = 0
    while True:
        mag = abs(complex(t))
        if not math.isfinite(mag):
            raise NonConvergent(f"term at n = {n} is not finite")
        peak = max(peak, mag)
        quiet = quiet + 1 if mag <= policy.tail_epsilon * peak else 0
        values.append(t)
        if quiet >= _RUN:
            return values, n, peak
        if len(values) >= policy.max_terms:
            raise NonConvergent(
                f"terms did not decay below {policy.tail_epsilon:g} of the largest term "
                f"within {policy.max_terms} terms (direction {step:+d})"
            )
        t = step_fn(t, n)
        n += step


def sweep(first, forward, backward=None, policy=None):
    """
    Sum a unilateral (n >= 0) or bilateral sequence of terms.

    Parameters
    ----------
    first : scalar
        The term at n = 0.
    forward : callable
        ``forward(t_n, n)`` returns the term at n + 1.
    backward : callable, optional
        ``backward(t_n, n)`` returns the term at n - 1; omit for a
        unilateral sum.
    policy : TruncationPolicy, dict, optional

    Returns
    -------
    Bunch with ``value``, ``tail_bound``, ``n_plus``, ``n_minus``; the
    value is a compensated sum over n ascending from ``n_minus``.
    """
    policy = as_policy(policy)
    plus, n_plus, peak = _one_side(first, forward, 0, 1, policy)
    tail = _tail_estimate(plus)
    minus = []
    n_minus = 0
    if backward is not None:
        t = backward(first, 0)
        minus, n_minus, _ = _one_side(t, backward, -1, -1, policy, peak=peak)
        tail += _tail_estimate(minus)
    values = minus[::-1] + plus
    return Bunch(value=_fsum(values), tail_bound=float(tail), n_plus=n_plus, n_minus=n_minus)


def basic_series(numer, denom, z, q, policy=None, bilateral=False):
    """
    Basic hypergeometric sum ``sum_n prod (a;q)_n / prod (b;q)_n z**n``.

    Parameters
    ----------
    numer, denom : sequences of scalar
        Upper and lower parameters.  For an ordinary r_phi_s series
        include q among the lower parameters.
    z : scalar
    q : QBase
    policy : TruncationPolicy, dict, optional
    bilateral : bool
        Sum over all integers n instead of n >= 0.

    Returns
    -------
    Bunch with ``value``, ``tail_bound``, ``n_plus``, ``n_minus``.
    """
    a = [q.scalar(v) for v in numer]
    b = [q.scalar(v) for v in denom]
    z = q.scalar(z)
    one = q.scalar(1)

    def forward(t, n):
        qn = q.q**n
        num = one
        den = one
        for v in a:
            num *= 1 - v * qn
        for v in b:
            den *= 1 - v * qn
        if (q.exact and den == 0) or (not q.exact and abs(den) < _POLE_TOL):
            raise PoleEncountered(f"lower parameter factor vanishes at n = {n + 1}")
        return t * z * num / den

    def backward(t, n):
        qn = q.q ** (n - 1)
        num = one
        den = one
        for v in b:
            num *= 1 - v * qn
        for v in a:
            den *= 1 - v * qn
        if (q.exact and den == 0) or (not q.exact and abs(den) < _POLE_TOL):
            raise PoleEncountered(f"upper parameter factor vanishes at n = {n - 1}")
        return t * num / (den * z)

    if bilateral and q.is_zero(z):
        raise InvalidArgument("a bilateral series needs z != 0")
    return sweep(one, forward, backward if bilateral else None, policy)
