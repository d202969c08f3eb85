"""
Explicit solutions of the q-Heun equation.

Monomial eigenfunctions, the gauge transformations that attach
Pochhammer prefactors to them, the factorized forms of the operator
behind these solutions, the bilateral and unilateral basic
hypergeometric sums used by the closed forms, and the three worked
q-integral transforms.
"""
import math
from fractions import Fraction

import numpy as np

from .exceptions import ConstraintViolated, DivisionByZero, DomainViolated, InexactPower
from .jackson import lattice_base, transform, transform_spec
from .operators import HALF, LatticeFunction, apply
from .qseries import QProduct, basic_series, qpoch_ratio
from .utilities import Bunch

WHICH = ((1, 2), (2, 1))
CASES = ("i", "ii")
FORMS = ("first", "second")
FACTORIZATIONS = ("first", "second", "third")

# Indices whose (h, l) pair is swapped relative to the monomial solution.
_SWAPS = {"monomial": (), "i": (1,), "ii": (1, 2)}

_CLOSE = 1e-12


def _close(q, u, v):
    if q.exact:
        return u == v
    return abs(complex(u) - complex(v)) <= _CLOSE


def _alphas(p, which):
    if tuple(which) not in WHICH:
        raise ValueError(f"which must be (1, 2) or (2, 1), got {which!r}")
    i, j = which
    return p[f"alpha{i}"], p[f"alpha{j}"]


def constraint_rhs(p, kind, which):
    """
    The value R of the relation ``+-beta = R`` required by a solution kind.

    *kind* is "monomial", "i" or "ii"; for the prefactor kinds the (h, l)
    pairs listed in ``_SWAPS`` enter with the opposite sign.
    """
    ai, aj = _alphas(p, which)
    total = ai - aj + 2
    for k, (h, l) in enumerate(zip(p.hs(), p.ls()), start=1):
        total += (l - h) if k in _SWAPS[kind] else (h - l)
    return total


def eigenvalue(p, kind, which):
    """The eigenvalue attached to a solution kind (see ``constraint_rhs``)."""
    q = p.q
    ai, aj = _alphas(p, which)
    value = q.scalar(0)
    for k, (h, l, t) in enumerate(zip(p.hs(), p.ls(), p.ts()), start=1):
        upper, lower = (l, h) if k in _SWAPS[kind] else (h, l)
        value -= (q.pow(ai + upper + HALF) + q.pow(aj + lower - HALF)) * t
    return value


def _require(p, kind, which):
    rhs = constraint_rhs(p, kind, which)
    for sign in (1, -1):
        if _close(p.q, sign * p.beta, rhs):
            return Bunch(kind=kind, which=tuple(which), rhs=rhs, sign=sign)
    raise ConstraintViolated(
        f"{kind} solution with (i, i') = {tuple(which)} needs +-beta = {rhs}, got beta = {p.beta}"
    )


def constraint_holds(pair):
    """Recheck the constraint stored with an EigenPair against its parameters."""
    c = pair.constraint
    return _close(pair.params.q, c.sign * pair.params.beta, constraint_rhs(pair.params, c.kind, c.which))


def power_function(q, e, base=1):
    """x**e; in the exact backend relative to its value at *base*."""
    if q.exact:
        e = q.exponent(e)
        return LatticeFunction.on_lattice(lambda n: q.pow(n * e), base, q, label=f"x**{e}")
    return LatticeFunction(lambda x: q.power(x, e), base=q.scalar(base), q=q, label=f"x**{e}")


def monomial_eigenpair(p, which=(1, 2), base=1):
    """
    The monomial eigenfunction ``x**-alpha_i`` of A4.

    Parameters
    ----------
    p : A4Params
    which : (1, 2) or (2, 1)
        The pair (i, i').
    base : scalar
        Lattice base of the exact-backend eigenfunction.

    Returns
    -------
    EigenPair : Bunch with ``params``, ``eigenfunction``, ``eigenvalue``,
    ``constraint``, ``kind`` and ``which``.

    Raises ConstraintViolated unless
    ``+-beta = h1 + h2 - l1 - l2 + alpha_i - alpha_i' + 2``.
    """
    constraint = _require(p, "monomial", which)
    ai, _ = _alphas(p, which)
    return Bunch(
        params=p,
        eigenfunction=power_function(p.q, -ai, base),
        eigenvalue=eigenvalue(p, "monomial", which),
        constraint=constraint,
        kind="monomial",
        which=tuple(which),
    )


def _swap(p, k):
    return p.replace(**{f"h{k}": p[f"l{k}"], f"l{k}": p[f"h{k}"]})


def gauge_prefactor(p, which="g1", index=1):
    """The Pochhammer prefactor of a gauge transformation as a QProduct."""
    q = p.q
    h, l, t = p[f"h{index}"], p[f"l{index}"], p[f"t{index}"]
    if which == "g1":
        return QProduct(q, numer=[(q.pow(h + HALF) * t, -1)], denom=[(q.pow(l + HALF) * t, -1)])
    if which == "g2":
        return QProduct(
            q,
            power=h - l,
            numer=[(1 / (q.pow(l - HALF) * t), 1)],
            denom=[(1 / (q.pow(h - HALF) * t), 1)],
        )
    raise ValueError(f"which must be 'g1' or 'g2', got {which!r}")


def gauge_transform(p, f, which="g1", index=1, policy=None):
    """
    Gauge transformation between parameter sets differing by h_k <-> l_k.

    If f solves ``A4(x; p with h_k, l_k swapped) f = E f`` then
    ``g1 = f (q**(h_k+1/2) t_k/x;q)_inf / (q**(l_k+1/2) t_k/x;q)_inf`` and
    ``g2 = f x**(h_k-l_k) (x/(q**(l_k-1/2) t_k);q)_inf / (x/(q**(h_k-1/2) t_k);q)_inf``
    solve ``A4(x; p) g = E g``.

    Parameters
    ----------
    p : A4Params
        Parameters of the equation solved by the result.
    f : LatticeFunction
        Indexed on its base in the exact backend.
    which : {"g1", "g2"}
    index : {1, 2}

    Returns
    -------
    Bunch with ``params`` (p), ``source`` (the swapped parameters),
    ``prefactor`` (QProduct) and ``function`` (LatticeFunction g).
    """
    q = p.q
    prod = gauge_prefactor(p, which, index)
    if q.exact:
        if not f.indexed:
            raise ValueError("the exact backend needs an indexed lattice function")
        base = f.base
        g = LatticeFunction.on_lattice(lambda n: f.at(n) * prod.lattice_ratio(base, n), base, q, label=which)
    else:
        g = LatticeFunction(lambda x: f(x) * prod(x, policy), base=f.base, q=q, label=which)
    return Bunch(params=p, source=_swap(p, index), prefactor=prod, function=g)


def prefactor_eigenpair(p, case="i", form="first", which=(1, 2), base=1, policy=None):
    """
    Eigenpairs with one-sided (case "i") or two-sided (case "ii")
    Pochhammer prefactors, obtained by gauge transforming a monomial.

    *form* "first" uses prefactors in 1/x, "second" prefactors in x.
    Raises ConstraintViolated unless
    ``+-beta = -h1 + h2 + l1 - l2 + alpha_i - alpha_i' + 2`` (case i) or
    ``+-beta = -h1 - h2 + l1 + l2 + alpha_i - alpha_i' + 2`` (case ii).
    """
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}, got {case!r}")
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    constraint = _require(p, case, which)
    swaps = _SWAPS[case]
    seed_params = p
    for k in swaps:
        seed_params = _swap(seed_params, k)
    seed = monomial_eigenpair(seed_params, which, base)
    f = seed.eigenfunction
    gauge = "g1" if form == "first" else "g2"
    # undo the swaps one index at a time, ending on p
    current = seed_params
    for k in swaps:
        current = _swap(current, k)
        f = gauge_transform(current, f, gauge, k, policy).function
    return Bunch(
        params=p,
        eigenfunction=f,
        eigenvalue=eigenvalue(p, case, which),
        constraint=constraint,
        kind=f"prefactor-{case}-{form}",
        which=tuple(which),
    )


def _factor_pair(p, which, form):
    q = p.q
    qq = q.q
    ai, aj = _alphas(p, which)
    up = [q.pow(h + HALF) * t for h, t in zip(p.hs(), p.ts())]
    lo_plus = [q.pow(l + HALF) * t for l, t in zip(p.ls(), p.ts())]
    lo = [q.pow(l - HALF) * t for l, t in zip(p.ls(), p.ts())]
    qai = q.pow(ai)

    if form == "first":

        def right(f, y):
            return f(y / qq) - qai * f(y)

        def left(rf, x):
            upper = (x - up[0]) * (x - up[1]) * rf(x)
            return (upper - q.pow(aj) * (x - lo[0]) * (x - lo[1]) * rf(qq * x)) / x

        kind = "monomial"
    elif form == "second":

        def right(f, y):
            return (y - up[0]) * f(y / qq) - qai * (y - lo_plus[0]) * f(y)

        def left(rf, x):
            return ((x - up[1]) * rf(x) - q.pow(aj - 1) * (x - lo[1]) * rf(qq * x)) / x

        kind = "i"
    elif form == "third":

        def right(f, y):
            return (y - up[0]) * (y - up[1]) * f(y / qq) - qai * (y - lo_plus[0]) * (y - lo_plus[1]) * f(y)

        def left(rf, x):
            return (rf(x) - q.pow(aj - 2) * rf(qq * x)) / x

        kind = "ii"
    else:
        raise ValueError(f"form must be one of {FACTORIZATIONS}, got {form!r}")
    return right, left, kind


def factorization_residual(p, which=(1, 2), form="first", trials=(), points=(), offset=0):
    """
    Max residual of an operator factorization ``A4 - E = L R``.

    The right factor R is first order and annihilates the matching
    eigenfunction; the left factor L completes A4 - E.

    Parameters
    ----------
    p : A4Params
    which : (1, 2) or (2, 1)
    form : {"first", "second", "third"}
        Factorization behind the monomial, one-sided prefactor and
        two-sided prefactor solutions respectively.
    trials : sequence of callables
        Probe functions, evaluated at x/q, x and qx.
    points : sequence of scalar
    offset : scalar
        Added to E; a nonzero offset breaks the identity.

    Returns
    -------
    Max of ``|L R f - (A f - E f)|`` over trials and points.
    """
    right, left, kind = _factor_pair(p, which, form)
    _require(p, kind, which)
    q = p.q
    E = eigenvalue(p, kind, which) + q.scalar(offset)
    worst = q.scalar(0) if q.exact else 0.0
    for f in trials:

        def rf(y, f=f):
            return right(f, y)

        for x in points:
            x = q.scalar(x)
            res = left(rf, x) - (apply(p, f, x) - E * f(x))
            worst = max(worst, abs(res)) if q.exact else max(worst, abs(complex(res)))
    return worst


def ramanujan_1psi1(a, b, z, q, policy=None):
    """
    Both sides of Ramanujan's bilateral summation.

    Returns
    -------
    Bunch with ``sum_side`` (the bilateral series
    ``sum_n (a;q)_n/(b;q)_n z**n``), ``product_side``
    (``(q, b/a, az, q/(az);q)_inf / (b, q/a, z, b/(az);q)_inf``) and the
    ``tail_bound`` of the sum.

    Raises DomainViolated unless ``|b/a| < |z| < 1``.
    """
    a, b, z = (q.scalar(v) for v in (a, b, z))
    if q.is_zero(a) or q.is_zero(z):
        raise DomainViolated("the bilateral summation needs a != 0 and z != 0")
    if not abs(complex(b / a)) < abs(complex(z)) < 1:
        raise DomainViolated(
            f"need |b/a| < |z| < 1, got |b/a| = {abs(complex(b / a)):g}, |z| = {abs(complex(z)):g}"
        )
    series = basic_series([a], [b], z, q, policy, bilateral=True)
    qq = q.q
    product = qpoch_ratio([qq, b / a, a * z, qq / (a * z)], [b, qq / a, z, b / (a * z)], q, policy)
    return Bunch(sum_side=series.value, product_side=product, tail_bound=series.tail_bound)


def two_phi_one(a, b, c, q, z, policy=None, full_output=False):
    """
    Basic hypergeometric series 2phi1(a, b; c; q, z).

    ``sum_{n >= 0} (a;q)_n (b;q)_n / ((c;q)_n (q;q)_n) z**n``.  A
    terminating series (a or b in q**-N) is summed for any z.

    Parameters
    ----------
    a, b, c : scalar
    q : QBase
    z : scalar
    policy : TruncationPolicy, dict, optional
    full_output : bool
        Return the Bunch of ``basic_series`` instead of the value.
    """
    res = basic_series([a, b], [c, q.q], z, q, policy)
    return res if full_output else res.value


def quasi_periodicity_class(f, x0, q):
    """
    The exponent rho with ``f(q x0) / f(x0) = q**-rho``.

    For ``f = x**-k`` this is k.  Exact backend: rho is returned as a
    Fraction and must be a multiple of ``1/root``.
    """
    x0 = q.scalar(x0)
    f0 = f(x0)
    f1 = f(q.q * x0)
    if q.is_zero(f0) or q.is_zero(f1):
        raise DivisionByZero(f"f vanishes at x0 = {x0} or q x0")
    ratio = f1 / f0
    if q.exact:
        ratio = Fraction(ratio)
        r = q.r
        n = round(
            (math.log(abs(ratio.numerator)) - math.log(ratio.denominator))
            / (math.log(abs(r.numerator)) - math.log(r.denominator))
        )
        if r**n != ratio:
            raise InexactPower(f"f(q x0)/f(x0) = {ratio} is not a power of r = {r}")
        return Fraction(-n, q.root)
    return np.complex128(-np.log(complex(ratio)) / np.log(complex(q.q)))


WORKED_CASES = (1, 2, 3)


def case_beta(case, source):
    """The beta' forced on the source parameters by a worked case."""
    p = source
    spread = p.h1 + p.h2 - p.l1 - p.l2
    if case == 1:
        return -p.h1 + p.h2 + p.l1 - p.l2 - p.alpha1 + p.alpha2 + 2
    if case == 2:
        return spread + p.alpha1 - p.alpha2 - 2
    if case == 3:
        return spread - p.alpha1 + p.alpha2 + 2
    raise ValueError(f"case must be one of {WORKED_CASES}, got {case!r}")


def _check_case(case, p):
    q = p.q
    want = case_beta(case, p)
    if not _close(q, p.beta, want):
        raise ConstraintViolated(f"worked case {case} needs beta' = {want}, got {p.beta}")
    if not np.real(p.alpha1) < np.real(p.alpha2):
        raise ConstraintViolated(f"worked case {case} needs alpha'1 < alpha'2 for the q-integral to converge")
    if case != 2 and not np.real(p.beta) < 0:
        raise ConstraintViolated(f"worked case {case} needs beta' < 0 for the q-integral to converge")


def worked_case(case, source, alpha1=0, xi=None, xi_mode="fixed", policy=None):
    """
    One of the three explicit q-integral transforms of Pochhammer-type
    eigenfunctions.

    Parameters
    ----------
    case : {1, 2, 3}
        1: one-sided prefactor source, transform satisfies h2 = l2 - 1.
        2: two-sided prefactor source, C1 = 1 and an inhomogeneous
        equation.  3: monomial source ``s**-alpha'_2``, closed form by the
        bilateral summation.
    source : A4Params
        Source (primed) parameters; beta' must equal ``case_beta``.
    alpha1 : exponent
        The free kernel exponent; mu0 is 0.
    xi : scalar, optional
        Lattice point, or the constant A of ``xi = A x`` when
        *xi_mode* is "proportional".  Case 1 defaults to the values at
        which the series reduces to 2phi1: ``q**(l'1+1/2) t1`` (fixed)
        and ``q**(h'2-l'2+1)`` (proportional); the others default to 1
        (fixed) and ``q**(1/2)`` (proportional).
    xi_mode : {"fixed", "proportional"}

    Returns
    -------
    Bunch with ``g_series``, ``g_closed`` (None in case 2),
    ``g_transform``, ``target`` (target parameters), ``E``,
    ``e_source``, ``h`` (the source eigenfunction), ``inhomogeneous``
    (the function on the right of ``A g - E g``) and ``spec``.
    """
    p = source
    q = p.q
    if case not in WORKED_CASES:
        raise ValueError(f"case must be one of {WORKED_CASES}, got {case!r}")
    _check_case(case, p)
    if case == 1:
        pair = prefactor_eigenpair(p, "i", "second", which=(2, 1), policy=policy)
    elif case == 2:
        pair = prefactor_eigenpair(p, "ii", "second", which=(2, 1), policy=policy)
    else:
        pair = monomial_eigenpair(p, which=(2, 1))
    if xi is None:
        if case == 1:
            xi = q.pow(p.l1 + HALF) * p.t1 if xi_mode == "fixed" else q.pow(p.h2 - p.l2 + 1)
        else:
            # xi = x would put xi/x on the pole of the kernel
            xi = 1 if xi_mode == "fixed" else q.pow(HALF)
    spec = transform_spec("a4", p, pair.eigenvalue, mu0=0, alpha=alpha1, xi=xi, xi_mode=xi_mode)
    qq = q.q
    one = 1 - qq
    a1 = spec.alpha
    t1, t2 = p.t1, p.t2
    target = spec.target

    def qp(e):
        return q.pow(e)

    if case == 1:
        z = qp(1 - p.beta)

        def g_series(x):
            x = q.scalar(x)
            xi_x = lattice_base(spec, x)
            upper = [qp(-p.h1 + HALF) * xi_x / t1, xi_x / x]
            lower = [qp(-p.l1 + HALF) * xi_x / t1, qp(-p.h2 + p.l2) * xi_x / x]
            pref = one * q.power(xi_x, 1 - p.beta) * q.power(x, -a1) * qpoch_ratio(lower, upper, q, policy)
            return pref * basic_series(upper, lower, z, q, policy, bilateral=True).value

        if xi_mode == "fixed":

            def g_closed(x):
                x = q.scalar(x)
                u = qp(p.l1 + HALF) * t1 / x
                v = qp(-p.h2 + p.l2 + p.l1 + HALF) * t1 / x
                w = qp(-p.h1 + p.l1 + 1)
                pref = one * q.power(spec.xi, 1 - p.beta) * q.power(x, -a1)
                pref = pref * qpoch_ratio([qq, v], [w, u], q, policy)
                return pref * two_phi_one(u, w, v, q, z, policy)

        else:

            def g_closed(x):
                x = q.scalar(x)
                u = qp(p.h2 - p.l1 - p.l2 + 1 + HALF) * x / t1
                v = qp(-p.h1 + p.h2 - p.l2 + 1 + HALF) * x / t1
                w = qp(p.h2 - p.l2 + 1)
                pref = (
                    one
                    * q.power(spec.xi * x, 1 - p.beta)
                    * q.power(x, -a1)
                    * qpoch_ratio([u, qq], [v, w], q, policy)
                )
                return pref * two_phi_one(v, w, u, q, z, policy)

    elif case == 2:
        chi = spec.chi

        def g_series(x):
            x = q.scalar(x)
            xi_x = lattice_base(spec, x)
            upper = [
                qp(-target.h1 + chi + HALF) * xi_x / t1,
                qp(-target.h2 + chi + HALF) * xi_x / t2,
                xi_x / x,
            ]
            lower = [
                qp(-target.l1 + HALF) * xi_x / t1,
                qp(-target.l2 + HALF) * xi_x / t2,
                qp(chi + 1) * xi_x / x,
            ]
            pref = one * xi_x * q.power(x, -a1) * qpoch_ratio(lower, upper, q, policy)
            return pref * basic_series(upper, lower, qq, q, policy, bilateral=True).value

        g_closed = None

    else:
        z = qp(1 - p.beta)
        m = -p.beta - p.alpha1 + p.alpha2 + 2

        def g_series(x):
            x = q.scalar(x)
            xi_x = lattice_base(spec, x)
            pref = one * q.power(xi_x, 1 - p.beta) * q.power(x, -a1)
            pref = pref * qpoch_ratio([qp(m) * xi_x / x], [xi_x / x], q, policy)
            return pref * basic_series([xi_x / x], [qp(m) * xi_x / x], z, q, policy, bilateral=True).value

        def g_closed(x):
            x = q.scalar(x)
            xi_x = lattice_base(spec, x)
            numer = [z * xi_x / x, x / (qp(-p.beta) * xi_x), qp(m), qq]
            denom = [xi_x / x, qq * x / xi_x, z, qp(1 - p.alpha1 + p.alpha2)]
            return one * q.power(xi_x, 1 - p.beta) * q.power(x, -a1) * qpoch_ratio(numer, denom, q, policy)

    if case == 2:
        k = -one * qp(a1 + target.h1 + target.h2 - spec.chi) * (qp(-spec.chi - 1) - 1) * t1 * t2

        def inhomogeneous(x):
            return k * q.power(q.scalar(x), -a1)

    else:

        def inhomogeneous(x):
            return q.scalar(0)

    def wrap(rule, label):
        return None if rule is None else LatticeFunction(rule, base=spec.xi, q=q, label=label)

    return Bunch(
        case=case,
        source=p,
        e_source=pair.eigenvalue,
        h=pair.eigenfunction,
        spec=spec,
        target=target,
        E=spec.e_target,
        xi=spec.xi,
        g_series=wrap(g_series, "series"),
        g_closed=wrap(g_closed, "closed"),
        g_transform=transform(spec, pair.eigenfunction, policy),
        inhomogeneous=wrap(inhomogeneous, "inhomogeneous"),
    )
