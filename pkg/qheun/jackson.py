"""
Jackson q-integrals and the q-integral transformations between
eigenfunctions of the operators.

A source eigenfunction h of ``A(s; primed) h = E' h`` is mapped to

    g(x) = int_0^{xi infinity} h(s) Phi(x, s) d_q s,

where Phi is the kernel of the duality between the adjoint (tilde)
parameters of the source and the target parameters.  g then satisfies
``A(x; target) g = E g + (1 - q) (g2 - g1)`` with boundary terms g1, g2
given by the behavior of h at s = 0 and s = infinity.
"""
import math
import warnings
from functools import partial

import numpy as np
from numpy.polynomial import polynomial as npoly

from .exceptions import (
    ConstraintViolated,
    InvalidArgument,
    LimitNotDetected,
    NonConvergent,
    PoleEncountered,
)
from .kernel import DUAL_MAPS, VARIANTS, KernelFunction
from .operators import (
    HALF,
    A4Params,
    LatticeFunction,
    coefficients,
    exponents,
    laurent_coefficients,
    relative_residual,
)
from .qseries import as_policy, p1_kernel, sweep, theta_ratio
from .utilities import Bunch

XI_MODES = ("fixed", "proportional")

# Lattice limits: consecutive points that must agree, their tolerance,
# and the number of lattice steps tried.  Boundary brackets expand in
# integer powers of s (or 1/s), the first _BRACKET_ORDER of which are
# eliminated before comparing.
_LIMIT_POINTS = 10
_LIMIT_TOL = 1e-8
_LIMIT_STEPS = 400
_BRACKET_ORDER = 3

# Self-residual accepted for a series-built eigenfunction.
_SERIES_CHECK = 1e-10


def jackson_integral(f, xi, q, policy=None):
    """
    Bilateral Jackson integral from 0 to xi * infinity.

    Computes ``(1 - q) sum_n q**n xi f(q**n xi)`` over all integers n,
    stopping each direction after 8 consecutive terms below
    ``tail_epsilon`` times the largest term.

    Parameters
    ----------
    f : LatticeFunction or callable
        Evaluated at the points ``xi * q**n``.
    xi : scalar, nonzero
    q : QBase
    policy : TruncationPolicy, dict, optional

    Returns
    -------
    Bunch with ``value``, ``tail_bound``, ``n_plus`` and ``n_minus``;
    the terms summed are those with ``n_minus <= n <= n_plus``.
    """
    xi = q.scalar(xi)
    if q.is_zero(xi):
        raise InvalidArgument("the Jackson integral needs xi != 0")

    def term(n):
        s = xi * q.q**n
        return s * f(s)

    res = sweep(term(0), lambda t, n: term(n + 1), lambda t, n: term(n - 1), policy)
    scale = 1 - q.q
    return Bunch(
        value=scale * res.value,
        tail_bound=float(abs(scale)) * res.tail_bound,
        n_plus=res.n_plus,
        n_minus=res.n_minus,
    )


def lattice_limit(
    term, direction=1, q=None, npoints=_LIMIT_POINTS, tol=_LIMIT_TOL, max_steps=_LIMIT_STEPS, order=1
):
    """
    Limit of ``term(n)`` as n runs to ``direction * infinity``.

    The limit is accepted once *npoints* consecutive values agree to
    *tol* relative to ``max(1, |value|)``.  With *q* given, consecutive
    values are first combined as ``(v_next - q**j v) / (1 - q**j)`` for
    ``j = 1 .. order``, which removes corrections in the first *order*
    powers of the lattice variable (of its inverse when direction is -1).
    """
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    values = []
    raws = []
    for k in range(max_steps + 1):
        n = direction * k
        try:
            raw = np.complex128(term(n))
        except NonConvergent as err:
            raise LimitNotDetected(f"sequence could not be evaluated at n = {n}: {err}") from err
        if not np.isfinite(raw):
            raise LimitNotDetected(f"sequence is not finite at n = {n}")
        if q is None:
            v = raw
        else:
            raws = raws[-order:] + [raw]
            if len(raws) <= order:
                continue
            column = raws
            for j in range(1, order + 1):
                f = q**j
                column = [(b - f * a) / (1 - f) for a, b in zip(column, column[1:])]
            v = column[0]
        values.append(v)
        if len(values) < npoints:
            continue
        window = values[-npoints:]
        last = window[-1]
        if max(abs(w - last) for w in window) <= tol * max(1.0, abs(last)):
            if k == max_steps:
                warnings.warn(f"lattice limit stabilized only at the last allowed step {n}", stacklevel=2)
            return last
    raise LimitNotDetected(f"sequence did not stabilize to {tol:g} within {max_steps} lattice steps")


def tilde_params(source):
    """Parameters of the adjoint equation solved by a source eigenfunction."""
    changes = {}
    for n in range(1, source.rank + 1):
        changes[f"h{n}"] = source[f"l{n}"]
        changes[f"l{n}"] = source[f"h{n}"]
    if source.family == "a4":
        changes.update(alpha1=2 - source.alpha1, alpha2=2 - source.alpha2)
    else:
        changes["alpha"] = 2 - source.alpha
    return source.replace(**changes)


def transform_spec(family, source, e_source, mu0=0, alpha=0, xi=1, variant="P1", xi_mode="fixed"):
    """
    The data of one q-integral transformation.

    Parameters
    ----------
    family : {"a4", "a3", "a2"}
    source : A4Params, A3Params or A2Params
        Parameters of the equation ``A(s; source) h = e_source h``.
    e_source : scalar
        The source eigenvalue E'.
    mu0, alpha : exponent
        Free kernel parameters (alpha is alpha_1 for A4).
    xi : scalar
        Lattice point of the Jackson integral; with
        ``xi_mode="proportional"`` it is the constant A in ``xi = A x``.
    variant : {"P1", "P2"}
    xi_mode : {"fixed", "proportional"}

    Returns
    -------
    Bunch with the inputs plus ``tilde``, ``dual``, ``target``, ``chi``,
    ``mu``, ``nu``, ``e_tilde``, ``e_target`` and ``lambda_plus`` (the
    source exponent at zero that the integrand divides out).
    """
    if source.family != family:
        raise TypeError(f"expected {family.upper()} parameters, got {type(source).__name__}")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if xi_mode not in XI_MODES:
        raise ValueError(f"xi_mode must be one of {XI_MODES}, got {xi_mode!r}")
    q = source.q
    xi = q.scalar(xi)
    if q.is_zero(xi):
        raise InvalidArgument("xi must be nonzero")
    tilde = tilde_params(source)
    dual = DUAL_MAPS[family](tilde, mu0, alpha)
    e_source = q.scalar(e_source)
    if family == "a4":
        e_tilde = q.pow(tilde.alpha1 + tilde.alpha2 - 2) * e_source
    else:
        e_tilde = q.pow(2 * tilde.alpha - 2) * e_source
    return Bunch(
        family=family,
        q=q,
        source=source,
        e_source=e_source,
        mu0=dual.mu0,
        alpha=dual.alpha,
        xi=xi,
        xi_mode=xi_mode,
        variant=variant,
        tilde=tilde,
        dual=dual,
        target=dual.params,
        chi=dual.chi,
        mu=dual.mu,
        nu=dual.nu,
        e_tilde=e_tilde,
        e_target=q.pow(dual.nu) * e_tilde,
        lambda_plus=exponents(source).at_zero[0],
    )


def lattice_base(spec, x):
    """The xi of the integral defining g(x)."""
    return spec.xi if spec.xi_mode == "fixed" else spec.xi * spec.q.scalar(x)


def _numeric(spec):
    if spec.q.exact:
        raise InvalidArgument("q-integral transforms are evaluated with the numeric backend")


def transform_point(spec, h, x, policy=None):
    """The Jackson integral defining g(x), with its truncation data."""
    _numeric(spec)
    q = spec.q
    kern = KernelFunction(spec.dual, spec.variant, policy=policy)
    x = q.scalar(x)
    return jackson_integral(lambda s: h(s) * kern(x, s), lattice_base(spec, x), q, policy)


def transform(spec, h, policy=None):
    """
    The transformed function g as a LatticeFunction.

    ``g(x) = x**-alpha int s**-lambda_plus h(s) P(x, s) d_q s``, where P
    is the kernel variant of *spec*.
    """
    _numeric(spec)
    return LatticeFunction(
        lambda x: transform_point(spec, h, x, policy).value, base=spec.xi, q=spec.q, label="transform"
    )


def _check_family(spec, family):
    if spec.family != family:
        raise TypeError(f"expected a {family.upper()} transform, got {spec.family.upper()}")


def transform_a4(spec, h, policy=None):
    """
    q-integral transform of a q-Heun eigenfunction.

    Parameters
    ----------
    spec : Bunch
        From ``transform_spec("a4", ...)``.
    h : LatticeFunction
        Eigenfunction of ``A4(s; spec.source)`` with eigenvalue
        ``spec.e_source``, evaluable on the lattice of the integral.

    Returns
    -------
    LatticeFunction g
    """
    _check_family(spec, "a4")
    return transform(spec, h, policy)


def transform_a3(spec, h, policy=None):
    _check_family(spec, "a3")
    return transform(spec, h, policy)


def transform_a2(spec, h, policy=None):
    _check_family(spec, "a2")
    return transform(spec, h, policy)


def _bracket(spec, h, kern, x):
    """The boundary expression q s a~(qs) h(qs) Phi(x, s) - s c~(s) h(s) Phi(x, qs)."""
    q = spec.q
    qq = q.q
    qnu = q.pow(spec.nu)

    def bracket(s):
        at = coefficients(spec.tilde, qq * s)[0]
        ct = coefficients(spec.tilde, s)[2]
        # grouped so that no partial product outgrows the bracket itself
        return qnu * (qq * s * (at * (h(qq * s) * kern(x, s))) - s * (ct * (h(s) * kern(x, qq * s))))

    return bracket


def boundary_limits(spec, h, x, policy=None):
    """
    Numeric boundary terms g1(x), g2(x) of a transform.

    g1 is the limit of the boundary expression at ``s = q**L xi`` for
    L -> +infinity and g2 its limit at ``s = q**(K-1) xi`` for
    K -> -infinity.  Valid for every family; for A4 it reproduces the
    closed forms of ``boundary_terms_a4``.
    """
    _numeric(spec)
    q = spec.q
    x = q.scalar(x)
    kern = KernelFunction(spec.dual, spec.variant, policy=policy)
    bracket = _bracket(spec, h, kern, x)
    base = lattice_base(spec, x)
    qq = q.q
    g1 = lattice_limit(lambda n: bracket(base * qq**n), direction=1, q=qq, order=_BRACKET_ORDER)
    g2 = lattice_limit(lambda n: bracket(base * qq ** (n - 1)), direction=-1, q=qq, order=_BRACKET_ORDER)
    return Bunch(g1=g1, g2=g2)


def boundary_terms_a4(spec, h, policy=None, C1=None, C2=None):
    """
    Closed-form boundary terms of an A4 transform.

    ``C1 = lim h(s) / s**lambda_plus`` as s -> 0 and
    ``C2 = lim h(s) / s**-alpha'_1`` as s -> infinity, both along the
    lattice of the integral; either can be supplied instead.  In
    proportional mode the lattice ``A x q**n`` moves with x, so an
    estimated constant is a function of x (a q-periodic factor in h
    makes it vary).

    Returns
    -------
    Bunch with ``C1``, ``C2`` (scalars, or LatticeFunctions of x when
    estimated in proportional mode) and the LatticeFunctions ``g1``,
    ``g2``.
    """
    _check_family(spec, "a4")
    _numeric(spec)
    q = spec.q
    src = spec.source
    qq = q.q
    base = spec.xi
    # (exponent, direction) of the limits defining C1 and C2
    growth = {1: (spec.lambda_plus, 1), 2: (-src.alpha1, -1)}

    def estimate(which, b):
        lam, direction = growth[which]
        return q.scalar(lattice_limit(lambda n: h(b * qq**n) / q.power(b * qq**n, lam), direction=direction))

    given = {1: C1, 2: C2}
    if spec.xi_mode == "fixed":
        fixed = {k: q.scalar(v) if v is not None else estimate(k, base) for k, v in given.items()}

        def constant(which, x):
            return fixed[which]

        C1, C2 = fixed[1], fixed[2]
    else:
        cache = {}

        def constant(which, x):
            if given[which] is not None:
                return q.scalar(given[which])
            x = q.scalar(x)
            key = (which, x)
            if key not in cache:
                cache[key] = estimate(which, lattice_base(spec, x))
            return cache[key]

        C1, C2 = (
            LatticeFunction(partial(constant, k), base=base, q=q, label=f"C{k}") if v is None else q.scalar(v)
            for k, v in given.items()
        )

    mu0, chi, alpha = spec.mu0, spec.chi, spec.alpha
    w1 = q.pow(mu0 + alpha + src.h1 + src.h2 + chi) * (q.pow(src.beta) - 1) * src.t1 * src.t2
    w2 = q.pow(mu0 + alpha) * (q.pow(src.alpha2 - src.alpha1) - 1)

    def theta_quotient(x, xi):
        return theta_ratio(q.pow(-mu0 - chi) * x / xi, q.pow(1 - mu0) * x / xi, q, policy)

    if spec.variant == "P1":

        def g1(x):
            x = q.scalar(x)
            return w1 * constant(1, x) * q.power(x, -alpha)

        def g2(x):
            x = q.scalar(x)
            k2 = w2 * constant(2, x)
            if k2 == 0:
                return q.scalar(0)
            xi = lattice_base(spec, x)
            return k2 * q.power(x, -alpha) * theta_quotient(x, xi) * q.power(xi, chi + 1)

    else:

        def g1(x):
            x = q.scalar(x)
            k1 = w1 * constant(1, x)
            if k1 == 0:
                return q.scalar(0)
            xi = lattice_base(spec, x)
            return k1 * q.power(x, chi + 1 - alpha) * q.power(xi, -chi - 1) / theta_quotient(x, xi)

        def g2(x):
            x = q.scalar(x)
            return w2 * constant(2, x) * q.power(x, chi + 1 - alpha)

    return Bunch(
        C1=C1,
        C2=C2,
        g1=LatticeFunction(g1, base=base, q=q, label="g1"),
        g2=LatticeFunction(g2, base=base, q=q, label="g2"),
    )


def verify_transform(spec, h, points, boundary=None, policy=None, relative=True):
    """
    Residuals ``A g - E g - (1 - q)(g2 - g1)`` of a transform.

    Parameters
    ----------
    spec, h : as for ``transform``
    points : sequence of scalar
    boundary : None, "numeric", "none" or Bunch
        None uses the closed forms for A4 and ``boundary_limits``
        otherwise; "none" drops the boundary terms; a Bunch with ``g1``
        and ``g2`` (e.g. from ``boundary_terms_a4``) is used as given.
    relative : bool
        Divide each residual by the largest of its terms.

    Returns
    -------
    list of residuals, one per point
    """
    _numeric(spec)
    q = spec.q
    qq = q.q
    if boundary is None:
        boundary = boundary_terms_a4(spec, h, policy) if spec.family == "a4" else "numeric"
    g = transform(spec, h, policy)
    E = spec.e_target
    out = []
    for x in points:
        x = q.scalar(x)
        a, b, c = coefficients(spec.target, x)
        g0 = g(x)
        terms = [a * g(x / qq), b * g0, c * g(qq * x), -E * g0]
        if isinstance(boundary, str):
            if boundary == "numeric":
                lim = boundary_limits(spec, h, x, policy)
                terms.append(-(1 - qq) * (lim.g2 - lim.g1))
            elif boundary != "none":
                raise ValueError(f"boundary must be 'numeric', 'none' or boundary terms, got {boundary!r}")
        else:
            terms.append(-(1 - qq) * (boundary.g2(x) - boundary.g1(x)))
        res = sum(terms)
        if relative:
            scale = max(abs(complex(t)) for t in terms)
            res = abs(complex(res)) / scale if scale else 0.0
        out.append(res)
    return out


def verify_transform_a4(spec, h, points, boundary=None, policy=None, relative=True):
    """Residuals of the inhomogeneous q-Heun equation satisfied by an A4 transform."""
    _check_family(spec, "a4")
    return verify_transform(spec, h, points, boundary=boundary, policy=policy, relative=relative)


def verify_transform_a3(spec, h, points, boundary=None, policy=None, relative=True):
    _check_family(spec, "a3")
    return verify_transform(spec, h, points, boundary=boundary, policy=policy, relative=relative)


def verify_transform_a2(spec, h, points, boundary=None, policy=None, relative=True):
    _check_family(spec, "a2")
    return verify_transform(spec, h, points, boundary=boundary, policy=policy, relative=relative)


def corollary_a4(h, xi, source, e_source, policy=None):
    """
    The transform with mu0 = 0 and alpha1 = 0 on the hyperplane lambda'_+ = 0.

    ``g(x) = int h(s) (q**(2 - alpha'_1) s/x; q)_inf / (s/x; q)_inf d_q s``
    solves the q-Heun equation with parameters
    ``(h'_i + 1 - alpha'_1, l'_i, 0, alpha'_2 - 1, beta' + 1 - alpha'_1)`` and
    eigenvalue ``q**-alpha'_1 E'``.

    Returns
    -------
    Bunch with ``g``, ``target``, ``E`` and the equivalent ``spec``.
    """
    q = source.q
    p = source
    defect = p.h1 + p.h2 - p.l1 - p.l2 - p.alpha1 - p.alpha2 + p.beta + 2
    if abs(complex(defect)) > 1e-12:
        raise ConstraintViolated(
            f"h'1 + h'2 - l'1 - l'2 - alpha'1 - alpha'2 + beta' + 2 must vanish, got {defect}"
        )
    spec = transform_spec("a4", source, e_source, mu0=0, alpha=0, xi=xi)
    _numeric(spec)
    shift = 1 - p.alpha1
    target = A4Params(
        q,
        h1=p.h1 + shift,
        h2=p.h2 + shift,
        l1=p.l1,
        l2=p.l2,
        alpha1=0,
        alpha2=p.alpha2 - 1,
        beta=p.beta + shift,
        t1=p.t1,
        t2=p.t2,
    )
    mu = 2 - p.alpha1
    xi = q.scalar(xi)

    def g(x):
        x = q.scalar(x)
        return jackson_integral(lambda s: h(s) * p1_kernel(mu, 0, x, s, q, policy), xi, q, policy).value

    return Bunch(
        g=LatticeFunction(g, base=xi, q=q, label="corollary"),
        target=target,
        E=q.pow(-p.alpha1) * q.scalar(e_source),
        spec=spec,
    )


def finite_sum_identity(spec, h, x, K, L, base=None, policy=None):
    """
    Both sides of the finite-sum identity behind the transforms.

    With ``g_KL(x) = (1 - q) sum_{n=K}^{L} s h(s) Phi(x, s)`` at
    ``s = q**n xi``, the left side is ``(A(x; target) - E) g_KL(x)`` and
    the right side the boundary expressions at ``q**L xi`` and
    ``q**(K-1) xi``; in proportional mode (``xi = A x``) two more
    boundary expressions appear.

    Works in both backends.  In the exact backend h must be exact on
    the lattice (e.g. from ``lattice_eigenfunction`` with initial
    values) and the kernel is normalized at *base* (default ``(x, xi)``).

    Returns
    -------
    Bunch with ``lhs``, ``rhs`` and ``difference``.
    """
    if K > L:
        raise ValueError(f"need K <= L, got K = {K}, L = {L}")
    q = spec.q
    qq = q.q
    x = q.scalar(x)
    xi = lattice_base(spec, x)
    if q.exact:
        base = base or (x, xi)
    kern = KernelFunction(spec.dual, spec.variant, base=base, policy=policy)
    one = 1 - qq
    E = spec.e_target

    def g_kl(y):
        b = lattice_base(spec, y)
        total = q.scalar(0)
        for n in range(K, L + 1):
            s = b * qq**n
            total += s * h(s) * kern(y, s)
        return one * total

    a, b, c = coefficients(spec.target, x)
    lhs = a * g_kl(x / qq) + (b - E) * g_kl(x) + c * g_kl(qq * x)
    bracket = _bracket(spec, h, kern, x)
    s_l = xi * qq**L
    s_k = xi * qq ** (K - 1)
    rhs = -one * bracket(s_l) + one * bracket(s_k)
    if spec.xi_mode == "proportional":

        def side(s):
            return s * a * h(s) * kern(x / qq, s) - qq * s * c * h(qq * s) * kern(qq * x, qq * s)

        rhs += -one * side(s_l) + one * side(s_k)
    return Bunch(lhs=lhs, rhs=rhs, difference=lhs - rhs)


def local_series(params, e_value, exponent="plus", policy=None):
    """
    Coefficients of the solution ``s**lam sum_k c_k s**k`` at s = 0.

    Numeric backend.  c_0 = 1 and lam is the exponent at zero selected
    by *exponent* ("plus" or "minus").  The series converges for |s|
    below the smallest root of the T**-1 coefficient; coefficients are
    generated until 8 consecutive terms at half that radius are
    negligible.

    Returns
    -------
    Bunch with ``exponent``, ``coefficients`` (ndarray) and ``radius``.
    """
    q = params.q
    if q.exact:
        raise InvalidArgument("local series are computed with the numeric backend")
    if exponent not in ("plus", "minus"):
        raise ValueError(f"exponent must be 'plus' or 'minus', got {exponent!r}")
    policy = as_policy(policy)
    lc = laurent_coefficients(params)
    b = lc.b.copy()
    b[-lc.offset] -= complex(e_value)
    lam = complex(exponents(params).at_zero[0 if exponent == "plus" else 1])
    logq = np.log(complex(q.q))
    width = len(lc.a)

    def indicial(i, rho):
        return lc.a[i] * np.exp(-rho * logq) + b[i] + lc.c[i] * np.exp(rho * logq)

    radius = min(abs(complex(q.pow(h + HALF) * t)) for h, t in zip(params.hs(), params.ts()))
    half = radius / 2
    coeffs = [1 + 0j]
    peak = 1.0
    quiet = 0
    m = 0
    while quiet < 8:
        m += 1
        if m > policy.max_terms:
            raise NonConvergent(f"local series did not converge within {policy.max_terms} terms")
        rho = lam + m
        den = indicial(0, rho)
        size = max(abs(lc.a[0] * np.exp(-rho * logq)), abs(b[0]), abs(lc.c[0] * np.exp(rho * logq)))
        if abs(den) <= 1e-13 * size:
            raise PoleEncountered(f"exponent {lam} is resonant at order {m}")
        acc = sum(coeffs[m - i] * indicial(i, rho - i) for i in range(1, min(m, width - 1) + 1))
        coeffs.append(-acc / den)
        mag = abs(coeffs[-1]) * half**m
        peak = max(peak, mag)
        quiet = quiet + 1 if mag <= policy.tail_epsilon * peak else 0
    return Bunch(exponent=lam, coefficients=np.asarray(coeffs), radius=radius)


def lattice_eigenfunction(params, e_value, xi, initial=None, exponent="plus", policy=None, check=True):
    """
    An eigenfunction ``A(s; params) h = E h`` on the lattice ``xi q**n``.

    Parameters
    ----------
    params : A4Params, A3Params or A2Params
    e_value : scalar
    xi : scalar, nonzero
    initial : (h(xi), h(q xi)), optional
        Start the three-term recurrence from these values.  Required by
        the exact backend, where the result is an exact lattice solution
        for any E.
    exponent : {"plus", "minus"}
        Numeric backend without *initial*: the local solution at s = 0
        with this exponent, evaluated by its series near 0 and continued
        outward with the recurrence.
    check : bool
        Verify the series against its own residual (< 1e-10).

    Returns
    -------
    LatticeFunction (indexed on the lattice through xi)
    """
    q = params.q
    E = q.scalar(e_value)
    xi = q.scalar(xi)
    if q.is_zero(xi):
        raise InvalidArgument("xi must be nonzero")
    qq = q.q
    cache = {}
    if initial is not None:
        h0, h1 = (q.scalar(v) for v in initial)
        cache[0], cache[1] = h0, h1
        start = 0
        series = None
    elif q.exact:
        raise ValueError("the exact backend needs two initial values")
    else:
        series = local_series(params, E, exponent, policy)
        reach = series.radius / 2
        start = 0
        if abs(complex(xi)) > reach:
            start = int(math.ceil(math.log(reach / abs(complex(xi))) / math.log(abs(complex(qq)))))

    def point(n):
        return xi * qq**n

    def coeff(s):
        a, b, c = coefficients(params, s)
        b = b - E
        if not q.exact and abs(s) > 1:
            # the coefficients grow like a power of s; only their ratios enter
            scale = max(abs(a), abs(b), abs(c))
            a, b, c = a / scale, b / scale, c / scale
        return a, b, c

    def from_series(n):
        s = point(n)
        return npoly.polyval(s, series.coefficients) * q.power(s, series.exponent)

    def value(n):
        if n in cache:
            return cache[n]
        if series is not None:
            if n >= start:
                cache[n] = from_series(n)
                return cache[n]
            for m in (start, start + 1):
                if m not in cache:
                    cache[m] = from_series(m)
        lo = min(cache)
        if n < lo:
            for m in range(lo - 1, n - 1, -1):
                a, b, c = coeff(point(m + 1))
                if q.is_zero(a):
                    raise PoleEncountered(f"recurrence meets a zero T**-1 coefficient at s = {point(m + 1)}")
                cache[m] = -(b * cache[m + 1] + c * cache[m + 2]) / a
            return cache[n]
        hi = max(cache)
        for m in range(hi + 1, n + 1):
            a, b, c = coeff(point(m - 1))
            if q.is_zero(c):
                raise PoleEncountered(f"recurrence meets a zero T coefficient at s = {point(m - 1)}")
            cache[m] = -(a * cache[m - 2] + b * cache[m - 1]) / c
        return cache[n]

    h = LatticeFunction.on_lattice(value, xi, q, label="eigenfunction")
    if series is not None and check:
        trials = [point(n) for n in range(start + 1, start + 7)]
        err = relative_residual(params, E, h, trials)
        if err > _SERIES_CHECK:
            raise NonConvergent(f"local series fails its own residual check ({err:.3g})")
    return h
