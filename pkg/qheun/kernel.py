"""
Kernel functions and the parameter dualities between the operators.

A kernel function Phi(x, s) intertwines an operator acting in x with
the same family of operator acting in s:

    A(x; params) Phi(x, s) = q**nu A(s; tilde) Phi(x, s),

where ``Phi = x**-alpha s**(chi + 1 - alpha_tilde) P(x, s)`` and P is
either kernel of ``qseries``.  The duality maps below produce
(params, chi, mu, nu) from the tilde side; the inverse maps go back.
"""
from .exceptions import PoleEncountered
from .operators import coefficients
from .qseries import p1_kernel, p2_kernel, qpoch_n
from .utilities import Bunch

VARIANTS = ("P1", "P2")


def _dual(family, tilde, params, mu0, chi, nu):
    if family == "a4":
        alpha, alpha_tilde = params.alpha1, tilde.alpha1
    else:
        alpha, alpha_tilde = params.alpha, tilde.alpha
    return Bunch(
        family=family,
        tilde=tilde,
        params=params,
        mu0=mu0,
        chi=chi,
        nu=nu,
        mu=mu0 + chi + 1,
        alpha=alpha,
        alpha_tilde=alpha_tilde,
        sigma=chi + 1 - alpha_tilde,
    )


def dual_a4(tilde, mu0, alpha1):
    """
    Duality map for A4 from the tilde (s-side) parameters.

    Parameters
    ----------
    tilde : A4Params
        Parameters of the operator acting in s; t1, t2 are shared.
    mu0, alpha1 : exponent
        Free parameters of the kernel.

    Returns
    -------
    Bunch with ``tilde``, ``params`` (A4Params acting in x), ``chi``,
    ``nu``, ``mu``, ``mu0`` and the kernel exponents ``alpha``,
    ``alpha_tilde``, ``sigma``.
    """
    q = tilde.q
    mu0 = q.exponent(mu0)
    alpha1 = q.exponent(alpha1)
    chi = (tilde.h1 + tilde.h2 - tilde.l1 - tilde.l2 + tilde.alpha1 - tilde.alpha2 - tilde.beta) / 2
    params = tilde.replace(
        h1=tilde.l1 + mu0 + chi,
        h2=tilde.l2 + mu0 + chi,
        l1=tilde.h1 + mu0,
        l2=tilde.h2 + mu0,
        alpha1=alpha1,
        alpha2=alpha1 + tilde.alpha1 - tilde.alpha2 - chi,
        beta=-tilde.beta - chi,
    )
    return _dual("a4", tilde, params, mu0, chi, mu0 + alpha1 - tilde.alpha2)


def dual_a4_inverse(params, mu0, alpha2_tilde):
    """Tilde parameters from the x-side A4 parameters; inverse of ``dual_a4``."""
    q = params.q
    mu0 = q.exponent(mu0)
    alpha2_tilde = q.exponent(alpha2_tilde)
    chi = (params.h1 + params.h2 - params.l1 - params.l2 + params.alpha1 - params.alpha2 - params.beta) / 2
    return params.replace(
        h1=params.l1 - mu0,
        h2=params.l2 - mu0,
        l1=params.h1 - mu0 - chi,
        l2=params.h2 - mu0 - chi,
        alpha1=alpha2_tilde + params.alpha2 - params.alpha1 + chi,
        alpha2=alpha2_tilde,
        beta=-params.beta - chi,
    )


def _shift_hl(tilde, mu0, chi):
    changes = {}
    for n in range(1, tilde.rank + 1):
        changes[f"l{n}"] = tilde[f"h{n}"] + mu0
        changes[f"h{n}"] = tilde[f"l{n}"] + mu0 + chi
    return changes


def _unshift_hl(params, mu0, chi):
    changes = {}
    for n in range(1, params.rank + 1):
        changes[f"h{n}"] = params[f"l{n}"] - mu0
        changes[f"l{n}"] = params[f"h{n}"] - mu0 - chi
    return changes


def dual_a3(tilde, mu0, alpha):
    """Duality map for A3 (chi = (sum h~ - sum l~ - beta~)/2)."""
    q = tilde.q
    mu0 = q.exponent(mu0)
    alpha = q.exponent(alpha)
    chi = (sum(tilde.hs()) - sum(tilde.ls()) - tilde.beta) / 2
    params = tilde.replace(alpha=alpha, beta=-tilde.beta - chi, **_shift_hl(tilde, mu0, chi))
    return _dual("a3", tilde, params, mu0, chi, 2 * mu0 + alpha - tilde.alpha + chi)


def dual_a3_inverse(params, mu0, alpha_tilde):
    q = params.q
    mu0 = q.exponent(mu0)
    chi = (sum(params.hs()) - sum(params.ls()) - params.beta) / 2
    return params.replace(
        alpha=q.exponent(alpha_tilde), beta=-params.beta - chi, **_unshift_hl(params, mu0, chi)
    )


def dual_a2(tilde, mu0, alpha):
    """Duality map for A2 (chi = (sum h~ - sum l~)/2)."""
    q = tilde.q
    mu0 = q.exponent(mu0)
    alpha = q.exponent(alpha)
    chi = (sum(tilde.hs()) - sum(tilde.ls())) / 2
    params = tilde.replace(alpha=alpha, **_shift_hl(tilde, mu0, chi))
    return _dual("a2", tilde, params, mu0, chi, 2 * mu0 + alpha - tilde.alpha + chi)


def dual_a2_inverse(params, mu0, alpha_tilde):
    q = params.q
    mu0 = q.exponent(mu0)
    chi = (sum(params.hs()) - sum(params.ls())) / 2
    return params.replace(alpha=q.exponent(alpha_tilde), **_unshift_hl(params, mu0, chi))


DUAL_MAPS = {"a4": dual_a4, "a3": dual_a3, "a2": dual_a2}


def mutate_dual(dual, **changes):
    """Copy of a duality map whose x-side parameters are changed; breaks the identity."""
    out = Bunch(dual)
    out.params = dual.params.replace(**changes)
    return out


class KernelFunction:
    """
    The kernel ``Phi(x, s) = x**-alpha s**sigma P(x, s)`` of a duality map.

    Numeric backend: direct evaluation with P1 or P2.
    Exact backend: values relative to ``Phi(x0, s0)`` at lattice points
    ``x = x0 q**i``, ``s = s0 q**j``; both variants give the same
    relative values there.
    """

    def __init__(self, dual, variant="P1", base=None, policy=None):
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
        self.dual = dual
        self.variant = variant
        self.q = dual.params.q
        self.policy = policy
        if self.q.exact:
            if base is None:
                raise ValueError("the exact backend needs a base point (x0, s0)")
            self.x0, self.s0 = (self.q.scalar(v) for v in base)
            self.z0 = self.s0 / self.x0

    def __call__(self, x, s):
        q = self.q
        d = self.dual
        if q.exact:
            i = q.lattice_index(x, self.x0)
            j = q.lattice_index(s, self.s0)
            return q.pow(-i * d.alpha) * q.pow(j * d.sigma) * self._relative_p(j - i)
        kern = p1_kernel if self.variant == "P1" else p2_kernel
        p = kern(d.mu, d.mu0, x, s, q, self.policy)
        return q.power(x, -d.alpha) * q.power(s, d.sigma) * p

    def _relative_p(self, k):
        q = self.q
        d = self.dual
        if self.variant == "P1":
            return qpoch_n(q.pow(d.mu0) * self.z0, q, k) / qpoch_n(q.pow(d.mu) * self.z0, q, k)
        w0 = 1 / self.z0
        return (
            q.pow(-k * (d.mu - d.mu0))
            * qpoch_n(q.pow(1 - d.mu) * w0, q, -k)
            / qpoch_n(q.pow(1 - d.mu0) * w0, q, -k)
        )


def phi(dual, variant, x, s, base=None, policy=None):
    return KernelFunction(dual, variant, base=base, policy=policy)(x, s)


def phi_a4(dual, variant, x, s, base=None, policy=None):
    """
    Kernel function of the A4 duality, ``x**-alpha1 s**(1+chi-alpha1~) P(x, s)``.

    Parameters
    ----------
    dual : Bunch
        Output of ``dual_a4``.
    variant : {"P1", "P2"}
    x, s : scalar, nonzero
    base : (x0, s0), optional
        Required by the exact backend.
    """
    return phi(dual, variant, x, s, base=base, policy=policy)


phi_a3 = phi
phi_a2 = phi


def _terms(dual, variant, x, s, base, policy):
    kern = KernelFunction(dual, variant, base=base or (x, s), policy=policy)
    q = dual.params.q
    x = q.scalar(x)
    s = q.scalar(s)
    qq = q.q
    a, b, c = coefficients(dual.params, x)
    at, bt, ct = coefficients(dual.tilde, s)
    qnu = q.pow(dual.nu)
    lhs = [a * kern(x / qq, s), b * kern(x, s), c * kern(qq * x, s)]
    rhs = [qnu * at * kern(x, s / qq), qnu * bt * kern(x, s), qnu * ct * kern(x, qq * s)]
    return lhs, rhs


def verify_kernel(dual, variant, x, s, base=None, policy=None, relative=False):
    """
    Residual of the kernel identity at (x, s).

    Returns ``A(x; params) Phi - q**nu A(s; tilde) Phi``; zero when the
    duality map holds.  With ``relative=True`` the absolute residual is
    divided by the largest of the six individual terms.
    """
    lhs, rhs = _terms(dual, variant, x, s, base, policy)
    res = sum(lhs) - sum(rhs)
    if not relative:
        return res
    scale = max(abs(complex(t)) for t in lhs + rhs)
    return abs(complex(res)) / scale if scale else 0.0


def verify_kernel_a4(dual, variant, x, s, base=None, policy=None, relative=False):
    """Kernel identity residual for an A4 duality map (see ``verify_kernel``)."""
    return verify_kernel(dual, variant, x, s, base=base, policy=policy, relative=relative)


def verify_kernel_a3(dual, variant, x, s, base=None, policy=None, relative=False):
    return verify_kernel(dual, variant, x, s, base=base, policy=policy, relative=relative)


def verify_kernel_a2(dual, variant, x, s, base=None, policy=None, relative=False):
    return verify_kernel(dual, variant, x, s, base=base, policy=policy, relative=relative)


def verify_kernel_reduced(dual, x, s):
    """
    The kernel identity divided by Phi(x, s), evaluated without any kernel.

    Uses only the recurrences of P, so it is a rational function of
    (x, s); zero exactly when the duality map holds.
    """
    q = dual.params.q
    x = q.scalar(x)
    s = q.scalar(s)
    d = dual
    den1 = x - q.pow(d.mu) * s
    den2 = x - q.pow(d.mu0 - 1) * s
    if q.is_zero(den1) or q.is_zero(den2):
        raise PoleEncountered("(x, s) lies on an excluded line of the reduced identity")
    a, b, c = coefficients(d.params, x)
    at, bt, ct = coefficients(d.tilde, s)
    first = (q.pow(d.alpha) * a - q.pow(d.nu + d.sigma) * ct) * (x - q.pow(d.mu0) * s) / den1
    second = (q.pow(-d.alpha) * c - q.pow(d.nu - d.sigma) * at) * (x - q.pow(d.mu - 1) * s) / den2
    return first + second + b - q.pow(d.nu) * bt


def verify_kernel_reduced_a4(dual, x, s):
    """Reduced (kernel-free) form of the A4 kernel identity."""
    return verify_kernel_reduced(dual, x, s)
