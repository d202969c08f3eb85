"""
Exact certification of the identities.

Every registered identity draws random constrained parameter sets over
exact rationals, evaluates its residual at random rational points and
reports whether every residual is the rational 0.  Each identity has a
mutated twin (suffix ``_mutated``) that must come out nonzero.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import partial

import click
import numpy as np
import pandas as pd

from .exceptions import OffLattice, PoleEncountered, UnknownIdentity
from .jackson import XI_MODES, finite_sum_identity, lattice_eigenfunction, transform_spec
from .kernel import DUAL_MAPS, mutate_dual, verify_kernel, verify_kernel_reduced
from .operators import A2Params, A3Params, A4Params, residual
from .qseries import QBase
from .solutions import (
    CASES,
    FACTORIZATIONS,
    FORMS,
    WHICH,
    constraint_rhs,
    factorization_residual,
    monomial_eigenpair,
    prefactor_eigenpair,
)
from .utilities import Bunch, format_scalar, thread_count

# Exact exponents are multiples of 1/ROOT; with half-integer draws every
# derived exponent stays in (1/4)Z.
ROOT = 4

# Denominator bounds of the random rationals.
_R_BOUND = 64
_POINT_BOUND = 256

_EXPONENT_RANGE = 3


def _fraction_part(value):
    return value - math.floor(value)


def _half(rng, span=_EXPONENT_RANGE):
    return Fraction(int(rng.integers(-2 * span, 2 * span + 1)), 2)


def _point(rng, bound=_POINT_BOUND):
    sign = 1 if rng.random() < 0.5 else -1
    return sign * Fraction(int(rng.integers(1, bound + 1)), int(rng.integers(1, bound + 1)))


def draw_q(rng):
    """Exact base ``q = r**4`` with r rational in (0, 1)."""
    den = int(rng.integers(2, _R_BOUND + 1))
    return QBase(r=Fraction(int(rng.integers(1, den)), den), root=ROOT)


def _integral_shift(rng, span=_EXPONENT_RANGE):
    return int(rng.integers(-span, span + 1))


def draw_a4(rng, q):
    """A4 parameters with ``h1 + h2 - l1 - l2 + alpha1 - alpha2 - beta`` an integer."""
    h1, h2, l1, l2, a1, a2 = (_half(rng) for _ in range(6))
    beta = _integral_shift(rng) + _fraction_part(h1 + h2 - l1 - l2 + a1 - a2)
    t1, t2 = _point(rng), _point(rng)
    return A4Params(q, h1=h1, h2=h2, l1=l1, l2=l2, alpha1=a1, alpha2=a2, beta=beta, t1=t1, t2=t2)


def draw_a3(rng, q):
    """A3 parameters with ``sum h - sum l - beta`` an integer."""
    hs = [_half(rng) for _ in range(3)]
    ls = [_half(rng) for _ in range(3)]
    beta = _integral_shift(rng) + _fraction_part(sum(hs) - sum(ls))
    values = {f"h{n}": v for n, v in enumerate(hs, start=1)}
    values.update({f"l{n}": v for n, v in enumerate(ls, start=1)})
    values.update({f"t{n}": _point(rng) for n in range(1, 4)})
    return A3Params(q, alpha=_half(rng), beta=beta, **values)


def draw_a2(rng, q):
    """A2 parameters with ``sum h - sum l`` an integer."""
    hs = [_half(rng) for _ in range(4)]
    ls = [_half(rng) for _ in range(3)]
    ls.append(_integral_shift(rng) + _fraction_part(sum(hs) - sum(ls)))
    values = {f"h{n}": v for n, v in enumerate(hs, start=1)}
    values.update({f"l{n}": v for n, v in enumerate(ls, start=1)})
    values.update({f"t{n}": _point(rng) for n in range(1, 5)})
    return A2Params(q, alpha=_half(rng), **values)


DRAWS = {"a4": draw_a4, "a3": draw_a3, "a2": draw_a2}


def _serialize(params, **extra):
    out = {"r": str(params.q.r), "root": params.q.root}
    out.update({k: format_scalar(v) for k, v in params.as_dict().items()})
    out.update({k: (v if isinstance(v, str) else format_scalar(v)) for k, v in extra.items()})
    return out


def _lattice(rng, q, base, n_points, span=5):
    return [base * q.q ** int(rng.integers(-span, span + 1)) for _ in range(n_points)]


def _kernel_identity(family, rng, n_points, mutate=False, reduced=False):
    q = draw_q(rng)
    tilde = DRAWS[family](rng, q)
    dual = DUAL_MAPS[family](tilde, _half(rng), _half(rng))
    if mutate and family == "a2":
        dual = mutate_dual(dual, alpha=dual.params.alpha + 1)
    elif mutate:
        dual = mutate_dual(dual, beta=dual.params.beta + 1)
    points = [(_point(rng), _point(rng)) for _ in range(n_points)]
    if reduced:
        res = [_guard(verify_kernel_reduced, dual, x, s) for x, s in points]
    else:
        res = [_guard(verify_kernel, dual, "P1", x, s) for x, s in points]
    params = _serialize(tilde, mu0=dual.mu0, alpha=dual.alpha)
    return params, [f"{x},{s}" for x, s in points], res


def _finite_sum_identity(family, rng, n_points, mutate=False):
    q = draw_q(rng)
    source = DRAWS[family](rng, q)
    xi_mode = XI_MODES[int(rng.integers(0, 2))]
    xi = _point(rng)
    e_source = _point(rng)
    spec = transform_spec(family, source, e_source, mu0=_half(rng), alpha=_half(rng), xi=xi, xi_mode=xi_mode)
    if mutate:
        key = "alpha1" if family == "a4" else "alpha"
        spec = Bunch(spec)
        spec.target = spec.target.replace(**{key: spec.target[key] + 1})
    lattice = spec.xi if xi_mode == "fixed" else None
    h0, h1 = _point(rng), _point(rng)
    samples = []
    res = []
    for _ in range(n_points):
        x = _point(rng)
        K = int(rng.integers(-5, 6))
        L = int(rng.integers(K, 6))
        samples.append(f"{x};K={K};L={L}")

        def difference(x=x, K=K, L=L):
            base = lattice if lattice is not None else spec.xi * x
            h = lattice_eigenfunction(source, spec.e_source, base, initial=(h0, h1))
            return finite_sum_identity(spec, h, x, K, L).difference

        res.append(_guard(difference))
    params = _serialize(source, e_source=e_source, mu0=spec.mu0, alpha=spec.alpha, xi=xi, xi_mode=xi_mode)
    return params, samples, res


def _with_constraint(p, kind, which):
    return p.replace(beta=constraint_rhs(p, kind, which))


def _eigenpair_identity(kind, rng, n_points, mutate=False):
    q = draw_q(rng)
    which = WHICH[int(rng.integers(0, 2))]
    base = _point(rng)
    if kind == "monomial":
        p = _with_constraint(draw_a4(rng, q), "monomial", which)
        pair = monomial_eigenpair(p, which, base=base)
        extra = {}
    else:
        case = CASES[int(rng.integers(0, 2))]
        form = FORMS[int(rng.integers(0, 2))]
        p = _with_constraint(draw_a4(rng, q), case, which)
        pair = prefactor_eigenpair(p, case, form, which, base=base)
        extra = {"case": case, "form": form}
    check = p.replace(beta=p.beta + 1) if mutate else p
    points = _lattice(rng, q, base, n_points)
    res = [_guard(lambda x: residual(check, pair.eigenvalue, pair.eigenfunction, [x])[0], x) for x in points]
    params = _serialize(p, which=str(which), base=base, **extra)
    return params, [format_scalar(x) for x in points], res


def _laurent_trial(coeffs):
    def trial(x):
        return coeffs[0] + coeffs[1] * x + coeffs[2] / x

    return trial


def _factorization_identity(rng, n_points, mutate=False):
    q = draw_q(rng)
    which = WHICH[int(rng.integers(0, 2))]
    form = FACTORIZATIONS[int(rng.integers(0, 3))]
    kind = {"first": "monomial", "second": "i", "third": "ii"}[form]
    p = _with_constraint(draw_a4(rng, q), kind, which)
    trials = [_laurent_trial([_point(rng) for _ in range(3)]) for _ in range(3)]
    points = [_point(rng) for _ in range(n_points)]
    res = [
        _guard(factorization_residual, p, which, form, trials, [x], 1 if mutate else 0)
        for x in points
    ]
    params = _serialize(p, which=str(which), form=form)
    return params, [format_scalar(x) for x in points], res


class _Skip:
    def __init__(self, reason):
        self.reason = reason


def _guard(func, *args):
    try:
        return func(*args)
    except (PoleEncountered, OffLattice) as err:
        return _Skip(str(err))


IDENTITIES = {}


def _register(identity_id, func, description):
    IDENTITIES[identity_id] = Bunch(func=partial(func, mutate=False), negative=False, description=description)
    IDENTITIES[f"{identity_id}_mutated"] = Bunch(
        func=partial(func, mutate=True), negative=True, description=f"negative control: {description}"
    )


for _family in ("a4", "a3", "a2"):
    _register(
        f"kernel_{_family}",
        partial(_kernel_identity, _family),
        f"kernel function identity for {_family.upper()}",
    )
    _register(
        f"finite_sum_{_family}",
        partial(_finite_sum_identity, _family),
        f"finite-sum identity of the {_family.upper()} q-integral transform",
    )
_register(
    "kernel_reduced_a4",
    partial(_kernel_identity, "a4", reduced=True),
    "kernel identity divided by the kernel",
)
_register("monomial_a4", partial(_eigenpair_identity, "monomial"), "monomial eigenpairs of A4")
_register("prefactor_a4", partial(_eigenpair_identity, "prefactor"), "Pochhammer-prefactor eigenpairs of A4")
_register("factorization_a4", _factorization_identity, "first-order factorizations of A4")


def identity_catalog():
    """The registered identities as a DataFrame (id, negative, description)."""
    rows = [
        {"identity_id": key, "negative": entry.negative, "description": entry.description}
        for key, entry in IDENTITIES.items()
    ]
    return pd.DataFrame(rows, columns=["identity_id", "negative", "description"])


def _certificate(identity_id, entry, index, seed_seq, n_points):
    rng = np.random.default_rng(seed_seq)
    params, samples, residuals = entry.func(rng, n_points)
    values = [r for r in residuals if not isinstance(r, _Skip)]
    if not values:
        reasons = sorted({r.reason for r in residuals})
        result = "skipped"
        worst = None
        reason = "; ".join(reasons) if reasons else "no sample points"
    else:
        worst = max(abs(Fraction(v)) for v in values)
        result = "exact-zero" if worst == 0 else "nonzero"
        reason = None
    if result == "skipped":
        # a control that never evaluated has not shown the identity failing
        passed = not entry.negative
    else:
        passed = (result == "nonzero") if entry.negative else (result == "exact-zero")
    return Bunch(
        identity_id=identity_id,
        index=index,
        parameter_set=params,
        sample_points=samples,
        result=result,
        max_residual=None if worst is None else format_scalar(worst),
        skipped_points=len(residuals) - len(values),
        reason=reason,
        negative_control=entry.negative,
        passed=passed,
    )


def certify(identity_id, n_param_sets=10, n_points=20, seed=0, verbose=False):
    """
    Certify one identity over random exact parameter sets.

    Parameters
    ----------
    identity_id : str
        A key of ``IDENTITIES``.
    n_param_sets : int
    n_points : int
        Sample points per parameter set.
    seed : int
        Parameter set k uses the k-th child of ``SeedSequence(seed)``,
        so results do not depend on the worker count.
    verbose : bool
        Print a progress line per identity to stderr.

    Returns
    -------
    list of Certificate Bunches, ordered by index, with
    ``identity_id``, ``index``, ``parameter_set``, ``sample_points``,
    ``result`` ("exact-zero", "nonzero" or "skipped"),
    ``max_residual``, ``negative_control`` and ``passed``.
    """
    try:
        entry = IDENTITIES[identity_id]
    except KeyError as err:
        raise UnknownIdentity(f"unknown identity {identity_id!r}; see identity_catalog()") from err
    if n_param_sets < 0 or n_points < 0:
        raise ValueError("n_param_sets and n_points must be non-negative")
    if verbose:
        click.echo(f"certifying {identity_id}: {n_param_sets} parameter sets x {n_points} points", err=True)
    children = np.random.SeedSequence(seed).spawn(n_param_sets)
    work = partial(_certificate, identity_id, entry, n_points=n_points)
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        certs = list(pool.map(work, range(n_param_sets), children))
    if verbose:
        bad = sum(not c.passed for c in certs)
        click.echo(f"  {identity_id}: {len(certs) - bad} passed, {bad} failed", err=True)
    return certs


def certificates_to_json(certs):
    """JSON lines, one certificate per line."""
    if not certs:
        return ""
    return pd.DataFrame([dict(c) for c in certs]).to_json(orient="records", lines=True)
