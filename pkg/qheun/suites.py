"""
Verification suites and transform tables behind the command line.

A suite is a list of checks.  Each check returns its largest residual
together with the parameter set that produced it; a negative control
is the same check on deliberately broken data and passes only when its
residual is large.
"""
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import partial

import click
import numpy as np
import pandas as pd

from .certify import certify
from .jackson import lattice_eigenfunction, transform_point, transform_spec, verify_transform
from .kernel import DUAL_MAPS, mutate_dual, verify_kernel
from .operators import FAMILIES, A4Params, LatticeFunction, make_params, relative_residual, zero_function
from .qseries import QBase, as_policy
from .solutions import (
    CASES,
    FORMS,
    WHICH,
    case_beta,
    constraint_rhs,
    monomial_eigenpair,
    prefactor_eigenpair,
    ramanujan_1psi1,
    worked_case,
)
from .utilities import Bunch, format_scalar, thread_count

SUITES = ("kernels", "transforms", "solutions")

EXACT_IDENTITIES = {
    "kernels": ["kernel_a4", "kernel_a3", "kernel_a2", "kernel_reduced_a4"],
    "transforms": ["finite_sum_a4", "finite_sum_a3", "finite_sum_a2"],
    "solutions": ["monomial_a4", "prefactor_a4", "factorization_a4"],
}

# Relative residual accepted by each numeric check, and the residual a
# negative control must exceed.
TOLERANCES = {
    "kernel": 1e-10,
    "eigenpair": 1e-11,
    "ramanujan": 1e-12,
    "worked_case": 1e-10,
    "transform": 1e-8,
}
CONTROL_THRESHOLD = 1e-3

# Source parameter sets of the worked transforms, q = 1/2.
CURATED = {
    1: {
        "h1": 1.3, "h2": 0.1, "l1": 0.2, "l2": 1.4,
        "alpha1": 0.1, "alpha2": 0.4, "beta": -0.1,
        "t1": 0.8, "t2": 1.2,
    },
    2: {
        "h1": 0.3, "h2": -0.2, "l1": 0.1, "l2": 0.4,
        "alpha1": 0.1, "alpha2": 0.5, "beta": -2.8,
        "t1": 0.9, "t2": 1.1,
    },
    3: {
        "h1": 0.1, "h2": -0.3, "l1": 0.7, "l2": 1.7,
        "alpha1": 0.2, "alpha2": 0.6, "beta": -0.2,
        "t1": 0.8, "t2": 1.3,
    },
}
CURATED_Q = 0.5

# Lattice point of the A3/A2 transforms, inside the radius of the local series at zero.
VARIANT_XI = 0.05


def _uniform(rng, lo=-1.0, hi=1.0):
    return float(rng.uniform(lo, hi))


def _numeric_t(rng):
    return complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5))


def draw_numeric(rng, family, q):
    """Random real exponents and complex t's for a numeric parameter set."""
    cls = FAMILIES[family]
    values = {k: _uniform(rng) for k in cls.exponent_keys()}
    values.update({k: _numeric_t(rng) for k in cls.t_keys()})
    return make_params(family, q, **values)


def _point(rng):
    return complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))


def _kernel_check(family, rng, n_points, mutate=False):
    q = QBase(q=float(rng.uniform(0.2, 0.7)))
    tilde = draw_numeric(rng, family, q)
    dual = DUAL_MAPS[family](tilde, _uniform(rng), _uniform(rng))
    if mutate:
        key = "alpha" if family == "a2" else "beta"
        dual = mutate_dual(dual, **{key: dual.params[key] + 1})
    worst = 0.0
    for variant in ("P1", "P2"):
        for _ in range(n_points):
            worst = max(worst, verify_kernel(dual, variant, _point(rng), _point(rng), relative=True))
    return worst, tilde.as_dict()


def _eigenpair_check(kind, rng, n_points, mutate=False):
    q = QBase(q=float(rng.uniform(0.2, 0.7)))
    which = WHICH[int(rng.integers(0, 2))]
    p = draw_numeric(rng, "a4", q)
    if kind == "monomial":
        p = p.replace(beta=constraint_rhs(p, "monomial", which))
        pair = monomial_eigenpair(p, which)
    else:
        case = CASES[int(rng.integers(0, 2))]
        form = FORMS[int(rng.integers(0, 2))]
        p = p.replace(beta=constraint_rhs(p, case, which))
        pair = prefactor_eigenpair(p, case, form, which)
    check = p.replace(beta=p.beta + 1) if mutate else p
    points = [_point(rng) for _ in range(n_points)]
    return relative_residual(check, pair.eigenvalue, pair.eigenfunction, points), p.as_dict()


def _ramanujan_check(rng, n_points, mutate=False):
    worst = 0.0
    for _ in range(n_points):
        q = QBase(q=float(rng.uniform(0.1, 0.7)))
        z = float(rng.uniform(0.2, 0.9))
        a = float(rng.uniform(0.3, 2.0))
        b = a * z * float(rng.uniform(0.05, 0.9))
        res = ramanujan_1psi1(a, b, z, q)
        product = res.product_side
        if mutate:
            # the sum at z against the product at a shifted argument
            product = ramanujan_1psi1(a, b, 1.1 * z, q).product_side
        worst = max(worst, abs(complex(res.sum_side - product)) / abs(complex(product)))
    return worst, {"draws": n_points}


def _curated(case, rng):
    p = dict(CURATED[case])
    scale = float(rng.uniform(0.9, 1.1))
    p["t1"] *= scale
    p["t2"] *= scale
    return A4Params(QBase(q=CURATED_Q), **p)


def _x_points(rng, n_points):
    # off every lattice through 1
    return [float(rng.uniform(0.6, 0.95)) * 1.37 for _ in range(n_points)]


def _worked_case_check(case, rng, n_points, mutate=False):
    source = _curated(case, rng)
    wc = worked_case(case, source, alpha1=0.25)
    closed = wc.g_closed
    if mutate:
        # closed form of a neighbouring source
        shifted = source.replace(alpha2=source.alpha2 - 0.05)
        closed = worked_case(case, shifted.replace(beta=case_beta(case, shifted)), alpha1=0.25).g_closed
    worst = 0.0
    for x in _x_points(rng, n_points):
        worst = max(worst, abs(complex(wc.g_series(x) / closed(x) - 1)))
    return worst, source.as_dict()


def _transform_check(rng, n_points, mutate=False):
    source = _curated(2, rng)
    wc = worked_case(2, source, alpha1=0.25)
    spec = wc.spec
    if mutate:
        spec = Bunch(spec)
        spec.e_target = spec.e_target + 1
    res = verify_transform(spec, wc.h, _x_points(rng, n_points))
    return max(res), source.as_dict()



def _variant_transform_check(family, rng, n_points, mutate=False):
    q = QBase(q=CURATED_Q)
    source = draw_numeric(rng, family, q)
    e_source = _uniform(rng, -2.0, 2.0)
    # mu0 in [0.1, 0.2] keeps (q**mu0 s/x;q) away from zero for x in _x_points
    mu0 = float(rng.uniform(0.1, 0.2))
    spec = transform_spec(family, source, e_source, mu0=mu0, alpha=_uniform(rng, -0.5, 0.5), xi=VARIANT_XI)
    # at zero A2 has exponents lambda, lambda + 1; the larger one has a resonance-free series
    h = lattice_eigenfunction(source, e_source, spec.xi, exponent="plus" if family == "a3" else "minus")
    if mutate:
        spec = Bunch(spec)
        spec.e_target = spec.e_target + 1
    res = verify_transform(spec, h, _x_points(rng, n_points))
    return max(res), dict(source.as_dict(), e_source=e_source, mu0=mu0, alpha=spec.alpha)


NUMERIC_CHECKS = {
    "kernels": [
        (f"kernel_{family}", TOLERANCES["kernel"], partial(_kernel_check, family))
        for family in ("a4", "a3", "a2")
    ],
    "solutions": [
        ("monomial_a4", TOLERANCES["eigenpair"], partial(_eigenpair_check, "monomial")),
        ("prefactor_a4", TOLERANCES["eigenpair"], partial(_eigenpair_check, "prefactor")),
        ("ramanujan_1psi1", TOLERANCES["ramanujan"], _ramanujan_check),
    ],
    "transforms": [
        ("worked_case_1", TOLERANCES["worked_case"], partial(_worked_case_check, 1)),
        ("worked_case_3", TOLERANCES["worked_case"], partial(_worked_case_check, 3)),
        ("transform_case_2", TOLERANCES["transform"], _transform_check),
        ("transform_a3", TOLERANCES["transform"], partial(_variant_transform_check, "a3")),
        ("transform_a2", TOLERANCES["transform"], partial(_variant_transform_check, "a2")),
    ],
}


def _numeric_row(suite, name, tolerance, check, seed_seq, n_points, negative):
    rng = np.random.default_rng(seed_seq)
    worst, params = check(rng, n_points, mutate=negative)
    passed = worst > CONTROL_THRESHOLD if negative else worst < tolerance
    return Bunch(
        suite=suite,
        identity=f"{name}_mutated" if negative else name,
        backend="numeric",
        negative_control=negative,
        max_residual=float(worst),
        tolerance=tolerance,
        passed=bool(passed),
        parameter_set={k: format_scalar(v) for k, v in params.items()},
    )


def _exact_row(suite, identity, seed, n_param_sets, n_points, verbose):
    certs = certify(identity, n_param_sets, n_points, seed, verbose=verbose)
    failing = [c for c in certs if not c.passed]
    worst = max((Fraction(c.max_residual) for c in certs if c.max_residual is not None), default=None)
    return Bunch(
        suite=suite,
        identity=identity,
        backend="exact",
        negative_control=identity.endswith("_mutated"),
        max_residual=None if worst is None else format_scalar(worst),
        tolerance=0,
        passed=not failing,
        parameter_set=(failing[0] if failing else certs[0]).parameter_set if certs else {},
    )


def run_suite(
    suite="all",
    backend="numeric",
    seed=0,
    tolerance=None,
    negative_controls=False,
    verbose=False,
    n_param_sets=5,
    n_points=5,
):
    """
    Run a verification suite.

    Parameters
    ----------
    suite : {"kernels", "transforms", "solutions", "all"}
    backend : {"numeric", "exact"}
    seed : int
    tolerance : float, optional
        Overrides the tolerance of every numeric check.
    negative_controls : bool
        Also run the mutated twin of every check.
    verbose : bool
        Progress lines on stderr.
    n_param_sets, n_points : int
        Exact backend: parameter sets and points per identity.
        Numeric backend: points per check (one parameter set per seed).

    Returns
    -------
    pandas.DataFrame with one row per check: ``suite``, ``identity``,
    ``backend``, ``negative_control``, ``max_residual``, ``tolerance``,
    ``passed`` and ``parameter_set`` (the failing one if any).
    """
    suites = SUITES if suite == "all" else (suite,)
    for name in suites:
        if name not in SUITES:
            raise ValueError(f"suite must be one of {SUITES + ('all',)}, got {suite!r}")
    controls = (False, True) if negative_controls else (False,)
    rows = []
    if backend == "exact":
        for name in suites:
            for identity in EXACT_IDENTITIES[name]:
                for negative in controls:
                    ident = f"{identity}_mutated" if negative else identity
                    rows.append(_exact_row(name, ident, seed, n_param_sets, n_points, verbose))
    elif backend == "numeric":
        jobs = []
        for name in suites:
            for k, (ident, tol, check) in enumerate(NUMERIC_CHECKS[name]):
                seed_seq = np.random.SeedSequence([seed, SUITES.index(name), k])
                for negative in controls:
                    jobs.append((name, ident, tolerance or tol, check, seed_seq, n_points, negative))
        with ThreadPoolExecutor(max_workers=thread_count()) as pool:
            rows = list(pool.map(lambda job: _numeric_row(*job), jobs))
        if verbose:
            for row in rows:
                status = "ok" if row.passed else "FAILED"
                click.echo(f"{row.suite}/{row.identity}: {row.max_residual:.3g} {status}", err=True)
    else:
        raise ValueError(f"backend must be 'numeric' or 'exact', got {backend!r}")
    columns = ["suite", "identity", "backend", "negative_control", "max_residual", "tolerance", "passed"]
    frame = pd.DataFrame([dict(r) for r in rows], columns=columns + ["parameter_set"])
    return frame


TABLE_COLUMNS = ["index", "x", "re_g", "im_g", "residual", "tail_bound", "closed_ratio"]


def _boundary_for_case(wc):
    q = wc.spec.q
    if wc.case != 2:
        return "none"
    scale = -1 / (1 - q.q)
    g1 = LatticeFunction(lambda x: scale * wc.inhomogeneous(x), base=wc.xi, q=q, label="g1")
    return Bunch(g1=g1, g2=zero_function(q))


def transform_table(cfg, verbose=False):
    """
    Evaluate a q-integral transform on a list of points.

    Parameters
    ----------
    cfg : Bunch
        From ``process_transform_config``.
    verbose : bool

    Returns
    -------
    pandas.DataFrame with columns ``index, x, re_g, im_g, residual,
    tail_bound, closed_ratio`` ordered by index.  ``residual`` is the
    relative residual of the transformed equation at x;
    ``closed_ratio`` is g divided by the closed form (NaN when there is
    none).
    """
    q = QBase(q=complex(cfg.q))
    policy = as_policy({"tail_epsilon": cfg.tail_epsilon, "max_terms": cfg.max_terms})
    source = make_params(cfg.family, q, **cfg.source)
    if cfg.case is not None:
        if "beta" not in cfg.source:
            source = source.replace(beta=case_beta(cfg.case, source))
        wc = worked_case(
            cfg.case, source, alpha1=cfg.kernel_alpha, xi=cfg.xi, xi_mode=cfg.xi_mode, policy=policy
        )
        spec, h, closed = wc.spec, wc.h, wc.g_closed
        boundary = _boundary_for_case(wc)
    else:
        if cfg.xi_mode != "fixed":
            raise ValueError("raw source parameters need xi_mode = fixed")
        xi = 1 if cfg.xi is None else cfg.xi
        spec = transform_spec(
            cfg.family, source, cfg.e_source, cfg.mu0, cfg.kernel_alpha, xi, cfg.variant, cfg.xi_mode
        )
        h = lattice_eigenfunction(source, cfg.e_source, spec.xi, exponent=cfg.exponent, policy=policy)
        closed = None
        boundary = None
    if cfg.x is not None:
        points = [q.scalar(x) for x in cfg.x]
    else:
        points = [q.scalar(cfg.x0) * q.q**k for k in range(cfg.n_points)]
    if verbose:
        mode = f"{spec.variant}, xi {spec.xi_mode}"
        click.echo(f"transform {spec.family} ({mode}): {len(points)} points", err=True)

    def row(item):
        index, x = item
        try:
            res = transform_point(spec, h, x, policy)
            resid = verify_transform(spec, h, [x], boundary=boundary, policy=policy)[0]
        except Exception as err:
            raise type(err)(f"at x = {format_scalar(x)}: {err}") from err
        ratio = complex(res.value / closed(x)).real if closed is not None else np.nan
        return {
            "index": index,
            "x": complex(x).real,
            "re_g": complex(res.value).real,
            "im_g": complex(res.value).imag,
            "residual": float(resid),
            "tail_bound": res.tail_bound,
            "closed_ratio": ratio,
        }

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(row, enumerate(points)))
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)
