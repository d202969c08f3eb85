"""
Command-line interface for qheun.

Usage:
    qheun eval qpoch_inf a=0.5 q=0.5     # (a;q)_inf and its tail bound
    qheun verify kernels --backend exact  # exact certification suite
    qheun transform --config case3.cfg    # q-integral transform table
    qheun certify kernel_a4 -o a4.jsonl   # certificates as JSON lines
    qheun identities                      # registered identities

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""
import json
import sys

import click
import numpy as np

from . import __version__
from ._config import BACKENDS, FORMATS, parse_value, process_opts, process_transform_config, read_config
from .certify import certificates_to_json, certify, identity_catalog
from .exceptions import InvalidArgument, QHeunError
from .qseries import QBase, as_policy, p1_kernel, p2_kernel, qpoch_inf, qpoch_n, qpoch_ratio
from .solutions import ramanujan_1psi1, two_phi_one
from .suites import SUITES, run_suite, transform_table
from .utilities import Bunch, format_scalar

__all__ = ["cli"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _fail(err):
    click.echo(f"Error: {type(err).__name__}: {err}", err=True)
    sys.exit(EXIT_USAGE)


def _write(text, output):
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _frame_text(frame, fmt):
    if fmt == "csv":
        return frame.to_csv(index=False)
    if frame.empty:
        return ""
    return frame.to_json(orient="records", lines=True)


def _product_tail(q, args, policy, value):
    """Size of the factors a q**j dropped by the product truncation, relative to the value."""
    qq = abs(complex(q.q))
    biggest = max(abs(complex(a)) for a in args)
    if biggest == 0:
        return 0.0
    nterms = max(0, int(np.ceil(np.log(policy.tail_epsilon / biggest) / np.log(qq))))
    nterms = min(nterms, policy.max_terms)
    return float(sum(abs(complex(a)) for a in args) * qq**nterms / (1 - qq) * abs(complex(value)))


def _eval_qpoch_inf(q, policy, a):
    value = qpoch_inf(a, q, policy)
    return Bunch(value=value, tail_bound=_product_tail(q, [a], policy, value))


def _eval_qpoch_n(q, policy, a, n):
    return Bunch(value=qpoch_n(a, q, int(n)), tail_bound=0.0)


def _eval_theta(q, policy, t):
    t = q.scalar(t)
    if q.is_zero(t):
        raise InvalidArgument("theta_q is undefined at t = 0")
    args = [t, q.q / t, q.q]
    value = qpoch_ratio(args, [], q, policy)
    return Bunch(value=value, tail_bound=_product_tail(q, args, policy, value))


def _eval_p1(q, policy, mu, x, s, mu0=0):
    value = p1_kernel(mu, mu0, x, s, q, policy)
    z = q.scalar(s) / q.scalar(x)
    return Bunch(value=value, tail_bound=_product_tail(q, [q.pow(mu) * z, q.pow(mu0) * z], policy, value))


def _eval_p2(q, policy, mu, x, s, mu0=0):
    value = p2_kernel(mu, mu0, x, s, q, policy)
    w = q.scalar(x) / q.scalar(s)
    args = [q.pow(1 - mu0) * w, q.pow(1 - mu) * w]
    return Bunch(value=value, tail_bound=_product_tail(q, args, policy, value))


def _eval_2phi1(q, policy, a, b, c, z):
    res = two_phi_one(a, b, c, q, z, policy, full_output=True)
    return Bunch(value=res.value, tail_bound=res.tail_bound)


def _eval_1psi1(q, policy, a, b, z):
    res = ramanujan_1psi1(a, b, z, q, policy)
    return Bunch(value=res.sum_side, tail_bound=res.tail_bound, product=res.product_side)


EVALUATORS = {
    "qpoch_inf": _eval_qpoch_inf,
    "qpoch_n": _eval_qpoch_n,
    "theta": _eval_theta,
    "p1": _eval_p1,
    "p2": _eval_p2,
    "2phi1": _eval_2phi1,
    "1psi1": _eval_1psi1,
}

# Evaluators that stay exact over Fractions.
EXACT_EVALUATORS = ("qpoch_n",)


def _parse_pairs(args, exact):
    values = {}
    for arg in args:
        key, sep, text = arg.partition("=")
        if not sep or not key:
            raise click.UsageError(f"expected key=value, got {arg!r}")
        values[key.strip()] = parse_value(text, exact)
    return values


def _make_q(values, backend):
    q = values.pop("q", None)
    r = values.pop("r", None)
    root = values.pop("root", 2)
    if backend == "exact":
        if r is None:
            raise InvalidArgument("the exact backend needs r=<rational> (q = r**root)")
        return QBase(r=r, root=root)
    if r is not None:
        return QBase(q=complex(r) ** int(root))
    return QBase(q=complex(0.5 if q is None else q))


@click.group()
@click.version_option(version=__version__, prog_name="qheun")
def cli():
    """
    q-Heun operators, q-integral transforms and their exact certification.

    Examples:

        qheun eval theta t=1 q=1/2

        qheun verify all --negative-controls

        qheun transform --config case3.cfg --format csv
    """


@cli.command("eval")
@click.argument("name", type=click.Choice(sorted(EVALUATORS)))
@click.argument("args", nargs=-1)
@click.option("--backend", type=click.Choice(BACKENDS), default="numeric", show_default=True)
def eval_cmd(name, args, backend):
    """
    Evaluate one q-series primitive.

    ARGS are key=value pairs; q defaults to 1/2 (numeric) and the exact
    backend takes r (and root, default 2) with q = r**root.

    \b
      qpoch_inf  a
      qpoch_n    a n
      theta      t
      p1, p2     mu x s [mu0]
      2phi1      a b c z
      1psi1      a b z
    """
    try:
        if backend == "exact" and name not in EXACT_EVALUATORS:
            raise InvalidArgument(f"{name} involves infinite products; use the numeric backend")
        values = _parse_pairs(args, exact=backend == "exact")
        q = _make_q(values, backend)
        policy = as_policy(
            {k: values.pop(k) for k in ("tail_epsilon", "max_terms") if k in values}
        )
        try:
            res = EVALUATORS[name](q, policy, **values)
        except TypeError as err:
            raise InvalidArgument(f"bad arguments for {name}: {sorted(values)}") from err
    except (QHeunError, ValueError, KeyError) as err:
        _fail(err)
    click.echo(f"value = {format_scalar(res.value)}")
    if backend == "numeric":
        click.echo(f"tail_bound = {res.tail_bound:.3g}")
    if "product" in res:
        click.echo(f"product = {format_scalar(res.product)}")


@cli.command()
@click.argument("suite", type=click.Choice(SUITES + ("all",)))
@click.option("--backend", type=click.Choice(BACKENDS), default="numeric", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tolerance", type=float, default=None, help="Override every numeric tolerance.")
@click.option("--negative-controls", is_flag=True, help="Also run the mutated twin of every check.")
@click.option("--n-param-sets", type=int, default=5, show_default=True, help="Exact backend only.")
@click.option("--n-points", type=int, default=5, show_default=True)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.option("-v", "--verbose", is_flag=True)
def verify(suite, backend, seed, tolerance, negative_controls, n_param_sets, n_points, fmt, output, verbose):
    """
    Run a verification suite and report the largest residual per identity.

    Exits 1 if any check fails, echoing its parameter set.  A negative
    control passes when its residual is nonzero.
    """
    try:
        opts = process_opts(
            backend=backend,
            seed=seed,
            tolerance=tolerance,
            format=fmt,
            output=output,
            negative_controls=negative_controls,
            verbose=verbose,
        )
        report = run_suite(
            suite,
            backend=opts.backend,
            seed=opts.seed,
            tolerance=opts.tolerance,
            negative_controls=opts.negative_controls,
            verbose=opts.verbose,
            n_param_sets=n_param_sets,
            n_points=n_points,
        )
    except (QHeunError, ValueError, KeyError) as err:
        _fail(err)
    failed = report[~report["passed"]]
    for row in failed.itertuples():
        click.echo(f"FAILED {row.suite}/{row.identity}: {json.dumps(row.parameter_set)}", err=True)
    if opts.format == "csv":
        report["parameter_set"] = report["parameter_set"].map(json.dumps)
    _write(_frame_text(report, opts.format), opts.output)
    sys.exit(EXIT_FAILED if len(failed) else EXIT_OK)


@cli.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Flat key = value file.",
)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.option("-v", "--verbose", is_flag=True)
def transform(config_path, fmt, output, verbose):
    """
    Evaluate a q-integral transform g on a list of points.

    \b
    CSV columns: index, x, re_g, im_g, residual, tail_bound, closed_ratio
      residual      relative residual of the transformed equation at x
      tail_bound    truncation bound of the Jackson integral
      closed_ratio  g over its closed form (empty when there is none)
    JSON output has one object per row with the same keys.
    """
    try:
        cfg = process_transform_config(read_config(config_path))
        table = transform_table(cfg, verbose=verbose)
    except (QHeunError, ValueError, KeyError) as err:
        _fail(err)
    _write(_frame_text(table, fmt), output)


@cli.command("certify")
@click.argument("identity")
@click.option("--n-param-sets", type=int, default=10, show_default=True)
@click.option("--n-points", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.option("-v", "--verbose", is_flag=True)
def certify_cmd(identity, n_param_sets, n_points, seed, output, verbose):
    """
    Certify IDENTITY over random exact parameter sets (JSON lines).

    Exits 1 unless every certificate passes.
    """
    try:
        certs = certify(identity, n_param_sets, n_points, seed, verbose=verbose)
    except (QHeunError, ValueError, KeyError) as err:
        _fail(err)
    _write(certificates_to_json(certs), output)
    sys.exit(EXIT_OK if all(c.passed for c in certs) else EXIT_FAILED)


@cli.command()
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True)
def identities(fmt):
    """List the registered identities and their negative controls."""
    click.echo(_frame_text(identity_catalog(), fmt), nl=False)


if __name__ == "__main__":
    cli()
