"""
Explicit eigenfunctions, factorizations, summation formulas and the
worked transforms.
"""
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from qheun.certify import draw_a4, draw_q
from qheun.exceptions import ConstraintViolated, DomainViolated, PoleEncountered
from qheun.operators import A4Params, relative_residual, residual
from qheun.qseries import QBase, qpoch_n
from qheun.solutions import (
    CASES,
    FACTORIZATIONS,
    FORMS,
    WHICH,
    case_beta,
    constraint_holds,
    constraint_rhs,
    factorization_residual,
    gauge_prefactor,
    gauge_transform,
    monomial_eigenpair,
    power_function,
    prefactor_eigenpair,
    quasi_periodicity_class,
    ramanujan_1psi1,
    two_phi_one,
    worked_case,
)
from qheun.suites import CURATED, CURATED_Q, draw_numeric

quarter = QBase(r=Fraction(1, 2), root=2)
numeric = QBase(q=0.45)

KINDS = {"first": "monomial", "second": "i", "third": "ii"}


def lattice(q, base, span=range(-3, 4)):
    return [base * q.q**n for n in span]


def laurent(c0, c1, c2):
    def trial(x):
        return c0 + c1 * x + c2 / x

    return trial


def test_monomial_constant():
    p = A4Params(quarter, beta=2)
    pair = monomial_eigenpair(p)
    assert pair.eigenvalue == -5
    assert constraint_holds(pair)
    assert all(r == 0 for r in residual(p, -5, pair.eigenfunction, lattice(quarter, 1)))
    assert monomial_eigenpair(p.replace(beta=-2)).constraint.sign == -1
    with pytest.raises(ConstraintViolated):
        monomial_eigenpair(p.replace(beta=3))


@pytest.mark.parametrize("which", WHICH)
def test_monomial_exact(which):
    rng = np.random.default_rng(31)
    for _ in range(5):
        q = draw_q(rng)
        p = draw_a4(rng, q)
        p = p.replace(beta=constraint_rhs(p, "monomial", which))
        base = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50)))
        pair = monomial_eigenpair(p, which, base=base)
        assert all(r == 0 for r in residual(p, pair.eigenvalue, pair.eigenfunction, lattice(q, base)))
        broken = p.replace(beta=p.beta + 1)
        assert any(r != 0 for r in residual(broken, pair.eigenvalue, pair.eigenfunction, lattice(q, base)))


@pytest.mark.parametrize("form", FORMS)
@pytest.mark.parametrize("case", CASES)
def test_prefactor_exact(case, form):
    rng = np.random.default_rng(41)
    for which in WHICH:
        q = draw_q(rng)
        p = draw_a4(rng, q)
        p = p.replace(beta=constraint_rhs(p, case, which))
        base = Fraction(int(rng.integers(1, 50)), int(rng.integers(51, 99)))
        try:
            pair = prefactor_eigenpair(p, case, form, which, base=base)
            values = residual(p, pair.eigenvalue, pair.eigenfunction, lattice(q, base))
        except PoleEncountered:
            continue
        assert pair.kind == f"prefactor-{case}-{form}"
        assert all(r == 0 for r in values)


@pytest.mark.parametrize("form", FORMS)
@pytest.mark.parametrize("case", CASES)
def test_prefactor_numeric(case, form):
    rng = np.random.default_rng(43)
    for which in WHICH:
        p = draw_numeric(rng, "a4", numeric)
        p = p.replace(beta=constraint_rhs(p, case, which))
        pair = prefactor_eigenpair(p, case, form, which)
        points = [complex(rng.uniform(0.5, 2), rng.uniform(-1, 1)) for _ in range(8)]
        assert relative_residual(p, pair.eigenvalue, pair.eigenfunction, points) < 1e-11


def test_prefactor_validation():
    p = A4Params(numeric)
    with pytest.raises(ValueError):
        prefactor_eigenpair(p, case="iii")
    with pytest.raises(ValueError):
        prefactor_eigenpair(p, form="fourth")
    with pytest.raises(ValueError):
        gauge_prefactor(p, which="g3")


@pytest.mark.parametrize("form", FACTORIZATIONS)
def test_factorization_exact(form):
    rng = np.random.default_rng(53)
    q = draw_q(rng)
    which = (2, 1)
    p = draw_a4(rng, q)
    p = p.replace(beta=constraint_rhs(p, KINDS[form], which))
    trials = [laurent(Fraction(1), Fraction(2, 3), Fraction(-5, 7)), laurent(Fraction(-3), 0, Fraction(1, 9))]
    points = [Fraction(3, 5), Fraction(-11, 4), Fraction(7, 13)]
    assert factorization_residual(p, which, form, trials, points) == 0
    assert factorization_residual(p, which, form, trials, points, offset=1) != 0


def test_power_function_and_class():
    q = quarter
    f = power_function(q, Fraction(-3, 2), base=Fraction(2, 3))
    assert quasi_periodicity_class(f, Fraction(2, 3), q) == Fraction(3, 2)
    assert_allclose(quasi_periodicity_class(lambda x: x**-0.7, 1.3, numeric), 0.7)


def test_ramanujan_sum():
    q = QBase(q=0.3)
    a, b, z = 1.4, 0.2, 0.6
    res = ramanujan_1psi1(a, b, z, q)
    assert_allclose(res.sum_side, res.product_side, rtol=1e-12)
    mq = mpmath.mpf("0.3")

    def qp(v):
        return mpmath.qp(mpmath.mpf(v), mq)

    numer = qp(0.3) * qp(b / a) * qp(a * z) * qp(0.3 / (a * z))
    expect = numer / (qp(b) * qp(0.3 / a) * qp(z) * qp(b / (a * z)))
    assert_allclose(res.product_side, float(expect), rtol=1e-12)
    with pytest.raises(DomainViolated):
        ramanujan_1psi1(a, 1.0, 0.6, q)
    with pytest.raises(DomainViolated):
        ramanujan_1psi1(a, b, 1.2, q)


def test_two_phi_one():
    q = QBase(q=0.4)
    n, b, c = 3, 0.7, 0.25
    # q-Chu-Vandermonde, terminating
    value = two_phi_one(q.q**-n, b, c, q, q.q)
    expect = qpoch_n(c / b, q, n) / qpoch_n(c, q, n) * b**n
    assert_allclose(value, expect, rtol=1e-12)
    # q-binomial theorem: 2phi1(a, c; c; q, z) = (az;q)_inf / (z;q)_inf
    a, z = 0.5, 0.3
    res = two_phi_one(a, c, c, q, z, full_output=True)
    expect = mpmath.qp(a * z, 0.4) / mpmath.qp(z, 0.4)
    assert_allclose(res.value, float(expect), rtol=1e-12)
    assert res.tail_bound < 1e-12


def test_worked_case_constraints():
    p = A4Params(QBase(q=CURATED_Q), **CURATED[3])
    assert_allclose(case_beta(3, p), p.beta)
    # beta' > 0 makes the case three integral diverge
    bad = p.replace(alpha2=p.alpha2 + 0.5)
    bad = bad.replace(beta=case_beta(3, bad))
    with pytest.raises(ConstraintViolated):
        worked_case(3, bad)
    with pytest.raises(ConstraintViolated):
        worked_case(3, p.replace(beta=p.beta - 0.1))
    with pytest.raises(ValueError):
        worked_case(4, p)


@pytest.mark.parametrize("case", [1, 3])
def test_worked_case_series(case):
    wc = worked_case(case, A4Params(QBase(q=CURATED_Q), **CURATED[case]), alpha1=0.25)
    for x in [0.77, 1.13, 1.41]:
        assert_allclose(wc.g_series(x), wc.g_closed(x), rtol=1e-10)
        assert wc.inhomogeneous(x) == 0


def test_worked_case_one_proportional():
    wc = worked_case(1, A4Params(QBase(q=CURATED_Q), **CURATED[1]), alpha1=0.25, xi_mode="proportional")
    assert wc.spec.xi_mode == "proportional"
    for x in [0.77, 1.13]:
        assert_allclose(wc.g_series(x), wc.g_closed(x), rtol=1e-10)


@pytest.mark.parametrize("case", [2, 3])
def test_worked_case_proportional_default_xi(case):
    wc = worked_case(case, A4Params(QBase(q=CURATED_Q), **CURATED[case]), alpha1=0.25, xi_mode="proportional")
    assert_allclose(wc.xi, CURATED_Q**0.5)
    for x in [0.77, 1.13]:
        assert_allclose(wc.g_series(x), wc.g_transform(x), rtol=1e-8)


def test_worked_case_two_has_no_closed_form():
    wc = worked_case(2, A4Params(QBase(q=CURATED_Q), **CURATED[2]), alpha1=0.25)
    assert wc.g_closed is None
    assert wc.inhomogeneous(1.1) != 0
    assert_allclose(wc.g_series(1.1), wc.g_transform(1.1), rtol=1e-8)


@pytest.mark.parametrize("which", ["g1", "g2"])
def test_gauge_transform(which):
    rng = np.random.default_rng(47)
    p = draw_numeric(rng, "a4", numeric)
    p = p.replace(beta=constraint_rhs(p, "i", (1, 2)))
    seed = monomial_eigenpair(p.replace(h1=p.l1, l1=p.h1))
    g = gauge_transform(p, seed.eigenfunction, which, 1)
    assert g.source.h1 == p.l1
    points = [complex(rng.uniform(0.5, 2), rng.uniform(-1, 1)) for _ in range(8)]
    assert relative_residual(p, seed.eigenvalue, g.function, points) < 1e-11
    # the untransformed monomial does not solve the equation for p
    assert relative_residual(p, seed.eigenvalue, seed.eigenfunction, points) > 1e-6
