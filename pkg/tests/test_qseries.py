"""
Tests of the q-series primitives against mpmath and exact arithmetic.
"""
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qheun.exceptions import InexactPower, InvalidQ, NonConvergent, OffLattice, PoleEncountered
from qheun.qseries import (
    QBase,
    QProduct,
    TruncationPolicy,
    basic_series,
    p1_kernel,
    p2_kernel,
    qpoch_inf,
    qpoch_n,
    qpoch_ratio,
    sweep,
    theta_q,
    theta_ratio,
)

mpmath.mp.dps = 30

qnum = QBase(q=0.5)

rng = np.random.default_rng(20240601)
points = rng.uniform(0.3, 2.5, 6) + 1j * rng.uniform(-0.5, 0.5, 6)


def mp_qp(a, q):
    return complex(mpmath.qp(mpmath.mpc(a), mpmath.mpf(q)))


def test_qpoch_inf_constant():
    value = qpoch_inf(0.5, qnum)
    assert_allclose(value, 0.41942244, rtol=1e-8)
    assert_allclose(value, mp_qp(0.5, 0.5), rtol=1e-14)


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
def test_qpoch_inf_mpmath(q):
    base = QBase(q=q)
    for a in points:
        assert_allclose(qpoch_inf(a, base), mp_qp(a, q), rtol=1e-12)


def test_qpoch_inf_zero_factor():
    # (q^-2;q)_inf contains the factor 1 - q^-2 q^2
    assert qpoch_inf(4.0, qnum) == 0


def test_qpoch_n_exact():
    q = QBase(r=Fraction(1, 3), root=1)
    assert qpoch_n(Fraction(1, 2), q, 2) == Fraction(5, 12)
    assert qpoch_n(Fraction(1, 2), q, -1) == -2
    assert qpoch_n(Fraction(1, 2), q, 0) == 1


def test_qpoch_n_pole():
    q = QBase(r=Fraction(1, 3), root=1)
    with pytest.raises(PoleEncountered):
        qpoch_n(Fraction(1, 3), q, -1)


@settings(max_examples=200, deadline=None)
@given(
    st.fractions(min_value=-3, max_value=3, max_denominator=50),
    st.integers(min_value=-6, max_value=6),
)
def test_qpoch_n_recurrence(a, n):
    q = QBase(r=Fraction(2, 3), root=2)
    try:
        lhs = qpoch_n(a, q, n + 1)
        rhs = qpoch_n(a, q, n) * (1 - a * q.q**n)
    except PoleEncountered:
        assume(False)
    assert lhs == rhs


def test_qpoch_n_matches_ratio():
    for a in points:
        for n in (-3, 2, 5):
            expect = qpoch_inf(a, qnum) / qpoch_inf(a * qnum.q**n, qnum)
            assert_allclose(qpoch_n(a, qnum, n), expect, rtol=1e-12)


def test_qpoch_ratio_pole():
    with pytest.raises(PoleEncountered):
        qpoch_ratio([0.3], [4.0], qnum)


def test_theta_zero_and_quasi_periodicity():
    assert theta_q(1.0, qnum) == 0
    for t in points:
        assert_allclose(theta_q(qnum.q * t, qnum), -theta_q(t, qnum) / t, rtol=1e-12)
        assert_allclose(theta_ratio(t, 1.7, qnum), theta_q(t, qnum) / theta_q(1.7, qnum), rtol=1e-12)


def test_kernels_mpmath():
    mu, mu0 = 0.7, -0.4
    q = 0.5
    for x in points:
        s = 1.3 * x + 0.2
        z = s / x
        expect = mp_qp(q**mu * z, q) / mp_qp(q**mu0 * z, q)
        assert_allclose(p1_kernel(mu, mu0, x, s, qnum), expect, rtol=1e-12)
        w = x / s
        expect = w ** (mu - mu0) * mp_qp(q ** (1 - mu0) * w, q) / mp_qp(q ** (1 - mu) * w, q)
        assert_allclose(p2_kernel(mu, mu0, x, s, qnum), expect, rtol=1e-12)


def test_qproduct_lattice_ratio():
    r = Fraction(1, 2)
    exact = QBase(r=r, root=2)
    numeric = QBase(q=float(r**2))
    args = {"power": Fraction(1, 2), "numer": [(Fraction(1, 3), 1)], "denom": [(Fraction(2, 5), -1)]}
    fe = QProduct(exact, **args)
    fn = QProduct(numeric, **args)
    base = Fraction(7, 4)
    for k in (-3, -1, 0, 2, 4):
        expect = fn(float(base) * numeric.q**k) / fn(float(base))
        assert_allclose(float(fe.lattice_ratio(base, k)), expect, rtol=1e-12)


def test_qbase_validation():
    with pytest.raises(InvalidQ):
        QBase(q=1.0)
    with pytest.raises(InvalidQ):
        QBase(q=0.0)
    with pytest.raises(InvalidQ):
        QBase(q=0.5, r=Fraction(1, 2))
    with pytest.raises(InvalidQ):
        QBase(r=0.5)
    q = QBase(r=Fraction(1, 2), root=2)
    assert q.pow(Fraction(1, 2)) == Fraction(1, 2)
    with pytest.raises(InexactPower):
        q.pow(Fraction(1, 4))


def test_lattice_index():
    q = QBase(r=Fraction(1, 2), root=2)
    assert q.lattice_index(Fraction(3, 64), 3) == 3
    with pytest.raises(OffLattice):
        q.lattice_index(Fraction(3, 5), 3)
    assert qnum.lattice_index(0.7 * 0.5**-4, 0.7) == -4


def test_sweep_geometric():
    z = 0.6
    res = sweep(1.0, lambda t, n: t * z)
    assert_allclose(res.value, 1 / (1 - z), rtol=1e-14)
    assert res.tail_bound < 1e-14


def test_q_gauss_sum():
    a, b, c = 0.3, -0.4, 0.02
    q = QBase(q=0.3)
    z = c / (a * b)
    value = basic_series([a, b], [c, q.q], z, q).value
    expect = qpoch_ratio([c / a, c / b], [c, c / (a * b)], q)
    assert_allclose(value, expect, rtol=1e-12)


def test_basic_series_nonconvergent():
    with pytest.raises(NonConvergent):
        basic_series([0.1], [qnum.q], 0.99, qnum, policy={"max_terms": 10})


def test_policy_validation():
    with pytest.raises(ValueError):
        TruncationPolicy(tail_epsilon=0)
    with pytest.raises(KeyError):
        TruncationPolicy(tolerance=1e-3)
