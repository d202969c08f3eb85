"""
Kernel functions and duality maps.

Exact-backend residuals must vanish identically; the numeric backend
is held to relative residuals near machine precision.
"""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qheun.certify import DRAWS, draw_q
from qheun.exceptions import PoleEncountered
from qheun.kernel import (
    DUAL_MAPS,
    KernelFunction,
    dual_a2_inverse,
    dual_a3_inverse,
    dual_a4,
    dual_a4_inverse,
    mutate_dual,
    verify_kernel,
    verify_kernel_a4,
    verify_kernel_reduced,
)
from qheun.operators import A4Params
from qheun.qseries import QBase, p1_kernel, p2_kernel
from qheun.suites import draw_numeric

exact = QBase(r=Fraction(1, 2), root=2)
numeric = QBase(q=0.5)

INVERSES = {"a3": dual_a3_inverse, "a2": dual_a2_inverse}
SEEDS = {"a4": 1, "a3": 2, "a2": 3}

halves = st.integers(min_value=-6, max_value=6).map(lambda n: Fraction(n, 2))


def test_dual_a4_zero():
    d = dual_a4(A4Params(exact), 0, 0)
    assert (d.chi, d.nu, d.mu) == (0, 0, 1)
    assert d.params.beta == 0 and d.params.alpha2 == 0
    assert d.params.hs() == [0, 0] and d.params.ls() == [0, 0]


def test_dual_a4_example():
    tilde = A4Params(exact, h1=1, alpha1=1)
    d = dual_a4(tilde, 0, 0)
    assert (d.chi, d.nu, d.mu) == (1, 0, 2)
    p = d.params
    assert p.beta == -1 and p.alpha2 == 0
    assert p.ls() == [1, 0] and p.hs() == [1, 1]


@settings(max_examples=100, deadline=None)
@given(st.lists(halves, min_size=9, max_size=9))
def test_dual_a4_roundtrip(values):
    keys = ["h1", "h2", "l1", "l2", "alpha1", "alpha2", "beta", "mu0", "alpha"]
    v = dict(zip(keys, values))
    mu0, alpha = v.pop("mu0"), v.pop("alpha")
    tilde = A4Params(exact, **v)
    d = dual_a4(tilde, mu0, alpha)
    assert dual_a4_inverse(d.params, mu0, tilde.alpha2) == tilde


@pytest.mark.parametrize("family", ["a3", "a2"])
def test_dual_roundtrip_variants(family):
    rng = np.random.default_rng(11)
    for _ in range(20):
        q = draw_q(rng)
        tilde = DRAWS[family](rng, q)
        d = DUAL_MAPS[family](tilde, Fraction(1, 2), Fraction(-3, 2))
        assert INVERSES[family](d.params, Fraction(1, 2), tilde.alpha) == tilde


@pytest.mark.parametrize("family", ["a4", "a3", "a2"])
def test_kernel_identity_exact(family):
    rng = np.random.default_rng(SEEDS[family])
    for _ in range(5):
        q = draw_q(rng)
        tilde = DRAWS[family](rng, q)
        d = DUAL_MAPS[family](tilde, Fraction(1, 2), Fraction(1))
        key = "alpha" if family == "a2" else "beta"
        broken = mutate_dual(d, **{key: d.params[key] + 1})
        for x, s in [(Fraction(3, 7), Fraction(5, 11)), (Fraction(-9, 4), Fraction(2, 13))]:
            try:
                assert verify_kernel(d, "P1", x, s) == 0
                assert verify_kernel(broken, "P1", x, s) != 0
            except PoleEncountered:
                continue


def test_kernel_reduced_exact():
    rng = np.random.default_rng(5)
    q = draw_q(rng)
    d = dual_a4(DRAWS["a4"](rng, q), Fraction(1, 2), Fraction(-1, 2))
    assert verify_kernel_reduced(d, Fraction(7, 5), Fraction(-2, 9)) == 0
    broken = mutate_dual(d, beta=d.params.beta + 1)
    assert verify_kernel_reduced(broken, Fraction(7, 5), Fraction(-2, 9)) != 0


@pytest.mark.parametrize("variant", ["P1", "P2"])
@pytest.mark.parametrize("family", ["a4", "a3", "a2"])
def test_kernel_identity_numeric(family, variant):
    rng = np.random.default_rng(3)
    for _ in range(10):
        q = QBase(q=float(rng.uniform(0.2, 0.7)))
        mu0, alpha = rng.uniform(-1, 1, 2)
        d = DUAL_MAPS[family](draw_numeric(rng, family, q), float(mu0), float(alpha))
        x = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        s = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        assert verify_kernel(d, variant, x, s, relative=True) < 1e-10


def test_exact_kernel_needs_base():
    d = dual_a4(A4Params(exact), 0, 0)
    with pytest.raises(ValueError):
        KernelFunction(d, "P1")
    with pytest.raises(ValueError):
        KernelFunction(d, "P3", base=(1, 1))
    assert verify_kernel_a4(d, "P2", Fraction(3, 5), Fraction(7, 3)) == 0


def test_p1_recurrence():
    mu, mu0, x, s = 2.5, 0.5, 1.1, 0.7
    q = numeric.q
    base = p1_kernel(mu, mu0, x, s, numeric)
    ratio = (x - q ** (mu - 1) * s) / (x - q ** (mu0 - 1) * s)
    assert_allclose(p1_kernel(mu, mu0, x, s / q, numeric), ratio * base, rtol=1e-12)
    assert_allclose(p1_kernel(mu, mu0, q * x, s, numeric), ratio * base, rtol=1e-12)


def test_p2_limit():
    mu, mu0, x = 2.0, 0.0, 1.0
    s = numeric.q**-20
    assert_allclose(s ** (mu - mu0) * p2_kernel(mu, mu0, x, s, numeric), x ** (mu - mu0), rtol=1e-8)
