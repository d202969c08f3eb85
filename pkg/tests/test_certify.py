"""
The exact certification harness.
"""
import json

import pytest

from qheun.certify import IDENTITIES, _Skip, certificates_to_json, certify, identity_catalog
from qheun.exceptions import UnknownIdentity
from qheun.utilities import Bunch

POSITIVE = sorted(k for k, v in IDENTITIES.items() if not v.negative)
CONTROLS = ["kernel_a4_mutated", "monomial_a4_mutated", "factorization_a4_mutated"]


def test_catalog():
    cat = identity_catalog()
    assert list(cat.columns) == ["identity_id", "negative", "description"]
    assert len(cat) == len(IDENTITIES)
    for key in POSITIVE:
        assert f"{key}_mutated" in IDENTITIES
    assert cat.negative.sum() == len(POSITIVE)


@pytest.mark.parametrize("identity_id", POSITIVE)
def test_identities_hold(identity_id):
    certs = certify(identity_id, n_param_sets=2, n_points=3, seed=7)
    assert len(certs) == 2
    assert [c.index for c in certs] == [0, 1]
    for c in certs:
        assert c.passed
        assert c.result in ("exact-zero", "skipped")
        assert not c.negative_control


def test_kernel_certificates():
    certs = certify("kernel_a4", n_param_sets=4, n_points=5)
    assert any(c.result == "exact-zero" for c in certs)
    for c in certs:
        assert c.max_residual in (None, "0")
        assert len(c.sample_points) == 5
        assert c.parameter_set["root"] == 4


@pytest.mark.parametrize("identity_id", CONTROLS)
def test_negative_controls(identity_id):
    certs = certify(identity_id, n_param_sets=3, n_points=4, seed=1)
    assert any(c.result == "nonzero" for c in certs)
    for c in certs:
        assert c.negative_control
        assert c.passed


def always_pole(rng, n_points):
    return {"q": "1/4"}, ["1/2"] * n_points, [_Skip("pole at s = 1/2")] * n_points


def test_skipped_certificates(monkeypatch):
    for key, negative in [("always_pole", False), ("always_pole_mutated", True)]:
        monkeypatch.setitem(IDENTITIES, key, Bunch(func=always_pole, negative=negative, description=""))
    for c in certify("always_pole", n_param_sets=2, n_points=3):
        assert c.result == "skipped"
        assert c.passed
    # a control that never evaluated cannot pass
    for c in certify("always_pole_mutated", n_param_sets=2, n_points=3):
        assert c.result == "skipped"
        assert not c.passed
        assert c.skipped_points == 3
        assert c.reason == "pole at s = 1/2"


def test_seed_determinism():
    a = certify("finite_sum_a2", n_param_sets=3, n_points=2, seed=11)
    b = certify("finite_sum_a2", n_param_sets=3, n_points=2, seed=11)
    assert [c.parameter_set for c in a] == [c.parameter_set for c in b]
    assert [c.sample_points for c in a] == [c.sample_points for c in b]
    c = certify("finite_sum_a2", n_param_sets=3, n_points=2, seed=12)
    assert [x.parameter_set for x in a] != [x.parameter_set for x in c]


def test_json_lines():
    certs = certify("monomial_a4", n_param_sets=3, n_points=2)
    lines = certificates_to_json(certs).strip().splitlines()
    assert len(lines) == 3
    records = [json.loads(line) for line in lines]
    assert records[0]["identity_id"] == "monomial_a4"
    assert {"parameter_set", "sample_points", "result", "max_residual", "passed"} <= set(records[0])
    assert certificates_to_json([]) == ""


def test_errors():
    with pytest.raises(UnknownIdentity):
        certify("kernel_a5")
    with pytest.raises(ValueError):
        certify("kernel_a4", n_param_sets=-1)
    assert certify("kernel_a4", n_param_sets=0) == []
