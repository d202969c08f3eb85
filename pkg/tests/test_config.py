"""
Option processing and the key = value configuration files.
"""
from fractions import Fraction

import pytest

from qheun._config import parse_value, process_opts, process_transform_config, read_config


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3", 3),
        ("-1/4", Fraction(-1, 4)),
        ("0.25", 0.25),
        ("1e-3", 1e-3),
        ("1+2j", 1 + 2j),
        ("yes", True),
        ("False", False),
        ("none", None),
        ("proportional", "proportional"),
        ("0.5, 1/2, 2", [0.5, Fraction(1, 2), 2]),
    ],
)
def test_parse_value(text, expected):
    assert parse_value(text) == expected


def test_parse_value_exact():
    value = parse_value("0.1", exact=True)
    assert value == Fraction(1, 10)
    assert isinstance(value, Fraction)


def test_read_config(tmp_path):
    path = tmp_path / "case.cfg"
    path.write_text("# worked case\ncase = 3\n\nq = 1/2   # base\nx = 0.8, 1.1\nq = 0.5\n")
    cfg = read_config(path)
    assert cfg == {"case": 3, "q": 0.5, "x": [0.8, 1.1]}


def test_read_config_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("case 3\n")
    with pytest.raises(ValueError, match="bad.cfg:1"):
        read_config(path)
    path.write_text(" = 3\n")
    with pytest.raises(ValueError, match="empty key"):
        read_config(path)


def test_process_transform_config():
    cfg = process_transform_config({"case": 3, "h1": 0.1, "l2": 1.7, "x": 1.1})
    assert cfg.case == 3
    assert cfg.source == {"h1": 0.1, "l2": 1.7}
    assert cfg.x == [1.1]
    assert cfg.x0 == 0.7 and cfg.n_points == 10
    cfg = process_transform_config({"family": "a2", "e_source": -1.0, "alpha": 0.3})
    assert cfg.source == {"alpha": 0.3}


@pytest.mark.parametrize(
    "config, error",
    [
        ({"family": "a5", "e_source": 1}, ValueError),
        ({"case": 3, "gamma": 1}, KeyError),
        ({"family": "a3", "case": 1}, ValueError),
        ({"family": "a4"}, ValueError),
        ({"case": 3, "n_points": -1}, ValueError),
    ],
)
def test_process_transform_config_errors(config, error):
    with pytest.raises(error):
        process_transform_config(config)


def test_process_opts():
    opts = process_opts(backend="exact", tolerance="1e-9")
    assert opts.backend == "exact"
    assert opts.tolerance == 1e-9
    assert opts.format == "json" and opts.seed == 0
    with pytest.raises(KeyError):
        process_opts(precision=30)
    with pytest.raises(ValueError):
        process_opts(backend="mpmath")
    with pytest.raises(ValueError):
        process_opts(tolerance=0)
    with pytest.raises(ValueError):
        process_opts(seed=-1)
    with pytest.raises(ValueError):
        process_opts(format="xml")
