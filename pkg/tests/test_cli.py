"""
Command-line interface, through click's CliRunner.
"""
import json

import pandas as pd
import pytest
from click.testing import CliRunner
from numpy.testing import assert_allclose

from qheun.cli import cli
from qheun.suites import CURATED, TABLE_COLUMNS


@pytest.fixture
def runner():
    return CliRunner()


def output_value(text, key="value"):
    for line in text.splitlines():
        name, _, value = line.partition(" = ")
        if name == key:
            return value
    raise AssertionError(f"no {key} in {text!r}")


def write_case(path, case, **extra):
    values = {k: v for k, v in CURATED[case].items() if k != "beta"}
    values.update(case=case, kernel_alpha=0.25, q=0.5)
    values.update(extra)
    lines = ["# worked case"] + [f"{k} = {v}" for k, v in values.items()]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_eval_theta_zero(runner):
    result = runner.invoke(cli, ["eval", "theta", "t=1", "q=0.5"])
    assert result.exit_code == 0
    assert complex(output_value(result.output)) == 0
    assert "tail_bound" in result.output


def test_eval_qpoch_inf(runner):
    result = runner.invoke(cli, ["eval", "qpoch_inf", "a=0.5", "q=0.5"])
    assert result.exit_code == 0
    assert_allclose(float(output_value(result.output)), 0.41942244, rtol=1e-8)
    assert float(output_value(result.output, "tail_bound")) < 1e-12


def test_eval_exact(runner):
    result = runner.invoke(cli, ["eval", "qpoch_n", "a=1/2", "n=2", "r=1/3", "root=1", "--backend", "exact"])
    assert result.exit_code == 0
    assert output_value(result.output) == "5/12"
    assert "tail_bound" not in result.output


def test_eval_1psi1(runner):
    result = runner.invoke(cli, ["eval", "1psi1", "a=1.4", "b=0.2", "z=0.6", "q=0.3"])
    assert result.exit_code == 0
    assert_allclose(
        complex(output_value(result.output)), complex(output_value(result.output, "product")), rtol=1e-12
    )


@pytest.mark.parametrize(
    "args",
    [
        ["eval", "qpoch_inf", "a=0.5", "--backend", "exact", "r=1/2"],
        ["eval", "qpoch_n", "a=1/2", "n=2", "--backend", "exact"],
        ["eval", "1psi1", "a=1.4", "b=1.0", "z=0.6"],
        ["eval", "theta", "t=0"],
        ["eval", "qpoch_inf", "b=0.5"],
        ["eval", "qpoch_inf", "0.5"],
        ["eval", "gamma", "a=1"],
    ],
)
def test_eval_usage_errors(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 2


def test_verify_exact(runner):
    args = ["verify", "kernels", "--backend", "exact", "--n-param-sets", "2", "--n-points", "3"]
    result = runner.invoke(cli, args + ["--negative-controls"])
    assert result.exit_code == 0
    records = [json.loads(line) for line in result.output.splitlines()]
    assert len(records) == 8
    assert all(r["passed"] for r in records)


def test_verify_numeric_csv(runner, tmp_path):
    out = tmp_path / "report.csv"
    result = runner.invoke(cli, ["verify", "solutions", "--n-points", "2", "--format", "csv", "-o", str(out)])
    assert result.exit_code == 0
    report = pd.read_csv(out)
    assert report.passed.all()
    assert isinstance(json.loads(report.parameter_set[0]), dict)


def test_verify_failure_exits_one(runner):
    result = runner.invoke(cli, ["verify", "kernels", "--n-points", "2", "--tolerance", "1e-300"])
    assert result.exit_code == 1
    assert "FAILED kernels/" in result.output


def test_verify_bad_option(runner):
    assert runner.invoke(cli, ["verify", "kernels", "--seed", "-1"]).exit_code == 2
    assert runner.invoke(cli, ["verify", "tables"]).exit_code == 2


def test_transform_csv(runner, tmp_path):
    path = write_case(tmp_path / "case3.cfg", 3, x="0.83, 1.07, 1.29")
    out = tmp_path / "table.csv"
    result = runner.invoke(cli, ["transform", "--config", path, "-o", str(out)])
    assert result.exit_code == 0
    table = pd.read_csv(out)
    assert list(table.columns) == TABLE_COLUMNS
    assert_allclose(table.closed_ratio, 1, rtol=1e-8)


def test_transform_json(runner, tmp_path):
    path = write_case(tmp_path / "case3.cfg", 3, n_points=2)
    result = runner.invoke(cli, ["transform", "--config", path, "--format", "json"])
    assert result.exit_code == 0
    rows = [json.loads(line) for line in result.output.splitlines()]
    assert [r["index"] for r in rows] == [0, 1]


def test_transform_no_points(runner, tmp_path):
    path = write_case(tmp_path / "case3.cfg", 3, n_points=0)
    result = runner.invoke(cli, ["transform", "--config", path])
    assert result.exit_code == 0
    assert result.output.strip() == ",".join(TABLE_COLUMNS)


def test_transform_errors(runner, tmp_path):
    # beta' > 0: the integral diverges
    path = write_case(tmp_path / "bad.cfg", 3, alpha2=1.1)
    result = runner.invoke(cli, ["transform", "--config", path])
    assert result.exit_code == 2
    assert "ConstraintViolated" in result.output
    result = runner.invoke(cli, ["transform", "--config", str(tmp_path / "missing.cfg")])
    assert result.exit_code == 2


def test_certify(runner, tmp_path):
    out = tmp_path / "monomial.jsonl"
    args = ["certify", "monomial_a4", "--n-param-sets", "3", "--n-points", "2", "-o", str(out)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(records) == 3
    assert all(r["passed"] for r in records)
    assert runner.invoke(cli, ["certify", "monomial_a5"]).exit_code == 2


def test_identities(runner):
    result = runner.invoke(cli, ["identities"])
    assert result.exit_code == 0
    assert result.output.splitlines()[0] == "identity_id,negative,description"
    assert "kernel_a4_mutated" in result.output


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "qheun" in result.output
