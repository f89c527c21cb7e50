import json
import math
import os
import pathlib
import subprocess

import pytest

import hball

SOURCE = pathlib.Path(os.environ.get("HBALL_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def test_coefficients_match_pochhammer_ratio():
    # gamma_k(alpha) = (1 + n/2 + alpha)_k / (n/2)_k on the upper branch
    for n, alpha in [(2, 0.0), (3, 1.5), (4, -0.5)]:
        a, h = 1 + n / 2 + alpha, n / 2
        for k in range(12):
            oracle = math.exp(math.lgamma(a + k) - math.lgamma(a) - math.lgamma(h + k) + math.lgamma(h))
            assert hball.gamma_coeff(n, alpha, k) == pytest.approx(oracle, rel=1e-12)
    assert hball.coefficient_branch(2, -2.0) == "lower"
    assert hball.coefficient_branch(2, -1.5) == "upper"


def test_kernel_minus_one_is_poisson_type():
    x, y = [0.3, -0.4, 0.2], [0.5, 0.5, -0.1]
    xx, yy = sum(v * v for v in x), sum(v * v for v in y)
    xy = sum(a * b for a, b in zip(x, y))
    oracle = (1 - xx * yy) / (1 - 2 * xy + xx * yy) ** 1.5
    value, degree, tail = hball.kernel_eval(3, -1.0, x, y, 1e-13)
    assert value == pytest.approx(oracle, rel=1e-12)
    assert tail <= 1e-13
    assert degree > 0


def test_gauss_jacobi_weights_sum_to_beta():
    nodes, weights = hball.gauss_jacobi(8, 1.5, 0.5)
    assert len(nodes) == 8
    assert sum(weights) == pytest.approx(2 ** 3 * math.gamma(2.5) * math.gamma(1.5) / math.gamma(4), rel=1e-13)


def test_membership_and_growth_exponent():
    assert hball.membership_kernel_atom(2, 1, 0, 1) == "Member"
    assert hball.membership_kernel_atom(2, 2, 0, 2) == "NonMember"
    assert hball.growth_exponent(3, 2, 0, 1) == 2


def test_errors_are_translated():
    with pytest.raises(hball.NonConvergent):
        hball.kernel_eval(2, 0.0, [1.0, 0.0], [1.0, 0.0], 1e-12)
    with pytest.raises(ValueError):
        hball.run_experiment("nonsense", {})


def test_run_experiment_small_grid():
    report = hball.run_experiment(
        "membership", {"name": "py", "parameters": {"n": 2, "p": [1], "s": [0], "beta": [-0.5, 2.5], "shells": 16}}
    )
    assert report["summary"]["pass"] == 2
    assert [r["predicate"] for r in report["rows"]] == ["NonMember", "Member"]


def test_power_regime_fit():
    fit = hball.fit_kernel_growth(2, 2.0, 0.0, 1.0, j_last=9)
    assert fit["verdict"] == "Power"
    assert abs(fit["slope"] - fit["w"]) < 0.1


def _validate(doc):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((SOURCE / "schema" / "report.schema.json").read_text())
    jsonschema.validate(doc, schema)


@pytest.mark.parametrize("name", ["membership", "distance"])
def test_golden_files_match_schema(name):
    _validate(json.loads((SOURCE / "tests" / "golden" / f"{name}.json").read_text()))


def test_cli_output_matches_schema(tmp_path):
    cli = os.environ.get("HBALL_CLI")
    if not cli:
        pytest.skip("CLI path not provided")
    out = tmp_path / "levelset.json"
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "name": "py-levelset",
        "parameters": {"n": [2], "p": [1], "alpha": [0], "epsilon": [0.1], "shells": 30,
                       "family": str(SOURCE / "data" / "family.json")},
    }))
    rc = subprocess.run([cli, "levelset", "--config", str(config), "--out", str(out)], check=False).returncode
    doc = json.loads(out.read_text())
    _validate(doc)
    assert rc == doc["summary"]["exit_code"] == 0
