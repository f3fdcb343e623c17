import json

import pytest

from fracfields import cli


def run(capsys, *argv):
    code = cli.dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pmf_poisson_example(capsys):
    code, out, _ = run(capsys, "pmf", "--family", "tc", "--alpha1", "1", "--beta1", "1", "--lambda", "1",
                       "--t1", "1", "--t2", "1", "--n", "0")
    assert code == 0 and "0.367879" in out


def test_eval_exp_example(capsys):
    code, out, _ = run(capsys, "eval", "--fn", "mittag_leffler", "--alpha", "1", "--beta", "1", "--x", "1")
    assert code == 0 and "2.718282" in out


def test_unused_and_missing_parameters_are_usage_errors(capsys):
    code, _, err = run(capsys, "eval", "--fn", "mittag_leffler", "--alpha", "1", "--beta", "1", "--x", "1",
                       "--lambda", "2")
    assert code == 2 and "--lambda" in err
    code, _, err = run(capsys, "eval", "--fn", "mittag_leffler", "--alpha", "1")
    assert code == 2 and "missing" in err
    assert run(capsys, "eval", "--fn", "nope")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "eval", "--fn", "wright", "--sigma", "x", "--rho", "1", "--x", "1")[0] == 2


def test_domain_error_is_usage_error(capsys):
    code, _, _ = run(capsys, "pmf", "--family", "tc", "--alpha1", "1.5", "--beta1", "1", "--lambda", "1",
                     "--t1", "1", "--t2", "1", "--n", "0")
    assert code == 2


def test_numerical_failure_exit_code(capsys):
    code, _, err = run(capsys, "residual", "--kind", "double_caputo", "--lambda", "1", "--beta1", "0.5",
                       "--beta2", "0.5", "--n", "1", "--t1", "1", "--t2", "1")
    assert code == 1 and "numerical" in err


def test_pmf_csv_and_json(capsys):
    args = ["pmf", "--family", "double", "--beta1", "0.9", "--beta2", "0.9", "--lambda", "1",
            "--t1", "1", "--t2", "1", "--n-max", "3"]
    code, out, _ = run(capsys, *args, "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,probability" and len(lines) == 5
    assert "," in lines[1] and lines[1].split(",")[0] == "0"
    code, out, _ = run(capsys, *args, "--format", "json")
    rows = json.loads(out)
    assert rows[3]["n"] == 3 and isinstance(rows[3]["probability"], float)


def test_table_format():
    assert cli.fmt_table(0.5) == "0.500000"
    assert cli.fmt_table(1.5e-7) == "1.500000e-07"
    assert cli.fmt_table(2e7) == "2.000000e+07"


def test_laplace_moments_residual(capsys):
    code, out, _ = run(capsys, "laplace", "--kind", "bivariate", "--alpha", "0.5", "--beta", "0.5", "--eta1", "1",
                       "--eta2", "1", "--z1", "1", "--z2", "1", "--pair", "common", "--format", "json")
    assert code == 0 and json.loads(out)[0]["value"] == pytest.approx(0.353553, abs=1e-6)
    code, out, _ = run(capsys, "moments", "--kind", "inverse_stable", "--beta", "0.5", "--s", "0.5", "--t", "1",
                       "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "quantity,value" and "covariance" in out
    code, out, _ = run(capsys, "residual", "--kind", "pgf_ode", "--lambda", "1", "--alpha1", "0.5", "--beta1",
                       "0.7", "--u", "0.5", "--t1", "1", "--t2", "1", "--format", "json")
    assert code == 0 and abs(json.loads(out)[0]["value"]) < 1e-12


def test_simulate_seed_precedence(capsys, monkeypatch, tmp_path):
    base = ["simulate", "--process", "stable", "--alpha", "0.5", "--samples", "5", "--format", "csv"]
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    _, default, _ = run(capsys, *base)
    _, zero, _ = run(capsys, *base, "--seed", "0")
    assert default == zero and default.splitlines()[0] == "replicate,value"
    monkeypatch.setenv(cli.SEED_ENV, "9")
    _, env, _ = run(capsys, *base)
    _, nine, _ = run(capsys, *base, "--seed", "9")
    _, flag, _ = run(capsys, *base, "--seed", "1")
    assert env == nine and env != default and flag != env
    monkeypatch.setenv(cli.SEED_ENV, "bad")
    assert run(capsys, *base)[0] == 2


def test_simulate_output_file_is_reproducible(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, _, _ = run(capsys, "simulate", "--process", "tc", "--alpha1", "0.5", "--beta1", "0.8", "--lambda",
                         "1", "--t1", "1", "--t2", "1", "--samples", "200", "--seed", "4", "--format", "json",
                         "--output", str(p))
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_verify_exit_codes(capsys, tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps([{"name": "m", "check_type": "inverse_stable_mean", "params": {"beta": 0.5}}]))
    out = tmp_path / "r.csv"
    code, _, err = run(capsys, "verify", "--manifest", str(good), "--samples", "20000", "--seed", "1",
                       "--format", "csv", "--output", str(out))
    assert code == 0 and "1/1" in err
    assert out.read_text().splitlines()[0] == "name,analytic,empirical,std_error,statistic,threshold,pass"
    # a band of 1e-9 sigmas cannot pass
    code, _, err = run(capsys, "verify", "--manifest", str(good), "--samples", "20000", "--sigmas", "1e-9",
                       "--output", str(tmp_path / "r.json"))
    assert code == 3 and "FAILED m" in err
    assert run(capsys, "verify", "--manifest", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"name": "x", "check_type": "nope"}]))
    assert run(capsys, "verify", "--manifest", str(bad))[0] == 2


def test_verify_default_manifest(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, _, _ = run(capsys, "verify", "--manifest", "default.json", "--samples", "100000", "--seed", "42",
                     "--output", str(out))
    assert code == 0
    rows = json.loads(out.read_text())
    assert all(r["pass"] for r in rows) and rows[0]["seed"] == 42
