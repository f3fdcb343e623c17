import json
import math

import numpy as np
import pytest

from fracfields import samplers as S
from fracfields import verify as V
from fracfields.checks import CHECKS, default_manifest


def test_config_validation():
    with pytest.raises(ValueError):
        V.MCConfig(n_samples=0)
    with pytest.raises(ValueError):
        V.MCConfig(seed=-1)
    with pytest.raises(ValueError):
        V.MCConfig(tolerance_sigmas=0)


def test_estimators():
    x = np.arange(10.0)
    m, se = V.mean_and_se(x)
    assert m == 4.5 and se == pytest.approx(x.std(ddof=1) / math.sqrt(10))
    pmf = V.empirical_pmf([0, 0, 1, 5, 7], 3)
    assert [p for p, _ in pmf] == pytest.approx([0.4, 0.2, 0.0, 0.0, 0.4])
    with pytest.raises(ValueError):
        V.empirical_laplace([1.0], 0.0)
    with pytest.raises(ValueError):
        V.mean_and_se([])
    c, _ = V.covariance_and_se(x, 2 * x)
    assert c == pytest.approx(2 * x.var(ddof=1))


def test_standard_error_scaling():
    # Poisson mean: SE shrinks like 1/sqrt(N)
    ses = []
    for n in (10_000, 100_000, 1_000_000):
        x = S.make_rng(0).poisson(3.0, n)
        ses.append(V.mean_and_se(x)[1] * math.sqrt(n))
    assert max(ses) / min(ses) < 1.1


def test_ks_helpers():
    rng = S.make_rng(1)
    d, crit = V.ks_two_sample(rng.normal(size=5000), rng.normal(size=5000))
    assert d < crit
    d, crit = V.ks_one_sample(rng.uniform(size=5000), lambda v: np.clip(v, 0, 1))
    assert d < crit


def test_draw_blocks_independent_of_chunks():
    sampler = lambda rng, n: rng.normal(size=n)
    a = V.draw_blocks(sampler, 30_000, 5, 2, n_chunks=1)
    b = V.draw_blocks(sampler, 30_000, 5, 2, n_chunks=7)
    np.testing.assert_array_equal(a, b)
    assert a.size == 30_000
    pair = V.draw_blocks(lambda rng, n: (rng.normal(size=n), rng.uniform(size=n)), 10_000, 5, 0, 3)
    assert isinstance(pair, tuple) and pair[1].size == 10_000


def test_make_report_threshold():
    r = V.make_report("x", 1.0, 1.1, 0.05, 2.0, 4.0, 0, 10)
    assert r.passed
    assert V.make_report("x", 1.0, 1.5, 0.05, 10.0, 4.0, 0, 10).passed is False
    assert "pass" in r.as_dict() and "passed" not in r.as_dict()


def test_campaign_and_serialization(tmp_path):
    man = [d for d in default_manifest() if d["check_type"] in ("inverse_stable_mean", "stable_ks")]
    reps = V.run_campaign(man, V.MCConfig(20_000, 3, 1))
    assert [r.name for r in reps] == [d["name"] for d in man]
    text = V.reports_to_json(reps)
    rows = json.loads(text)
    assert rows[0]["seed"] == 3 and isinstance(rows[0]["pass"], bool)
    csv_text = V.reports_to_csv(reps)
    assert csv_text.splitlines()[0] == "name,analytic,empirical,std_error,statistic,threshold,pass"
    assert text == V.reports_to_json(V.run_campaign(man, V.MCConfig(20_000, 3, 4)))


def test_campaign_rejects_bad_descriptors():
    with pytest.raises(ValueError):
        V.run_campaign([{"name": "x"}], V.MCConfig(100))
    with pytest.raises(ValueError):
        V.run_campaign([{"name": "x", "check_type": "nope"}], V.MCConfig(100))


def test_manifest_loading(tmp_path):
    assert len(V.load_manifest("default.json")) == len(default_manifest())
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"checks": [{"name": "a", "check_type": "stable_ks", "params": {"alpha": 0.5}}]}))
    assert V.load_manifest(str(p))[0]["name"] == "a"
    p.write_text("3")
    with pytest.raises(ValueError):
        V.load_manifest(str(p))


def test_default_manifest_types_registered():
    assert {d["check_type"] for d in default_manifest()} <= set(CHECKS)


def test_fmt17_round_trip():
    x = 0.1 + 0.2
    assert float(V.fmt17(x)) == x
    assert V.fmt17(True) == "true"
