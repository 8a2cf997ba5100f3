import csv
import io
import json

import pytest

from localmorrey.suite import (STATEMENT_MANIFEST, VerificationReport, VerifyConfig, manifest_complete, verify_suite)

SMALL = dict(qs=[2, 3], rs=["2", "3"], alphas=["1/2", "1"], phis=["lebesgue", "envelope"], eta_range=[-4, 4],
             dilation_functions=6, search_window=[-4, 4], search_restarts=2, search_iters=8, search_random=30,
             mc_functions=1, mc_samples=2000, mc_probes=[0])


@pytest.fixture(scope="module")
def report():
    return verify_suite(VerifyConfig.from_json(SMALL))


def test_small_suite_passes_and_covers_manifest(report):
    assert report.ok, [c.body() for c in report.failed]
    assert manifest_complete(report)
    assert {c.name for c in report.checks} == set(STATEMENT_MANIFEST)
    assert len(STATEMENT_MANIFEST) == 17


def test_body_is_deterministic(report):
    again = verify_suite(VerifyConfig.from_json(SMALL))
    assert json.dumps(again.body(), sort_keys=True) == json.dumps(report.body(), sort_keys=True)
    assert "timing_ms" not in json.loads(report.to_json(timing=False))
    assert "timing_ms" in json.loads(report.to_json(timing=True))


def test_threshold_configs_skip_theorem_but_show_divergence(report):
    # r = 2, alpha = 1 sits on the boundary alpha + 1 = r
    skipped = [c for c in report.checks if c.name == "main-theorem-inequality" and c.status == "skip"]
    assert skipped
    div = [c for c in report.checks if c.name == "hlp-partial-sums-diverge"]
    assert div and all(c.status == "pass" for c in div)


def test_csv_columns(report):
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert rows[0] == ["name", "status", "measured", "bound", "tol", "seed", "ms"]
    assert len(rows) == len(report.checks) + 1


def test_config_round_trip_and_unknown_keys():
    cfg = VerifyConfig.from_json(SMALL)
    assert VerifyConfig.from_json(cfg.to_json()) == cfg
    with pytest.raises(ValueError, match="unknown"):
        VerifyConfig.from_json({"seeds": 3})


def test_crashing_family_becomes_failure(monkeypatch):
    from localmorrey import suite

    def boom(cfg):
        raise RuntimeError("broken")
        yield  # pragma: no cover

    boom.__name__ = "check_boom"
    monkeypatch.setattr(suite, "FAMILIES", suite.FAMILIES[:2] + (boom,))
    rep = verify_suite(VerifyConfig.from_json({**SMALL, "qs": [2]}))
    bad = [c for c in rep.failed if c.name == "check_boom"]
    assert bad and "broken" in json.dumps(bad[0].body())
    assert not rep.ok
    assert isinstance(rep, VerificationReport)
