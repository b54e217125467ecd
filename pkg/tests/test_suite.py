import json

import pytest

from rpqverify.cases import FAIL, PASS, IdentityCase, run_scalar_case, sample_points
from rpqverify.errors import ConfigError
from rpqverify.scalars import DEFAULT_REGISTRY
from rpqverify.suite import (RunConfig, apply_allowlist, load_allowlist, report_json,
                             report_markdown, run_suite, write_reports)

SMALL = {"presets": ["js", "bm"], "deltas": ["2"], "suites": ["core", "p1", "witt", "bell"],
         "ranges": {"nm": [-1, 1]}}


@pytest.fixture(scope="module")
def ledger():
    return run_suite(dict(SMALL))


def test_empty_grid():
    led = run_suite({"suites": []})
    assert led.cases == () and led.summary()["pass"] == 0


def test_small_run_is_clean(ledger):
    s = ledger.summary()
    assert s["pass"] > 0 and s["unexplained"] == 0 and s["inconsistent"] == 0
    fails = [c for c in ledger.cases if c.verdict == FAIL]
    assert fails and all(c.witness and c.extra["allowlisted"] for c in fails)


def test_reports_are_byte_identical(ledger, tmp_path):
    again = run_suite(dict(SMALL))
    assert report_json(ledger) == report_json(again)
    assert report_markdown(ledger) == report_markdown(again)
    js, md = write_reports(ledger, str(tmp_path / "a.json"))
    assert json.loads(open(js).read())["summary"] == ledger.summary()
    assert "Discrepancies" in open(md).read()


def test_seed_changes_points_not_verdicts(ledger):
    other = run_suite(dict(SMALL, seed=7))
    assert other.run["points"] != ledger.run["points"]
    assert other.verdict_multiset() == ledger.verdict_multiset()


def test_discrepancies_group_all_failing_readings(ledger):
    disc = ledger.discrepancies()
    assert all(d["witness"] for d in disc)
    fams = {d["family"] for d in disc}
    assert "bell.split" not in fams


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(suites=["nope"])
    with pytest.raises(ConfigError):
        RunConfig(samples=0)
    with pytest.raises(ConfigError):
        RunConfig(presets=["nope"])
    with pytest.raises(ConfigError):
        RunConfig.from_json({"colour": 1})
    with pytest.raises(ConfigError):
        RunConfig(ranges={"nm": [2, 1]})


def test_auto_rho():
    assert RunConfig(deltas=["2"]).resolved_rho() == 2
    assert RunConfig(deltas=["1/2", "2/3"]).resolved_rho() == 12


def test_allowlist_document(tmp_path):
    entries = load_allowlist()
    assert all("reason" in e for e in entries)
    bad = tmp_path / "a.json"
    bad.write_text(json.dumps({"version": 99, "entries": []}))
    with pytest.raises(ConfigError):
        load_allowlist(str(bad))


def test_allowlist_matching():
    case = IdentityCase("witt", {"preset": "js", "n": 1}, "printed", FAIL)
    other = IdentityCase("witt", {"preset": "js", "n": 1}, "corrected-tau", FAIL)
    passing = IdentityCase("witt", {"preset": "js", "n": 1}, "printed", PASS)
    apply_allowlist([case, other, passing], [
        {"family": "witt", "convention": "printed", "presets": ["js"], "reason": "r"},
        {"family": "witt", "convention": "*", "presets": ["bm"], "reason": "s"}])
    assert case.extra == {"allowlisted": True, "allowlist_reason": "r"}
    assert other.extra is None and passing.extra is None


def test_sample_points_are_screened():
    pts, resampled = sample_points(0, 2, 3, list(DEFAULT_REGISTRY))
    assert len(set(pts)) == 3 and resampled >= 0


def test_inconsistent_verdicts_are_flagged():
    pts, _ = sample_points(0, 2, 3)
    first = pts[0]
    case = run_scalar_case("x", {}, "r", lambda sp: None if sp == first else {"bad": 1}, pts)
    assert case.inconsistent and case.verdict == FAIL
