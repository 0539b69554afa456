import json

import pytest

from stochorder.config import DEFAULT_CONFIG
from stochorder.corpus import (
    FAIL,
    INCONCLUSIVE,
    PANELS,
    PASS,
    Expectation,
    check_joins,
    compare,
    default_corpus_dir,
    get_scenario,
    load_corpus,
    load_scenario,
    run_corpus,
    run_scenario,
    scenario_from_json,
    validate_scenario,
)
from stochorder.errors import CorpusError, SpecError
from stochorder.families import Piece, PiecewiseSpec

REQUIRED = {
    "gamma-equal-shape",
    "gamma-unequal-shape",
    "half-student",
    "panel-A",
    "panel-B",
    "panel-C",
    "panel-D",
    "panel-E",
    "panel-F",
}


@pytest.fixture(scope="module")
def reports():
    return {r.scenario.name: r for r in run_corpus()}


@pytest.fixture
def corpus_copy(tmp_path):
    for f in sorted(default_corpus_dir().iterdir()):
        if f.name.endswith(".json"):
            (tmp_path / f.name).write_text(f.read_text())
    return tmp_path


def test_corpus_contents():
    scenarios = load_corpus()
    assert {s.name for s in scenarios} >= REQUIRED
    assert sorted(s.figure_panel for s in scenarios if s.figure_panel) == list(PANELS)
    for s in scenarios:
        assert s.expected
        assert all(e.origin in ("stated", "oracle-confirmed") for e in s.expected)


def test_every_scenario_passes(reports):
    for name, r in reports.items():
        bad = [o for o in r.outcomes if o.status != PASS]
        assert r.status == PASS, (name, bad)


def test_scenario_bindings():
    c = get_scenario("C")
    assert c.bindings["P.a1"] == 1.0 and c.bindings["P.mu"] == 2.0
    assert get_scenario("gamma-equal-shape").bindings == {"P.shape": 2, "P.scale": 1, "Q.shape": 2, "Q.scale": 2}
    with pytest.raises(KeyError):
        get_scenario("panel-Z")


def test_panel_e_superlevel(reports):
    r = reports["panel-E"]
    assert r.decision.by_name("superlevel").applicable
    assert r.decision.by_name("superlevel").st == "holds"
    assert r.audit.st.holds and r.audit.hr.holds


def test_panel_a_claims(reports):
    r = reports["panel-A"]
    assert r.decision.analysis.shape.log_concave.status is True
    assert not r.audit.lr.holds


def test_panel_d_claims(reports):
    sh = reports["panel-D"].decision.analysis.shape
    assert sh.phi_sign.collapsed == "+-"
    assert len(sh.touches) == 2 and len(sh.crossings) == 1


def test_half_student_scenario(reports):
    sh = reports["half-student"].decision.analysis.shape
    assert sh.unimodal.status is True and sh.log_concave.status is False


def test_panel_c_scenario(reports):
    r = reports["panel-C"]
    assert r.decision.summary["st"] == "holds" and not r.audit.lr.holds


def test_compare_rules():
    grid = [0.0, 0.1, 0.2, 0.3]
    assert compare(Expectation("shape.touches", [0.1]), [0.15], grid) == PASS
    assert compare(Expectation("shape.touches", [0.1]), [0.25], grid) == FAIL
    assert compare(Expectation("shape.touches", [0.1]), [], grid) == FAIL
    assert compare(Expectation("profile.endpoint_value", 1.5, tol=1e-9), 1.5 + 1e-12, grid) == PASS
    assert compare(Expectation("profile.endpoint_value", 1.5), 1.6, grid) == FAIL
    assert compare(Expectation("decision.st", "holds"), "unknown", grid) == INCONCLUSIVE
    assert compare(Expectation("shape.unimodal", True), "undetermined", grid) == INCONCLUSIVE
    assert compare(Expectation("shape.superlevel_set", [0, 0]), [0.0, 0.0], grid) == PASS


def test_wide_equality_band_is_inconclusive():
    cfg = DEFAULT_CONFIG.with_overrides(eq_tol=10.0)
    statuses = {r.scenario.name: r.status for r in run_corpus(cfg)}
    assert INCONCLUSIVE in statuses.values()
    assert FAIL not in statuses.values()


def test_mismatched_expectation_fails(corpus_copy):
    path = corpus_copy / "panel-A.json"
    obj = json.loads(path.read_text())
    obj["expected"]["shape.log_concave"]["value"] = False
    path.write_text(json.dumps(obj))
    r = run_scenario(load_scenario(path))
    assert r.status == FAIL
    assert [o.key for o in r.outcomes if o.status == FAIL] == ["shape.log_concave"]


def test_corrupted_file_reports_position(corpus_copy):
    (corpus_copy / "panel-A.json").write_text('{"name": "panel-A",\n  "P": }')
    with pytest.raises(SpecError) as info:
        load_corpus(corpus_copy)
    assert info.value.line == 2
    assert "panel-A.json" in str(info.value)


def test_empty_directory(tmp_path):
    with pytest.raises(CorpusError, match="no scenario files"):
        load_corpus(tmp_path)


def test_unknown_expectation_key(corpus_copy):
    path = corpus_copy / "panel-E.json"
    obj = json.loads(path.read_text())
    obj["expected"]["shape.wobbliness"] = {"value": 1}
    path.write_text(json.dumps(obj))
    with pytest.raises(CorpusError, match="unknown expectation key"):
        run_scenario(load_scenario(path))


def test_panel_b_validation_rejects_log_concave_parameters(corpus_copy):
    path = corpus_copy / "panel-B.json"
    obj = json.loads(path.read_text())
    # these parameters give a relatively log-concave pair
    obj["P"]["params"] = {"mu": 0, "sigma": 1}
    obj["Q"]["params"] = {"mu": 1, "sigma": 2}
    path.write_text(json.dumps(obj))
    with pytest.raises(CorpusError, match="log-concave"):
        load_corpus(corpus_copy)
    assert len(load_corpus(corpus_copy, validate=False)) == len(REQUIRED)


def test_panel_b_must_be_folded_normals(corpus_copy):
    path = corpus_copy / "panel-B.json"
    obj = json.loads(path.read_text())
    obj["Q"] = {"family": "exponential", "params": {"rate": 1}}
    path.write_text(json.dumps(obj))
    with pytest.raises(CorpusError, match="folded normals"):
        load_corpus(corpus_copy)


def test_join_check_flags_discontinuity():
    gap = PiecewiseSpec((Piece(0, 0.5, "1.5"), Piece(0.5, 1, "0.5")))
    assert check_joins(gap) == [(0.5, 1.5, 0.5)]
    s = scenario_from_json(
        {
            "name": "broken-F",
            "panel": "F",
            "P": {"family": "piecewise", "pieces": [{"from": 0, "to": 0.5, "expr": "1.5"}, {"from": 0.5, "to": 1, "expr": "0.5"}]},
            "Q": {"family": "uniform", "params": {"a": 0, "b": 1}},
        }
    )
    with pytest.raises(CorpusError, match="discontinuous"):
        validate_scenario(s)


@pytest.mark.parametrize("name", ["panel-C", "panel-D", "panel-F"])
def test_printed_densities_are_continuous(name):
    assert check_joins(get_scenario(name).P_spec) == []


def test_scenario_file_errors():
    with pytest.raises(SpecError, match="needs key"):
        scenario_from_json({"name": "x", "P": {"family": "poisson", "params": {"lam": 1}}})
    with pytest.raises(SpecError, match="unknown panel"):
        scenario_from_json(
            {"name": "x", "panel": "G", "P": {"family": "poisson", "params": {"lam": 1}}, "Q": {"family": "poisson", "params": {"lam": 2}}}
        )
