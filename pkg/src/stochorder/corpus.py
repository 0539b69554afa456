"""Worked scenarios with expected outcomes, replayable from JSON data files.

Each file in ``corpus_data`` holds one scenario::

    {"name": ..., "panel": "A" | ... | null, "description": ...,
     "P": <distribution spec>, "Q": <distribution spec>,
     "expected": {"<key>": {"value": ..., "origin": "stated" | "oracle-confirmed",
                            "tol": <optional>}}}

Expectation keys:

``shape.log_concave`` / ``shape.unimodal``
    classifier status (true / false).
``shape.sign_runs`` / ``shape.sign_collapsed``
    sign word of ``l - 1`` with equal letters merged, and with zeros removed.
``shape.zero_run``
    whether the sign word contains a run of at least two zero letters.
``shape.touches`` / ``shape.crossings``
    x locations, matched within one grid cell.
``shape.superlevel_set``
    ``[lo, hi]`` of ``{l >= 1}``.
``profile.endpoint_value``
    ``l(x*+)``, matched within ``tol``.
``criterion.<name>.<field>``
    ``applicable``, ``st``, ``hr`` or ``lr`` of one criterion verdict.
``decision.<order>`` / ``oracle.<order>``
    merged criterion summary, or direct oracle outcome (holds / fails).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .criteria import FAILS, HOLDS, UNKNOWN, Decision, analyze, classify_and_decide
from .errors import CorpusError, SpecError
from .families import FamilySpec, FoldedNormalSpec, PiecewiseSpec, build, spec_from_json
from .oracle import AuditRecord, implication_audit
from .shape import UNDETERMINED

PANELS = ("A", "B", "C", "D", "E", "F")
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
JOIN_TOL = 1e-12


@dataclass(frozen=True)
class Expectation:
    key: str
    value: object
    origin: str = "stated"
    tol: float | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    P_spec: FamilySpec
    Q_spec: FamilySpec
    expected: tuple[Expectation, ...]
    figure_panel: str | None = None
    description: str = ""
    source: str | None = None

    @property
    def bindings(self) -> dict:
        out = {}
        for side, spec in (("P", self.P_spec), ("Q", self.Q_spec)):
            for k, v in (spec.bindings if isinstance(spec, PiecewiseSpec) else spec.params().items()):
                out[f"{side}.{k}"] = v
        return out


@dataclass(frozen=True)
class Outcome:
    key: str
    expected: object
    observed: object
    status: str
    origin: str = "stated"


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    scenario: Scenario
    outcomes: tuple[Outcome, ...]
    decision: Decision | None = field(repr=False, default=None)
    audit: AuditRecord | None = field(repr=False, default=None)
    error: str | None = None

    @property
    def status(self) -> str:
        if self.error is not None or any(o.status == FAIL for o in self.outcomes):
            return FAIL
        if any(o.status == INCONCLUSIVE for o in self.outcomes):
            return INCONCLUSIVE
        return PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS


# -- loading -----------------------------------------------------------------


def default_corpus_dir():
    return resources.files("stochorder") / "corpus_data"


def scenario_from_json(obj: dict, source: str | None = None) -> Scenario:
    try:
        name = str(obj["name"])
        P = spec_from_json(obj["P"])
        Q = spec_from_json(obj["Q"])
        raw = obj.get("expected", {})
    except KeyError as exc:
        raise SpecError(f"scenario needs key {exc.args[0]!r}") from None
    if not isinstance(raw, dict):
        raise SpecError(f"{name}: 'expected' must be an object")
    expected = []
    for key, item in raw.items():
        if isinstance(item, dict) and "value" in item:
            expected.append(Expectation(key, item["value"], item.get("origin", "stated"), item.get("tol")))
        else:
            expected.append(Expectation(key, item))
    panel = obj.get("panel")
    if panel is not None and panel not in PANELS:
        raise SpecError(f"{name}: unknown panel {panel!r}")
    return Scenario(name, P, Q, tuple(expected), panel, str(obj.get("description", "")), source)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path.name}: invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    return scenario_from_json(obj, str(path))


def load_corpus(directory=None, validate: bool = True) -> list[Scenario]:
    """All scenarios in ``directory`` (default: the packaged corpus), sorted by name.

    With ``validate`` the panel-specific preconditions are checked and a
    :class:`CorpusError` is raised if any fails.
    """
    root = Path(str(directory)) if directory is not None else Path(str(default_corpus_dir()))
    files = sorted(root.glob("*.json"))
    if not files:
        raise CorpusError(f"no scenario files in {root}")
    scenarios = sorted((load_scenario(f) for f in files), key=lambda s: s.name)
    if validate:
        for s in scenarios:
            validate_scenario(s)
    return scenarios


def get_scenario(name: str, directory=None) -> Scenario:
    for s in load_corpus(directory, validate=False):
        if s.name == name or (s.figure_panel is not None and name.upper() == s.figure_panel):
            return s
    raise KeyError(name)


# -- load-time validation ----------------------------------------------------


def check_joins(spec: PiecewiseSpec, tol: float = JOIN_TOL) -> list[tuple[float, float, float]]:
    """Interior breakpoints where the two adjacent pieces disagree by more than ``tol``."""
    extra = {}
    if spec.solve_for:
        extra = {spec.solve_for: spec.build().bindings[spec.solve_for]}
    return [(x, a, b) for x, a, b in spec.join_values(extra) if abs(a - b) > tol * max(1.0, abs(a))]


def validate_scenario(s: Scenario, cfg: RunConfig = DEFAULT_CONFIG) -> None:
    """Preconditions the worked examples rely on; raise CorpusError when one fails."""
    try:
        P, Q = build(s.P_spec), build(s.Q_spec)
    except Exception as exc:  # noqa: BLE001 - reported with the scenario name
        raise CorpusError(f"{s.name}: cannot build distributions: {exc}") from exc
    if s.figure_panel == "B":
        if not (isinstance(s.P_spec, FoldedNormalSpec) and isinstance(s.Q_spec, FoldedNormalSpec)):
            raise CorpusError("panel-B must compare two folded normals")
        shape = analyze(P, Q, cfg).shape
        if shape.log_concave.status is not False:
            raise CorpusError(f"panel-B parameters are relatively log-concave ({shape.log_concave.status})")
        if not shape.sign_pattern_ok:
            raise CorpusError(f"panel-B sign word {shape.phi_sign.collapsed!r} is outside the two-change pattern")
    for side, spec in (("P", s.P_spec), ("Q", s.Q_spec)):
        if isinstance(spec, PiecewiseSpec):
            bad = check_joins(spec)
            if s.figure_panel in ("C", "D", "F") and bad:
                x, a, b = bad[0]
                raise CorpusError(f"{s.name}: {side} density is discontinuous at x={x} ({a} vs {b})")


# -- running -----------------------------------------------------------------


def _status_word(flag) -> object:
    return flag if isinstance(flag, bool) else str(flag)


def _has_zero_run(word: str) -> bool:
    return "00" in word


def observe(key: str, decision: Decision, audit: AuditRecord):
    """Value of one expectation key on a finished run."""
    a = decision.analysis
    sh = a.shape
    part = key.split(".")
    if part[0] == "shape":
        what = part[1]
        if what == "log_concave":
            return _status_word(sh.log_concave.status)
        if what == "unimodal":
            return _status_word(sh.unimodal.status)
        if what == "sign_runs":
            return sh.phi_sign.runs
        if what == "sign_collapsed":
            return sh.phi_sign.collapsed
        if what == "zero_run":
            return _has_zero_run(sh.phi_sign.word)
        if what == "touches":
            return list(sh.touches)
        if what == "crossings":
            return [c.estimate for c in sh.crossings]
        if what == "superlevel_set":
            return None if sh.superlevel.interval is None or not sh.superlevel.is_interval else list(sh.superlevel.interval)
    if part[0] == "profile" and part[1] == "endpoint_value":
        return float(a.profile.left_limit.value)
    if part[0] == "criterion" and len(part) == 3:
        v = decision.by_name(part[1])
        return getattr(v, part[2])
    if part[0] == "decision":
        return decision.summary[part[1]]
    if part[0] == "oracle":
        report = {"st": audit.st, "hr": audit.hr, "lr": audit.lr}[part[1]]
        return HOLDS if report.holds else FAILS
    raise CorpusError(f"unknown expectation key {key!r}")


def _cell_width(grid: np.ndarray, x: float) -> float:
    grid = np.asarray(grid, dtype=float)
    j = int(np.clip(np.searchsorted(grid, x), 1, grid.size - 1))
    return float(grid[j] - grid[j - 1])


def compare(exp: Expectation, observed, grid: np.ndarray) -> str:
    want = exp.value
    if exp.key in ("shape.touches", "shape.crossings"):
        if len(observed) != len(want):
            return FAIL
        ok = all(abs(o - w) <= _cell_width(grid, w) for o, w in zip(sorted(observed), sorted(want)))
        return PASS if ok else FAIL
    if isinstance(want, (int, float)) and not isinstance(want, bool) and isinstance(observed, float):
        tol = exp.tol if exp.tol is not None else 1e-9
        if math.isinf(want) or math.isinf(observed):
            return PASS if want == observed else FAIL
        return PASS if abs(observed - want) <= tol * max(1.0, abs(want)) else FAIL
    if isinstance(want, list) and isinstance(observed, list):
        if len(want) != len(observed):
            return FAIL
        return PASS if all(abs(float(o) - float(w)) <= 1e-12 for o, w in zip(observed, want)) else FAIL
    if observed in (UNKNOWN, UNDETERMINED) and want not in (UNKNOWN, UNDETERMINED):
        return INCONCLUSIVE
    if exp.key.endswith(".applicable") and observed is False and want is True:
        return FAIL
    return PASS if observed == want else FAIL


def run_scenario(s: Scenario, cfg: RunConfig = DEFAULT_CONFIG) -> ScenarioReport:
    """Criteria plus all three oracles, compared against the scenario's expectations."""
    P, Q = build(s.P_spec), build(s.Q_spec)
    a = analyze(P, Q, cfg)
    decision = classify_and_decide(P, Q, cfg, a)
    audit = implication_audit(P, Q, a.grid, cfg, a.profile)
    outcomes = []
    for exp in s.expected:
        observed = observe(exp.key, decision, audit)
        outcomes.append(Outcome(exp.key, exp.value, observed, compare(exp, observed, a.grid), exp.origin))
    return ScenarioReport(s, tuple(outcomes), decision, audit)


def run_corpus(cfg: RunConfig = DEFAULT_CONFIG, directory=None) -> list[ScenarioReport]:
    return [run_scenario(s, cfg) for s in load_corpus(directory)]
