"""Endpoint criteria: decide st / hr / lr from a single check at the left end.

Every criterion returns a :class:`CriterionVerdict` listing the hypotheses it
checked.  A criterion is *applicable* only when its hypotheses were verified
(on integer grids exactly, on real grids at grid resolution).  Inside the
equality band ``|l - 1| <= eq_tol`` a verdict is ``unknown`` unless the sign
word itself settles the boundary case.

=================  =====================================================
criterion          hypotheses
=================  =====================================================
lc-endpoint        common support interval, log l concave
lc-lr-endpoint     as lc-endpoint, plus l(x0+) > 0
unimodal-endpoint  support union an interval, l unimodal on it
sign-pattern       common support interval, phi <= 2 sign changes, last -
superlevel         common support interval, l(x0) >= 1, {l >= 1} interval
=================  =====================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .distributions import Distribution, evaluation_grid
from .errors import DiagnosticError
from .numerics import adaptive_segment_integrals
from .ratio import RatioProfile, ratio_profile
from .shape import ShapeReport, classify, letters, sign_word

HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"
NOT_ADDRESSED = "not-addressed"

VERIFIED = "verified"
GRID_VERIFIED = "verified-at-grid-resolution"
UNVERIFIABLE = "unverifiable"
FAILED = "failed"

CRITERIA = ("lc-endpoint", "lc-lr-endpoint", "unimodal-endpoint", "sign-pattern", "superlevel")


@dataclass(frozen=True)
class Assumption:
    name: str
    status: str
    witness: object = None


@dataclass(frozen=True)
class CriterionVerdict:
    criterion: str
    applicable: bool
    assumptions: tuple[Assumption, ...]
    st: str = UNKNOWN
    hr: str = UNKNOWN
    lr: str = NOT_ADDRESSED
    endpoint_value: float = math.nan
    support_relation: str = "other"
    note: str = ""

    def __post_init__(self):
        if not self.applicable and (self.st != UNKNOWN or self.hr != UNKNOWN or self.lr not in (UNKNOWN, NOT_ADDRESSED)):
            raise DiagnosticError(f"{self.criterion}: inapplicable verdict carries a decision", self)
        if self.hr == HOLDS and self.st != HOLDS:
            raise DiagnosticError(f"{self.criterion}: hr holds without st", self)
        if self.lr == HOLDS and self.hr != HOLDS:
            raise DiagnosticError(f"{self.criterion}: lr holds without hr", self)

    @property
    def resolved(self) -> bool:
        return self.applicable and self.st != UNKNOWN

    def failed_assumptions(self) -> list[str]:
        return [a.name for a in self.assumptions if a.status == FAILED]


@dataclass(frozen=True, eq=False)
class PairAnalysis:
    """Grid, ratio profile and shape report of one pair, computed once."""

    P: Distribution
    Q: Distribution
    cfg: RunConfig
    grid: np.ndarray
    profile: RatioProfile
    shape: ShapeReport

    @property
    def discrete(self) -> bool:
        return self.profile.discrete

    @property
    def grid_status(self) -> str:
        return VERIFIED if self.discrete else GRID_VERIFIED

    @property
    def endpoint(self) -> float:
        return float(self.profile.left_limit.value)


def analyze(P: Distribution, Q: Distribution, cfg: RunConfig = DEFAULT_CONFIG, grid=None) -> PairAnalysis:
    if grid is None:
        grid = evaluation_grid(P, Q, cfg.grid_n, cfg.tail_mass)
    profile = ratio_profile(P, Q, grid, cfg)
    return PairAnalysis(P, Q, cfg, np.asarray(grid, dtype=float), profile, classify(profile, cfg))


def _analysis(P, Q, cfg, analysis):
    return analysis if analysis is not None else analyze(P, Q, cfg)


def _status(flag, grid_status: str) -> str:
    return grid_status if flag is True else FAILED


def _band_decision(value: float, eq_tol: float) -> str:
    if value >= 1.0 + eq_tol:
        return HOLDS
    if value < 1.0 - eq_tol:
        return FAILS
    return UNKNOWN


def _continuity(a: PairAnalysis) -> list[Assumption]:
    return [] if a.discrete else [Assumption("continuity", UNVERIFIABLE)]


def _limit_assumption(a: PairAnalysis) -> Assumption:
    lim = a.profile.left_limit
    status = VERIFIED if lim.method in ("support-point", "closed-form") else (GRID_VERIFIED if lim.converged else FAILED)
    return Assumption("left-limit-resolved", status, (lim.method, lim.value))


def _endpoint_verdict(name: str, a: PairAnalysis, assumptions: list[Assumption], applicable: bool) -> CriterionVerdict:
    relation = a.shape.support.relation
    lim = a.profile.left_limit
    if not applicable:
        return CriterionVerdict(name, False, tuple(assumptions), endpoint_value=lim.value, support_relation=relation)
    if not lim.converged:
        return CriterionVerdict(name, True, tuple(assumptions), endpoint_value=lim.value, support_relation=relation, note="left limit unresolved")
    if a.shape.phi_sign.rightmost_sign == "all-zero":
        return CriterionVerdict(name, True, tuple(assumptions), HOLDS, HOLDS, endpoint_value=lim.value, support_relation=relation, note="l = 1 on the grid")
    decision = _band_decision(lim.value, a.cfg.eq_tol)
    note = "endpoint inside the equality band" if decision == UNKNOWN else ""
    if math.isinf(lim.value):
        note = "infinite endpoint value"
    return CriterionVerdict(name, True, tuple(assumptions), decision, decision, endpoint_value=lim.value, support_relation=relation, note=note)


def endpoint_unimodal(P: Distribution, Q: Distribution, cfg: RunConfig = DEFAULT_CONFIG, analysis: PairAnalysis | None = None) -> CriterionVerdict:
    """st and hr from l(x*+) >= 1 when l is unimodal on an interval support union."""
    a = _analysis(P, Q, cfg, analysis)
    sh = a.shape
    assumptions = [
        Assumption("finite-left-endpoint", VERIFIED, min(sh.support.left_P, sh.support.left_Q)),
        Assumption("support-union-interval", VERIFIED if sh.support.union_is_interval else FAILED, sh.support.relation),
        Assumption("unimodal", _status(sh.unimodal.status, a.grid_status), sh.unimodal.witness_x),
        _limit_assumption(a),
    ]
    applicable = sh.support.union_is_interval and sh.unimodal.status is True
    return _endpoint_verdict("unimodal-endpoint", a, assumptions, applicable)


def endpoint_logconcave(P: Distribution, Q: Distribution, cfg: RunConfig = DEFAULT_CONFIG, analysis: PairAnalysis | None = None) -> CriterionVerdict:
    """st and hr from l(x0+) >= 1 when log l is concave on a common support interval."""
    a = _analysis(P, Q, cfg, analysis)
    sh = a.shape
    assumptions = [
        Assumption("finite-left-endpoint", VERIFIED, sh.support.left_P),
        Assumption("common-support-interval", VERIFIED if sh.support.common_interval else FAILED, sh.support.relation),
        Assumption("log-concave", _status(sh.log_concave.status, a.grid_status), sh.log_concave.location),
        _limit_assumption(a),
    ]
    applicable = sh.support.common_interval and sh.log_concave.status is True
    return _endpoint_verdict("lc-endpoint", a, assumptions, applicable)


def _right_derivative(a: PairAnalysis) -> tuple[float, bool, tuple[float, ...]]:
    """l'(x0+) by Richardson extrapolation of forward quotients at h = g, g/2, g/4, g/8."""
    x0 = float(a.grid[0])
    g = float(a.grid[1] - a.grid[0])
    base = a.profile.left_limit.value
    quotients = []
    for i in range(4):
        h = g / 2.0**i
        lp = a.P.logpdf(x0 + h)
        lq = a.Q.logpdf(x0 + h)
        quotients.append((math.exp(lp - lq) - base) / h)
    table = [quotients]
    for j in range(1, 4):
        prev = table[-1]
        table.append([prev[i] + (prev[i] - prev[i - 1]) / (2.0**j - 1.0) for i in range(1, len(prev))])
    est, before = table[-1][0], table[-2][-1]
    ok = all(map(math.isfinite, quotients)) and abs(est - before) <= max(a.cfg.limit_rtol * abs(est), a.cfg.eq_tol)
    return est, ok, tuple(quotients)


def lr_endpoint_test(P: Distribution, Q: Distribution, cfg: RunConfig = DEFAULT_CONFIG, analysis: PairAnalysis | None = None) -> CriterionVerdict:
    """lr from the sign of Delta l(x0) (integer support) or l'(x0+) (real support) under log-concavity."""
    a = _analysis(P, Q, cfg, analysis)
    sh = a.shape
    lim = a.profile.left_limit
    in_supp = lim.converged and lim.value > 0 and math.isfinite(lim.value)
    assumptions = [
        Assumption("common-support-interval", VERIFIED if sh.support.common_interval else FAILED, sh.support.relation),
        Assumption("log-concave", _status(sh.log_concave.status, a.grid_status), sh.log_concave.location),
        Assumption("x0-in-support-of-P", VERIFIED if in_supp else FAILED, lim.value),
    ]
    relation = sh.support.relation
    applicable = sh.support.common_interval and sh.log_concave.status is True and in_supp
    if not applicable:
        return CriterionVerdict("lc-lr-endpoint", False, tuple(assumptions), lr=UNKNOWN, support_relation=relation)
    if sh.phi_sign.rightmost_sign == "all-zero":
        return CriterionVerdict("lc-lr-endpoint", True, tuple(assumptions), HOLDS, HOLDS, HOLDS, 0.0, relation, "l = 1 on the grid")
    if a.discrete:
        value = float(a.profile.ell[1] - a.profile.ell[0]) if len(a.profile) > 1 else 0.0
        assumptions.append(Assumption("forward-difference", VERIFIED, value))
        scale = max(1.0, a.profile.ell[0])
    else:
        value, ok, quotients = _right_derivative(a)
        assumptions.append(Assumption("derivative-converged", GRID_VERIFIED if ok else FAILED, quotients))
        if not ok:
            return CriterionVerdict("lc-lr-endpoint", True, tuple(assumptions), lr=UNKNOWN, endpoint_value=value, support_relation=relation, note="derivative estimate did not converge")
        scale = max(1.0, lim.value)
    if value <= -cfg.eq_tol * scale:
        return CriterionVerdict("lc-lr-endpoint", True, tuple(assumptions), HOLDS, HOLDS, HOLDS, value, relation)
    if value >= cfg.eq_tol * scale:
        return CriterionVerdict("lc-lr-endpoint", True, tuple(assumptions), lr=FAILS, endpoint_value=value, support_relation=relation)
    return CriterionVerdict("lc-lr-endpoint", True, tuple(assumptions), lr=UNKNOWN, endpoint_value=value, support_relation=relation, note="slope inside the equality band")


def sign_pattern_criterion(P: Distribution, Q: Distribution, cfg: RunConfig = DEFAULT_CONFIG, analysis: PairAnalysis | None = None) -> CriterionVerdict:
    """st from l(x0) >= 1 when phi has at most two sign changes and ends negative;
    hr additionally when l is nonincreasing on the final negative part."""
    a = _analysis(P, Q, cfg, analysis)
    sh = a.shape
    word = sh.phi_sign
    value = a.endpoint
    relation = sh.support.relation
    pattern_ok = word.change_count <= 2 and word.rightmost_sign in ("-", "all-zero")
    assumptions = [
        Assumption("common-support-interval", VERIFIED if sh.support.common_interval else FAILED, relation),
        Assumption("sign-pattern", a.grid_status if pattern_ok else FAILED, word.collapsed),
        _limit_assumption(a),
        *_continuity(a),
    ]
    applicable = sh.support.common_interval and pattern_ok and a.profile.left_limit.converged
    decision = _band_decision(value, cfg.eq_tol) if applicable else UNKNOWN
    if applicable and word.rightmost_sign == "all-zero":
        decision = HOLDS
    elif applicable and decision == UNKNOWN:
        # l(x0) = 1: the equivalence needs l >= 1 on a right-neighbourhood of x0
        right_ok = word.first_nonzero == "+"
        assumptions.append(Assumption("right-neighbourhood", a.grid_status if right_ok else FAILED, word.runs[:3]))
        if right_ok:
            decision = HOLDS
        else:
            applicable = False
    if not applicable:
        return CriterionVerdict("sign-pattern", False, tuple(assumptions), endpoint_value=value, support_relation=relation)
    hr = FAILS if decision == FAILS else UNKNOWN
    if decision == HOLDS:
        right = sh.rightmost_piece
        assumptions.append(Assumption("rightmost-nonincreasing", a.grid_status if right.status else FAILED, right.witness))
        hr = HOLDS if right.status else UNKNOWN
    return CriterionVerdict("sign-pattern", True, tuple(assumptions), decision, hr, endpoint_value=value, support_relation=relation)


def superlevel_criterion(P: Distribution, Q: Distribution, cfg: RunConfig = DEFAULT_CONFIG, analysis: PairAnalysis | None = None) -> CriterionVerdict:
    """st when l(x0) >= 1 and {l >= 1} is an interval; hr when also l is nonincreasing
    off that set.  One-sided: never returns ``fails``."""
    a = _analysis(P, Q, cfg, analysis)
    sh = a.shape
    sup = sh.superlevel
    value = a.endpoint
    relation = sh.support.relation
    all_zero = sh.phi_sign.rightmost_sign == "all-zero"
    band = _band_decision(value, cfg.eq_tol)
    if all_zero:
        endpoint_status = a.grid_status
    elif band == HOLDS:
        endpoint_status = VERIFIED if a.profile.left_limit.method in ("support-point", "closed-form") else GRID_VERIFIED
    elif band == UNKNOWN:
        endpoint_status = UNVERIFIABLE
    else:
        endpoint_status = FAILED
    assumptions = [
        Assumption("common-support-interval", VERIFIED if sh.support.common_interval else FAILED, relation),
        Assumption("endpoint-at-least-one", endpoint_status, value),
        Assumption("superlevel-interval", a.grid_status if sup.is_interval else FAILED, sup.interval),
    ]
    applicable = sh.support.common_interval and sup.is_interval and endpoint_status != FAILED and a.profile.left_limit.converged
    if not applicable:
        return CriterionVerdict("superlevel", False, tuple(assumptions), endpoint_value=value, support_relation=relation)
    if endpoint_status == UNVERIFIABLE:
        return CriterionVerdict("superlevel", True, tuple(assumptions), endpoint_value=value, support_relation=relation, note="endpoint inside the equality band")
    comp = sup.complement_nonincreasing
    assumptions.append(Assumption("complement-nonincreasing", a.grid_status if comp.status else FAILED, comp.witness))
    return CriterionVerdict("superlevel", True, tuple(assumptions), HOLDS, HOLDS if comp.status else UNKNOWN, endpoint_value=value, support_relation=relation)


@dataclass(frozen=True, eq=False)
class Decision:
    verdicts: tuple[CriterionVerdict, ...]
    summary: dict
    analysis: PairAnalysis

    def by_name(self, name: str) -> CriterionVerdict:
        for v in self.verdicts:
            if v.criterion == name:
                return v
        raise KeyError(name)


def merge_verdicts(verdicts) -> dict:
    """Per order: holds / fails / unknown across applicable criteria; raises on conflict."""
    summary = {}
    for order in ("st", "hr", "lr"):
        seen = {getattr(v, order) for v in verdicts if v.applicable}
        if HOLDS in seen and FAILS in seen:
            raise DiagnosticError(f"criteria disagree on {order}", list(verdicts))
        summary[order] = HOLDS if HOLDS in seen else (FAILS if FAILS in seen else UNKNOWN)
    return summary


def classify_and_decide(P: Distribution, Q: Distribution, cfg: RunConfig = DEFAULT_CONFIG, analysis: PairAnalysis | None = None) -> Decision:
    """Run every criterion, strongest hypothesis first, and merge their verdicts."""
    a = _analysis(P, Q, cfg, analysis)
    verdicts = (
        endpoint_logconcave(P, Q, cfg, a),
        lr_endpoint_test(P, Q, cfg, a),
        endpoint_unimodal(P, Q, cfg, a),
        sign_pattern_criterion(P, Q, cfg, a),
        superlevel_criterion(P, Q, cfg, a),
    )
    return Decision(verdicts, merge_verdicts(verdicts), a)


# -- tail means --------------------------------------------------------------


@dataclass(frozen=True)
class TailMeanResult:
    """Outcome of the tail-mean sign test for one (mu, phi) instance.

    ``applicable`` refers to the forward direction (sign pattern, and the
    right-neighbourhood condition when phi(x0) = 0).  ``converse_witness`` is the
    first x with a positive conditional tail mean, if any.
    """

    applicable: bool
    mean: float
    phi0: float
    all_tail_means_nonpositive: bool
    endpoint_nonnegative: bool
    equivalence: bool | None
    converse_witness: float | None
    sign: str
    table: tuple[tuple[float, float], ...] = field(repr=False, default=())
    reason: str = ""


def tail_mean_sign(mu: Distribution, phi, cfg: RunConfig = DEFAULT_CONFIG, grid=None) -> TailMeanResult:
    """Conditional tail means D(x) = E[phi(X) | X >= x] versus the sign of phi(x0).

    ``phi`` is a callable or an array of values on ``grid`` (default: the support
    points of ``mu`` on integer supports, an evaluation grid otherwise).
    """
    if grid is None:
        grid = evaluation_grid(mu, mu, cfg.grid_n, cfg.tail_mass)
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(phi(grid) if callable(phi) else phi, dtype=float)
    if values.shape != grid.shape:
        raise ValueError("phi must have one value per grid point")
    if mu.support.discrete:
        w = np.atleast_1d(mu.pdf(grid))
        keep = w > 0
        grid, values, w = grid[keep], values[keep], w[keep]
        weighted = w * values
        suffix_mass = np.cumsum(w[::-1])[::-1]
        suffix_phi = np.cumsum(weighted[::-1])[::-1]
        mean = float(math.fsum(weighted))
    else:
        if not callable(phi):
            raise ValueError("real supports need phi as a callable")
        cells = adaptive_segment_integrals(lambda t: phi(t) * mu.pdf(t), grid, rtol=1e-12)
        suffix_phi = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
        suffix_mass = np.atleast_1d(mu.sf(grid))
        mean = float(suffix_phi[0])
    positive = suffix_mass > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        tail = np.where(positive, suffix_phi / np.where(positive, suffix_mass, 1.0), np.nan)
    table = tuple((float(x), float(d)) for x, d in zip(grid[positive], tail[positive]))
    word = sign_word(values, cfg.zero_tol)
    phi0 = float(values[0])
    lhs = bool(np.all(tail[positive] <= cfg.tail_tol))
    bad = np.flatnonzero(positive & (tail > cfg.tail_tol))
    witness = float(grid[bad[0]]) if bad.size else None
    reason = ""
    applicable = True
    if abs(mean) > cfg.mean_tol:
        applicable, reason = False, f"mean of phi is {mean:.3g}, not zero"
    elif not (word.change_count <= 2 and word.rightmost_sign in ("-", "all-zero")):
        applicable, reason = False, "sign pattern hypothesis fails"
    first = letters(values[:1], cfg.zero_tol)
    if first == "0" and word.first_nonzero == "-":
        applicable, reason = False, "phi(x0) = 0 without phi >= 0 on a right-neighbourhood"
    rhs = first != "-"
    equivalence = (lhs == rhs) if applicable else None
    return TailMeanResult(applicable, mean, phi0, lhs, rhs, equivalence, witness, word.collapsed, table, reason)
