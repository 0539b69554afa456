"""Direct order checks from survival functions and the ratio profile.

No criterion is consulted here.  For a pair P, Q on a grid the survival table
holds

* ``d = f_P - f_Q``,
* ``D(x) = P([x0, x)) - Q([x0, x))`` accumulated from the left, independently of
  the survival functions, so that ``Fbar_P - Fbar_Q + D = 0`` is a real check,
* ``T = Fbar_P / Fbar_Q`` and the hazards ``h = f / Fbar``.

On finite integer supports the checks are exact up to round-off; elsewhere
they hold at grid resolution with the neglected tail mass reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .distributions import Distribution, evaluation_grid
from .errors import DiagnosticError
from .numerics import adaptive_segment_integrals
from .ratio import RatioProfile, ratio_profile
from .shape import nonincreasing, support_points

REFINE_FACTOR = 4


@dataclass(frozen=True, eq=False)
class SurvivalTable:
    grid: np.ndarray
    Fbar_P: np.ndarray
    Fbar_Q: np.ndarray
    T: np.ndarray
    h_P: np.ndarray
    h_Q: np.ndarray
    d: np.ndarray
    Dint: np.ndarray
    discrete: bool
    neglected_mass: float

    def identity_error(self) -> float:
        """max |Fbar_P - Fbar_Q + D| over the grid."""
        return float(np.max(np.abs(self.Fbar_P - self.Fbar_Q + self.Dint)))

    def tail_ratio_excess(self, profile: RatioProfile, floor: float = 0.0) -> float:
        """max of T - l over support points with Fbar_Q > floor (negative when T <= l)."""
        idx = support_points(profile)
        ell = profile.shape_values()[idx]
        T = self.T[idx]
        ok = (self.Fbar_Q[idx] > floor) & np.isfinite(T)
        if not np.any(ok):
            return -math.inf
        with np.errstate(invalid="ignore"):
            excess = np.where(np.isinf(ell[ok]), -np.inf, T[ok] - ell[ok])
        return float(np.max(excess))


@dataclass(frozen=True)
class OracleReport:
    order: str
    holds: bool
    worst_violation: float
    witness: float | None
    resolution: str  # exact, grid, truncated
    tolerance: float
    refined: bool = False
    neglected_mass: float = 0.0
    note: str = ""


def _cell_masses(d: Distribution, grid: np.ndarray) -> np.ndarray:
    if d.support.discrete:
        return np.atleast_1d(d.pdf(grid))
    cells = adaptive_segment_integrals(d.pdf, grid, rtol=1e-13)
    if d.left_density is not None and d.left_density[1] < 0 and grid[0] == d.support.left:
        # density ~ c x^a with -1 < a < 0 at the left end: integrate in t = x^(a+1),
        # where the integrand is bounded
        x0, a1 = grid[0], d.left_density[1] + 1.0

        def smooth(t):
            return d.pdf(x0 + t ** (1.0 / a1)) * t ** (1.0 / a1 - 1.0) / a1

        cells[0] = adaptive_segment_integrals(smooth, [0.0, (grid[1] - x0) ** a1], rtol=1e-13)[0]
    return cells


def _neglected(d: Distribution, grid: np.ndarray) -> float:
    last = grid[-1]
    if d.support.discrete:
        return float(d.sf(last + 1.0))
    return float(d.sf(last))


def survival_table(P: Distribution, Q: Distribution, grid, cfg: RunConfig = DEFAULT_CONFIG) -> SurvivalTable:
    grid = np.asarray(grid, dtype=float)
    sP = np.atleast_1d(P.sf(grid))
    sQ = np.atleast_1d(Q.sf(grid))
    fP = np.atleast_1d(P.pdf(grid))
    fQ = np.atleast_1d(Q.pdf(grid))
    mP, mQ = _cell_masses(P, grid), _cell_masses(Q, grid)
    if P.support.discrete:
        # D(x_k) sums the atoms strictly left of x_k, starting below the grid
        below = float(P.cdf(grid[0] - 1.0) - Q.cdf(grid[0] - 1.0))
        Dint = below + np.concatenate([[0.0], np.cumsum(mP[:-1] - mQ[:-1])])
    else:
        below = float(P.cdf(grid[0]) - Q.cdf(grid[0]))
        Dint = below + np.concatenate([[0.0], np.cumsum(mP) - np.cumsum(mQ)])
    floor = cfg.hazard_floor
    qpos = sQ > floor
    ppos = sP > floor
    with np.errstate(divide="ignore", invalid="ignore"):
        T = np.where(qpos, sP / np.where(qpos, sQ, 1.0), np.where(ppos, np.inf, np.nan))
        hP = np.where(ppos, fP / np.where(ppos, sP, 1.0), np.nan)
        hQ = np.where(qpos, fQ / np.where(qpos, sQ, 1.0), np.nan)
        d = fP - fQ
    neglected = max(_neglected(P, grid), _neglected(Q, grid))
    return SurvivalTable(grid, sP, sQ, T, hP, hQ, d, Dint, P.support.discrete, neglected)


def _resolution(P: Distribution, Q: Distribution) -> str:
    if P.support.discrete:
        return "exact" if P.support.bounded and Q.support.bounded else "truncated"
    return "grid"


def _st(table: SurvivalTable, tol: float, resolution: str) -> OracleReport:
    viol = table.Fbar_P - table.Fbar_Q
    j = int(np.argmax(viol))
    worst = float(viol[j])
    return OracleReport("st", worst <= tol, worst, float(table.grid[j]), resolution, tol, neglected_mass=table.neglected_mass)


def _hr(table: SurvivalTable, cfg: RunConfig, resolution: str) -> OracleReport:
    T = table.T
    keep = ~np.isnan(T)
    g, t = table.grid[keep], T[keep]
    tol = cfg.hr_slack
    if t.size < 2:
        return OracleReport("hr", True, 0.0, None, resolution, tol, neglected_mass=table.neglected_mass)
    with np.errstate(invalid="ignore"):
        inc = np.where(np.isinf(t[1:]) & np.isinf(t[:-1]), 0.0, t[1:] - t[:-1])
    j = int(np.argmax(inc))
    worst = float(inc[j])
    report = OracleReport("hr", worst <= tol, worst, float(g[j + 1]), resolution, tol, neglected_mass=table.neglected_mass)
    _hazard_cross_check(table, report, cfg)
    return report


def hazard_increments(table: SurvivalTable) -> np.ndarray:
    """Increase of T implied by the hazard difference at each grid point.

    Integer grids: ``T(k+1) - T(k) = T(k) (h_Q - h_P) / (1 - h_Q)`` exactly.
    Real grids: ``T' = T (h_Q - h_P)`` times the next cell width.
    """
    T, hP, hQ = table.T, table.h_P, table.h_Q
    with np.errstate(invalid="ignore", divide="ignore"):
        if table.discrete:
            out = T * (hQ - hP) / (1.0 - hQ)
        else:
            width = np.append(np.diff(table.grid), 0.0)
            out = T * (hQ - hP) * width
    # Q exhausted while P is not: the next ratio is infinite
    return np.where(np.isnan(out), 0.0, out)


def _hazard_cross_check(table: SurvivalTable, report: OracleReport, cfg: RunConfig) -> None:
    implied = hazard_increments(table)
    gross = 100.0 * cfg.hr_slack
    if table.discrete:
        # the two forms are algebraically identical here
        inc = np.max(implied[:-1]) if implied.size > 1 else 0.0
        if report.holds and inc > gross or (not report.holds and report.worst_violation > gross and inc <= cfg.hr_slack):
            raise DiagnosticError("survival-ratio and hazard forms of hr disagree", table)
    elif report.holds and implied.size and float(np.max(implied)) > 1e4 * gross:
        raise DiagnosticError("hazard form contradicts a nonincreasing survival ratio", table)


def _lr(profile: RatioProfile, cfg: RunConfig, resolution: str) -> OracleReport:
    idx = support_points(profile)
    ell = profile.ell[idx].copy()
    if ell.size and np.isnan(ell[0]):
        ell[0] = profile.left_limit.value
    mono = nonincreasing(ell, profile.grid[idx], cfg.lr_slack)
    witness = mono.witness[1] if mono.witness else None
    return OracleReport("lr", mono.status, mono.worst, witness, resolution, cfg.lr_slack)


def _needs_refinement(report: OracleReport) -> bool:
    w = report.worst_violation
    return report.tolerance / 10.0 <= w <= 10.0 * report.tolerance


def _refined_grid(P, Q, cfg):
    return evaluation_grid(P, Q, REFINE_FACTOR * cfg.grid_n, cfg.tail_mass)


def _st_tol(P: Distribution, Q: Distribution, cfg: RunConfig) -> float:
    return cfg.exact_tol if _resolution(P, Q) == "exact" else cfg.st_tol


def verify_st(P: Distribution, Q: Distribution, grid=None, cfg: RunConfig = DEFAULT_CONFIG, table: SurvivalTable | None = None) -> OracleReport:
    """P <=st Q iff Fbar_P <= Fbar_Q at every grid point (up to st_tol)."""
    grid = evaluation_grid(P, Q, cfg.grid_n, cfg.tail_mass) if grid is None else grid
    table = table if table is not None else survival_table(P, Q, grid, cfg)
    res = _resolution(P, Q)
    report = _st(table, _st_tol(P, Q, cfg), res)
    if res == "grid" and _needs_refinement(report):
        report = replace(_st(survival_table(P, Q, _refined_grid(P, Q, cfg), cfg), report.tolerance, res), refined=True)
    return report


def verify_hr(P: Distribution, Q: Distribution, grid=None, cfg: RunConfig = DEFAULT_CONFIG, table: SurvivalTable | None = None) -> OracleReport:
    """P <=hr Q iff T = Fbar_P / Fbar_Q is nonincreasing where a survival exceeds the floor."""
    grid = evaluation_grid(P, Q, cfg.grid_n, cfg.tail_mass) if grid is None else grid
    table = table if table is not None else survival_table(P, Q, grid, cfg)
    res = _resolution(P, Q)
    report = _hr(table, cfg, res)
    if res == "grid" and _needs_refinement(report):
        report = replace(_hr(survival_table(P, Q, _refined_grid(P, Q, cfg), cfg), cfg, res), refined=True)
    return report


def verify_lr(P: Distribution, Q: Distribution, grid=None, cfg: RunConfig = DEFAULT_CONFIG, profile: RatioProfile | None = None) -> OracleReport:
    """P <=lr Q iff l is nonincreasing on the support union (relative slack)."""
    grid = evaluation_grid(P, Q, cfg.grid_n, cfg.tail_mass) if grid is None else grid
    profile = profile if profile is not None else ratio_profile(P, Q, grid, cfg)
    res = _resolution(P, Q)
    report = _lr(profile, cfg, res)
    if res == "grid" and _needs_refinement(report):
        fine = _refined_grid(P, Q, cfg)
        report = replace(_lr(ratio_profile(P, Q, fine, cfg), cfg, res), refined=True)
    return report


@dataclass(frozen=True, eq=False)
class AuditRecord:
    st: OracleReport
    hr: OracleReport
    lr: OracleReport
    table: SurvivalTable = field(repr=False)
    profile: RatioProfile = field(repr=False)
    violations: tuple[str, ...] = ()

    @property
    def reports(self) -> tuple[OracleReport, ...]:
        return (self.st, self.hr, self.lr)


def implication_audit(P: Distribution, Q: Distribution, grid=None, cfg: RunConfig = DEFAULT_CONFIG, profile: RatioProfile | None = None) -> AuditRecord:
    """Run all three oracles and check lr => hr => st on the outcomes."""
    grid = evaluation_grid(P, Q, cfg.grid_n, cfg.tail_mass) if grid is None else np.asarray(grid, dtype=float)
    table = survival_table(P, Q, grid, cfg)
    profile = profile if profile is not None else ratio_profile(P, Q, grid, cfg)
    st = verify_st(P, Q, grid, cfg, table)
    hr = verify_hr(P, Q, grid, cfg, table)
    lr = verify_lr(P, Q, grid, cfg, profile)
    violations = []
    if lr.holds and not hr.holds:
        violations.append("lr holds but hr fails")
    if hr.holds and not st.holds:
        violations.append("hr holds but st fails")
    record = AuditRecord(st, hr, lr, table, profile, tuple(violations))
    if violations:
        raise DiagnosticError("; ".join(violations), record)
    return record
