"""Shape classification of a likelihood-ratio profile.

Four hypotheses are checked, from strongest to weakest: log-concavity of l,
unimodality of l, the sign pattern of phi = l - 1 (at most two changes,
negative at the right), and the superlevel set {l >= 1} being an interval.

Grid checks are one-sided.  A ``False`` comes with a concrete witness on the
grid; a ``True`` holds at grid resolution only.  Letters use ASCII ``+ 0 -``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .errors import DiagnosticError
from .ratio import ZERO_OVER_ZERO, RatioProfile

UNDETERMINED = "undetermined"
# gray band: violations between tol and GRAY_FACTOR * tol are not decided
GRAY_FACTOR = 100.0


# -- sign words --------------------------------------------------------------


@dataclass(frozen=True)
class SignWord:
    word: str
    collapsed: str
    change_count: int
    rightmost_sign: str  # "+", "-" or "all-zero"

    @property
    def runs(self) -> str:
        """The word with equal adjacent letters merged, zeros kept (e.g. ``0+0-``)."""
        return _merge(self.word)

    @property
    def first_nonzero(self) -> str | None:
        return self.collapsed[0] if self.collapsed else None


def _merge(word: str) -> str:
    out = []
    for ch in word:
        if not out or out[-1] != ch:
            out.append(ch)
    return "".join(out)


def collapse(word: str) -> str:
    """Delete zero letters, then merge equal neighbours."""
    return _merge(word.replace("0", ""))


def letters(values, zero_tol: float) -> str:
    v = np.asarray(values, dtype=float)
    return "".join("+" if x > zero_tol else ("-" if x < -zero_tol else "0") for x in v)


def sign_word(values, zero_tol: float = 1e-9) -> SignWord:
    """Sign word of ``values`` on an ordered grid."""
    word = letters(values, zero_tol)
    c = collapse(word)
    return SignWord(word, c, max(len(c) - 1, 0), c[-1] if c else "all-zero")


# -- results -----------------------------------------------------------------


@dataclass(frozen=True)
class Unimodality:
    status: bool | str
    mode_index: int | None
    mode_x: float | None
    worst_violation: float
    witness: tuple[int, int, int] | None = None
    witness_x: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class LogConcavity:
    status: bool | str
    worst: float
    location: float | None
    reason: str = ""


@dataclass(frozen=True)
class Monotone:
    status: bool
    worst: float
    witness: tuple[float, float] | None = None


@dataclass(frozen=True)
class Superlevel:
    is_interval: bool
    interval: tuple[float, float] | None
    indices: tuple[int, ...]
    complement_nonincreasing: Monotone


@dataclass(frozen=True)
class SupportInfo:
    relation: str  # equal, P-in-Q, Q-in-P, union-interval, other
    union_is_interval: bool
    common_interval: bool
    left_P: float
    left_Q: float


@dataclass(frozen=True)
class Crossing:
    lo: float
    hi: float
    estimate: float
    direction: str  # "+-" or "-+"


@dataclass(frozen=True)
class ShapeReport:
    log_concave: LogConcavity
    unimodal: Unimodality
    phi_sign: SignWord
    superlevel: Superlevel
    rightmost_piece: Monotone
    support: SupportInfo
    touches: tuple[float, ...]
    crossings: tuple[Crossing, ...]
    tolerance_used: float
    grid_spacing: tuple[float, float]
    n_points: int
    chain: dict = field(default_factory=dict)

    @property
    def sign_pattern_ok(self) -> bool:
        w = self.phi_sign
        return w.change_count <= 2 and w.rightmost_sign in ("-", "all-zero")

    @property
    def chain_position(self) -> str:
        """Strongest hypothesis of the chain that holds at grid resolution."""
        for name in ("log-concave", "unimodal", "sign-pattern", "superlevel-interval"):
            if self.chain.get(name) is True:
                return name
        return "none"


# -- helpers -----------------------------------------------------------------


def support_points(profile: RatioProfile) -> np.ndarray:
    """Grid indices inside the support union (points where not both densities vanish)."""
    return np.array([i for i, f in enumerate(profile.flags) if f != ZERO_OVER_ZERO], dtype=int)


def _contiguous(mask: np.ndarray) -> bool:
    idx = np.flatnonzero(mask)
    return idx.size == 0 or idx[-1] - idx[0] + 1 == idx.size


def support_info(profile: RatioProfile) -> SupportInfo:
    """Relation between supp(P) and supp(Q) from density positivity on the grid.

    On real grids the two end points are ignored, since a density may vanish at
    an endpoint of its support interval.
    """
    sel = slice(None) if profile.discrete else slice(1, -1)
    lp = profile.log_fP if profile.log_fP is not None else np.log(np.where(np.isinf(profile.ell), 1.0, profile.ell))
    lq = profile.log_fQ if profile.log_fQ is not None else np.where(np.isinf(profile.ell), -np.inf, 0.0)
    inP = (lp > -np.inf)[sel]
    inQ = (lq > -np.inf)[sel]
    union = inP | inQ
    if np.array_equal(inP, inQ):
        relation = "equal"
    elif np.all(inQ[inP]):
        relation = "P-in-Q"
    elif np.all(inP[inQ]):
        relation = "Q-in-P"
    elif _contiguous(union):
        relation = "union-interval"
    else:
        relation = "other"
    # a hole in the union only counts when it lies strictly inside the support
    first = np.flatnonzero(union)
    union_interval = bool(first.size) and bool(np.all(union[first[0] : first[-1] + 1]))
    common = relation == "equal" and union_interval
    left = profile.support_left or (float(profile.grid[0]), float(profile.grid[0]))
    return SupportInfo(relation, union_interval, common, float(left[0]), float(left[1]))


def _relative_valley(values: np.ndarray) -> tuple[float, int, int, int]:
    """Largest valley depth min(max left, max right) - v_j, relative to max(1, |v_j|)."""
    n = values.size
    if n < 3:
        return 0.0, -1, -1, -1
    left_max = np.maximum.accumulate(values)
    right_max = np.maximum.accumulate(values[::-1])[::-1]
    v = values[1:-1]
    with np.errstate(invalid="ignore"):
        depth = np.minimum(left_max[:-2], right_max[2:]) - v
        rel = np.where(np.isfinite(v) & (depth > 0), depth / np.maximum(1.0, np.abs(v)), 0.0)
    rel = np.where(np.isnan(rel), 0.0, rel)
    j = int(np.argmax(rel)) + 1
    best = float(rel[j - 1])
    if best <= 0.0:
        return 0.0, -1, -1, -1
    i = int(np.argmax(values[:j]))
    k = j + 1 + int(np.argmax(values[j + 1 :]))
    return best, i, j, k


def check_unimodal(profile: RatioProfile, zero_tol: float = 1e-9) -> Unimodality:
    """Is l nondecreasing then nonincreasing on the support union?

    A sequence is unimodal exactly when it has no valley i < j < k with
    l_i > l_j < l_k; the report gives the deepest valley.
    """
    idx = support_points(profile)
    vals = profile.shape_values()[idx]
    grid = profile.grid[idx]
    if vals.size == 0:
        return Unimodality(UNDETERMINED, None, None, 0.0)
    finite_max = np.where(np.isnan(vals), -np.inf, vals)
    mode = int(np.argmax(finite_max))
    worst, i, j, k = _relative_valley(vals)
    if worst <= zero_tol:
        return Unimodality(True, int(idx[mode]), float(grid[mode]), worst)
    witness = (int(idx[i]), int(idx[j]), int(idx[k]))
    wx = (float(grid[i]), float(grid[j]), float(grid[k]))
    status = False if worst > GRAY_FACTOR * zero_tol else UNDETERMINED
    return Unimodality(status, int(idx[mode]), float(grid[mode]), worst, witness, wx)


def check_log_concave(profile: RatioProfile, curv_tol: float = 1e-8) -> LogConcavity:
    """Is log l concave on the tested region?

    Uses divided second differences, which reduce to Delta^2 log l on unit integer
    grids and approximate (log l)'' on real grids.  log l = -inf is allowed only at
    the ends of the region; log l = +inf (Q vanishing where P does not) is a violation.
    """
    idx = support_points(profile)
    y = profile.log_ell[idx].copy()
    if not profile.discrete and profile.left_limit.converged and idx.size and idx[0] == 0:
        v = profile.left_limit.value
        y[0] = math.log(v) if 0 < v < np.inf else (np.inf if v == np.inf else -np.inf)
    x = profile.grid[idx]
    if np.any(y == np.inf):
        j = int(np.flatnonzero(y == np.inf)[0])
        return LogConcavity(False, math.inf, float(x[j]), "log l is +inf inside the support")
    finite = np.isfinite(y)
    if not _contiguous(finite):
        pos = np.flatnonzero(finite)
        hole = pos[0] + int(np.flatnonzero(~finite[pos[0] : pos[-1] + 1])[0])
        return LogConcavity(False, math.inf, float(x[hole]), "log l is -inf between finite values")
    y, x = y[finite], x[finite]
    if y.size < 3:
        return LogConcavity(UNDETERMINED, 0.0, None, "fewer than three finite points")
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    s = 2.0 * ((y[2:] - y[1:-1]) / h2 - (y[1:-1] - y[:-2]) / h1) / (h1 + h2)
    j = int(np.argmax(s))
    worst = float(s[j])
    if worst <= curv_tol:
        status: bool | str = True
    elif worst > GRAY_FACTOR * curv_tol:
        status = False
    else:
        status = UNDETERMINED
    return LogConcavity(status, worst, float(x[j + 1]))


def nonincreasing(values, grid, slack: float) -> Monotone:
    """Relative monotonicity test: l_{i+1} <= l_i up to ``slack`` relative to the larger value."""
    v = np.asarray(values, dtype=float)
    g = np.asarray(grid, dtype=float)
    if v.size < 2:
        return Monotone(True, 0.0)
    a, b = v[:-1], v[1:]
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
        rel = np.where(b > a, (b - a) / scale, 0.0)
    rel = np.where(np.isnan(rel), 0.0, rel)
    # +inf following +inf is not an increase; finite -> +inf is
    rel = np.where(np.isinf(b) & ~np.isinf(a), np.inf, rel)
    j = int(np.argmax(rel))
    worst = float(rel[j])
    if worst <= slack:
        return Monotone(True, worst)
    return Monotone(False, worst, (float(g[j]), float(g[j + 1])))


def superlevel_structure(profile: RatioProfile, zero_tol: float = 1e-9, slack: float = 1e-9) -> Superlevel:
    """Is A = {l >= 1 - zero_tol} a block of consecutive support points?"""
    idx = support_points(profile)
    vals = profile.shape_values()[idx]
    grid = profile.grid[idx]
    in_a = vals >= 1.0 - zero_tol
    members = tuple(int(i) for i in idx[in_a])
    interval = None
    if members:
        pos = np.flatnonzero(in_a)
        interval = (float(grid[pos[0]]), float(grid[pos[-1]]))
    comp = nonincreasing(vals[~in_a], grid[~in_a], slack)
    return Superlevel(_contiguous(in_a), interval, members, comp)


def rightmost_piece(profile: RatioProfile, word: SignWord, slack: float = 1e-9) -> Monotone:
    """Monotonicity of l on the final sign-constant part of phi.

    The part starts at the first ``-`` letter after the last ``+`` letter and runs to
    the end of the grid.  If phi never goes negative the condition is vacuous.
    """
    idx = support_points(profile)
    vals = profile.shape_values()[idx]
    grid = profile.grid[idx]
    w = word.word
    start = w.rfind("+") + 1
    neg = w.find("-", start)
    if neg < 0:
        return Monotone(True, 0.0)
    return nonincreasing(vals[neg:], grid[neg:], slack)


def touches_and_crossings(profile: RatioProfile, zero_tol: float, touch_tol: float):
    """Points where phi touches 0 without changing sign, and where it changes sign.

    Touches are either isolated zero letters flanked by equal signs or interior local
    minima of |phi| whose parabolic vertex value is within ``touch_tol`` of zero.
    Crossings are reported as the grid cell (or zero run) containing the sign change.
    """
    idx = support_points(profile)
    phi = profile.shape_values()[idx] - 1.0
    x = profile.grid[idx]
    word = letters(phi, zero_tol)
    touches = []
    crossings = []
    n = len(word)
    i = 0
    while i < n:
        if word[i] != "0":
            i += 1
            continue
        j = i
        while j < n and word[j] == "0":
            j += 1
        before = word[i - 1] if i > 0 else None
        after = word[j] if j < n else None
        if before and after and before == after and j - i == 1:
            touches.append(float(x[i]))
        i = j
    for i in range(1, n - 1):
        a, b, c = abs(phi[i - 1]), abs(phi[i]), abs(phi[i + 1])
        if not (word[i] != "0" and word[i - 1] == word[i] == word[i + 1]):
            continue
        if not (b <= a and b <= c and (b < a or b < c)):
            continue
        x0, x1, x2 = x[i - 1], x[i], x[i + 1]
        # vertex of the parabola through the three points
        d1 = (b - a) / (x1 - x0)
        d2 = (c - b) / (x2 - x1)
        curv = (d2 - d1) / (x2 - x0)
        if not np.isfinite(curv) or curv <= 0:
            continue
        xv = 0.5 * (x0 + x1) - d1 / (2.0 * curv)
        xv = min(max(xv, x0), x2)
        vv = a + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1)
        if abs(vv) <= touch_tol:
            touches.append(float(xv))
    last = None
    for i, ch in enumerate(word):
        if ch == "0":
            continue
        if last is not None and word[last] != ch:
            lo, hi = float(x[last]), float(x[i])
            if i == last + 1 and np.isfinite(phi[last]) and np.isfinite(phi[i]):
                t = phi[last] / (phi[last] - phi[i])
                est = lo + t * (hi - lo)
            else:
                est = 0.5 * (lo + hi)
            crossings.append(Crossing(lo, hi, float(est), word[last] + ch))
        last = i
    return tuple(sorted(touches)), tuple(crossings)


def classify(profile: RatioProfile, cfg: RunConfig = DEFAULT_CONFIG) -> ShapeReport:
    """Full shape report, with the implication audit lc => unimodal => A an interval."""
    idx = support_points(profile)
    vals = profile.shape_values()[idx]
    word = sign_word(vals - 1.0, cfg.zero_tol)
    lc = check_log_concave(profile, cfg.curv_tol)
    uni = check_unimodal(profile, cfg.zero_tol)
    sup = superlevel_structure(profile, cfg.zero_tol, cfg.lr_slack)
    right = rightmost_piece(profile, word, cfg.lr_slack)
    touches, crossings = touches_and_crossings(profile, cfg.zero_tol, cfg.touch_tol)
    gaps = np.diff(profile.grid)
    spacing = (float(gaps.min()), float(gaps.max())) if gaps.size else (0.0, 0.0)
    sign_ok = word.change_count <= 2 and word.rightmost_sign in ("-", "all-zero")
    report = ShapeReport(
        log_concave=lc,
        unimodal=uni,
        phi_sign=word,
        superlevel=sup,
        rightmost_piece=right,
        support=support_info(profile),
        touches=touches,
        crossings=crossings,
        tolerance_used=cfg.zero_tol,
        grid_spacing=spacing,
        n_points=int(profile.grid.size),
        chain={
            "log-concave": lc.status,
            "unimodal": uni.status,
            "sign-pattern": sign_ok,
            "superlevel-interval": sup.is_interval,
        },
    )
    audit_shape(report)
    return report


def audit_shape(report: ShapeReport) -> None:
    """Raise if a definite True implies a definite False along the chain."""
    if report.log_concave.status is True and report.unimodal.status is False:
        raise DiagnosticError("log-concave ratio classified as not unimodal", report)
    if report.unimodal.status is True and not report.superlevel.is_interval:
        raise DiagnosticError("unimodal ratio with a non-interval superlevel set", report)
