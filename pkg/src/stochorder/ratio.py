"""Likelihood ratio l = f_P / f_Q on a grid, with a/0 = +inf (a > 0) and 0/0 = 0.

Ratios are formed as ``exp(log f_P - log f_Q)`` so that tails whose densities
underflow separately still give usable ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .config import DEFAULT_CONFIG, RunConfig
from .distributions import Distribution

FINITE = "finite"
PLUS_INFINITY = "plus_infinity"
ZERO_OVER_ZERO = "zero_over_zero"


@dataclass(frozen=True)
class LeftLimit:
    """Right limit of l at the left end of the support union.

    ``method`` is one of ``support-point`` (integer supports), ``closed-form``
    (from the leading density behaviour at the endpoint), ``extrapolated`` or
    ``unresolved``.
    """

    value: float
    method: str
    converged: bool
    estimates: tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class RatioProfile:
    grid: np.ndarray
    ell: np.ndarray
    log_ell: np.ndarray
    phi: np.ndarray
    flags: tuple[str, ...]
    left_limit: LeftLimit
    discrete: bool
    log_fP: np.ndarray | None = None
    log_fQ: np.ndarray | None = None
    support_left: tuple[float, float] | None = field(default=None)

    @classmethod
    def from_values(cls, ell, grid=None, discrete: bool = True, left_limit: float | None = None) -> RatioProfile:
        """Profile from raw ratio values (test and teaching helper)."""
        ell = np.asarray(ell, dtype=float)
        grid = np.arange(ell.size, dtype=float) if grid is None else np.asarray(grid, dtype=float)
        with np.errstate(divide="ignore"):
            log_ell = np.log(ell)
        flags = tuple(PLUS_INFINITY if np.isinf(v) else FINITE for v in ell)
        first = float(ell[0]) if left_limit is None else float(left_limit)
        limit = LeftLimit(first, "support-point" if discrete else "closed-form", True)
        return cls(grid, ell, log_ell, ell - 1.0, flags, limit, discrete)

    def __len__(self) -> int:
        return self.grid.size

    def shape_values(self) -> np.ndarray:
        """l with the value at the left end replaced by the right limit (real supports)."""
        ell = self.ell.copy()
        if not self.discrete and self.left_limit.converged and ell.size:
            ell[0] = self.left_limit.value
        return ell

    def endpoint_value(self) -> float:
        return self.left_limit.value


def _log_ratio(lp: np.ndarray, lq: np.ndarray):
    both_zero = (lp == -np.inf) & (lq == -np.inf)
    q_zero = (lq == -np.inf) & ~both_zero
    # both densities singular: placeholder until the limit is substituted
    singular = (lp == np.inf) & (lq == np.inf)
    regular = ~(both_zero | q_zero | singular)
    log_ell = np.full(lp.shape, np.nan)
    log_ell[both_zero] = -np.inf
    log_ell[q_zero] = np.inf
    with np.errstate(invalid="ignore"):
        log_ell[regular] = lp[regular] - lq[regular]
    with np.errstate(over="ignore"):
        ell = np.exp(log_ell)
    ell[both_zero] = 0.0
    flags = np.where(both_zero, ZERO_OVER_ZERO, np.where(q_zero, PLUS_INFINITY, FINITE))
    return ell, log_ell, tuple(flags.tolist())


def ratio_profile(P: Distribution, Q: Distribution, grid, cfg: RunConfig = DEFAULT_CONFIG) -> RatioProfile:
    """Evaluate l, log l and phi = l - 1 on ``grid`` with convention flags."""
    grid = np.asarray(grid, dtype=float)
    lp = np.atleast_1d(P.logpdf(grid))
    lq = np.atleast_1d(Q.logpdf(grid))
    ell, log_ell, flags = _log_ratio(lp, lq)
    spacing = float(grid[1] - grid[0]) if grid.size > 1 else 1.0
    limit = left_limit_at(P, Q, spacing, cfg)
    discrete = P.support.discrete
    if not discrete and np.isnan(ell[0]):
        ell[0] = limit.value
        with np.errstate(divide="ignore"):
            log_ell[0] = math.log(limit.value) if limit.value > 0 else -np.inf
    with np.errstate(invalid="ignore"):
        phi = ell - 1.0
    return RatioProfile(
        grid, ell, log_ell, phi, flags, limit, discrete, lp, lq, (P.support.left, Q.support.left)
    )


def _ratio_at(P: Distribution, Q: Distribution, x: float) -> float:
    ell, _, _ = _log_ratio(np.atleast_1d(P.logpdf(x)), np.atleast_1d(Q.logpdf(x)))
    return float(ell[0])


def _richardson(values: list[float]) -> list[float]:
    # h halves at each step and l(x + h) = l(x+) + O(h): eliminate h, h^2, ...
    table = [list(values)]
    for j in range(1, len(values)):
        prev = table[-1]
        factor = 2.0**j - 1.0
        table.append([prev[i] + (prev[i] - prev[i - 1]) / factor for i in range(1, len(prev))])
    return [row[-1] for row in table]


def left_limit_at(P: Distribution, Q: Distribution, spacing: float = 1e-3, cfg: RunConfig = DEFAULT_CONFIG) -> LeftLimit:
    """l(x*+) where x* is the left end of the support union."""
    sP, sQ = P.support, Q.support
    if sP.discrete:
        k = min(sP.left, sQ.left)
        right = max(sP.right, sQ.right)
        while k <= right and P.pdf(k) == 0.0 and Q.pdf(k) == 0.0:
            k += 1.0
            if k - min(sP.left, sQ.left) > 10_000:
                break
        return LeftLimit(_ratio_at(P, Q, k), "support-point", True)
    if sP.left != sQ.left:
        # the later-starting law has zero density on a right-neighbourhood of x*
        return LeftLimit(np.inf if sP.left < sQ.left else 0.0, "closed-form", True)
    if P.left_density is not None and Q.left_density is not None:
        (cP, aP), (cQ, aQ) = P.left_density, Q.left_density
        if cP == 0.0:
            value = 0.0
        elif cQ == 0.0 or aP < aQ:
            value = np.inf
        elif aP > aQ:
            value = 0.0
        else:
            value = cP / cQ
        return LeftLimit(value, "closed-form", True)
    x0 = sP.left
    hs = [spacing / 2.0**i for i in range(4)]
    values = [_ratio_at(P, Q, x0 + h) for h in hs]
    if all(np.isinf(v) for v in values):
        return LeftLimit(np.inf, "extrapolated", True, tuple(values))
    if not all(np.isfinite(values)):
        return LeftLimit(values[-1], "unresolved", False, tuple(values))
    diag = _richardson(values)
    est, prev = diag[-1], diag[-2]
    converged = abs(est - prev) <= max(cfg.limit_rtol * abs(est), 1e-12)
    value = max(est, 0.0)
    return LeftLimit(value, "extrapolated" if converged else "unresolved", converged, tuple(values))


class Difference(NamedTuple):
    ell: float
    log_ell: float
    finite: bool


def forward_difference(profile: RatioProfile, k: int) -> Difference:
    """(Delta l(k), Delta log l(k)); ``finite`` is False when either value is infinite."""
    if not 0 <= k < len(profile) - 1:
        raise IndexError("forward difference needs k and k+1 on the grid")
    a, b = profile.ell[k], profile.ell[k + 1]
    la, lb = profile.log_ell[k], profile.log_ell[k + 1]
    finite_ell = np.isfinite(a) and np.isfinite(b)
    finite_log = np.isfinite(la) and np.isfinite(lb)
    return Difference(
        float(b - a) if finite_ell else math.nan,
        float(lb - la) if finite_log else math.nan,
        bool(finite_ell and finite_log),
    )


class SecondDifference(NamedTuple):
    value: float
    finite: bool


def second_difference_log(profile: RatioProfile, k: int) -> SecondDifference:
    """Delta^2 log l(k) = log l(k+2) - 2 log l(k+1) + log l(k)."""
    if not 0 <= k < len(profile) - 2:
        raise IndexError("second difference needs k, k+1, k+2 on the grid")
    v = profile.log_ell[k : k + 3]
    if not np.all(np.isfinite(v)):
        return SecondDifference(math.nan, False)
    return SecondDifference(float(v[2] - 2.0 * v[1] + v[0]), True)
