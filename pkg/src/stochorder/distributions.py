"""Laws on ordered supports and the grids they are compared on.

A :class:`Distribution` lives on an integer interval (counting measure) or a
real interval (Lebesgue measure) with a finite left endpoint.  Survival
functions follow the closed convention ``survival(x) = P([x, inf))``, so on
integer supports ``cdf(k) + survival(k) - P({k}) = 1``.

Concrete families are built from the specs in :mod:`stochorder.families`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import DomainError, SupportError
from .numerics import adaptive_segment_integrals

MASS_TOL = 1e-8
_VALIDATION_TAIL = 1e-14


@dataclass(frozen=True)
class Support:
    """Ordered support: integer interval or real interval with finite left end."""

    kind: Literal["integer", "real"]
    left: float
    right: float = math.inf

    def __post_init__(self):
        if self.kind not in ("integer", "real"):
            raise SupportError(f"unknown support kind {self.kind!r}")
        if not math.isfinite(self.left):
            raise SupportError("left endpoint must be finite")
        if self.kind == "integer":
            if self.left != math.floor(self.left):
                raise SupportError("integer support needs an integer left endpoint")
            if math.isfinite(self.right) and self.right != math.floor(self.right):
                raise SupportError("integer support needs an integer right endpoint")
            if self.right < self.left:
                raise SupportError("empty support")
        elif not self.left < self.right:
            raise SupportError("real support needs left < right")

    @property
    def discrete(self) -> bool:
        return self.kind == "integer"

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.right)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x >= self.left) & (x <= self.right)
        if self.discrete:
            inside &= x == np.floor(x)
        return inside


def _scalar_or_array(x_in, out):
    return float(out) if np.ndim(x_in) == 0 else out


class Distribution:
    """A probability law with density (pmf), survival, cdf and quantile access.

    Parameters
    ----------
    support : Support
    logpdf : callable
        Vectorized log-density, only called on points inside the support.
    sf : callable, optional
        Vectorized survival ``P([x, inf))``, called on points inside the support.
    cdf : callable, optional
        Used when ``sf`` is absent.
    breakpoints : sequence of float
        Points where the density is not smooth; grids always contain them.
    left_density : (coef, power), optional
        Leading behaviour ``coef * (x - left)**power`` of the density at the left
        endpoint; enables closed-form right limits of likelihood ratios.
    numeric_tail : float, optional
        For real laws without ``sf``: point beyond which the density is negligible.

    Instances should be treated as immutable.
    """

    def __init__(
        self,
        support: Support,
        logpdf: Callable,
        *,
        sf: Callable | None = None,
        cdf: Callable | None = None,
        label: str = "",
        breakpoints=(),
        left_density: tuple[float, float] | None = None,
        spec=None,
        numeric_tail: float | None = None,
        validate: bool = True,
    ):
        self.support = support
        self.label = label
        self.spec = spec
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints))
        self.left_density = left_density
        self._logpdf = logpdf
        self._sf = sf
        self._cdf = cdf
        self._numeric_tail = numeric_tail
        self._suffix = None
        if self.support.discrete and sf is None and cdf is None:
            if not self.support.bounded:
                raise DomainError("infinite discrete laws need a survival or cdf function")
            k = np.arange(self.support.left, self.support.right + 1)
            pmf = np.exp(self._logpdf(k))
            self._suffix = np.cumsum(pmf[::-1])[::-1]
        if not self.support.discrete and sf is None and cdf is None and not self.support.bounded:
            if numeric_tail is None:
                raise DomainError("unbounded real laws need a survival function or a numeric tail point")
        self.mass = None
        if validate:
            self.mass = self._validate()

    def __repr__(self):
        return f"Distribution({self.label or self.support!r})"

    # -- densities ---------------------------------------------------------

    def logpdf(self, x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.full(xa.shape, -np.inf)
        inside = self.support.contains(xa)
        if np.any(inside):
            with np.errstate(divide="ignore"):
                out[inside] = self._logpdf(xa[inside])
        return _scalar_or_array(x, out.reshape(np.shape(x)))

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def point_mass(self, x):
        """P({x}): the pmf on integer supports, zero on real ones."""
        if self.support.discrete:
            return self.pdf(x)
        return _scalar_or_array(x, np.zeros(np.shape(x)))

    # -- survival / cdf ----------------------------------------------------

    def sf(self, x):
        """Survival ``P([x, inf))``; nonincreasing, 1 left of the support, 0 right of it."""
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        s = self.support
        if s.discrete:
            xa = np.ceil(xa)
        out = np.zeros(xa.shape)
        out[xa <= s.left] = 1.0
        inside = (xa > s.left) & (xa <= s.right)
        if np.any(inside):
            out[inside] = self._survival_inside(xa[inside])
        return _scalar_or_array(x, np.clip(out, 0.0, 1.0).reshape(np.shape(x)))

    def _survival_inside(self, x: np.ndarray) -> np.ndarray:
        if self._sf is not None:
            return self._sf(x)
        if self._suffix is not None:
            return self._suffix[(x - self.support.left).astype(int)]
        if self._cdf is not None:
            if self.support.discrete:
                return 1.0 - self._cdf(x - 1.0)
            return 1.0 - self._cdf(x)
        end = self.support.right if self.support.bounded else self._numeric_tail
        return numeric_survival(self.pdf, x, end, self.breakpoints)

    def cdf(self, x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if self._cdf is not None:
            out = np.zeros(xa.shape)
            inside = xa >= self.support.left
            xi = np.floor(xa[inside]) if self.support.discrete else xa[inside]
            out[inside] = np.clip(self._cdf(np.minimum(xi, self.support.right)), 0.0, 1.0)
            return _scalar_or_array(x, out.reshape(np.shape(x)))
        if self.support.discrete:
            out = 1.0 - np.atleast_1d(self.sf(np.floor(xa) + 1.0))
        else:
            out = 1.0 - np.atleast_1d(self.sf(xa))
        return _scalar_or_array(x, out.reshape(np.shape(x)))

    # -- quantiles ---------------------------------------------------------

    def quantile(self, p: float) -> float:
        """Smallest x with cdf(x) >= p, by bisection on the cdf (survival for upper p)."""
        if not 0.0 < p < 1.0:
            raise DomainError("quantile needs 0 < p < 1")
        if p > 0.5:
            return self.upper_point(1.0 - p)
        if self.support.discrete:
            return self._search(lambda k: self.cdf(k) >= p)
        return self._search(lambda t: self.cdf(t) >= p)

    def upper_point(self, tail: float) -> float:
        """Smallest x with P(X > x) <= tail; the (1 - tail)-quantile without cancellation."""
        if self.support.discrete:
            return self._search(lambda k: self.sf(k + 1.0) <= tail)
        return self._search(lambda t: self.sf(t) <= tail)

    def _search(self, pred) -> float:
        s = self.support
        lo = s.left
        if pred(lo):
            return lo
        width = 1.0
        hi = lo + width
        while not (s.bounded and hi >= s.right) and not pred(hi):
            lo = hi
            width *= 2.0
            hi = s.left + width
            if width > 1e300:
                raise DomainError("quantile search diverged")
        if s.bounded and hi >= s.right:
            hi = s.right
        if s.discrete:
            lo_i, hi_i = int(lo), int(hi)
            while hi_i - lo_i > 1:
                mid = (lo_i + hi_i) // 2
                if pred(float(mid)):
                    hi_i = mid
                else:
                    lo_i = mid
            return float(hi_i)
        for _ in range(2100):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break  # adjacent floats
            if pred(mid):
                hi = mid
            else:
                lo = mid
        return hi

    # -- construction checks -----------------------------------------------

    def _validate(self) -> float:
        if self.support.discrete:
            return self._validate_discrete()
        return self._validate_real()

    def _validate_discrete(self) -> float:
        s = self.support
        if s.bounded:
            k = np.arange(s.left, s.right + 1)
            tail = 0.0
        else:
            K = self.upper_point(_VALIDATION_TAIL) + 1.0
            k = np.arange(s.left, K)
            tail = float(self.sf(K))
        pmf = np.exp(self._logpdf(k))
        if np.any(pmf < 0) or not np.all(np.isfinite(pmf)):
            raise DomainError(f"{self.label}: pmf must be finite and nonnegative")
        mass = math.fsum(pmf) + tail
        if abs(mass - 1.0) > MASS_TOL:
            raise DomainError(f"{self.label}: total mass {mass!r} differs from 1")
        suffix = np.cumsum(pmf[::-1])[::-1] + tail
        if np.max(np.abs(suffix - self.sf(k))) > MASS_TOL:
            raise DomainError(f"{self.label}: survival inconsistent with pmf")
        return mass

    def _validate_real(self) -> float:
        s = self.support
        if s.bounded:
            end = s.right
        elif self._sf is None and self._cdf is None:
            end = self._numeric_tail
        else:
            end = self.upper_point(_VALIDATION_TAIL)
        nodes = partition(s.left, end, self.breakpoints)
        seg = adaptive_segment_integrals(self.pdf, nodes, rtol=1e-12)
        if self.left_density is not None and self.left_density[1] < 0:
            coef, power = self.left_density
            seg[0] = coef * (nodes[1] - nodes[0]) ** (power + 1.0) / (power + 1.0)
        tail = float(self.sf(end)) if not s.bounded else 0.0
        mass = math.fsum(seg) + tail
        if not math.isfinite(mass) or abs(mass - 1.0) > MASS_TOL:
            raise DomainError(f"{self.label}: total mass {mass!r} differs from 1")
        from_left = 1.0 - np.cumsum(seg)
        if np.max(np.abs(from_left - self.sf(nodes[1:]))) > MASS_TOL:
            raise DomainError(f"{self.label}: survival inconsistent with density")
        return mass


def partition(left: float, right: float, breakpoints=(), n: int = 400) -> np.ndarray:
    """Nodes on [left, right]: log-graded toward ``left`` plus uniform, plus breakpoints."""
    span = right - left
    graded = left + span * np.concatenate([[0.0], np.logspace(-16, 0, n)])
    uniform = np.linspace(left, right, 65)
    bps = [b for b in breakpoints if left < b < right]
    return np.unique(np.concatenate([graded, uniform, bps, [right]]))


def numeric_survival(pdf: Callable, x: np.ndarray, end: float, breakpoints=()) -> np.ndarray:
    """P([x, end]) by right-cumulative quadrature between sorted evaluation points.

    Summing positive cells from the right keeps relative accuracy deep in tails.
    """
    x = np.asarray(x, dtype=float)
    xs = np.minimum(x, end)
    nodes = np.unique(np.concatenate([xs, [b for b in breakpoints if b < end], [end]]))
    lo = nodes.min()
    if xs.size == 1 or nodes.size < 8:
        nodes = np.unique(np.concatenate([nodes, partition(lo, end, breakpoints, n=64)]))
    cells = adaptive_segment_integrals(pdf, nodes, rtol=1e-13)
    from_right = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
    return from_right[np.searchsorted(nodes, xs)]


def survival(d: Distribution, x):
    """P([x, inf)) under ``d``."""
    return d.sf(x)


def quantile(d: Distribution, p: float) -> float:
    """Smallest x with cdf(x) >= p."""
    return d.quantile(p)


def _merge_mandatory(points: np.ndarray, mandatory: np.ndarray) -> np.ndarray:
    # drop grid points that nearly coincide with a mandatory point (relative to that point)
    mandatory = np.unique(mandatory)
    if mandatory.size:
        near = np.abs(points[:, None] - mandatory[None, :]) <= 1e-12 * np.maximum(1.0, np.abs(mandatory))[None, :]
        points = points[~near.any(axis=1)]
    return np.unique(np.concatenate([points, mandatory]))


def evaluation_grid(dP: Distribution, dQ: Distribution, n: int = 2001, tail_mass: float = 1e-12) -> np.ndarray:
    """Ordered points on which a pair is compared.

    Integer supports: every point from the common left end up to the first k where both
    survivals fall below ``tail_mass`` (or the last support point).  Real supports: ``n``
    points spanning [left, max of both (1 - tail_mass)-quantiles]; unbounded laws get a
    uniform bulk up to the larger upper quartile followed by geometric spacing into the
    tail.  Breakpoints and finite support endpoints of both laws are always included.
    """
    if n < 2:
        raise ValueError("grid needs n >= 2")
    sP, sQ = dP.support, dQ.support
    if sP.kind != sQ.kind:
        raise SupportError("cannot compare an integer law with a real law")
    if sP.right < sQ.left or sQ.right < sP.left:
        raise SupportError("supports are disjoint")
    left = min(sP.left, sQ.left)
    if sP.discrete:
        right = max(sP.right, sQ.right)
        k = left
        while k < right:
            if dP.sf(k) < tail_mass and dQ.sf(k) < tail_mass:
                break
            k += 1.0
        return np.arange(left, k + 1.0)
    ends = [d.support.right if d.support.bounded else d.upper_point(tail_mass) for d in (dP, dQ)]
    x_end = max(ends)
    if sP.bounded and sQ.bounded:
        points = np.linspace(left, x_end, n)
    else:
        x_mid = max(d.quantile(0.75) for d in (dP, dQ))
        if not left < x_mid < x_end:
            points = np.linspace(left, x_end, n)
        else:
            n_bulk = n // 2
            bulk = np.linspace(left, x_mid, n_bulk)
            ratio = (x_end - left) / (x_mid - left)
            tail = left + (x_mid - left) * np.geomspace(1.0, ratio, n - n_bulk + 1)[1:]
            points = np.concatenate([bulk, tail])
            points[-1] = x_end
    mandatory = [left, x_end]
    for d in (dP, dQ):
        mandatory += [b for b in d.breakpoints if left <= b <= x_end]
        mandatory += [e for e in (d.support.left, d.support.right) if left <= e <= x_end]
    return _merge_mandatory(points, np.asarray(mandatory, dtype=float))
