"""Special functions and quadrature.

``log_gamma`` and ``digamma`` use the Stirling/asymptotic series after shifting
small arguments upward with the recurrences

    ln Gamma(z) = ln Gamma(z + n) - sum_{k<n} ln(z + k)
    psi(z)      = psi(z + n)      - sum_{k<n} 1 / (z + k)

Both accept scalars or arrays.

Quadrature never truncates an infinite range itself: callers pass finite limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np

from .errors import ConvergenceError, DomainError

_SHIFT = 10.0

# B_{2k} / (2k (2k-1)) for the log-gamma series, k = 1..8
_LGAMMA_COEFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

# B_{2k} / (2k) for the digamma series, k = 1..7
_DIGAMMA_COEFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EULER_GAMMA = 0.57721566490153286061
_ROOT_RADIUS = 0.25


def _zeta_table(kmax: int, n: int = 100) -> np.ndarray:
    """zeta(k) for k = 2..kmax by partial sums with an Euler-Maclaurin tail."""
    out = np.empty(kmax + 1)
    out[:2] = np.nan
    for k in range(2, kmax + 1):
        head = math.fsum(j ** -k for j in range(1, n))
        tail = n ** (1 - k) / (k - 1) + 0.5 * n**-k + k * n ** (-k - 1) / 12.0
        tail -= k * (k + 1) * (k + 2) * n ** (-k - 3) / 720.0
        out[k] = head + tail
    return out


_ZETA = _zeta_table(40)


def _log_gamma_near_one(eps: np.ndarray) -> np.ndarray:
    # ln Gamma(1 + eps) = -gamma eps + sum_{k>=2} (-1)^k zeta(k) eps^k / k, |eps| <= 1/4
    acc = np.zeros_like(eps)
    for k in range(40, 1, -1):
        acc = acc * eps + (-1) ** k * _ZETA[k] / k
    return eps * (-_EULER_GAMMA + eps * acc)


def _check_positive(z: np.ndarray, name: str) -> None:
    if np.any(~(z > 0)):
        raise DomainError(f"{name} requires z > 0")


def _as_output(z_in, out: np.ndarray):
    return float(out[0]) if np.ndim(z_in) == 0 else out.reshape(np.shape(z_in))


def log_gamma(z):
    """Natural log of the gamma function for z > 0."""
    z_in = z
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _check_positive(z, "log_gamma")
    near1 = np.abs(z - 1.0) <= _ROOT_RADIUS
    near2 = np.abs(z - 2.0) <= _ROOT_RADIUS
    x = z.copy()
    shift = np.zeros_like(x)
    small = x < _SHIFT
    while np.any(small):
        shift[small] += np.log(x[small])
        x[small] += 1.0
        small = x < _SHIFT
    inv = 1.0 / x
    inv2 = inv * inv
    series = np.zeros_like(x)
    for c in reversed(_LGAMMA_COEFS):
        series = series * inv2 + c
    out = (x - 0.5) * np.log(x) - x + _HALF_LOG_2PI + series * inv - shift
    if np.any(near1):
        out[near1] = _log_gamma_near_one(z[near1] - 1.0)
    if np.any(near2):
        eps = z[near2] - 2.0
        out[near2] = _log_gamma_near_one(eps) + np.log1p(eps)
    return _as_output(z_in, out)


def digamma(z):
    """Digamma function psi = Gamma'/Gamma for z > 0."""
    z_in = z
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _check_positive(z, "digamma")
    x = z.copy()
    shift = np.zeros_like(x)
    small = x < _SHIFT
    while np.any(small):
        shift[small] += 1.0 / x[small]
        x[small] += 1.0
        small = x < _SHIFT
    inv2 = 1.0 / (x * x)
    series = np.zeros_like(x)
    for c in reversed(_DIGAMMA_COEFS):
        series = series * inv2 + c
    out = np.log(x) - 0.5 / x - series * inv2 - shift
    return _as_output(z_in, out)


@dataclass(frozen=True)
class QuadratureSpec:
    """Rule and budget for :func:`integrate`.

    ``max_subdivisions`` bounds the number of subintervals (adaptive Simpson)
    or panels (Gauss-Legendre) the rule may use.
    """

    rule: Literal["adaptive-simpson", "gauss-legendre"] = "gauss-legendre"
    abs_tol: float = 1e-10
    max_subdivisions: int = 2**16

    def __post_init__(self):
        if self.rule not in ("adaptive-simpson", "gauss-legendre"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@lru_cache(maxsize=8)
def gauss_legendre_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def segment_integrals(f: Callable, edges, order: int = 16) -> np.ndarray:
    """Integral of vectorized ``f`` over each ``[edges[i], edges[i+1]]`` with one GL panel each.

    Intended for partitions whose cells contain no kinks of ``f``.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return np.zeros(0)
    return _cell_integrals(f, edges[:-1], edges[1:], order)


def _cell_integrals(f, lo: np.ndarray, hi: np.ndarray, order: int) -> np.ndarray:
    x, w = gauss_legendre_nodes(order)
    half = 0.5 * (hi - lo)[:, None]
    pts = lo[:, None] + half * (x[None, :] + 1.0)
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return (vals @ w) * half[:, 0]


def _gauss_legendre_composite(f, a, b, spec: QuadratureSpec, order: int = 20) -> float:
    panels = 1
    prev = float(segment_integrals(f, np.linspace(a, b, panels + 1), order).sum())
    while True:
        panels *= 2
        if panels > spec.max_subdivisions:
            raise ConvergenceError("Gauss-Legendre panel budget exhausted", estimate=prev)
        cur = float(segment_integrals(f, np.linspace(a, b, panels + 1), order).sum())
        if abs(cur - prev) <= spec.abs_tol:
            return cur
        prev = cur


def _adaptive_simpson(f, a, b, spec: QuadratureSpec) -> float:
    def g(t):
        return float(f(np.asarray(t, dtype=float)))

    fa, fm, fb = g(a), g(0.5 * (a + b)), g(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, spec.abs_tol)]
    total = 0.0
    intervals = 1
    while stack:
        lo, hi, flo, fmid, fhi, s, tol = stack.pop()
        mid = 0.5 * (lo + hi)
        fl = g(0.5 * (lo + mid))
        fr = g(0.5 * (mid + hi))
        left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi)
        delta = left + right - s
        if abs(delta) <= 15.0 * tol or mid in (lo, hi):
            total += left + right + delta / 15.0
            continue
        intervals += 1
        if intervals > spec.max_subdivisions:
            rest = sum(item[5] for item in stack) + left + right
            raise ConvergenceError("adaptive Simpson subdivision budget exhausted", estimate=total + rest)
        stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * tol))
        stack.append((lo, mid, flo, fl, fmid, left, 0.5 * tol))
    return total


def integrate(f: Callable, a: float, b: float, spec: QuadratureSpec | None = None) -> float:
    """Integrate ``f`` over the finite interval [a, b].

    ``f`` must accept numpy arrays for the Gauss-Legendre rule; the adaptive
    Simpson rule calls it on scalars.
    """
    spec = spec or DEFAULT_QUADRATURE
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integrate needs finite limits; truncate via a quantile first")
    if a == b:
        return 0.0
    if b < a:
        return -integrate(f, b, a, spec)
    if spec.rule == "adaptive-simpson":
        return _adaptive_simpson(f, a, b, spec)
    return _gauss_legendre_composite(f, a, b, spec)


def adaptive_segment_integrals(
    f: Callable, edges, rtol: float = 1e-13, atol: float = 0.0, order: int = 16, max_depth: int = 40
) -> np.ndarray:
    """Integral of ``f`` over each cell of ``edges``, bisecting cells until halves agree.

    A cell is accepted when the one-panel and two-panel Gauss-Legendre values
    differ by at most ``atol + rtol * |value|``.  All cells are refined in one
    vectorized pass per level, so long cells on decaying tails cost little.
    """
    edges = np.asarray(edges, dtype=float)
    n = max(edges.size - 1, 0)
    out = np.zeros(n)
    if n == 0:
        return out
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    owner = np.arange(n)
    whole = _cell_integrals(f, lo, hi, order)
    depth = 0
    while lo.size:
        mid = 0.5 * (lo + hi)
        left = _cell_integrals(f, lo, mid, order)
        right = _cell_integrals(f, mid, hi, order)
        split = left + right
        ok = np.abs(split - whole) <= atol + rtol * np.abs(split)
        if depth >= max_depth:
            ok[:] = True
        np.add.at(out, owner[ok], split[ok])
        keep = ~ok
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        depth += 1
    return out
