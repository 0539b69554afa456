"""Parametric, piecewise and tabulated families, and their JSON spec format.

Spec objects are plain frozen dataclasses; :func:`build` turns one into a
:class:`~stochorder.distributions.Distribution`.  On the wire a spec is one of::

    {"family": "gamma", "params": {"shape": 2, "scale": 1}}
    {"family": "piecewise", "pieces": [{"from": 0, "to": 1, "expr": "exp(-x)"}, ...],
     "params": {"a": 1}, "solve_for": "c", "bracket": [0, 100]}
    {"family": "tabulated", "support": [0, 2], "weights": [0.2, 0.3, 0.5]}

A piece with ``"to": null`` (or ``"inf"``) extends to infinity; only the last
piece may.  At a breakpoint the right-hand piece is used.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import optimize, special

from .distributions import Distribution, Support, partition
from .errors import DomainError, SpecError
from .expr import Expression, parse
from .numerics import adaptive_segment_integrals, log_gamma

_LOG_2PI = math.log(2.0 * math.pi)


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class GammaSpec:
    shape: float
    scale: float

    family = "gamma"

    def params(self):
        return {"shape": self.shape, "scale": self.scale}

    def build(self) -> Distribution:
        r = _positive("shape", self.shape)
        b = _positive("scale", self.scale)
        log_norm = -log_gamma(r) - r * math.log(b)

        def logpdf(x):
            out = np.empty_like(x)
            pos = x > 0
            out[pos] = (r - 1.0) * np.log(x[pos]) - x[pos] / b + log_norm
            at0 = ~pos
            out[at0] = log_norm if r == 1.0 else (np.inf if r < 1.0 else -np.inf)
            return out

        return Distribution(
            Support("real", 0.0),
            logpdf,
            sf=lambda x: special.gammaincc(r, x / b),
            cdf=lambda x: special.gammainc(r, x / b),
            label=f"Gamma(shape={r:g}, scale={b:g})",
            left_density=(math.exp(log_norm), r - 1.0),
            spec=self,
        )


@dataclass(frozen=True)
class ExponentialSpec:
    rate: float

    family = "exponential"

    def params(self):
        return {"rate": self.rate}

    def build(self) -> Distribution:
        lam = _positive("rate", self.rate)
        return Distribution(
            Support("real", 0.0),
            lambda x: math.log(lam) - lam * x,
            sf=lambda x: np.exp(-lam * x),
            cdf=lambda x: -np.expm1(-lam * x),
            label=f"Exponential(rate={lam:g})",
            left_density=(lam, 0.0),
            spec=self,
        )


@dataclass(frozen=True)
class HalfNormalSpec:
    scale: float = 1.0

    family = "half_normal"

    def params(self):
        return {"scale": self.scale}

    def build(self) -> Distribution:
        s = _positive("scale", self.scale)
        log_norm = math.log(2.0) - 0.5 * _LOG_2PI - math.log(s)
        return Distribution(
            Support("real", 0.0),
            lambda x: log_norm - 0.5 * (x / s) ** 2,
            sf=lambda x: special.erfc(x / (s * math.sqrt(2.0))),
            cdf=lambda x: special.erf(x / (s * math.sqrt(2.0))),
            label=f"HalfNormal(scale={s:g})",
            left_density=(math.exp(log_norm), 0.0),
            spec=self,
        )


def half_student_log_density_at_zero(nu) -> float:
    """log f_nu(0) for the half-Student law with ``nu`` degrees of freedom."""
    nu = np.asarray(nu, dtype=float)
    out = math.log(2.0) + log_gamma((nu + 1.0) / 2.0) - 0.5 * np.log(nu * math.pi) - log_gamma(nu / 2.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HalfStudentSpec:
    nu: float

    family = "half_student"

    def params(self):
        return {"nu": self.nu}

    def build(self) -> Distribution:
        nu = _positive("nu", self.nu)
        log0 = half_student_log_density_at_zero(nu)

        def head(x):
            return special.betainc(0.5, 0.5 * nu, x * x / (nu + x * x))

        def tail(x):
            return special.betainc(0.5 * nu, 0.5, nu / (nu + x * x))

        # the tail form loses digits near x = 0, the head form far out
        def cdf(x):
            return np.where(x * x < nu, head(x), 1.0 - tail(x))

        def sf(x):
            return np.where(x * x < nu, 1.0 - head(x), tail(x))

        return Distribution(
            Support("real", 0.0),
            lambda x: log0 - 0.5 * (nu + 1.0) * np.log1p(x * x / nu),
            sf=sf,
            cdf=cdf,
            label=f"HalfStudent(nu={nu:g})",
            left_density=(math.exp(log0), 0.0),
            spec=self,
        )


@dataclass(frozen=True)
class FoldedNormalSpec:
    mu: float
    sigma: float

    family = "folded_normal"

    def params(self):
        return {"mu": self.mu, "sigma": self.sigma}

    def build(self) -> Distribution:
        mu = float(self.mu)
        if not math.isfinite(mu):
            raise DomainError("mu must be finite")
        s = _positive("sigma", self.sigma)
        base = -0.5 * _LOG_2PI - math.log(s)
        root2 = s * math.sqrt(2.0)

        def logpdf(x):
            return base + np.logaddexp(-0.5 * ((x - mu) / s) ** 2, -0.5 * ((x + mu) / s) ** 2)

        return Distribution(
            Support("real", 0.0),
            logpdf,
            sf=lambda x: 0.5 * special.erfc((x - mu) / root2) + 0.5 * special.erfc((x + mu) / root2),
            label=f"FoldedNormal(mu={mu:g}, sigma={s:g})",
            left_density=(float(np.exp(logpdf(np.array([0.0])))[0]), 0.0),
            spec=self,
        )


def _poisson_logpmf(k, lam):
    return k * math.log(lam) - lam - log_gamma(k + 1.0)


@dataclass(frozen=True)
class PoissonSpec:
    lam: float

    family = "poisson"

    def params(self):
        return {"lam": self.lam}

    def build(self) -> Distribution:
        lam = _positive("lam", self.lam)
        return Distribution(
            Support("integer", 0.0),
            lambda k: _poisson_logpmf(k, lam),
            sf=lambda k: special.gammainc(k, lam),
            label=f"Poisson(lam={lam:g})",
            spec=self,
        )


@dataclass(frozen=True)
class ZeroInflatedPoissonSpec:
    pi: float
    lam: float

    family = "zero_inflated_poisson"

    def params(self):
        return {"pi": self.pi, "lam": self.lam}

    def build(self) -> Distribution:
        p = float(self.pi)
        if not 0.0 < p < 1.0:
            raise DomainError("pi must lie in (0, 1)")
        lam = _positive("lam", self.lam)
        log_zero = math.log(p + (1.0 - p) * math.exp(-lam))
        log_keep = math.log1p(-p)

        def logpmf(k):
            out = log_keep + _poisson_logpmf(k, lam)
            return np.where(k == 0, log_zero, out)

        return Distribution(
            Support("integer", 0.0),
            logpmf,
            sf=lambda k: (1.0 - p) * special.gammainc(k, lam),
            label=f"ZIP(pi={p:g}, lam={lam:g})",
            spec=self,
        )


@dataclass(frozen=True)
class UniformSpec:
    a: float = 0.0
    b: float = 1.0

    family = "uniform"

    def params(self):
        return {"a": self.a, "b": self.b}

    def build(self) -> Distribution:
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise DomainError("uniform needs finite a < b")
        w = b - a
        return Distribution(
            Support("real", a, b),
            lambda x: np.full_like(x, -math.log(w)),
            sf=lambda x: (b - x) / w,
            cdf=lambda x: (x - a) / w,
            label=f"Uniform({a:g}, {b:g})",
            left_density=(1.0 / w, 0.0),
            spec=self,
        )


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    expr: str


@dataclass(frozen=True)
class PiecewiseSpec:
    """Density given piece by piece; optionally one constant solved so the mass is 1.

    After solving, any residual mass defect is removed by rescaling and the factor is
    kept on the built distribution as ``normalization_factor``.
    """

    pieces: tuple[Piece, ...]
    bindings: tuple[tuple[str, float], ...] = ()
    solve_for: str | None = None
    bracket: tuple[float, float] = (0.0, 1000.0)
    label: str = ""

    family = "piecewise"

    def env(self, **extra) -> dict:
        env = dict(self.bindings)
        env.update(extra)
        return env

    def parsed(self) -> list[Expression]:
        out = []
        for i, piece in enumerate(self.pieces):
            try:
                out.append(parse(piece.expr))
            except SpecError as exc:
                raise SpecError(f"piece {i}: {exc}", line=None, column=exc.column) from None
        return out

    def join_values(self, extra: Mapping[str, float] | None = None) -> list[tuple[float, float, float]]:
        """(x, left-piece value, right-piece value) at each interior breakpoint, unnormalized."""
        exprs = self.parsed()
        env = self.env(**(extra or {}))
        out = []
        for i in range(len(self.pieces) - 1):
            x = np.array([self.pieces[i].hi])
            out.append((float(x[0]), float(exprs[i](x, env)[0]), float(exprs[i + 1](x, env)[0])))
        return out

    def build(self) -> Distribution:
        return _build_piecewise(self)


def _check_pieces(pieces: tuple[Piece, ...]) -> None:
    if not pieces:
        raise SpecError("piecewise density needs at least one piece")
    for i, p in enumerate(pieces):
        if not math.isfinite(p.lo):
            raise SpecError(f"piece {i}: 'from' must be finite")
        if not p.lo < p.hi:
            raise SpecError(f"piece {i}: needs from < to")
        if i < len(pieces) - 1:
            if not math.isfinite(p.hi):
                raise SpecError(f"piece {i}: only the last piece may be unbounded")
            if pieces[i + 1].lo != p.hi:
                raise SpecError(f"pieces {i} and {i + 1} are not contiguous")


def _build_piecewise(spec: PiecewiseSpec) -> Distribution:
    pieces = spec.pieces
    _check_pieces(pieces)
    exprs = spec.parsed()
    known = set(dict(spec.bindings)) | ({spec.solve_for} if spec.solve_for else set())
    for i, e in enumerate(exprs):
        missing = e.parameters - known
        if missing:
            raise SpecError(f"piece {i}: unbound names {', '.join(sorted(missing))}")
    starts = np.array([p.lo for p in pieces])
    left, right = pieces[0].lo, pieces[-1].hi

    def raw(x, env):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(starts, x, side="right") - 1, 0, len(pieces) - 1)
        out = np.empty_like(x)
        for i, e in enumerate(exprs):
            sel = idx == i
            if np.any(sel):
                out[sel] = e(x[sel], env)
        return out

    def tail_point(env):
        a = pieces[-1].lo
        width = 1.0
        for _ in range(400):
            t = a + width
            if abs(raw(np.array([t]), env)[0]) * max(1.0, width) < 1e-20:
                return t
            width *= 2.0
        raise DomainError("last piece does not decay")

    def cells(env):
        end = right if math.isfinite(right) else tail_point(env)
        bps = list(starts[1:])
        return partition(left, end, bps), end

    def mass(env):
        nodes, _ = cells(env)
        return math.fsum(adaptive_segment_integrals(lambda x: raw(x, env), nodes, rtol=1e-13))

    env = spec.env()
    if spec.solve_for:
        lo, hi = spec.bracket

        def defect(c):
            return mass(spec.env(**{spec.solve_for: c})) - 1.0

        try:
            root = optimize.brentq(defect, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        except ValueError:
            raise DomainError(f"no root of the mass equation for {spec.solve_for} in {spec.bracket}") from None
        env = spec.env(**{spec.solve_for: root})

    span_end = right if math.isfinite(right) else tail_point(env)
    for i, p in enumerate(pieces):
        hi = p.hi if math.isfinite(p.hi) else span_end
        xs = np.linspace(p.lo, hi, 2001)
        vals = exprs[i](xs, env)
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"piece {i}: density is not finite on [{p.lo:g}, {hi:g}]")
        if np.min(vals) < -1e-12:
            j = int(np.argmin(vals))
            raise DomainError(f"piece {i}: density is negative at x={xs[j]:.6g}")

    m = mass(env)
    if not m > 0:
        raise DomainError("piecewise density has zero mass")
    factor = 1.0 / m
    nodes, end = cells(env)

    def pdf(x):
        return np.maximum(raw(x, env) * factor, 0.0)

    def logpdf(x):
        with np.errstate(divide="ignore"):
            return np.log(pdf(x))

    f_left = float(pdf(np.array([left]))[0])
    support = Support("real", left, right)
    d = Distribution(
        support,
        logpdf,
        label=spec.label or "Piecewise",
        breakpoints=starts[1:],
        left_density=(f_left, 0.0) if f_left > 0 else None,
        spec=spec,
        numeric_tail=None if support.bounded else end,
    )
    d.normalization_factor = factor
    d.bindings = dict(env)
    return d


@dataclass(frozen=True)
class TabulatedSpec:
    left: int
    weights: tuple[float, ...]

    family = "tabulated"

    @property
    def right(self) -> int:
        return self.left + len(self.weights) - 1

    def build(self) -> Distribution:
        w = np.asarray(self.weights, dtype=float)
        if w.size == 0 or np.any(~np.isfinite(w)) or np.any(w < 0):
            raise DomainError("tabulated weights must be finite and nonnegative")
        total = math.fsum(w)
        if abs(total - 1.0) > 1e-8:
            raise DomainError(f"tabulated weights sum to {total!r}, not 1")
        w = w / total
        left = int(self.left)
        with np.errstate(divide="ignore"):
            logw = np.log(w)

        def logpmf(k):
            return logw[(k - left).astype(int)]

        return Distribution(
            Support("integer", float(left), float(self.right)),
            logpmf,
            label=f"Tabulated[{left}..{self.right}]",
            spec=self,
        )


FamilySpec = (
    GammaSpec
    | ExponentialSpec
    | HalfNormalSpec
    | HalfStudentSpec
    | FoldedNormalSpec
    | PoissonSpec
    | ZeroInflatedPoissonSpec
    | UniformSpec
    | PiecewiseSpec
    | TabulatedSpec
)

_PARAMETRIC = {
    "gamma": GammaSpec,
    "exponential": ExponentialSpec,
    "half_normal": HalfNormalSpec,
    "half_student": HalfStudentSpec,
    "folded_normal": FoldedNormalSpec,
    "poisson": PoissonSpec,
    "zero_inflated_poisson": ZeroInflatedPoissonSpec,
    "zip": ZeroInflatedPoissonSpec,
    "uniform": UniformSpec,
}


def build(spec) -> Distribution:
    """Construct the distribution described by ``spec``."""
    return spec.build()


def _number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"{what} must be a number")
    return float(value)


def _upper(value, what: str) -> float:
    if value is None or value in ("inf", "+inf", "Infinity"):
        return math.inf
    return _number(value, what)


def spec_from_json(obj) -> FamilySpec:
    """Translate a decoded JSON object into a spec."""
    if not isinstance(obj, dict) or "family" not in obj:
        raise SpecError("a distribution spec is an object with a 'family' key")
    family = str(obj["family"]).lower().replace("-", "_")
    if family in _PARAMETRIC:
        cls = _PARAMETRIC[family]
        params = obj.get("params", {})
        if not isinstance(params, dict):
            raise SpecError("'params' must be an object")
        names = [f for f in cls.__dataclass_fields__]
        unknown = set(params) - set(names)
        if unknown:
            raise SpecError(f"{family}: unknown parameters {', '.join(sorted(unknown))}")
        kwargs = {k: _number(v, f"{family}.{k}") for k, v in params.items()}
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise SpecError(f"{family}: {exc}") from None
    if family == "piecewise":
        raw_pieces = obj.get("pieces")
        if not isinstance(raw_pieces, list):
            raise SpecError("piecewise: 'pieces' must be a list")
        pieces = []
        for i, p in enumerate(raw_pieces):
            if not isinstance(p, dict) or not {"from", "expr"} <= set(p):
                raise SpecError(f"piece {i}: needs 'from', 'to' and 'expr'")
            pieces.append(Piece(_number(p["from"], f"piece {i} from"), _upper(p.get("to"), f"piece {i} to"), str(p["expr"])))
        params = obj.get("params", {})
        bindings = tuple(sorted((str(k), _number(v, f"param {k}")) for k, v in params.items()))
        bracket = tuple(_number(v, "bracket") for v in obj.get("bracket", (0.0, 1000.0)))
        if len(bracket) != 2:
            raise SpecError("bracket must have two numbers")
        spec = PiecewiseSpec(tuple(pieces), bindings, obj.get("solve_for"), bracket, str(obj.get("label", "")))
        spec.parsed()
        return spec
    if family == "tabulated":
        support = obj.get("support")
        weights = obj.get("weights")
        if not (isinstance(support, list) and len(support) == 2 and isinstance(weights, list)):
            raise SpecError("tabulated: needs 'support': [a, b] and 'weights': [...]")
        a, b = (_number(v, "support") for v in support)
        if a != int(a) or b != int(b) or b - a + 1 != len(weights):
            raise SpecError("tabulated: support [a, b] must be integers with b - a + 1 weights")
        return TabulatedSpec(int(a), tuple(_number(w, "weight") for w in weights))
    raise SpecError(f"unknown family {obj['family']!r}")


def spec_to_json(spec) -> dict:
    """Inverse of :func:`spec_from_json`."""
    if isinstance(spec, PiecewiseSpec):
        out = {
            "family": "piecewise",
            "pieces": [{"from": p.lo, "to": None if math.isinf(p.hi) else p.hi, "expr": p.expr} for p in spec.pieces],
        }
        if spec.bindings:
            out["params"] = dict(spec.bindings)
        if spec.solve_for:
            out["solve_for"] = spec.solve_for
            out["bracket"] = list(spec.bracket)
        if spec.label:
            out["label"] = spec.label
        return out
    if isinstance(spec, TabulatedSpec):
        return {"family": "tabulated", "support": [spec.left, spec.right], "weights": list(spec.weights)}
    return {"family": spec.family, "params": spec.params()}


def loads_spec(text: str) -> FamilySpec:
    """Parse spec JSON text; decoding errors carry line and column."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    return spec_from_json(obj)


def load_spec(path) -> FamilySpec:
    with open(path, encoding="utf-8") as fh:
        return loads_spec(fh.read())
