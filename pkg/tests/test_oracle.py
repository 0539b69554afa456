import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rational_orders
from stochorder.config import DEFAULT_CONFIG
from stochorder.corpus import get_scenario
from stochorder.distributions import evaluation_grid
from stochorder.errors import DiagnosticError
from stochorder.families import (
    ExponentialSpec,
    GammaSpec,
    HalfNormalSpec,
    HalfStudentSpec,
    PoissonSpec,
    TabulatedSpec,
    UniformSpec,
    ZeroInflatedPoissonSpec,
    build,
)
from stochorder.oracle import (
    hazard_increments,
    implication_audit,
    survival_table,
    verify_hr,
    verify_lr,
    verify_st,
)
from stochorder.ratio import ratio_profile


def tab(*weights):
    return build(TabulatedSpec(0, tuple(weights)))


def pair(p_spec, q_spec):
    return build(p_spec), build(q_spec)


def scenario_pair(panel):
    s = get_scenario(panel)
    return build(s.P_spec), build(s.Q_spec)


def test_st_two_point_example():
    r = verify_st(tab(0.5, 0.5), tab(0.25, 0.75))
    assert r.holds and r.resolution == "exact"
    assert r.worst_violation == 0.0


@pytest.mark.parametrize("spec", [GammaSpec(2, 1), PoissonSpec(1.5), UniformSpec(0, 2)])
def test_identical_laws(spec):
    a = implication_audit(build(spec), build(spec))
    assert a.st.holds and a.hr.holds and a.lr.holds
    assert a.st.worst_violation == 0.0


def test_st_gamma_unequal_shape_fails():
    r = verify_st(*pair(GammaSpec(2, 1), GammaSpec(1, 1)))
    assert not r.holds and r.resolution == "grid"
    # Fbar_P - Fbar_Q = x e^{-x}, largest at x = 1
    assert r.worst_violation == pytest.approx(math.exp(-1), rel=1e-4)
    assert r.witness == pytest.approx(1.0, abs=0.02)


def test_hr_examples():
    assert verify_hr(*pair(GammaSpec(2, 1), GammaSpec(2, 2))).holds
    assert verify_hr(*pair(HalfStudentSpec(5), HalfStudentSpec(1))).holds
    r = verify_hr(tab(0.6, 0.2, 0.2), tab(0.2, 0.6, 0.2))
    assert not r.holds and r.witness == 2.0
    assert r.worst_violation == pytest.approx(0.5, abs=1e-15)


def test_hr_survival_ratios_by_hand():
    P, Q = tab(0.6, 0.2, 0.2), tab(0.2, 0.6, 0.2)
    t = survival_table(P, Q, np.arange(3.0))
    assert list(t.T) == pytest.approx([1.0, 0.5, 1.0])
    assert list(t.h_P) == pytest.approx([0.6, 0.5, 1.0])


def test_lr_examples():
    assert verify_lr(*scenario_pair("F")).holds
    assert not verify_lr(*scenario_pair("C")).holds
    assert verify_lr(*pair(PoissonSpec(1), PoissonSpec(2))).holds


def test_half_normal_against_exponential_audit():
    a = implication_audit(*pair(HalfNormalSpec(1), ExponentialSpec(0.5)))
    assert a.st.holds and a.hr.holds and not a.lr.holds
    assert a.violations == ()


def test_identity_and_endpoints_of_D():
    P, Q = pair(GammaSpec(2, 1), GammaSpec(2, 2))
    t = survival_table(P, Q, evaluation_grid(P, Q))
    assert t.identity_error() <= 1e-8
    assert t.Dint[0] == 0.0
    assert abs(t.Dint[-1]) <= 1e-10
    assert t.neglected_mass <= 1e-10


def test_identity_with_singular_density_at_zero():
    # Gamma shape 1/2 has an integrable singularity at the left end
    P, Q = pair(GammaSpec(0.5, 1), GammaSpec(0.5, 2))
    t = survival_table(P, Q, evaluation_grid(P, Q))
    assert t.identity_error() <= 1e-8


def test_discrete_identity_is_exact():
    P, Q = pair(ZeroInflatedPoissonSpec(0.5, math.log(2)), PoissonSpec(math.log(2)))
    t = survival_table(P, Q, evaluation_grid(P, Q))
    assert t.identity_error() <= 1e-15


def test_tail_ratio_below_likelihood_ratio():
    P, Q = pair(HalfStudentSpec(5), HalfStudentSpec(1))
    grid = evaluation_grid(P, Q)
    t = survival_table(P, Q, grid)
    assert t.tail_ratio_excess(ratio_profile(P, Q, grid)) <= 1e-8


def test_discrete_hazard_recursion():
    P, Q = pair(PoissonSpec(1), PoissonSpec(2.5))
    t = survival_table(P, Q, evaluation_grid(P, Q))
    inc = hazard_increments(t)
    ok = np.isfinite(t.T[1:]) & (t.Fbar_Q[:-1] > 1e-6)
    assert np.allclose(inc[:-1][ok], np.diff(t.T)[ok], rtol=1e-9, atol=1e-14)


def test_survival_ratio_infinite_where_Q_is_exhausted():
    t = survival_table(tab(0.5, 0.0, 0.5), tab(0.5, 0.5, 0.0), np.arange(3.0))
    assert t.T[2] == math.inf
    assert not verify_hr(tab(0.5, 0.0, 0.5), tab(0.5, 0.5, 0.0)).holds


def test_refinement_near_tolerance():
    # two survivals that differ by about 5e-9 at their worst point
    cfg = DEFAULT_CONFIG.with_overrides(st_tol=1e-9)
    P, Q = pair(ExponentialSpec(1.0), ExponentialSpec(1.0 + 1.4e-8))
    r = verify_st(P, Q, cfg=cfg)
    assert r.refined
    assert not r.holds


def test_audit_raises_on_a_broken_chain(monkeypatch):
    from stochorder import oracle

    P, Q = tab(0.6, 0.2, 0.2), tab(0.2, 0.6, 0.2)
    real = oracle.verify_lr
    monkeypatch.setattr(oracle, "verify_lr", lambda *a, **k: real(Q, Q))
    with pytest.raises(DiagnosticError, match="lr holds but hr fails"):
        oracle.implication_audit(P, Q)


PMF6 = st.lists(st.integers(0, 16), min_size=1, max_size=6).filter(lambda w: sum(w) > 0)


def to_pmf(raw, n):
    total = sum(raw)
    out = [Fraction(v, total) for v in raw] + [Fraction(0)] * (n - len(raw))
    return out


@given(PMF6, PMF6)
def test_exact_verdicts_match_rational_enumeration(a, b):
    n = max(len(a), len(b))
    p, q = to_pmf(a, n), to_pmf(b, n)
    if max(x.denominator for x in p + q) > 64:
        p = [Fraction(round(float(x) * 64), 64) for x in p]
        q = [Fraction(round(float(x) * 64), 64) for x in q]
        if sum(p) != 1 or sum(q) != 1:
            return
    P = tab(*(float(x) for x in p))
    Q = tab(*(float(x) for x in q))
    grid = np.arange(float(n))
    st_, hr_, lr_ = rational_orders(p, q)
    assert verify_st(P, Q, grid).holds == st_
    assert verify_hr(P, Q, grid).holds == hr_
    assert verify_lr(P, Q, grid).holds == lr_


@given(st.lists(st.integers(0, 9), min_size=2, max_size=8), st.lists(st.integers(0, 9), min_size=2, max_size=8))
def test_random_pairs_respect_implications(a, b):
    if sum(a) == 0 or sum(b) == 0:
        return
    n = max(len(a), len(b))
    P = tab(*(v / sum(a) for v in a), *([0.0] * (n - len(a))))
    Q = tab(*(v / sum(b) for v in b), *([0.0] * (n - len(b))))
    rec = implication_audit(P, Q, np.arange(float(n)))
    assert rec.violations == ()
    assert rec.table.identity_error() <= 1e-12
