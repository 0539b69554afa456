import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stochorder.config import DEFAULT_CONFIG
from stochorder.corpus import get_scenario
from stochorder.criteria import (
    CRITERIA,
    FAILED,
    FAILS,
    HOLDS,
    NOT_ADDRESSED,
    UNKNOWN,
    UNVERIFIABLE,
    CriterionVerdict,
    analyze,
    classify_and_decide,
    endpoint_logconcave,
    endpoint_unimodal,
    lr_endpoint_test,
    merge_verdicts,
    sign_pattern_criterion,
    superlevel_criterion,
    tail_mean_sign,
)
from stochorder.distributions import Distribution, Support
from stochorder.errors import DiagnosticError
from stochorder.families import (
    ExponentialSpec,
    GammaSpec,
    HalfNormalSpec,
    HalfStudentSpec,
    Piece,
    PiecewiseSpec,
    PoissonSpec,
    TabulatedSpec,
    UniformSpec,
    ZeroInflatedPoissonSpec,
    build,
)
from stochorder.oracle import implication_audit

LN2 = math.log(2)


def pair(p_spec, q_spec):
    return build(p_spec), build(q_spec)


def scenario_pair(panel, swap=False):
    s = get_scenario(panel)
    P, Q = build(s.P_spec), build(s.Q_spec)
    return (Q, P) if swap else (P, Q)


def uniform_on(n):
    return build(TabulatedSpec(0, (1.0 / n,) * n))


def test_half_student_unimodal_endpoint():
    P, Q = pair(HalfStudentSpec(5), HalfStudentSpec(1))
    v = endpoint_unimodal(P, Q)
    assert v.applicable and v.st == HOLDS and v.hr == HOLDS and v.lr == NOT_ADDRESSED
    assert v.endpoint_value > 1
    assert v.support_relation == "equal"


def test_reversed_half_student_is_outside_the_criterion_and_fails_by_oracle():
    # f_1 / f_5 has its minimum at x = 1, so the unimodality hypothesis is violated
    P, Q = pair(HalfStudentSpec(1), HalfStudentSpec(5))
    v = endpoint_unimodal(P, Q)
    assert not v.applicable and "unimodal" in v.failed_assumptions()
    assert v.endpoint_value < 1
    audit = implication_audit(P, Q)
    assert not audit.st.holds and not audit.hr.holds


@pytest.mark.parametrize("spec", [GammaSpec(2, 1), HalfStudentSpec(3), PoissonSpec(2), UniformSpec(0, 1)])
def test_identical_laws_hold_everywhere(spec):
    d = classify_and_decide(build(spec), build(spec))
    v = d.by_name("unimodal-endpoint")
    assert v.applicable and v.st == HOLDS and v.hr == HOLDS
    assert d.summary == {"st": HOLDS, "hr": HOLDS, "lr": HOLDS}
    sup = d.by_name("superlevel")
    assert sup.st == HOLDS and sup.hr == HOLDS


def test_gamma_logconcave_endpoint():
    hold = endpoint_logconcave(*pair(GammaSpec(2, 1), GammaSpec(2, 2)))
    assert hold.applicable and hold.st == HOLDS and hold.hr == HOLDS
    assert hold.endpoint_value == pytest.approx(4.0, rel=1e-14)
    fail = endpoint_logconcave(*pair(GammaSpec(2, 1), GammaSpec(1, 1)))
    assert fail.applicable and fail.st == FAILS and fail.hr == FAILS
    assert fail.endpoint_value == 0.0


def test_half_normal_against_exponential():
    P, Q = pair(HalfNormalSpec(1), ExponentialSpec(0.5))
    d = classify_and_decide(P, Q)
    lc = d.by_name("lc-endpoint")
    assert lc.applicable and lc.st == HOLDS and lc.hr == HOLDS
    assert lc.endpoint_value == pytest.approx(math.sqrt(8 / math.pi), rel=1e-14)
    lr = d.by_name("lc-lr-endpoint")
    assert lr.applicable and lr.lr == FAILS and lr.endpoint_value > 0
    assert d.by_name("sign-pattern").applicable
    audit = implication_audit(P, Q)
    assert audit.st.holds and audit.hr.holds and not audit.lr.holds


@pytest.mark.parametrize("l1, l2", [(1.0, 2.0), (0.5, 3.0), (2.0, 2.5)])
def test_poisson_lr_endpoint(l1, l2):
    v = lr_endpoint_test(*pair(PoissonSpec(l1), PoissonSpec(l2)))
    want = math.exp(l2 - l1) * (l1 / l2 - 1)
    assert v.applicable and v.lr == HOLDS
    assert v.endpoint_value == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("r, b1, b2", [(2, 1, 2), (1, 0.5, 1), (3.5, 1, 2)])
def test_gamma_lr_endpoint_derivative(r, b1, b2):
    v = lr_endpoint_test(*pair(GammaSpec(r, b1), GammaSpec(r, b2)))
    want = -(1 / b1 - 1 / b2) * (b2 / b1) ** r
    assert v.applicable and v.lr == HOLDS
    assert v.endpoint_value == pytest.approx(want, rel=1e-5)


def test_lr_endpoint_needs_positive_left_density():
    v = lr_endpoint_test(*pair(GammaSpec(2, 1), GammaSpec(1, 1)))
    assert not v.applicable and "x0-in-support-of-P" in v.failed_assumptions()


def test_panel_c_sign_pattern():
    v = sign_pattern_criterion(*scenario_pair("C"))
    assert v.applicable and v.st == HOLDS and v.hr == HOLDS
    assert v.endpoint_value == pytest.approx(1.0, abs=1e-12)
    names = {a.name: a.status for a in v.assumptions}
    assert names["continuity"] == UNVERIFIABLE
    assert names["right-neighbourhood"] != FAILED


def test_panel_d_sign_pattern_and_reversal():
    v = sign_pattern_criterion(*scenario_pair("D"))
    assert v.applicable and v.st == HOLDS
    assert v.endpoint_value == pytest.approx(1 + 3 / 36, rel=1e-12)
    rev = sign_pattern_criterion(*scenario_pair("D", swap=True))
    assert not rev.applicable and rev.st == UNKNOWN and "sign-pattern" in rev.failed_assumptions()


def test_panel_f_lr_by_oracle():
    P, Q = scenario_pair("F")
    d = classify_and_decide(P, Q)
    v = d.by_name("sign-pattern")
    assert v.applicable and v.st == HOLDS
    assert implication_audit(P, Q).lr.holds


@pytest.mark.parametrize("pi, lam", [(0.5, LN2), (0.3, 1.2)])
def test_zero_inflated_poisson_superlevel(pi, lam):
    P, Q = pair(ZeroInflatedPoissonSpec(pi, lam), PoissonSpec(lam))
    d = classify_and_decide(P, Q)
    sup = d.by_name("superlevel")
    assert sup.applicable and sup.st == HOLDS and sup.hr == HOLDS
    assert sup.endpoint_value == pytest.approx(1 - pi + pi * math.exp(lam), rel=1e-13)
    assert not d.by_name("lc-endpoint").applicable
    audit = implication_audit(P, Q)
    assert audit.st.holds and audit.hr.holds


def test_superlevel_never_fails():
    P, Q = pair(GammaSpec(2, 1), GammaSpec(1, 1))
    v = superlevel_criterion(P, Q)
    assert v.st != FAILS and v.hr != FAILS and not v.applicable


def test_inapplicable_verdict_carries_no_decision():
    with pytest.raises(DiagnosticError):
        CriterionVerdict("superlevel", False, (), st=HOLDS)
    with pytest.raises(DiagnosticError):
        CriterionVerdict("superlevel", True, (), st=FAILS, hr=HOLDS)


def test_merge_rejects_conflicts():
    a = CriterionVerdict("lc-endpoint", True, (), HOLDS, HOLDS)
    b = CriterionVerdict("sign-pattern", True, (), FAILS, FAILS)
    with pytest.raises(DiagnosticError):
        merge_verdicts([a, b])
    hidden = CriterionVerdict("superlevel", False, ())
    assert merge_verdicts([a, hidden]) == {"st": HOLDS, "hr": HOLDS, "lr": UNKNOWN}


def test_verdicts_come_strongest_first():
    d = classify_and_decide(*pair(GammaSpec(2, 1), GammaSpec(2, 2)))
    assert tuple(v.criterion for v in d.verdicts) == CRITERIA


def test_endpoint_inside_equality_band_is_unknown():
    # density (1 + 6x(1-x)) / 2 against U(0,1): unimodal ratio with l(0) = 1/2
    P = build(PiecewiseSpec((Piece(0, 1, "1 + 6*x*(1 - x)"),)))
    Q = build(UniformSpec(0, 1))
    v = endpoint_unimodal(P, Q)
    assert v.applicable and v.st == FAILS
    assert v.endpoint_value == pytest.approx(0.5, rel=1e-9)
    wide = DEFAULT_CONFIG.with_overrides(eq_tol=0.6)
    assert endpoint_unimodal(P, Q, wide).st == UNKNOWN


def test_unresolved_limit_degrades_to_unknown():
    real = Support("real", 0.0, 1.0)
    P = Distribution(real, lambda x: np.log(1.0 + 0.5 * np.sin(1.0 / x)), validate=False, sf=lambda x: 1.0 - x)
    Q = Distribution(real, lambda x: np.zeros_like(x), sf=lambda x: 1.0 - x)
    with np.errstate(invalid="ignore"):
        a = analyze(P, Q, DEFAULT_CONFIG, grid=np.linspace(0, 1, 101))
    assert not a.profile.left_limit.converged
    for fn in (endpoint_unimodal, sign_pattern_criterion, superlevel_criterion):
        v = fn(P, Q, DEFAULT_CONFIG, a)
        assert v.st == UNKNOWN and v.hr == UNKNOWN


# -- tail means --------------------------------------------------------------


def test_tail_means_forward_example():
    r = tail_mean_sign(uniform_on(3), np.array([1.0, 0.0, -1.0]), grid=np.arange(3.0))
    assert r.applicable and r.equivalence is True
    assert r.phi0 == 1.0 and r.all_tail_means_nonpositive
    assert [d for _, d in r.table] == pytest.approx([0.0, -0.5, -1.0])


def test_tail_means_converse_example():
    r = tail_mean_sign(uniform_on(3), np.array([-1.0, 0.0, 1.0]), grid=np.arange(3.0))
    assert not r.applicable and r.phi0 == -1.0
    assert r.converse_witness == 1.0
    assert dict(r.table)[1.0] == pytest.approx(0.5)


def test_tail_means_zero_function():
    r = tail_mean_sign(uniform_on(4), np.zeros(4), grid=np.arange(4.0))
    assert r.applicable and r.equivalence is True and r.converse_witness is None


def test_tail_means_require_zero_mean():
    r = tail_mean_sign(uniform_on(3), np.array([1.0, 0.0, 0.0]), grid=np.arange(3.0))
    assert not r.applicable and "mean" in r.reason


def test_tail_means_continuous():
    # phi = 1 - 2x has mean zero under U(0,1); conditional tail means are -x
    mu = build(UniformSpec(0, 1))
    r = tail_mean_sign(mu, lambda x: 1.0 - 2.0 * x, grid=np.linspace(0, 1, 41))
    assert r.applicable and r.equivalence is True
    xs, ds = zip(*r.table)
    assert np.allclose(ds, -np.array(xs), atol=1e-10)


def exact_tail_means(weights, phi):
    w = [Fraction(v) for v in weights]
    f = [Fraction(v) for v in phi]
    out = []
    for k in range(len(w)):
        mass = sum(w[k:])
        if mass > 0:
            out.append(sum(a * b for a, b in zip(w[k:], f[k:])) / mass)
    return out


@st.composite
def lemma_instances(draw):
    n = draw(st.integers(2, 10))
    w = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    cut1 = draw(st.integers(0, n))
    cut2 = draw(st.integers(cut1, n))
    lead = draw(st.sampled_from("+-0"))
    mags = draw(st.lists(st.integers(1, 9), min_size=n, max_size=n))
    signs = [lead] * cut1 + ["+" if lead == "-" else "-"] * (cut2 - cut1) + ["-"] * (n - cut2)
    pos = [m if s == "+" else 0 for s, m in zip(signs, mags)]
    neg = [m if s == "-" else 0 for s, m in zip(signs, mags)]
    ep = sum(a * b for a, b in zip(w, pos))
    en = sum(a * b for a, b in zip(w, neg))
    if ep == 0 or en == 0:
        phi = [Fraction(0)] * n
    else:
        phi = [Fraction(p * en, ep) - q for p, q in zip(pos, neg)]
    total = sum(w)
    return [Fraction(v, total) for v in w], phi


@given(lemma_instances())
def test_tail_mean_equivalence_matches_enumeration(inst):
    w, phi = inst
    mu = build(TabulatedSpec(0, tuple(float(v) for v in w)))
    values = np.array([float(v) for v in phi])
    r = tail_mean_sign(mu, values, grid=np.arange(float(len(w))))
    exact = exact_tail_means(w, phi)
    lhs = all(d <= 0 for d in exact)
    rhs = phi[0] >= 0
    if r.applicable:
        assert r.all_tail_means_nonpositive == lhs
        assert r.endpoint_nonnegative == rhs
        assert lhs == rhs and r.equivalence is True
    if phi[0] < 0:
        assert r.converse_witness is not None
        k = int(r.converse_witness)
        assert exact[k] > 0
