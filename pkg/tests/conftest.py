from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def rational_survival(weights):
    """Exact right-cumulative sums P([k, inf)) of a finite pmf."""
    out = []
    acc = Fraction(0)
    for w in reversed(weights):
        acc += w
        out.append(acc)
    return out[::-1]


def rational_orders(p, q):
    """Exact (st, hr, lr) of two pmfs on a common integer set {0..n-1}."""
    sp, sq = rational_survival(p), rational_survival(q)
    st = all(a <= b for a, b in zip(sp, sq))
    ratios = [a / b for a, b in zip(sp, sq) if b > 0]
    # where Fbar_Q = 0 but Fbar_P > 0 the survival ratio is infinite
    tail_inf = any(b == 0 and a > 0 for a, b in zip(sp, sq))
    hr = all(x >= y for x, y in zip(ratios, ratios[1:])) and not tail_inf
    support = [k for k in range(len(p)) if p[k] > 0 or q[k] > 0]
    ell = [(p[k] / q[k]) if q[k] > 0 else None for k in support]
    lr = True
    for a, b in zip(ell, ell[1:]):
        # None encodes +inf
        if a is None:
            continue
        if b is None or b > a:
            lr = False
    return st, hr, lr


@pytest.fixture
def rational():
    return rational_orders


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one summary line per acceptance criterion for the terminal report."""
    lines = []
    request.config._acceptance_lines = lines
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
