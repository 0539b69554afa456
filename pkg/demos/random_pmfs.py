"""
Random finite laws, criteria against direct checks
==================================================

On finite integer supports the direct checks are exact, which makes random
pmf pairs a cheap audit of the endpoint criteria.
"""

from collections import Counter

import numpy as np

from stochorder import TabulatedSpec, build, classify_and_decide, implication_audit
from stochorder.criteria import analyze

rng = np.random.default_rng(7)
tally = Counter()
for _ in range(300):
    n = int(rng.integers(2, 8))
    p, q = rng.integers(0, 6, size=n), rng.integers(0, 6, size=n)
    if p.sum() == 0 or q.sum() == 0:
        continue
    P = build(TabulatedSpec(0, tuple(p / p.sum())))
    Q = build(TabulatedSpec(0, tuple(q / q.sum())))
    grid = np.arange(float(n))
    a = analyze(P, Q, grid=grid)
    audit = implication_audit(P, Q, grid, profile=a.profile)
    d = classify_and_decide(P, Q, analysis=a)
    tally[("oracle st", audit.st.holds)] += 1
    tally[("chain", a.shape.chain_position)] += 1
    if d.summary["st"] != "unknown":
        tally[("criteria decided st", (d.summary["st"] == "holds") == audit.st.holds)] += 1

for key, count in sorted(tally.items(), key=str):
    print(key, count)
