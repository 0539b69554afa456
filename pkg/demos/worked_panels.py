"""
Six likelihood-ratio shapes
===========================

Each packaged scenario pairs two laws whose ratio l = f_P / f_Q sits at a
different place in the hypothesis chain (log-concave, unimodal, two sign
changes, interval superlevel set).  The corpus replays every expectation.
"""

from stochorder import load_corpus, run_scenario

for s in load_corpus():
    r = run_scenario(s)
    sh = r.decision.analysis.shape
    word = sh.phi_sign
    print(f"{s.name:20s} {r.status:5s}  chain: {sh.chain_position:20s} sign runs {word.runs:6s}"
          f" l(x0+) = {r.decision.analysis.endpoint:.4g}")
    print(f"{'':27s}criteria {r.decision.summary}  oracle lr {r.audit.lr.holds}")

# Panel D: the ratio touches 1 twice before it crosses.
d = next(r for r in map(run_scenario, load_corpus()) if r.scenario.figure_panel == "D")
sh = d.decision.analysis.shape
print("panel D touches:", [round(t, 4) for t in sh.touches], "crossing:", [round(c.estimate, 4) for c in sh.crossings])
