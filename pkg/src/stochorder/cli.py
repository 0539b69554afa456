"""``stochorder`` command line: classify, compare, figure, corpus.

Exit codes: 0 consistent, 1 criterion/oracle disagreement or failed scenario,
2 input error, 3 numerically unresolved outcome.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from .config import DEFAULT_CONFIG, TOLERANCE_KEYS, RunConfig
from .corpus import FAIL, INCONCLUSIVE, PANELS, get_scenario, load_corpus, run_scenario
from .criteria import FAILS, HOLDS, Decision, analyze, classify_and_decide
from .errors import ConvergenceError, CorpusError, DiagnosticError, SpecError, StochOrderError
from .families import build, load_spec, loads_spec, spec_to_json
from .oracle import AuditRecord, implication_audit
from .serialize import dumps_csv, dumps_json, flatten
from .shape import letters

EXIT_OK, EXIT_DISAGREE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


# -- report builders ---------------------------------------------------------


def shape_document(decision: Decision) -> dict:
    a = decision.analysis
    sh = a.shape
    lim = a.profile.left_limit
    return {
        "chain_position": sh.chain_position,
        "chain": sh.chain,
        "log_concave": sh.log_concave,
        "unimodal": sh.unimodal,
        "phi_sign": {
            "runs": sh.phi_sign.runs,
            "collapsed": sh.phi_sign.collapsed,
            "change_count": sh.phi_sign.change_count,
            "rightmost_sign": sh.phi_sign.rightmost_sign,
        },
        "superlevel": {
            "is_interval": sh.superlevel.is_interval,
            "interval": sh.superlevel.interval,
            "complement_nonincreasing": sh.superlevel.complement_nonincreasing,
        },
        "rightmost_piece": sh.rightmost_piece,
        "support": sh.support,
        "touches": sh.touches,
        "crossings": sh.crossings,
        "endpoint": {"value": lim.value, "method": lim.method, "converged": lim.converged},
        "grid": {"n_points": sh.n_points, "min_spacing": sh.grid_spacing[0], "max_spacing": sh.grid_spacing[1]},
        "tolerance_used": sh.tolerance_used,
    }


def agreement(decision: Decision, audit: AuditRecord) -> dict:
    """Per order and criterion: agree, disagree or n/a (criterion undecided)."""
    oracle = {"st": audit.st.holds, "hr": audit.hr.holds, "lr": audit.lr.holds}
    matrix = {}
    for order in ("st", "hr", "lr"):
        row = {}
        for v in decision.verdicts:
            said = getattr(v, order)
            if not v.applicable or said not in (HOLDS, FAILS):
                row[v.criterion] = "n/a"
            else:
                row[v.criterion] = "agree" if (said == HOLDS) == oracle[order] else "disagree"
        matrix[order] = row
    return matrix


def compare_document(decision: Decision, audit: AuditRecord) -> dict:
    matrix = agreement(decision, audit)
    consistent = all(cell != "disagree" for row in matrix.values() for cell in row.values())
    return {
        "summary": decision.summary,
        "criteria": list(decision.verdicts),
        "oracles": list(audit.reports),
        "agreement": matrix,
        "consistent": consistent,
        "identity_error": audit.table.identity_error(),
        "neglected_mass": audit.table.neglected_mass,
    }


def figure_rows(panel: str, cfg: RunConfig):
    s = get_scenario(panel)
    P, Q = build(s.P_spec), build(s.Q_spec)
    prof = analyze(P, Q, cfg).profile
    ell = prof.shape_values()
    with np.errstate(divide="ignore"):
        log_ell = np.log(ell)
    signs = letters(ell - 1.0, cfg.zero_tol)
    for x, e, le, sg in zip(prof.grid, ell, log_ell, signs):
        yield (panel, float(x), float(e), float(le), {"+": 1, "-": -1, "0": 0}[sg])


# -- commands ----------------------------------------------------------------


def _read_spec(value: str):
    text = value.strip()
    if text.startswith("{"):
        return loads_spec(text)
    try:
        return load_spec(value)
    except OSError as exc:
        raise CorpusError(f"cannot read spec file {value}: {exc.strerror}") from None
    except SpecError as exc:
        exc.args = (f"{value}: {exc.args[0]}",)
        raise


def _pair(args):
    Ps, Qs = _read_spec(args.p), _read_spec(args.q)
    return Ps, Qs, build(Ps), build(Qs)


def _emit_document(doc: dict, cfg: RunConfig, out) -> None:
    if cfg.output_format == "json":
        out.write(dumps_json(doc))
    else:
        out.write(dumps_csv(flatten(doc), ("key", "value")))


def cmd_classify(args, cfg: RunConfig, out) -> int:
    Ps, Qs, P, Q = _pair(args)
    decision = classify_and_decide(P, Q, cfg)
    doc = {"P": spec_to_json(Ps), "Q": spec_to_json(Qs), **shape_document(decision)}
    _emit_document(doc, cfg, out)
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig, out) -> int:
    Ps, Qs, P, Q = _pair(args)
    a = analyze(P, Q, cfg)
    decision = classify_and_decide(P, Q, cfg, a)
    audit = implication_audit(P, Q, a.grid, cfg, a.profile)
    doc = {"P": spec_to_json(Ps), "Q": spec_to_json(Qs), **compare_document(decision, audit)}
    _emit_document(doc, cfg, out)
    return EXIT_OK if doc["consistent"] else EXIT_DISAGREE


def cmd_figure(args, cfg: RunConfig, out) -> int:
    panel = args.panel.upper()
    if panel != "ALL" and panel not in PANELS:
        raise CorpusError(f"unknown panel {args.panel!r}; choose one of {', '.join(PANELS)} or all")
    panels = PANELS if panel == "ALL" else (panel,)
    header = ("panel", "x", "ell", "log_ell", "phi_sign")
    if cfg.output_format == "csv":
        rows = [row for p in panels for row in figure_rows(p, cfg)]
        out.write(dumps_csv(rows, header))
    else:
        doc = {}
        for p in panels:
            cols = list(zip(*figure_rows(p, cfg)))
            doc[p] = {name: list(col) for name, col in zip(header[1:], cols[1:])}
        out.write(dumps_json(doc))
    return EXIT_OK


def cmd_corpus(args, cfg: RunConfig, out) -> int:
    scenarios = load_corpus(args.corpus_dir)
    rows = []
    worst = EXIT_OK
    for s in scenarios:
        try:
            report = run_scenario(s, cfg)
            status = report.status
            for o in report.outcomes:
                rows.append((s.name, o.key, _show(o.expected), _show(o.observed), o.status))
        except DiagnosticError as exc:
            status = FAIL
            rows.append((s.name, "diagnostic", "", str(exc), FAIL))
        rows.append((s.name, "scenario", "", "", status))
        if status == FAIL:
            worst = EXIT_DISAGREE
        elif status == INCONCLUSIVE and worst == EXIT_OK:
            worst = EXIT_NUMERIC
    if cfg.output_format == "csv":
        out.write(dumps_csv(rows, ("scenario", "key", "expected", "observed", "status")))
    else:
        doc = {"scenarios": [], "passed": worst == EXIT_OK}
        by_name: dict = {}
        for name, key, exp, obs, st in rows:
            entry = by_name.setdefault(name, {"name": name, "status": None, "checks": []})
            if key == "scenario":
                entry["status"] = st
            else:
                entry["checks"].append({"key": key, "expected": exp, "observed": obs, "status": st})
        doc["scenarios"] = list(by_name.values())
        out.write(dumps_json(doc))
    return worst


def _show(value) -> object:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


# -- argument handling -------------------------------------------------------


def _tolerance(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    key = key.strip().replace("-", "_")
    if not sep or key not in TOLERANCE_KEYS:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE with KEY in {', '.join(TOLERANCE_KEYS)}")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{val!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-n", type=int, default=DEFAULT_CONFIG.grid_n, help="points on real-support grids")
    common.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="KEY=VAL", help="override a tolerance (repeatable)")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format")
    common.add_argument("--seed", type=int, default=DEFAULT_CONFIG.seed)

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("--p", required=True, metavar="FILE", help="spec of P (path or inline JSON)")
    pair.add_argument("--q", required=True, metavar="FILE", help="spec of Q (path or inline JSON)")

    parser = argparse.ArgumentParser(prog="stochorder", description="Compare two laws in the st, hr and lr orders.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("classify", parents=[common, pair], help="shape report of the likelihood ratio")
    p.set_defaults(func=cmd_classify)
    p = sub.add_parser("compare", parents=[common, pair], help="criterion verdicts, oracle reports and their agreement")
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("figure", parents=[common], help="likelihood-ratio curves of the worked panels")
    p.add_argument("panel", help="A-F or all")
    p.set_defaults(func=cmd_figure, default_format="csv")
    p = sub.add_parser("corpus", parents=[common], help="replay every scenario and report pass/fail")
    p.add_argument("--corpus-dir", type=Path, default=None, help="directory of scenario JSON files")
    p.set_defaults(func=cmd_corpus)
    return parser


def config_from_args(args) -> RunConfig:
    fmt = args.format or getattr(args, "default_format", "json")
    return DEFAULT_CONFIG.with_overrides(grid_n=args.grid_n, output_format=fmt, seed=args.seed, **dict(args.tol))


def _origin(exc: BaseException) -> str:
    module = "stochorder"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        name = frame.f_globals.get("__name__", "")
        if name.startswith("stochorder"):
            module = name
    return module


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return args.func(args, cfg, out)
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        try:
            sys.stdout = open(os.devnull, "w")
        except OSError:
            pass
        return EXIT_OK
    except ConvergenceError as exc:
        err.write(f"stochorder: numeric failure [{_origin(exc)}]: {exc}\n")
        return EXIT_NUMERIC
    except DiagnosticError as exc:
        err.write(f"stochorder: consistency check failed [{_origin(exc)}]: {exc}\n")
        return EXIT_DISAGREE
    except (StochOrderError, ValueError, KeyError) as exc:
        err.write(f"stochorder: input error [{_origin(exc)}]: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
