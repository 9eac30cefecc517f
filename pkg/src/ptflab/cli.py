"""Command-line front end: construct, profile, learn-dl, learn-parity, compare.

Every subcommand writes its reports into ``--out`` (JSON and CSV, plus a PNG
figure where one makes sense) and is a pure function of its flags and the
root ``--seed``.  ``--config file.json`` supplies flag defaults; explicit
flags win.  Exit status is 0 on verified/learned success, 1 otherwise.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from pathlib import Path


from . import concepts as cc
from .construct import (
    PTF,
    TradeoffRow,
    compose_ptf,
    exhaustion_limit,
    main_ptf,
    outer_ptf,
    rdl_ptf,
    tradeoff_profile,
    verify_ptf_exhaustive,
)
from .parity import (
    LabeledSample,
    TrialsExhausted,
    holdout_error,
    learn_parity,
    parity_oracle,
)
from .plotting import plot_comparison, plot_mistakes, plot_tradeoff
from .poly import IntPoly, to_text
from .winnow import LearnerConfig, comparison_table, expanded_winnow_for_list, feature_count, run_online


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _int_list(text: str) -> list[int]:
    return [int(t) for t in str(text).split(",") if t.strip()]


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ------------------------------------------------------------------ construct

def _load_concept(args):
    kind = args.kind
    if kind == "oddmaxbit":
        return cc.oddmaxbit(args.k)
    if kind == "random":
        return cc.random_decision_list(args.k, args.n or args.k, [args.seed, 0])
    if kind == "tree":
        return cc.random_tree(args.s, args.n, [args.seed, 0])
    if kind == "file":
        return cc.loads(Path(args.concept_file).read_text())
    raise ValueError(f"unknown kind {kind!r}")


def _build(concept, args) -> PTF:
    if isinstance(concept, cc.DecisionTree):
        concept = cc.tree_to_rdl(concept)
    if isinstance(concept, cc.RDecisionList):
        return rdl_ptf(concept, args.h)
    if not isinstance(concept, cc.DecisionList):
        raise ValueError("construct needs a decision list, r-decision list or tree")
    if args.construction == "outer":
        return outer_ptf(concept, args.h or max(1, math.isqrt(concept.k)))
    if args.construction == "main":
        return main_ptf(concept)
    if args.h is None:
        return main_ptf(concept)
    return compose_ptf(concept, args.h)


def cmd_construct(args) -> int:
    out = _outdir(args)
    concept = _load_concept(args)
    ptf = _build(concept, args)
    if args.corrupt:
        # test hook: flip the constant term, which is the value on the all-zero input
        terms = dict(ptf.poly.terms)
        terms[0] = -terms.get(0, 1) or -1
        ptf.poly = IntPoly(ptf.poly.n, terms)
    report = verify_ptf_exhaustive(ptf, concept, limit=args.limit)
    (out / "ptf.txt").write_text(to_text(ptf.poly) + "\n")
    _write_json(out / "report.json", {
        "concept": cc.concept_to_dict(concept),
        "ptf": ptf.metadata(),
        "verify": report.to_dict(),
    })
    if not report.valid:
        print(f"verification failed: {report.mismatches} mismatches, first witness {report.witness}",
              file=sys.stderr)
        return 1
    print(f"verified {ptf.construction} PTF: degree {ptf.degree}, log2 weight {ptf.log2_weight:.3f}")
    return 0


# ------------------------------------------------------------------ profile

def cmd_profile(args) -> int:
    out = _outdir(args)
    rows = tradeoff_profile(args.family, _int_list(args.ks), _int_list(args.hs), args.construction,
                            seed=args.seed, verify=not args.no_verify, bound_constant=args.bound_constant,
                            limit=args.limit)
    _write_csv(out / "profile.csv", TradeoffRow.CSV_COLUMNS, [r.csv_row() for r in rows])
    _write_json(out / "profile.json", {
        "family": args.family, "construction": args.construction, "bound_constant": args.bound_constant,
        "rows": [dict(zip(TradeoffRow.CSV_COLUMNS, (r.k, r.h, r.degree, r.log2_weight,
                                                     r.bound_log2_weight, r.verified))) for r in rows],
    })
    plot_tradeoff(rows, out / "profile.png")
    bad = [r for r in rows if r.verified is False]
    print(f"{len(rows)} rows, {len(bad)} failed verification")
    return 1 if bad else 0


# ------------------------------------------------------------------ learn-dl

def cmd_learn_dl(args) -> int:
    out = _outdir(args)
    target = cc.random_decision_list(args.k, args.n, [args.seed, 0])
    base = expanded_winnow_for_list(args.k, args.n)
    config = LearnerConfig(d=args.d if args.d is not None else base.d,
                           alpha=Fraction(args.alpha) if args.alpha else base.alpha,
                           theta=Fraction(args.theta) if args.theta else None,
                           exact=not args.float_mode)
    rec = run_online(target, config, args.teacher, args.max_trials, seed=args.seed, limit=args.limit)
    N = feature_count(args.n, config.d)
    if target.k >= 2:
        W = main_ptf(target).weight
        theta = Fraction(rec.config["theta"])
        rec.extra.update(target_weight=str(W), target_weight_plus_theta=str(W + abs(theta)),
                         envelope_ratio=rec.mistakes / (W ** 2 * config.d * math.log2(N)))
    data = {"target": cc.concept_to_dict(target), **rec.to_dict()}
    _write_json(out / "record.json", data)
    _write_csv(out / "record.csv",
               ["trials", "mistakes", "final_consistent", "teacher", "seed", "n", "k", "d", "alpha", "theta", "N"],
               [[rec.trials, rec.mistakes, rec.final_consistent, rec.teacher, rec.seed, rec.n, args.k,
                 config.d, str(config.alpha), rec.config["theta"], N]])
    plot_mistakes(rec.mistake_trials, rec.trials, out / "mistakes.png",
                  title=f"k={args.k}, n={args.n}, d={config.d}, {args.teacher}")
    print(f"{rec.mistakes} mistakes in {rec.trials} trials; final consistency {rec.final_consistent}")
    return 0 if rec.final_consistent else 1


# ------------------------------------------------------------------ learn-parity

def cmd_learn_parity(args) -> int:
    out = _outdir(args)
    if args.sample_file:
        sample = LabeledSample.loads(Path(args.sample_file).read_text())
        n = sample.n
        target = None

        def oracle(m, rng, _s=sample):
            # a fixed sample is reused as is, whatever size is asked for
            return _s

    else:
        n = args.n
        target = cc.random_parity(args.k, n, [args.seed, 0])
        oracle = parity_oracle(target)
    try:
        run = learn_parity(oracle, n, args.k, args.eps, args.delta, seed=args.seed, max_trials=args.max_trials)
    except TrialsExhausted as exc:
        _write_json(out / "report.json", {"n": n, "k": args.k, "error": str(exc)})
        print(f"learning failed: {exc}", file=sys.stderr)
        return 1
    if target is not None and args.holdout:
        run.holdout_error = holdout_error(run.hypothesis, oracle, args.holdout, [args.seed, 2])
    report = run.report()
    report["hypothesis_weight"] = run.hypothesis.weight
    if target is not None:
        report["target_support"] = sorted(v + 1 for v in target.support)
    _write_json(out / "report.json", report)
    print(f"hypothesis of weight {run.hypothesis.weight} after {run.trials_used} trials "
          f"(m={run.m}, l={run.ell}); holdout error {run.holdout_error}")
    return 0


# ------------------------------------------------------------------ compare

def cmd_compare(args) -> int:
    out = _outdir(args)
    target = cc.random_decision_list(args.k, args.n, [args.seed, 0])
    rows = comparison_table(target, args.k, seed=args.seed, max_trials=args.max_trials)
    cols = ["algorithm", "mistakes", "final_consistent", "status"]
    _write_csv(out / "comparison.csv", cols, [[r[c] if r[c] is not None else "" for c in cols] for r in rows])
    _write_json(out / "comparison.json", {"target": cc.concept_to_dict(target),
                                          "rows": [{c: r[c] for c in cols} for r in rows]})
    # wall time is not reproducible, so it lives apart from the reports
    _write_json(out / "timings.json", {r["algorithm"]: r["wall_time_s"] for r in rows})
    plot_comparison(rows, out / "comparison.png")
    for r in rows:
        print(f"{r['algorithm']:<34} {r['status']:<10} {'' if r['mistakes'] is None else r['mistakes']}")
    return 0 if all(r["status"] != "max_trials" for r in rows) else 1


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ptflab", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file of flag defaults")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="out")
        sp.add_argument("--limit", type=int, default=None, help="exhaustion limit (default 22)")

    c = sub.add_parser("construct", help="build and exhaustively verify a PTF")
    common(c)
    c.add_argument("--kind", choices=["oddmaxbit", "random", "tree", "file"], default="oddmaxbit")
    c.add_argument("--k", type=int, default=8)
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--s", type=int, default=8, help="leaves of a random tree")
    c.add_argument("--h", type=int, default=None)
    c.add_argument("--construction", choices=["compose", "outer", "main"], default="compose")
    c.add_argument("--concept-file")
    c.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    c.set_defaults(func=cmd_construct)

    pr = sub.add_parser("profile", help="degree/weight tradeoff table and figure")
    common(pr)
    pr.add_argument("--family", choices=["oddmaxbit", "random"], default="oddmaxbit")
    pr.add_argument("--ks", default="8,10,12")
    pr.add_argument("--hs", default="2,3,4")
    pr.add_argument("--construction", choices=["compose", "outer"], default="compose")
    pr.add_argument("--bound-constant", type=float, default=1.0)
    pr.add_argument("--no-verify", action="store_true")
    pr.set_defaults(func=cmd_profile)

    ld = sub.add_parser("learn-dl", help="Expanded-Winnow on a random decision list")
    common(ld)
    ld.add_argument("--k", type=int, default=4)
    ld.add_argument("--n", type=int, default=10)
    ld.add_argument("--teacher", choices=["adversarial", "iid"], default="adversarial")
    ld.add_argument("--max-trials", type=int, default=100_000)
    ld.add_argument("--d", type=int, default=None)
    ld.add_argument("--alpha", default=None)
    ld.add_argument("--theta", default=None)
    ld.add_argument("--float-mode", action="store_true")
    ld.set_defaults(func=cmd_learn_dl)

    lp = sub.add_parser("learn-parity", help="restriction learner for a random k-parity")
    common(lp)
    lp.add_argument("--n", type=int, default=128)
    lp.add_argument("--k", type=int, default=3)
    lp.add_argument("--eps", type=float, default=0.1)
    lp.add_argument("--delta", type=float, default=0.1)
    lp.add_argument("--max-trials", type=int, default=None)
    lp.add_argument("--holdout", type=int, default=10_000)
    lp.add_argument("--sample-file", default=None)
    lp.set_defaults(func=cmd_learn_parity)

    cp = sub.add_parser("compare", help="mistakes of the baseline learners and Expanded-Winnow")
    common(cp)
    cp.add_argument("--k", type=int, default=3)
    cp.add_argument("--n", type=int, default=8)
    cp.add_argument("--max-trials", type=int, default=100_000)
    cp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        defaults = json.loads(Path(pre.config).read_text())
        sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        sub.choices[pre.command].set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
    args = parser.parse_args(argv)
    if args.limit is None:
        args.limit = exhaustion_limit()
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
