"""Command line interface.

Exit codes are a stable contract: 0 clean, 1 input error, 3 violations
found, 4 interactive session suspended with undecided witnesses.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .dataset import load_csv
from .detection import DetectionConfig, measure_all, proxy_detect
from .errors import OracleSuspended, ProxyAuditError
from .lang.decompose import EnumerationLimits
from .lang.program import canonical_text, print_program
from .measures import EstimatorConfig
from .oracle import Judgment, JudgmentStore, Policy, judge
from .repair import (APPROPRIATE, INAPPROPRIATE, UNDECIDED, UtilityMeasure,
                     repair_loop)
from .session import Session, load_model, subexpression_rows
from .translate import program_to_json

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATIONS = 3
EXIT_SUSPENDED = 4


def _common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--model", required=True,
                    help="model document (.json) or program text file")
    sp.add_argument("--dataset", required=True, help="population CSV")
    sp.add_argument("--protected", required=True,
                    help="protected attribute column (Z)")
    sp.add_argument("--label", default=None, help="label column for utility")
    sp.add_argument("--epsilon", type=float, default=0.9)
    sp.add_argument("--delta", type=float, default=0.4)
    sp.add_argument("--bins", type=int, default=10,
                    help="quantile bins for continuous association targets")
    sp.add_argument("--estimator", choices=["exact", "sampled"],
                    default="exact")
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--beta", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-subset-size", type=int, default=3)
    sp.add_argument("--max-decompositions", type=int, default=100_000)
    sp.add_argument("--out", default="audit-out", help="output directory")


def _config(args) -> DetectionConfig:
    est = ("exact" if args.estimator == "exact"
           else EstimatorConfig(args.alpha, args.beta, args.seed))
    return DetectionConfig(
        epsilon=args.epsilon, delta=args.delta,
        limits=EnumerationLimits(args.max_subset_size,
                                 args.max_decompositions),
        estimator=est, bins=args.bins)


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _write_report(out: str, program, pop, cfg: DetectionConfig,
                  witnesses, stats) -> list[dict]:
    os.makedirs(out, exist_ok=True)
    everything = measure_all(program, pop, cfg)
    rows = subexpression_rows(everything)
    _write_json(os.path.join(out, "witnesses.json"),
                [w.to_dict() for w in witnesses])
    _write_json(os.path.join(out, "stats.json"), stats.to_dict())
    _write_json(os.path.join(out, "subexpressions.json"), {
        "epsilon": cfg.epsilon, "delta": cfg.delta, "rows": rows})
    with open(os.path.join(out, "subexpressions.csv"), "w",
              encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["position", "parent", "association", "influence",
                         "subterm_size", "reach_prob", "p1"])
        for r in rows:
            writer.writerow([r["position"], r["parent"], r["association"],
                             r["influence"], r["subterm_size"],
                             r["reach_prob"], r["p1"]])
    return rows


def cmd_detect(args) -> int:
    program = load_model(args.model)
    pop = load_csv(args.dataset, args.protected, args.label)
    cfg = _config(args)
    witnesses, stats = proxy_detect(program, pop, cfg)
    _write_report(args.out, program, pop, cfg, witnesses, stats)
    for w in witnesses:
        print(f"witness {w.fingerprint[:12]} assoc={w.association:.6f} "
              f"infl={w.influence:.6f} p1: {w.p1_text}")
    print(f"{len(witnesses)} witness(es), "
          f"{stats.decomposition_count} decompositions, "
          f"{stats.wall_time:.3f}s"
          + (", enumeration incomplete" if stats.incomplete else ""))
    return EXIT_VIOLATIONS if witnesses else EXIT_OK


def _interactive_oracle(store: JudgmentStore):
    def oracle(w) -> str:
        active = store.active(w.fingerprint)
        if active is not None:
            return active.verdict
        print(f"\nwitness {w.fingerprint[:12]}")
        print(f"  p1: {w.p1_text}")
        print(f"  association={w.association:.6f} "
              f"influence={w.influence:.6f}")
        while True:
            answer = input("verdict [a]pprove / [d]eny / [u]ndecided: ")
            answer = answer.strip().lower()
            verdict = {"a": APPROPRIATE, "approve": APPROPRIATE,
                       "d": INAPPROPRIATE, "deny": INAPPROPRIATE,
                       "u": UNDECIDED, "undecided": UNDECIDED,
                       "": UNDECIDED}.get(answer)
            if verdict is not None:
                store.extend_known([w.fingerprint])
                store.record(Judgment(w.fingerprint, verdict,
                                      author="interactive"))
                return verdict
    return oracle


def cmd_repair(args) -> int:
    program = load_model(args.model)
    pop = load_csv(args.dataset, args.protected, args.label)
    cfg = _config(args)
    policy = Policy.load(args.policy) if args.policy else None
    store = JudgmentStore()
    if args.interactive:
        oracle = _interactive_oracle(store)
    else:
        fallback = {"approve": APPROPRIATE,
                    "deny": INAPPROPRIATE}.get(args.undecided, UNDECIDED)

        def oracle(w) -> str:
            verdict = judge(w, store, policy)
            return fallback if verdict == UNDECIDED else verdict
    utility = (UtilityMeasure("accuracy_01", args.label) if args.label
               else UtilityMeasure())
    try:
        outcome = repair_loop(program, pop, cfg, oracle, utility)
    except OracleSuspended as exc:
        print(f"suspended: {exc}", file=sys.stderr)
        return EXIT_SUSPENDED
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "repaired.txt"), "w",
              encoding="utf-8") as fh:
        fh.write(canonical_text(outcome.repaired) + "\n")
    _write_json(os.path.join(args.out, "repaired_model.json"),
                program_to_json(outcome.repaired))
    _write_json(os.path.join(args.out, "edits.json"),
                [e.to_dict() for e in outcome.applied_edits])
    witnesses, stats = proxy_detect(outcome.repaired, pop, cfg)
    _write_report(args.out, outcome.repaired, pop, cfg, witnesses, stats)
    print(f"applied {len(outcome.applied_edits)} edit(s) in "
          f"{outcome.iterations} iteration(s); "
          f"{len(witnesses)} residual witness(es), all approved")
    return EXIT_OK


def cmd_report(args) -> int:
    session = Session.load(args.session_root, args.session)
    rows = session.subexpressions()
    cfg = session.config
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "subexpressions.json"), {
        "epsilon": cfg.epsilon, "delta": cfg.delta, "rows": rows})
    with open(os.path.join(args.out, "subexpressions.csv"), "w",
              encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["position", "parent", "association", "influence",
                         "subterm_size", "reach_prob", "p1"])
        for r in rows:
            writer.writerow([r["position"], r["parent"], r["association"],
                             r["influence"], r["subterm_size"],
                             r["reach_prob"], r["p1"]])
    print(f"wrote {len(rows)} subexpression row(s) to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(args.session_root)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_translate(args) -> int:
    program = load_model(args.model)
    text = print_program(program)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxy-audit",
        description="white-box proxy-use detection and repair")
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect", help="find proxy-use witnesses")
    _common_flags(p_detect)
    p_detect.set_defaults(func=cmd_detect)

    p_repair = sub.add_parser("repair", help="repair denied proxy uses")
    _common_flags(p_repair)
    p_repair.add_argument("--policy", default=None, help="policy JSON file")
    p_repair.add_argument("--interactive", action="store_true")
    p_repair.add_argument("--undecided", choices=["approve", "deny"],
                          default=None,
                          help="batch fallback for unjudged witnesses")
    p_repair.set_defaults(func=cmd_repair)

    p_report = sub.add_parser("report", help="emit session scatter data")
    p_report.add_argument("--session-root", default="sessions")
    p_report.add_argument("--session", required=True)
    p_report.add_argument("--out", default="audit-out")
    p_report.set_defaults(func=cmd_report)

    p_serve = sub.add_parser("serve", help="run the local review service")
    p_serve.add_argument("--session-root", default="sessions")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8321)
    p_serve.set_defaults(func=cmd_serve)

    p_translate = sub.add_parser(
        "translate", help="print a model document as a program")
    p_translate.add_argument("--model", required=True)
    p_translate.add_argument("--out", default=None)
    p_translate.set_defaults(func=cmd_translate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OracleSuspended as exc:
        print(f"suspended: {exc}", file=sys.stderr)
        return EXIT_SUSPENDED
    except ProxyAuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
