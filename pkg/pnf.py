#!/usr/bin/env python3
"""
pnf - formal normal forms of Poisson structures with linear part C^p ⋉ C^n
Command line entry point
"""

import argparse
import glob
import json
import logging
import os
import sys
from datetime import datetime
from typing import List, Optional, Tuple

from config import Config
from errors import ParseError, PnfError, StageError
from models.problem import ProblemFile
from models.report import Report, digest
from pipeline.runner import NormalizationPipeline
from polyvector.diffeo import DiffeoJet, pushforward
from spectrum.diophantine import brjuno_partial_sums, omega_sequence
from spectrum.hypotheses import hypotheses_report
from spectrum.invariants import invariant_generators
from spectrum.resonance import resonant_monomials
from utils.logger import ReportLogger

logger = logging.getLogger("pnf")


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from e


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def first_difference(a, b) -> Optional[dict]:
    """First (indices, monomial) where two polyvectors differ, 1-based."""
    for idx in sorted(set(a.terms) | set(b.terms)):
        ja, jb = a.component(idx), b.component(idx)
        for q in sorted(set(ja.terms) | set(jb.terms)):
            if ja.coefficient(q) != jb.coefficient(q):
                return {
                    "indices": ",".join(str(i + 1) for i in idx),
                    "monomial": list(q),
                    "left": str(ja.coefficient(q)),
                    "right": str(jb.coefficient(q)),
                }
    return None


class PnfCommand:
    """Runs one command over one or more problem files."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.report_logger = ReportLogger()

    def initialize(self):
        self.report_logger.initialize()
        Config.validate()

    # Commands

    def analyze(self, path: str, report: Report):
        problem = ProblemFile.loads(_read(path))
        order = self.args.order or problem.order
        pj = problem.to_poisson_jet(order)
        S = pj.family
        bound = self.args.degree_bound
        omega = omega_sequence(S, self.args.kmax)
        report.verdicts = {
            "hypotheses": hypotheses_report(S, Config.NONRES_BOUND).to_dict(),
            "resonance": {
                kind: resonant_monomials(S, kind, bound).to_dict()
                for kind in ("function", "vector", "bivector")
            },
            "invariants": invariant_generators(S, bound).to_dict(),
            "omega": [term.to_dict() for term in omega],
            "brjuno_partial_sums": brjuno_partial_sums(omega),
        }
        report.checks = {
            "constructor": True,
            "linear_part": pj.linear_part_matches(),
            "reduced": pj.is_reduced(),
        }
        failing = [v["name"] for v in report.verdicts["hypotheses"]["verdicts"] if not v["passed"]]
        print(f"   ✅ Hypotheses failing: {', '.join(failing) or 'none'}")

    def normalize(self, path: str, report: Report):
        problem = ProblemFile.loads(_read(path))
        order = self.args.order or problem.order
        pj = problem.to_poisson_jet(order)
        pipeline = NormalizationPipeline(theorem=self.args.theorem, force=self.args.force)
        result, diffeo, pipeline_report = pipeline.run(pj)
        data = pipeline_report.to_dict(timings=self.args.timings)
        report.stages = data["stages"]
        report.checks = {"verified": pipeline_report.verified}
        for record in pipeline_report.records:
            for name, ok in record.details.get("flags", {}).items():
                report.checks[f"{record.name}.{name}"] = ok
        report.output = {"problem": ProblemFile.from_poisson_jet(result).to_dict()}
        if self.args.out:
            out = ProblemFile.from_poisson_jet(result, metadata={"source": os.path.basename(path)})
            _write(self._target(self.args.out, path, "normal"), out.dumps())
        if self.args.diffeo:
            _write(self._target(self.args.diffeo, path, "diffeo"), json.dumps(diffeo.to_dict(), sort_keys=True, indent=2) + "\n")
        print(f"   ✅ Normal form verified at order {result.order}")

    def check(self, path: str, report: Report):
        left = ProblemFile.loads(_read(path))
        right = ProblemFile.loads(_read(self.args.target))
        if left.order != right.order:
            logger.warning(f"order mismatch: {left.order} vs {right.order}")
            report.verdicts["order_mismatch"] = [left.order, right.order]
        order = self.args.order or min(left.order, right.order)
        a = left.to_poisson_jet(order)
        b = right.to_poisson_jet(order)
        if self.args.diffeo:
            phi = DiffeoJet.from_dict(json.loads(_read(self.args.diffeo)))
        else:
            phi = DiffeoJet.identity(a.n, a.p, order)
        image = pushforward(phi, a.P)
        d = min(image.order, b.order)
        difference = first_difference(image.truncate(d), b.P.truncate(d))
        report.checks = {"equivalent": difference is None}
        report.verdicts["compared_order"] = d
        if difference is not None:
            report.verdicts["first_difference"] = difference
            report.status = "failed"
            report.exit_code = 5
            print(f"   ❌ Differs at {difference['indices']} monomial {difference['monomial']}")
        else:
            print(f"   ✅ Equivalent up to order {d}")

    # Driver

    def _target(self, option: str, path: str, suffix: str) -> str:
        if not self.args.batch:
            return option
        os.makedirs(option, exist_ok=True)
        stem = os.path.splitext(os.path.basename(path))[0]
        return os.path.join(option, f"{stem}.{suffix}.json")

    def paths(self) -> List[str]:
        if not self.args.batch:
            return [self.args.path]
        if os.path.isdir(self.args.path):
            return sorted(glob.glob(os.path.join(self.args.path, "*.json")))
        return sorted(glob.glob(self.args.path))

    def run_one(self, path: str) -> Report:
        text = _read(path) if os.path.exists(path) else ""
        report = Report(command=self.args.command, input_digest=digest(text))
        start_time = datetime.now()
        try:
            getattr(self, self.args.command)(path, report)
        except PnfError as e:
            stage = e.stage if isinstance(e, StageError) else None
            report.fail(e.exit_code, type(e).__name__, str(e), stage)
            print(f"   ❌ {type(e).__name__}: {e}")
        seconds = (datetime.now() - start_time).total_seconds()
        if self.args.timings:
            report.timings = {"total_seconds": round(seconds, 3)}
        self.report_logger.log_run(path, report, seconds)
        return report

    def run(self) -> Tuple[int, List[Report]]:
        self.initialize()
        reports = []
        paths = self.paths()
        if not paths:
            print(f"❌ No problem files match {self.args.path}")
            return 2, reports
        for i, path in enumerate(paths, 1):
            print(f"🔍 [{i}/{len(paths)}] {self.args.command}: {path}")
            reports.append(self.run_one(path))
        if self.args.report:
            payload = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
            _write(self.args.report, json.dumps(payload, sort_keys=True, indent=2) + "\n")
        self._summary(reports)
        return max(r.exit_code for r in reports), reports

    def _summary(self, reports: List[Report]):
        summary = self.report_logger.log_summary()
        failed = [r for r in reports if r.exit_code]
        print("\n" + "=" * 60)
        print("📊 RUN SUMMARY")
        print("=" * 60)
        print(f"Files: {len(reports)}")
        print(f"Failed: {len(failed)}")
        if summary and summary["failures_by_exit_code"]:
            print("\nFailures by exit code:")
            for code, count in sorted(summary["failures_by_exit_code"].items()):
                print(f"  • {code}: {count}")
        print("=" * 60)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pnf", description="Formal normal forms of Poisson structures")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("path", help="Problem file (a directory or glob with --batch)")
        p.add_argument("--order", type=int, default=None, help=f"Truncation order (default: file, then PNF_ORDER={Config.DEFAULT_ORDER})")
        p.add_argument("--batch", action="store_true", help="Run over every *.json file in path")
        p.add_argument("--report", default=None, help="Write the JSON report here")
        p.add_argument("--timings", action="store_true", default=Config.REPORT_TIMINGS, help="Include timings in reports")

    analyze = sub.add_parser("analyze", help="Hypotheses, resonances, invariants and ω_k")
    common(analyze)
    analyze.add_argument("--kmax", type=int, default=Config.KMAX)
    analyze.add_argument("--degree-bound", type=int, default=Config.DEGREE_BOUND)

    normalize = sub.add_parser("normalize", help="Run the normalization pipeline")
    common(normalize)
    normalize.add_argument("--theorem", type=int, choices=(1, 2), default=1)
    normalize.add_argument("--force", action="store_true", help="Continue past failing hypotheses")
    normalize.add_argument("--out", default=None, help="Write the normal form problem file here")
    normalize.add_argument("--diffeo", default=None, help="Write the composite diffeo here")

    check = sub.add_parser("check", help="Verify that a diffeo maps one problem to another")
    common(check)
    check.add_argument("target", help="Problem file the pushforward must match")
    check.add_argument("--diffeo", default=None, help="Diffeo file (identity by default)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)

    print("🧮 pnf - Poisson normal forms")
    print("=" * 50)

    command = PnfCommand(args)
    try:
        code, _ = command.run()
    except ValueError as e:
        print(f"\n❌ pnf failed: {e}")
        return 2
    if code:
        print(f"\n❌ pnf finished with exit code {code}")
    else:
        print("\n✅ pnf completed successfully")
    return code


if __name__ == "__main__":
    sys.exit(main())
