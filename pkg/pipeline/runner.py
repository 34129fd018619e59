"""
End-to-end normalization: reduction, then Theorem 1 or Theorem 2.

Every stage returns (new jet, step diffeo, details). The pipeline re-checks
each step through the coordinate pushforward path and the Jacobi identity
before the next stage starts.
"""

from dataclasses import dataclass, field
from datetime import datetime
from typing import List, Optional, Tuple

from errors import ConstructorCheckError, StageError, StructuralError
from pipeline.poisson_jet import PoissonJet
from pipeline.reduction import reduce_poisson
from pipeline.theorem1 import normalize_poisson_theorem1
from pipeline.theorem2 import normalize_rank2p_theorem2
from polyvector.diffeo import DiffeoJet, pushforward_by_coordinates
from stages import PipelineRunner, Stage, StageConfig


@dataclass
class StageRecord:
    """Outcome of one stage."""
    name: str
    order: int
    diffeo: DiffeoJet
    verified: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timings: bool = False) -> dict:
        data = {
            "stage": self.name,
            "order": self.order,
            "verified": self.verified,
            "identity": self.diffeo.is_identity(),
            "diffeo": self.diffeo.to_dict(),
            "details": self.details,
        }
        if timings:
            data["seconds"] = round(self.seconds, 3)
        return data


@dataclass
class PipelineReport:
    theorem: int
    forced: bool = False
    records: List[StageRecord] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return all(r.verified for r in self.records)

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "theorem": self.theorem,
            "forced": self.forced,
            "verified": self.verified,
            "stages": [r.to_dict(timings) for r in self.records],
        }


class ReductionStage(Stage):
    def __init__(self):
        super().__init__(StageConfig(name="reduction", description="Translate the zero set of X to the parameter axis"))

    def run(self, pj: PoissonJet, force: bool = False) -> Tuple[PoissonJet, DiffeoJet, dict]:
        if pj.is_reduced():
            self.log_debug("already reduced")
            return pj, DiffeoJet.identity(pj.n, pj.p, pj.order), {"reduced": False}
        new, step = reduce_poisson(pj)
        self.log_info(f"translated the zero set at order {new.order}")
        return new, step, {"reduced": True}


class Theorem1Stage(Stage):
    def __init__(self):
        super().__init__(StageConfig(name="theorem1", description="Resonant quadratic normal form"))

    def run(self, pj: PoissonJet, force: bool = False) -> Tuple[PoissonJet, DiffeoJet, dict]:
        new, step, report = normalize_poisson_theorem1(pj, force=force)
        for note in report.notes:
            self.log_warning(note)
        return new, step, report.to_dict()


class Theorem2Stage(Stage):
    def __init__(self):
        super().__init__(StageConfig(name="theorem2", description="Rank-2p normal form"))

    def run(self, pj: PoissonJet, force: bool = False) -> Tuple[PoissonJet, DiffeoJet, dict]:
        new, step, report = normalize_rank2p_theorem2(pj, force=force)
        for note in report.notes:
            self.log_warning(note)
        self.log_info(f"b reached with flags {report.flags}")
        return new, step, report.to_dict()


def verify_step(name: str, old: PoissonJet, new: PoissonJet, step: DiffeoJet):
    """pushforward(step, old) = new by the coordinate path, and Jacobi on new."""
    image = pushforward_by_coordinates(step, old.P)
    d = min(image.order, new.order)
    if image.truncate(d) != new.P.truncate(d):
        raise StageError(name, f"coordinate pushforward disagrees with the stage output up to order {d}")
    try:
        new.check_jacobi()
    except ConstructorCheckError as e:
        raise StageError(name, f"output is not Poisson: {e}") from e


class NormalizationPipeline:
    """Chains the stages for one theorem and composes their diffeos."""

    def __init__(self, theorem: int = 1, force: bool = False):
        if theorem not in (1, 2):
            raise StructuralError(f"unknown theorem {theorem}")
        self.theorem = theorem
        self.force = force
        self.runner = PipelineRunner()
        self.runner.register_stage(ReductionStage())
        if theorem == 1:
            self.runner.register_stage(Theorem1Stage())
        else:
            self.runner.register_stage(Theorem2Stage())

    def run(self, pj: PoissonJet) -> Tuple[PoissonJet, DiffeoJet, PipelineReport]:
        report = PipelineReport(theorem=self.theorem, forced=self.force)
        total: Optional[DiffeoJet] = None
        current = pj
        self.runner.initialize()
        try:
            for stage in self.runner.enabled_stages():
                start_time = datetime.now()
                new, step, details = stage.run(current, force=self.force)
                verify_step(stage.name, current, new, step)
                seconds = (datetime.now() - start_time).total_seconds()
                report.records.append(StageRecord(stage.name, new.order, step, True, details, seconds))
                total = step if total is None else step.compose(total)
                current = new
        finally:
            self.runner.shutdown()
        if total is None:
            total = DiffeoJet.identity(pj.n, pj.p, pj.order)
        return current, total, report
