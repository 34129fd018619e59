import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from config import Config
from errors import ParseError
from pipeline.poisson_jet import PoissonJet, bivector_from_brackets
from spectrum.family import LinearFamily


@dataclass
class ProblemFile:
    """A Poisson jet problem as stored on disk (1-based bracket keys)."""

    n: int
    p: int
    lam: List[List[str]]
    brackets: Dict[str, list] = field(default_factory=dict)
    order: int = Config.DEFAULT_ORDER
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        """Validate sizes and bracket keys."""
        if self.n < 1 or self.p < 1:
            raise ParseError(f"n and p must be positive, got n={self.n}, p={self.p}")
        if self.order < 1:
            raise ParseError(f"order must be positive, got {self.order}", "order")
        if len(self.lam) != self.p or any(len(r) != self.n for r in self.lam):
            raise ParseError(f"lambda must be {self.p}x{self.n}", "lambda")
        size = self.n + self.p
        for key in self.brackets:
            try:
                i, j = (int(x) for x in str(key).split(","))
            except ValueError as e:
                raise ParseError(f"bad bracket key {key!r}", "brackets") from e
            if not (1 <= i <= size and 1 <= j <= size) or i == j:
                raise ParseError(f"bracket key {key!r} out of range 1..{size}", "brackets")

    def to_dict(self) -> dict:
        """Convert problem to dictionary for JSON serialization."""
        return {
            "n": self.n,
            "p": self.p,
            "lambda": [[str(c) for c in r] for r in self.lam],
            "brackets": self.brackets,
            "order": self.order,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemFile":
        """Create ProblemFile from dictionary."""
        if not isinstance(data, dict):
            raise ParseError("problem file must hold a JSON object")
        try:
            return cls(
                n=int(data["n"]),
                p=int(data["p"]),
                lam=[[str(c) for c in r] for r in data["lambda"]],
                brackets=dict(data.get("brackets", {})),
                order=int(data.get("order", Config.DEFAULT_ORDER)),
                metadata=dict(data.get("metadata", {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"problem file is missing or mistypes a field: {e}") from e

    def dumps(self) -> str:
        """Canonical text: sorted keys, two-space indent, trailing newline."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ProblemFile":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, f"line {e.lineno}, column {e.colno}") from e
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str) -> "ProblemFile":
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise ParseError(f"cannot read {path}: {e.strerror}") from e
        return cls.loads(text)

    def family(self) -> LinearFamily:
        return LinearFamily.from_list(self.lam)

    def to_poisson_jet(self, order: Optional[int] = None, validate: bool = True) -> PoissonJet:
        """
        Build the jet at ``order`` (the file's order by default).

        Brackets are read as exact polynomials, so a higher order keeps them
        as they are and a lower one truncates.
        """
        order = self.order if order is None else order
        P = bivector_from_brackets(self.brackets, self.n, self.p, max(order, self.order))
        return PoissonJet(self.family(), P.truncate(order), validate=validate)

    @classmethod
    def from_poisson_jet(cls, pj: PoissonJet, metadata: Optional[Dict[str, str]] = None) -> "ProblemFile":
        data = pj.to_dict()
        return cls(
            n=data["n"],
            p=data["p"],
            lam=data["lambda"],
            brackets=data["brackets"],
            order=data["order"],
            metadata=dict(metadata or {}),
        )
