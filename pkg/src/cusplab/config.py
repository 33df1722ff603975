"""Experiment configuration and report bundles."""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields

from .errors import DomainError
from .excursions import DEFAULT_BURN_IN, DEFAULT_K_GRID
from .reals import RandomSpec, digits_for_terms, parse_real
from .zonal import hecke_levy_target

COMMANDS = ("expand", "rates", "stats", "levy", "loglaw", "zonal")
REPORT_SCHEMA = "cusp-lab/report-v1"
ZONAL_SCHEMA = "cusp-lab/zonal-v1"

DEFAULT_TOLERANCES = {
    "levy_rel": 0.01,
    "levy_agreement_rel": 0.01,
    "rate_rel": 0.02,
    "gap_rel": 0.02,
    "chord_rel": 0.02,
    "theta_abs": 0.01,
    "log_theta_abs": 0.02,
    "cdf_sup": 0.02,
    "hecke_levy_rel": 0.02,
}


@dataclass
class ExperimentConfig:
    command: str
    x: list[str] = field(default_factory=list)
    seed: int = 1
    samples: int | None = None
    digits: int | None = None
    terms: int | None = None
    k: list[float] = field(default_factory=lambda: list(DEFAULT_K_GRID))
    hmin: float = 1e-6
    q: int = 3
    gamma_count: int = 200
    out: str | None = None
    jobs: int = 1
    burn_in: int = DEFAULT_BURN_IN
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}
        self.validate()

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        for name in ("samples", "digits", "terms", "jobs", "gamma_count"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v <= 0):
                raise DomainError(f"{name} must be a positive integer")
        if self.seed < 0 or self.burn_in < 0:
            raise DomainError("seed and burn-in must be non-negative")
        if not self.k or any(not 0 < k <= 2 for k in self.k):
            raise DomainError("k grid must be a non-empty subset of (0, 2]")
        if not 0 < self.hmin < 1:
            raise DomainError("hmin must lie in (0, 1)")
        if self.command == "zonal" and (not isinstance(self.q, int) or self.q < 3):
            raise DomainError("q must be an integer >= 3")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise DomainError(f"unknown tolerances: {sorted(unknown)}")
        if any(v <= 0 for v in self.tolerances.values()):
            raise DomainError("tolerances must be positive")
        for s in self.x:
            parse_real(s)

    # --- effective values
    @property
    def n_terms(self) -> int:
        if self.terms is not None:
            return self.terms
        return 20 if self.command == "expand" else 2000

    @property
    def n_samples(self) -> int:
        if self.x:
            return len(self.x)
        if self.samples is not None:
            return self.samples
        if self.command == "zonal":
            return 20 if self.q == 3 else 30
        return 100

    @property
    def n_digits(self) -> int:
        if self.digits is not None:
            return self.digits
        if self.command == "zonal":
            # |x - p_n/q_n| shrinks like exp(-2 L n) for the Levy rate L
            rate = 2 * hecke_levy_target(self.q) * self.gamma_count / math.log(10)
            floor = -4 * math.log10(self.hmin) if self.q == 3 else 0
            return math.ceil(1.3 * max(rate, floor) + 64)
        return max(3000, digits_for_terms(self.n_terms))

    def sample_spec(self, index: int) -> str:
        if self.x:
            return parse_real(self.x[index]).text
        return RandomSpec.derive(self.seed, index, self.n_digits).text

    def tolerance(self, name: str) -> float:
        return self.tolerances[name]

    # --- serialization
    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise DomainError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"bad config JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | os.PathLike) -> ExperimentConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass
class ReportBundle:
    schema: str
    version: str
    config: dict
    samples: list[dict]
    pooled: dict
    checks: list[dict]
    wall_clock_s: float
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"not serializable: {type(v)}")
