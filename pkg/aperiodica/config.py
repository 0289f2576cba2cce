"""
Run configuration shared by every command.

Values come from command-line flags first, then `APERIODICA_*` environment
variables, then the defaults below.
"""
import hashlib
from pathlib import Path
from typing import Optional, Union

import pydantic

from aperiodica.discrepancy import VAN_HOVE_THRESHOLD
from aperiodica.errors import ConfigError
from aperiodica.geometry import FAMILIES, Region
from aperiodica.hullbuilder import TowerBudget
from aperiodica.model import Record
from aperiodica.pointsets import PointSource, density
from aperiodica.scalar import QuadNum
from aperiodica.search import RobustMethod


class RunConfig(pydantic.BaseSettings):
    command: str = ""
    source: str = "latticeZ"
    source_b: Optional[str] = None
    regions: list[Region] = []
    window: Optional[Region] = None
    family: str = "centered"
    max_i: int = 20
    c_values: list[QuadNum] = []
    eps: list[QuadNum] = [QuadNum(1)]
    ell: Optional[QuadNum] = None
    t_max: Optional[QuadNum] = None
    budget: Optional[int] = None
    method: RobustMethod = "scan"
    rho: str = "auto"
    van_hove_threshold: float = VAN_HOVE_THRESHOLD
    scale: float = 1.0
    word: str = ""
    level: int = 1
    inputs: list[Path] = []
    output: Optional[Path] = None
    seed: int = 0
    workers: int = 1
    tower: TowerBudget = TowerBudget()

    class Config:
        env_prefix = "APERIODICA_"
        allow_mutation = False
        json_encoders = Record.Config.json_encoders

    @pydantic.validator("family")
    def _known_family(cls, v: str) -> str:
        if v not in FAMILIES:
            raise ValueError(f"unknown region family {v!r}, expected one of {sorted(FAMILIES)}")
        return v

    @pydantic.validator("rho")
    def _density_literal(cls, v: str) -> str:
        if v != "auto" and QuadNum.of(v).sign() <= 0:
            raise ValueError(f"density must be positive: {v}")
        return v

    @pydantic.validator("workers", "max_i")
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be at least 1, got {v}")
        return v

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of everything but the output location."""
        canonical = self.json(sort_keys=True, exclude={"output"})
        return hashlib.sha256(canonical.encode()).hexdigest()

    def family_regions(self) -> list[Region]:
        return FAMILIES[self.family](self.max_i)

    def resolve_rho(self, S: PointSource) -> Union[QuadNum, float]:
        """The configured density literal, or for `auto` the exact density of the source, else its estimate
        along the configured family."""
        if self.rho != "auto":
            return QuadNum.of(self.rho)
        if S.density_value is not None:
            return S.density_value
        estimate = density(S, self.family_regions(), self.van_hove_threshold)
        if estimate.value <= 0:
            raise ConfigError(f"source {S.spec} has no positive density estimate")
        return estimate.value
