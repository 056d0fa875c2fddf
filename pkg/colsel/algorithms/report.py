"""
Run configuration and report models.

Both are pydantic models so the report schema can be published with
``RunReport.model_json_schema()`` and an old report's ``config`` block can be
fed back in as a config file.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import ConfigError
from ..utils import atomic_write_text

Method = Literal["greedy", "lazier", "dist", "random"]
DimChoice = Union[Literal["auto"], int]

LAZIER_FIELDS = ("delta",)
DIST_FIELDS = ("machines", "k_prime", "k_dprime", "epochs", "sigma_estimate")


class RunConfig(BaseModel):
    """Everything ``colsel select`` needs; flags map one-to-one onto fields."""

    model_config = ConfigDict(extra="forbid")

    matrix_path: Path
    candidates_path: Optional[Path] = None
    method: Method = "greedy"
    k: int = Field(ge=1)
    r: Optional[int] = Field(default=None, ge=1)
    delta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    machines: Optional[int] = Field(default=None, ge=1)
    k_prime: Optional[int] = Field(default=None, ge=1)
    k_dprime: Optional[int] = Field(default=None, ge=1)
    epochs: Optional[int] = Field(default=None, ge=1)
    sigma_estimate: Optional[float] = Field(default=None, gt=0.0)
    sketch_rows: Optional[DimChoice] = None
    pcps_cols: Optional[DimChoice] = None
    sample_cols: Optional[DimChoice] = None
    epsilon: float = Field(default=0.5, gt=0.0, lt=1.0)
    sketch_delta: float = Field(default=0.1, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)
    oracle: bool = False
    output_path: Path

    @field_validator("matrix_path", "candidates_path")
    @classmethod
    def _must_exist(cls, value: Optional[Path]) -> Optional[Path]:
        if value is not None and not value.is_file():
            raise ValueError(f"file not found: {value}")
        return value

    @field_validator("sketch_rows", "pcps_cols", "sample_cols")
    @classmethod
    def _positive_dim(cls, value: Optional[DimChoice]) -> Optional[DimChoice]:
        if isinstance(value, int) and value < 1:
            raise ValueError("sketch dimensions must be >= 1")
        return value

    @model_validator(mode="after")
    def _method_groups(self) -> "RunConfig":
        if self.method != "lazier":
            stray = [f for f in LAZIER_FIELDS if getattr(self, f) is not None]
            if stray:
                raise ValueError(f"{stray} only apply to method 'lazier'")
        elif self.delta is None:
            raise ValueError("method 'lazier' requires delta")
        if self.method != "dist":
            stray = [f for f in DIST_FIELDS if getattr(self, f) is not None]
            if stray:
                raise ValueError(f"{stray} only apply to method 'dist'")
        elif self.machines is None:
            raise ValueError("method 'dist' requires machines")
        elif self.sketch_rows is not None:
            raise ValueError("method 'dist' shares a column sketch of A; use pcps_cols or sample_cols")
        if self.sigma_estimate is not None and (self.k_prime is not None or self.k_dprime is not None):
            raise ValueError("give either sigma_estimate or explicit k_prime/k_dprime, not both")
        if self.pcps_cols is not None and self.sample_cols is not None:
            raise ValueError("pcps_cols and sample_cols are alternative column sketches; give one")
        return self

    @property
    def budget(self) -> int:
        return self.r if self.r is not None else self.k


class Timings(BaseModel):
    load: float = 0.0
    sketch: float = 0.0
    select: float = 0.0
    evaluate: float = 0.0
    oracle: float = 0.0


class OracleSummary(BaseModel):
    opt_set: List[int]
    opt_value: float
    sigma_min: float
    kappa: Optional[float] = Field(default=None, description="null when sigma_min is zero")
    pca_upper_bound: float
    subsets_evaluated: int


class RunReport(BaseModel):
    """The document written by ``colsel select``."""

    version: str
    config: RunConfig
    method: Method
    chosen: List[int]
    final_coverage: float = Field(ge=0.0)
    coverage_ratio: float = Field(ge=0.0, le=1.0 + 1e-10)
    frobenius_sq: float = Field(ge=0.0)
    result: Dict[str, Any]
    oracle: Optional[OracleSummary] = None
    timings: Timings

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"

    def write(self, path: Path) -> None:
        atomic_write_text(path, self.to_json())

    @classmethod
    def read(cls, path: Path) -> "RunReport":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


class CaseResult(BaseModel):
    name: str
    passed: bool
    measured: Optional[float] = None
    bound: Optional[float] = None
    margin: Optional[float] = None
    detail: Optional[str] = None


class SuiteReport(BaseModel):
    version: str
    suite: str
    seed: int
    trials: int
    passed: bool
    cases: List[CaseResult]
    wall_time: float

    def write(self, path: Path) -> None:
        atomic_write_text(path, self.model_dump_json(indent=2) + "\n")


def load_config_file(path: Path) -> Dict[str, Any]:
    """Raw field values from a JSON config file (or a previous report's ``config`` block)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except UnicodeDecodeError:
        raise ConfigError(f"{path} is not valid UTF-8 text") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object, got {type(data).__name__}")
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    return data
