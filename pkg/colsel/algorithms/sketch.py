"""
Randomized compression of the selection instance.

- gaussian-rows: left-multiply A and B by G / sqrt(d), G with N(0, 1) entries.
  Preserves f_A(S) for all small S once d ~ k log(n / (delta * eps)) / eps^2.
- pcps-cols: A R with R an n_A x n' matrix of independent +-sqrt(1/n')
  entries (projection-cost preserving sketch; only A is compressed).
- column-sample: n' columns of A drawn uniformly without replacement and
  rescaled by sqrt(n_A / n'), a cheap stand-in for the PCPS when the sketch
  has to be shipped to many workers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from ..config import get_settings
from ..errors import DimensionMismatchError, InvalidParameterError
from ..utils import substream
from .matcore import ColumnMatrix

logger = logging.getLogger(__name__)

SketchKind = Literal["gaussian-rows", "pcps-cols", "column-sample"]
SKETCH_KINDS = ("gaussian-rows", "pcps-cols", "column-sample")


@dataclass(frozen=True)
class SketchSpec:
    kind: SketchKind
    target_dim: int
    epsilon: float = 0.5
    delta: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SKETCH_KINDS:
            raise InvalidParameterError(f"unknown sketch kind {self.kind!r}; expected one of {SKETCH_KINDS}")
        if self.target_dim < 1:
            raise InvalidParameterError(f"target_dim must be >= 1, got {self.target_dim}")
        if not 0.0 < self.epsilon < 1.0 or not 0.0 < self.delta < 1.0:
            raise InvalidParameterError("epsilon and delta must lie in (0, 1)")
        if self.seed < 0:
            raise InvalidParameterError("seed must be non-negative")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "target_dim": self.target_dim, "epsilon": self.epsilon,
                "delta": self.delta, "seed": self.seed}


@dataclass(frozen=True)
class SketchedPair:
    a_sketched: ColumnMatrix
    b_sketched: Optional[ColumnMatrix]
    spec: SketchSpec


def _require_kind(spec: SketchSpec, kind: str) -> None:
    if spec.kind != kind:
        raise InvalidParameterError(f"expected a {kind} sketch spec, got {spec.kind}")


def gaussian_rows(a: ColumnMatrix, b: ColumnMatrix, spec: SketchSpec,
                  projector: Optional[np.ndarray] = None) -> SketchedPair:
    """
    Row-compress A and B with the same Gaussian matrix.

    ``projector`` replaces the random G (d x m) when given, which lets tests
    pin the transform.
    """
    _require_kind(spec, "gaussian-rows")
    if a.rows != b.rows:
        raise DimensionMismatchError(f"A has {a.rows} rows but B has {b.rows}")
    d = spec.target_dim
    if projector is None:
        g = substream(spec.seed, "gaussian-rows").standard_normal((d, a.rows))
    else:
        g = np.asarray(projector, dtype=np.float64)
        if g.shape != (d, a.rows):
            raise DimensionMismatchError(f"projector must be {d}x{a.rows}, got {g.shape}")
    g = g / math.sqrt(d)
    logger.debug(f"Gaussian row sketch {a.rows} -> {d} rows")
    return SketchedPair(
        a_sketched=ColumnMatrix(a.left_multiply(g)),
        b_sketched=ColumnMatrix(b.left_multiply(g)),
        spec=spec,
    )


def pcps_cols(a: ColumnMatrix, spec: SketchSpec) -> SketchedPair:
    """A R with Rademacher R scaled by sqrt(1/n')."""
    _require_kind(spec, "pcps-cols")
    n_prime = spec.target_dim
    rng = substream(spec.seed, "pcps-cols")
    signs = rng.integers(0, 2, size=(a.cols, n_prime), dtype=np.int8) * 2 - 1
    r = signs.astype(np.float64) * math.sqrt(1.0 / n_prime)
    logger.debug(f"PCPS column sketch {a.cols} -> {n_prime} columns")
    return SketchedPair(a_sketched=ColumnMatrix(a.right_multiply(r)), b_sketched=None, spec=spec)


def column_sample(a: ColumnMatrix, spec: SketchSpec) -> SketchedPair:
    """Uniform column sample of A, rescaled so that squared norms are unbiased."""
    _require_kind(spec, "column-sample")
    n_prime = min(spec.target_dim, a.cols)
    rng = substream(spec.seed, "column-sample")
    idx = np.sort(rng.choice(a.cols, size=n_prime, replace=False))
    sampled = a.submatrix(int(j) for j in idx).to_dense() * math.sqrt(a.cols / n_prime)
    return SketchedPair(a_sketched=ColumnMatrix(sampled), b_sketched=None, spec=spec)


def apply_sketch(a: ColumnMatrix, b: ColumnMatrix, spec: SketchSpec) -> Tuple[ColumnMatrix, ColumnMatrix]:
    """Sketch according to ``spec.kind``; returns the (A, B) pair selection should run on."""
    if spec.kind == "gaussian-rows":
        pair = gaussian_rows(a, b, spec)
        return pair.a_sketched, pair.b_sketched
    if spec.kind == "pcps-cols":
        return pcps_cols(a, spec).a_sketched, b
    return column_sample(a, spec).a_sketched, b


def recommend_dims(k: int, n: int, epsilon: float, delta: float,
                   gaussian_constant: Optional[float] = None,
                   pcps_constant: Optional[float] = None) -> Tuple[int, int]:
    """
    Target dimensions (d, n') for the Gaussian and PCPS sketches.

    d  = ceil(C_g * k * ln(n / (delta * eps)) / eps^2)
    n' = ceil(C_p * (k + ln(1 / delta)) / eps^2)

    Only the asymptotic form is known, so C_g and C_p default to the
    configured constants (1.0 unless overridden).
    """
    if k < 1 or n < 1:
        raise InvalidParameterError("k and n must be >= 1")
    if not 0.0 < epsilon < 1.0 or not 0.0 < delta < 1.0:
        raise InvalidParameterError("epsilon and delta must lie in (0, 1)")
    settings = get_settings()
    c_g = settings.gaussian_constant if gaussian_constant is None else gaussian_constant
    c_p = settings.pcps_constant if pcps_constant is None else pcps_constant
    d = math.ceil(c_g * k * math.log(n / (delta * epsilon)) / epsilon ** 2)
    n_prime = math.ceil(c_p * (k + math.log(1.0 / delta)) / epsilon ** 2)
    return max(1, d), max(1, n_prime)
