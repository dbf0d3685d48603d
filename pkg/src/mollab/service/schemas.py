"""Pydantic request/response models for the HTTP service and the CLI client."""
from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class ErrorBody(BaseModel):
    error: str
    category: str
    exit_code: int


class ReproduceRequest(BaseModel):
    degrees: list[int] = Field(default=[5, 5, 2], min_length=3, max_length=3)


class ReproduceResponse(BaseModel):
    fixed_proportion: float
    target: float
    meets_target: bool
    optimized_value: float
    optimized_degrees: list[int]
    optimized_coefficients: list[float]
    condition_diagnostic: float
    dominates_fixed: bool
    config: dict[str, Any]


class OptimizeRequest(BaseModel):
    d1: int = Field(default=5, ge=0)
    d2: int = Field(default=5, ge=0)
    d3: int = Field(default=2, ge=0)
    theta1: float = 0.5
    theta2: float = 0.163
    theta3: float = 0.5


class OptimizeResponse(BaseModel):
    value: float
    coefficients: list[float]
    condition_diagnostic: float
    config: dict[str, Any]


class ScanRequest(BaseModel):
    theta2_grid: list[float] = Field(min_length=1)
    degrees: list[int] = Field(default=[5, 5, 2], min_length=3, max_length=3)
    theta13: float = 0.5


class ScanRow(BaseModel):
    theta2: float
    value: Optional[float] = None
    condition_diagnostic: float
    error: Optional[str] = None


class ScanResponse(BaseModel):
    rows: list[ScanRow]
    argmax_theta2: Optional[float]
    config: dict[str, Any]


class KernelEvalRequest(BaseModel):
    kernel: Literal["V", "V1", "F"]
    x: float = Field(gt=0)
    pole_kill: int = Field(default=2, ge=0)
    t_cutoff: float = Field(default=60.0, gt=0)
    step: float = Field(default=1.0 / 64, gt=0)
    sigma: Optional[float] = None  # explicit contour line, if any


class KernelEvalResponse(BaseModel):
    kernel: str
    x: float
    value: float
    config: dict[str, Any]


class CharacterInfo(BaseModel):
    index: int
    conductor: int
    parity: Literal["even", "odd"]
    order: int
    primitive: bool
    root_number_re: Optional[float] = None
    root_number_im: Optional[float] = None


class CharactersResponse(BaseModel):
    q: int
    phi: int
    phi_star: int
    phi_plus: int
    characters: list[CharacterInfo]


class LfunEvalRequest(BaseModel):
    q: int = Field(ge=1)
    index: int = Field(ge=0)  # index into the deterministic enumeration
    identity_ts: list[float] = Field(default=[1.0])


class LfunEvalResponse(BaseModel):
    q: int
    index: int
    L_re: float
    L_im: float
    L_abs_sq: float
    L_sq_double_sum: float
    epsilon_re: float
    epsilon_im: float
    identity_residuals: dict[str, float]
    config: dict[str, Any]


class SweepRequest(BaseModel):
    Q: float = Field(ge=20)
    stride: int = Field(default=1, ge=1)
    workers: int = Field(default=1, ge=1)
    overrides: dict[str, Any] = Field(default_factory=dict)


class PerModulusRow(BaseModel):
    q: int
    weight: float
    phi_plus: int
    s1_re: float
    s1_im: float
    s2: float
    n_nonzero: int


class SweepResponse(BaseModel):
    report: dict[str, Any]
    per_q: list[PerModulusRow]
    config: dict[str, Any]


class KloostermanBenchRequest(BaseModel):
    scale: int = Field(ge=2, le=64)
    count: int = Field(default=5, ge=1, le=100)
    seed: int = 0


class BenchRow(BaseModel):
    C: float
    D: float
    N: float
    R: float
    S: float
    form_abs: float
    bound: float
    ratio: float


class KloostermanBenchResponse(BaseModel):
    rows: list[BenchRow]
    weil: dict[str, Any]
    config: dict[str, Any]
