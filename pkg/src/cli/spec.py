"""Validated description of one command-line run"""
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config import OUTPUT_DIR, SOLVER_CONFIG, STRIPE_CONFIG
from src.experiments.signals import EXPERIMENT_KINDS, SIGNAL_KINDS

COMMANDS = (
    "tv-denoise-1d",
    "tv-inpaint-1d",
    "tv-inpaint-2d",
    "l1-recover",
    "compare-naive-1d",
    "generate",
    "l1-study",
)
TV_COMMANDS = ("tv-denoise-1d", "tv-inpaint-1d", "tv-inpaint-2d", "compare-naive-1d")
DECOMPOSITIONS = ("stripes", "identity", "random-orthogonal", "svd")

# Per-command defaults for flags left unset
DEFAULT_ALPHA = {
    "tv-denoise-1d": 1.0,
    "tv-inpaint-1d": 1.0,
    "tv-inpaint-2d": 1e-2,
    "l1-recover": 0.005,
    "l1-study": 0.005,
}
DEFAULT_SUBSPACES = {"l1-recover": 5, "l1-study": 5}
DEFAULT_EXAMPLE = {
    "tv-denoise-1d": "step-1d",
    "tv-inpaint-1d": "ramp-1d",
    "compare-naive-1d": "tent-1d",
}


class RunSpec(BaseModel):
    """Flags and paths of a run, with command-dependent defaults filled in"""

    model_config = ConfigDict(extra="forbid")

    command: Literal[COMMANDS]
    signal: Optional[Path] = Field(None, description="1D signal, one value per line")
    mask: Optional[Path] = Field(None, description="0/1 mask in signal or image format")
    image: Optional[Path] = Field(None, description="2D image, CSV rows or ASCII PGM")
    operator: Optional[Path] = Field(None, description="Dense operator CSV for l1-recover")
    datum: Optional[Path] = Field(None, description="Datum signal for l1-recover")
    weights: Optional[Path] = Field(None, description="Positive l1 weights, one per coefficient")
    example: Optional[Literal[SIGNAL_KINDS]] = None
    kind: Optional[Literal[EXPERIMENT_KINDS]] = None

    alpha: Optional[float] = Field(None, ge=0.0)
    tau: Optional[float] = Field(None, gt=0.0)
    tol_projection: Optional[float] = Field(None, gt=0.0)
    tol_outer: Optional[float] = Field(None, ge=0.0)
    subspaces: Optional[int] = Field(None, ge=1)
    inner: Optional[List[int]] = None
    eta_iters: Optional[int] = Field(None, ge=1)
    stripe: Optional[int] = Field(None, ge=1)
    no_stripe: bool = False
    decomposition: Optional[Literal[DECOMPOSITIONS]] = None
    switch_after: Optional[int] = Field(None, ge=0)
    max_outer: Optional[int] = Field(None, ge=1)
    seed: int = 0
    parallel: bool = False
    splitting: bool = False
    baseline: bool = False
    timing: bool = True
    verbose: bool = False

    rows: int = Field(200, ge=1)
    cols: int = Field(40, ge=1)
    size: Optional[int] = Field(None, ge=16)
    length: Optional[int] = Field(None, ge=4)
    seeds: int = Field(10, ge=1)

    lambda0: float = Field(1.0, gt=0.0)
    naive_tau: float = Field(0.5, gt=0.0)
    naive_iters: int = Field(500, ge=1)
    eps: float = Field(0.01, gt=0.0)

    output_dir: Path = Field(default_factory=lambda: OUTPUT_DIR)

    @field_validator("inner", mode="before")
    @classmethod
    def parse_inner(cls, value):
        """Accept an int, a comma list "5,5,10" or a sequence"""
        if value is None or isinstance(value, list):
            return value
        if isinstance(value, int):
            return [value]
        if isinstance(value, str):
            try:
                return [int(v) for v in value.split(",") if v.strip()]
            except ValueError as e:
                raise ValueError(f"--inner must be an int or a comma list of ints, got {value!r}") from e
        return list(value)

    @field_validator("inner")
    @classmethod
    def positive_inner(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (not value or min(value) < 1):
            raise ValueError("inner iteration counts must be >= 1")
        return value

    @field_validator("signal", "mask", "image", "operator", "datum", "weights")
    @classmethod
    def file_exists(cls, value: Optional[Path]) -> Optional[Path]:
        if value is not None and not value.is_file():
            raise ValueError(f"input file {value} does not exist")
        return value

    @model_validator(mode="after")
    def fill_defaults(self) -> "RunSpec":
        command = self.command
        tv = command in TV_COMMANDS

        if command == "generate" and self.kind is None:
            raise ValueError("generate needs --kind")
        if command == "tv-inpaint-2d" and (self.image is None) != (self.mask is None):
            raise ValueError("tv-inpaint-2d needs both --image and --mask, or neither")
        if command == "tv-inpaint-1d" and self.signal is not None and self.mask is None:
            raise ValueError("tv-inpaint-1d with --signal needs --mask")
        if command == "l1-recover" and (self.operator is None) != (self.datum is None):
            raise ValueError("l1-recover needs both --operator and --datum, or neither")
        if self.weights is not None and command != "l1-recover":
            raise ValueError("--weights applies to l1-recover only")

        if tv:
            if self.decomposition not in (None, "stripes"):
                raise ValueError(f"TV problems decompose into stripes, not {self.decomposition}")
            if self.switch_after is not None:
                raise ValueError("--switch-after applies to l1 decompositions only")
            self.decomposition = "stripes"
            if self.no_stripe:
                if self.stripe is not None:
                    raise ValueError("--stripe and --no-stripe are mutually exclusive")
            elif self.stripe is None:
                self.stripe = STRIPE_CONFIG["half_width"]
        else:
            if self.stripe is not None or self.no_stripe:
                raise ValueError("--stripe and --no-stripe apply to TV problems only")
            if self.decomposition == "stripes":
                raise ValueError("l1 problems use identity, random-orthogonal or svd decompositions")
            self.decomposition = self.decomposition or "identity"

        if self.alpha is None:
            self.alpha = 1.0 / (2.0 * self.lambda0) if command == "compare-naive-1d" else DEFAULT_ALPHA.get(command)
        if self.subspaces is None:
            self.subspaces = DEFAULT_SUBSPACES.get(command, 2)
        if self.inner is None:
            self.inner = [SOLVER_CONFIG["inner_tv"] if tv else SOLVER_CONFIG["inner_l1"]]
        if self.example is None and self.signal is None:
            self.example = DEFAULT_EXAMPLE.get(command)
        if command == "l1-study":
            self.max_outer = self.max_outer or 50
            self.eta_iters = self.eta_iters or 20
            self.switch_after = 4 if self.switch_after is None else self.switch_after
        return self
