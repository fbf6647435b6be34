"""Run configuration assembled from command-line flags and the environment."""

import os
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, model_validator

from model_core import ModelParams, make_params, params_for_ratio

COMMANDS = ("spectrum", "lineshape", "decay", "revival", "recurrence", "errors", "table1")
MODEL_COMMANDS = ("spectrum", "lineshape", "decay", "revival", "recurrence")
SWEEP_DEFAULTS = {
    "errors": (10.0, 200.0, 25),
    "table1": (20.0, 300.0, 25),
}


class GlobalSettings(BaseModel):
    """Process-wide settings, read from the environment."""
    log_level: str = "INFO"
    log_file: Optional[str] = None
    workers: int = Field(default=1, ge=1)


class ModelSection(BaseModel):
    """Model parameters as given on the command line; exactly one of w and r."""
    n: Optional[int] = None
    de: float = 1e-4
    w: Optional[float] = None
    r: Optional[float] = None
    eps0: float = 0.0
    hbar: float = 1.0

    @model_validator(mode="after")
    def _one_coupling(self):
        if self.w is not None and self.r is not None:
            raise ValueError("give either --w or --r, not both")
        return self

    def to_params(self) -> ModelParams:
        """Validated ModelParams; raises InvalidModelError."""
        if self.r is not None:
            return params_for_ratio(self.n, self.de, self.r, self.eps0, self.hbar)
        return make_params(self.n, self.de, self.w, self.eps0, self.hbar)


class TimeGridSettings(BaseModel):
    """Time sampling for decay and revival runs."""
    tmax: Optional[float] = Field(default=None, gt=0)
    steps: int = Field(default=2000, ge=2)
    period_multiple: int = Field(default=1, ge=1)
    window: float = Field(default=800.0, gt=0)
    m_digits: int = Field(default=1, ge=1)


class SweepSettings(BaseModel):
    """R grid for error sweeps and turning-point searches."""
    r_lo: float = Field(gt=0)
    r_hi: float = Field(gt=0)
    points: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if self.r_lo >= self.r_hi:
            raise ValueError(f"--r-lo ({self.r_lo}) must be below --r-hi ({self.r_hi})")
        return self


class RunConfig(BaseModel):
    """Everything one CLI invocation needs."""
    command: Literal["spectrum", "lineshape", "decay", "revival", "recurrence", "errors", "table1"]
    model: ModelSection
    time_grid: TimeGridSettings = Field(default_factory=TimeGridSettings)
    sweep: Optional[SweepSettings] = None
    out: Optional[str] = None
    energy_source: Literal["final", "exact"] = "final"
    spectrum_source: Literal["exact", "analytic"] = "exact"

    @model_validator(mode="after")
    def _required_for_command(self):
        if self.command in MODEL_COMMANDS:
            if self.model.n is None:
                raise ValueError(f"command '{self.command}' requires --n")
            if self.model.w is None and self.model.r is None:
                raise ValueError(f"command '{self.command}' requires --w or --r")
        if self.command == "errors" and self.model.n is None:
            raise ValueError("command 'errors' requires --n")
        return self


def _given(**values) -> dict:
    """Drop unset flags so that model defaults apply."""
    return {k: v for k, v in values.items() if v is not None}


def build_run_config(args) -> RunConfig:
    """
    Assemble a RunConfig from parsed arguments.

    Raises:
        ValueError: the flags do not form a valid configuration.
    """
    sweep = None
    if args.command in SWEEP_DEFAULTS:
        r_lo, r_hi, points = SWEEP_DEFAULTS[args.command]
        sweep = {
            "r_lo": r_lo if args.r_lo is None else args.r_lo,
            "r_hi": r_hi if args.r_hi is None else args.r_hi,
            "points": points if args.points is None else args.points,
        }
    data = {
        "command": args.command,
        "model": _given(n=args.n, de=args.de, w=args.w, r=args.r, eps0=args.eps0, hbar=args.hbar),
        "time_grid": _given(
            tmax=args.tmax,
            steps=args.steps,
            period_multiple=args.period_multiple,
            window=args.window,
            m_digits=args.m_digits,
        ),
        "sweep": sweep,
        "out": args.out,
        "energy_source": args.energy_source,
        "spectrum_source": args.spectrum_source,
    }
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"Invalid run configuration: {e}")


def load_global_settings() -> GlobalSettings:
    """
    Settings from the environment (a .env file is honoured):
    METASTABLE_LOG_LEVEL, METASTABLE_LOG_FILE, METASTABLE_WORKERS.
    """
    load_dotenv()
    data = {"log_level": os.getenv("METASTABLE_LOG_LEVEL", "INFO")}
    if os.getenv("METASTABLE_LOG_FILE"):
        data["log_file"] = os.getenv("METASTABLE_LOG_FILE")
    if os.getenv("METASTABLE_WORKERS"):
        data["workers"] = os.getenv("METASTABLE_WORKERS")
    try:
        return GlobalSettings.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"Invalid environment settings: {e}")
