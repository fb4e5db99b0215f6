"""Run configuration: ``key = value`` files plus command-line overrides."""
import argparse
import logging
from pathlib import Path
from typing import Dict, List, Literal, Mapping, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from soliton_lab.config import settings
from soliton_lab.errors import ConfigurationError
from soliton_lab.services.mcf_evolver import SchemeConfig
from soliton_lab.services.experiments import PerturbationSpec

logger = logging.getLogger(__name__)


class RunConfig(BaseModel):
    """Flat parameter set shared by all subcommands; each uses the keys it needs."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    # Geometry
    n: int = Field(default=2, description="Dimension of the evolving graph")
    order: int = Field(default=9, description="Highest negative power of the tail series")
    symbolic: bool = Field(default=False, description="Generate series coefficients as polynomials in n")
    R: float = Field(default=1.0, gt=0.0, description="Start radius of the sample slope profile")
    phi0: float = Field(default=0.0, allow_inf_nan=False, description="Slope at R of the sample profile")
    r_max: float = Field(default=50.0, gt=0.0, description="Outer radius of profiles and wings")
    r_wing: float = Field(default=5.0, gt=0.0, description="Neck radius of the barrier wings")
    switch_slope: float = Field(default_factory=lambda: settings.switch_slope, ge=0.5, le=2.0)
    tol: float = Field(default_factory=lambda: settings.ode_tol, gt=0.0, le=1e-3)
    resample_step: float = Field(default_factory=lambda: settings.resample_step, gt=0.0)

    # Evolution
    scheme: Literal["explicit", "implicit"] = "explicit"
    cfl: float = Field(default_factory=lambda: settings.cfl, gt=0.0, le=0.25)
    dt: Optional[float] = Field(default=None, gt=0.0)
    newton_tol: float = Field(default_factory=lambda: settings.newton_tol, gt=0.0)
    newton_max_iters: int = Field(default_factory=lambda: settings.newton_max_iters, ge=1)
    h: float = Field(default=0.1, gt=0.0, description="Grid spacing")
    R_max: float = Field(default=60.0, gt=0.0, description="Truncation radius of the evolution domain")
    T: float = Field(default=50.0, ge=0.0, description="Evolution horizon")
    samples: int = Field(default=200, ge=1)
    initial: Literal["bowl", "sphere"] = "bowl"
    sphere_radius: float = Field(default=2.0, gt=0.0)

    # Experiments
    epsilon: float = Field(default_factory=lambda: settings.epsilon, gt=0.0)
    perturbation: Literal["compact-bump", "slow-decay"] = "compact-bump"
    amplitude: float = Field(default=1.0, allow_inf_nan=False)
    support: float = Field(default=3.0, gt=0.0)
    decay: float = Field(default=0.5, gt=0.0)
    catenoid_c: float = Field(default=25.0, gt=0.0)
    growth_C: float = Field(default=1.0, ge=0.0)
    growth_R_max: float = Field(default=4.0, gt=0.0)
    tau: float = Field(default=0.1, gt=0.0)

    output_dir: str = Field(default_factory=lambda: settings.output_dir)

    @field_validator("n")
    @classmethod
    def _dimension(cls, value: int) -> int:
        if value < 2:
            raise ValueError("n must be ≥ 2")
        return value

    @field_validator("order")
    @classmethod
    def _odd_order(cls, value: int) -> int:
        if value < 1 or value % 2 == 0 or value > 21:
            raise ValueError("order must be an odd integer in [1, 21]")
        return value

    @model_validator(mode="after")
    def _implicit_needs_dt(self):
        if self.scheme == "implicit" and self.dt is None:
            raise ValueError("dt is required when scheme = implicit")
        return self

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(
            mode=self.scheme,
            cfl=self.cfl,
            dt=self.dt,
            newton_tol=self.newton_tol,
            newton_max_iters=self.newton_max_iters,
        )

    def perturbation_spec(self) -> PerturbationSpec:
        return PerturbationSpec(
            kind=self.perturbation,
            amplitude=self.amplitude,
            support=self.support,
            decay=self.decay,
        )


def _violations(error: ValidationError) -> List[str]:
    messages = []
    for item in error.errors():
        key = ".".join(str(part) for part in item["loc"]) or "config"
        message = item["msg"].removeprefix("Value error, ")
        messages.append(f"{key}: {message}")
    return messages


def parse_config(path: Optional[Union[str, Path]] = None,
                 overrides: Optional[Mapping[str, object]] = None) -> RunConfig:
    """Read ``key = value`` lines from ``path`` and apply ``overrides`` on top.

    Raises:
        ConfigurationError: listing every violation, each prefixed with its key
    """
    values: Dict[str, object] = {}
    problems: List[str] = []
    if path is not None:
        if not Path(path).is_file():
            raise ConfigurationError(f"config file not found: {path}")
        for key, value in dotenv_values(path).items():
            if value is None:
                problems.append(f"{key}: missing value")
            else:
                values[key] = value
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    try:
        config = RunConfig.model_validate(values)
    except ValidationError as e:
        problems += _violations(e)
        config = None
    if problems:
        message = "invalid configuration:\n  " + "\n  ".join(problems)
        raise ConfigurationError(message, violations=problems)
    return config


def _dump_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config: RunConfig) -> str:
    """``key = value`` lines that :func:`parse_config` reads back to an equal config."""
    lines = [
        f"{key} = {_dump_value(value)}"
        for key, value in config.model_dump().items()
        if value is not None
    ]
    return "\n".join(lines) + "\n"


def build_parser(commands) -> argparse.ArgumentParser:
    """Subcommand positional, ``--config FILE`` and one ``--key`` flag per RunConfig field."""
    parser = argparse.ArgumentParser(
        prog="soliton-lab",
        description="Translating solitons of mean curvature flow: series, profiles, wings and stability runs",
    )
    parser.add_argument("subcommand", choices=sorted(commands))
    parser.add_argument("--config", help="plain-text file with one 'key = value' per line")
    for name, info in RunConfig.model_fields.items():
        parser.add_argument(f"--{name}", dest=name, default=None, metavar="VALUE", help=info.description)
    return parser
