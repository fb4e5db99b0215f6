"""Application configuration management."""
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Settings(BaseSettings):
    """Laboratory settings."""

    model_config = SettingsConfigDict(
        env_prefix="SOLITON_LAB_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Output
    output_dir: str = Field(
        default="./runs",
        description="Default directory for CSV data, plot scripts and run manifests"
    )

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")

    # ODE integration
    ode_tol: float = Field(
        default=1e-12,
        gt=0.0,
        le=1e-3,
        description="Per-step tolerance of the embedded Runge-Kutta integrator"
    )
    resample_step: float = Field(
        default=0.01,
        gt=0.0,
        description="Spacing of the uniform resample grid handed to downstream consumers"
    )
    origin_start_factor: float = Field(
        default=1e-3,
        gt=0.0,
        description="The bowl integration starts at r_start = origin_start_factor * n"
    )
    series_order_cap: int = Field(
        default=21,
        ge=1,
        description="Highest series order generated by the exact expansion"
    )

    # Wings
    switch_slope: float = Field(
        default=1.0,
        ge=0.5,
        le=2.0,
        description="Graph slope at which the axis chart hands off to the graph chart"
    )
    arc_step: float = Field(default=1e-3, gt=0.0, description="Max step of the inner-arc integration")
    arc_budget: int = Field(default=200000, ge=10, description="Step budget of the inner arc per side")
    tail_tolerance: float = Field(
        default=1e-6,
        gt=0.0,
        description="Accepted change of an asymptotic offset between r_max/2 and r_max"
    )
    handoff_tolerance: float = Field(
        default=1e-7,
        gt=0.0,
        description="Accepted height/slope mismatch between the arc and the graph chart"
    )

    # Evolution
    cfl: float = Field(default=0.25, gt=0.0, le=0.25, description="Explicit step factor, dt = cfl * h^2")
    newton_tol: float = Field(default=1e-10, gt=0.0, description="Implicit step convergence threshold")
    newton_max_iters: int = Field(default=25, ge=1, description="Implicit step iteration cap")

    # Experiments
    epsilon: float = Field(default=0.05, gt=0.0, description="Barrier shift; convergence threshold is 2*epsilon")
    boundary_relaxation: float = Field(
        default=1.0,
        gt=0.0,
        description="Time scale on which the outer Dirichlet data forgets the initial perturbation"
    )


# Global settings instance
settings = Settings()
