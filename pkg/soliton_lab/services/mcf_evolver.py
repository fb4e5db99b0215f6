"""Rotationally symmetric mean curvature flow of graphs on a radial grid.

    u_t = u_rr / (1 + u_r^2) + (n-1) u_r / r

is discretized in flux form on cells [r_{i-1/2}, r_{i+1/2}],

    u_t = sqrt(1 + p^2) * n [r+^(n-1) g(A) - r-^(n-1) g(B)] / (r+^n - r-^n),

with g(s) = s / sqrt(1 + s^2), A and B the one-sided slopes and p their mean. The
axis node uses the ghost value u_{-1} = u_1, giving 2n (u_1 - u_0) / h^2. The outer
node (and the inner node of an annulus) carries Dirichlet data.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.linalg import solve_banded

from soliton_lab.config import settings
from soliton_lab.errors import (
    ArgumentError,
    ConfigurationError,
    EvolutionAborted,
    IntegrationBlowupError,
    SolitonLabError,
    StepError,
)
from soliton_lab.services import output_writer

logger = logging.getLogger(__name__)

BoundaryTrace = Callable[[float], float]


@dataclass(frozen=True)
class RadialGrid:
    """Uniform nodes r_i = r_min + i*h, i = 0..M, h = (R_max - r_min)/M."""

    R_max: float
    M: int
    r_min: float = 0.0

    def __post_init__(self):
        if self.M < 16:
            raise ArgumentError(f"grid needs M >= 16 cells, got {self.M}")
        if not 0.0 <= self.r_min < self.R_max:
            raise ArgumentError(f"grid needs 0 <= r_min < R_max, got [{self.r_min}, {self.R_max}]")

    @property
    def h(self) -> float:
        return (self.R_max - self.r_min) / self.M

    @property
    def nodes(self) -> np.ndarray:
        return self.r_min + self.h * np.arange(self.M + 1, dtype=float)

    @property
    def has_axis(self) -> bool:
        return self.r_min == 0.0

    @classmethod
    def with_spacing(cls, R_max: float, h: float, r_min: float = 0.0) -> "RadialGrid":
        return cls(R_max=R_max, M=int(round((R_max - r_min) / h)), r_min=r_min)


@dataclass(frozen=True, eq=False)
class EvolutionState:
    grid: RadialGrid
    u: np.ndarray
    t: float
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ArgumentError(f"n must be an integer >= 2, got {self.n!r}")
        if np.shape(self.u) != (self.grid.M + 1,):
            raise ArgumentError(f"state has {np.size(self.u)} values for {self.grid.M + 1} nodes")
        if not np.all(np.isfinite(self.u)):
            raise IntegrationBlowupError(f"non-finite height at t={self.t}")

    @classmethod
    def sample(cls, grid: RadialGrid, n: int, profile: Callable[[np.ndarray], np.ndarray],
               t: float = 0.0) -> "EvolutionState":
        return cls(grid=grid, u=np.asarray(profile(grid.nodes), dtype=float), t=t, n=n)


@dataclass(frozen=True)
class BoundarySpec:
    """Dirichlet traces. ``inner`` is used only on annular grids (r_min > 0);
    on grids containing the axis the symmetry condition u_r(0) = 0 applies."""

    outer: BoundaryTrace
    inner: Optional[BoundaryTrace] = None

    @classmethod
    def constant(cls, outer: float, inner: Optional[float] = None) -> "BoundarySpec":
        return cls(
            outer=lambda t: outer,
            inner=None if inner is None else (lambda t: inner),
        )

    @classmethod
    def translating(cls, outer: float, inner: Optional[float] = None) -> "BoundarySpec":
        """Traces of a unit-speed translator: value + t."""
        return cls(
            outer=lambda t: outer + t,
            inner=None if inner is None else (lambda t: inner + t),
        )

    def shifted(self, offset: float) -> "BoundarySpec":
        inner = self.inner
        return BoundarySpec(
            outer=lambda t: self.outer(t) + offset,
            inner=None if inner is None else (lambda t: inner(t) + offset),
        )


class SchemeConfig(BaseModel):
    """Time-stepping choice for :func:`evolve`."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Literal["explicit", "implicit"] = "explicit"
    cfl: float = Field(default_factory=lambda: settings.cfl, gt=0.0, le=0.25)
    dt: Optional[float] = Field(default=None, gt=0.0)
    newton_tol: float = Field(default_factory=lambda: settings.newton_tol, gt=0.0)
    newton_max_iters: int = Field(default_factory=lambda: settings.newton_max_iters, ge=1)

    @model_validator(mode="after")
    def _implicit_needs_dt(self):
        if self.mode == "implicit" and self.dt is None:
            raise ValueError("implicit mode needs a fixed dt")
        return self


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled states of one run; ``diagnostics`` collects step statistics."""

    times: List[float]
    states: List[EvolutionState]
    steps: int
    dt: float
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def final(self) -> EvolutionState:
        return self.states[-1]


def _check_boundary(state: EvolutionState, bc: BoundarySpec) -> None:
    if not state.grid.has_axis and bc.inner is None:
        raise ArgumentError("annular grids need an inner Dirichlet trace")


def _flux(s: np.ndarray) -> np.ndarray:
    return s / np.sqrt(1.0 + s * s)


def _operator(u: np.ndarray, grid: RadialGrid, n: int) -> np.ndarray:
    """Discrete operator at every node; the last (and an annulus' first) entry is
    meaningless and overwritten by callers."""
    h = grid.h
    r = grid.nodes
    out = np.zeros_like(u)

    a = (u[2:] - u[1:-1]) / h
    b = (u[1:-1] - u[:-2]) / h
    p = 0.5 * (a + b)
    r_plus = r[1:-1] + 0.5 * h
    r_minus = r[1:-1] - 0.5 * h
    m = n - 1
    divergence = n * (r_plus ** m * _flux(a) - r_minus ** m * _flux(b)) / (r_plus ** n - r_minus ** n)
    out[1:-1] = np.sqrt(1.0 + p * p) * divergence

    if grid.has_axis:
        out[0] = 2.0 * n * (u[1] - u[0]) / (h * h)
    return out


def radial_rhs(state: EvolutionState) -> np.ndarray:
    """Right-hand side at every node; Dirichlet nodes get 0."""
    out = _operator(state.u, state.grid, state.n)
    out[-1] = 0.0
    if not state.grid.has_axis:
        out[0] = 0.0
    return out


def explicit_dt_limit(grid: RadialGrid, n: int, cfl: Optional[float] = None) -> float:
    """Largest forward Euler step keeping the update monotone.

    Interior nodes need dt <= cfl*h^2; the axis node needs dt <= h^2/(2n).
    """
    cfl = settings.cfl if cfl is None else cfl
    if not 0.0 < cfl <= 0.25:
        raise ConfigurationError(f"cfl must lie in (0, 0.25], got {cfl}")
    factor = min(cfl, 1.0 / (2 * n)) if grid.has_axis else cfl
    return factor * grid.h ** 2


def _apply_boundary(u: np.ndarray, grid: RadialGrid, bc: BoundarySpec, t: float) -> np.ndarray:
    u[-1] = bc.outer(t)
    if not grid.has_axis:
        u[0] = bc.inner(t)
    return u


def step_explicit(state: EvolutionState, bc: BoundarySpec, dt: float,
                  cfl: Optional[float] = None) -> EvolutionState:
    """Forward Euler step; refuses steps beyond :func:`explicit_dt_limit`."""
    _check_boundary(state, bc)
    limit = explicit_dt_limit(state.grid, state.n, cfl)
    if not 0.0 < dt <= limit * (1.0 + 1e-12):
        raise ConfigurationError(
            f"explicit step dt={dt:.6g} violates the monotonicity limit {limit:.6g}",
            violations=[f"dt must lie in (0, {limit:.6g}] for h={state.grid.h:.6g}, n={state.n}"],
        )
    u = state.u + dt * radial_rhs(state)
    t = state.t + dt
    return replace(state, u=_apply_boundary(u, state.grid, bc, t), t=t)


def _unknowns(grid: RadialGrid) -> slice:
    return slice(0 if grid.has_axis else 1, grid.M)


def step_implicit(state: EvolutionState, bc: BoundarySpec, dt: float,
                  newton_tol: Optional[float] = None,
                  newton_max_iters: Optional[int] = None) -> EvolutionState:
    """Backward Euler step solved by damped Newton.

    The tridiagonal Jacobian is assembled column-wise by finite differences, three
    interleaved columns per evaluation, and solved with a banded LU.

    Raises:
        StepError: the residual did not reach ``newton_tol`` within the iteration cap
    """
    _check_boundary(state, bc)
    if not dt > 0:
        raise ArgumentError(f"dt must be positive, got {dt}")
    newton_tol = settings.newton_tol if newton_tol is None else newton_tol
    newton_max_iters = settings.newton_max_iters if newton_max_iters is None else newton_max_iters

    grid, n = state.grid, state.n
    t = state.t + dt
    free = _unknowns(grid)
    v = _apply_boundary(state.u.copy(), grid, bc, t)

    def residual(w: np.ndarray) -> np.ndarray:
        return (w - state.u - dt * _operator(w, grid, n))[free]

    f = residual(v)
    norm = float(np.max(np.abs(f)))
    iterations = 0
    while norm > newton_tol:
        if iterations >= newton_max_iters:
            raise StepError(
                f"Newton did not converge in {newton_max_iters} iterations at t={t:.6g}",
                last_residual=norm,
            )
        iterations += 1

        size = f.size
        offset = free.start
        bands = np.zeros((3, size))
        eps = np.sqrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(v[free]))
        for color in range(3):
            columns = np.arange(color, size, 3)
            bumped = v.copy()
            bumped[offset + columns] += eps[columns]
            delta = residual(bumped) - f
            for shift in (-1, 0, 1):
                rows = columns + shift
                ok = (rows >= 0) & (rows < size)
                bands[1 + shift, columns[ok]] = delta[rows[ok]] / eps[columns[ok]]
        correction = solve_banded((1, 1), bands, -f)

        damping = 1.0
        while True:
            trial = v.copy()
            trial[free] += damping * correction
            f_trial = residual(trial)
            trial_norm = float(np.max(np.abs(f_trial)))
            if trial_norm < norm or damping < 1e-3:
                break
            damping *= 0.5
        v, f, norm = trial, f_trial, trial_norm
        if not np.isfinite(norm):
            raise StepError(f"Newton iterate became non-finite at t={t:.6g}", last_residual=norm)

    return replace(state, u=v, t=t)


def evolve(initial: EvolutionState, bc: BoundarySpec, T: float, scheme: Optional[SchemeConfig] = None,
           sample_times: Optional[Sequence[float]] = None,
           observer: Optional[Callable[[EvolutionState], None]] = None) -> Trajectory:
    """Step from ``initial`` over [t0, t0 + T].

    A requested sample time is served by the first completed step at or after it.
    The initial state is always the first sample; ``observer`` sees every sample.

    Raises:
        EvolutionAborted: a step failed; the partial trajectory is attached
    """
    scheme = scheme or SchemeConfig()
    if not T >= 0:
        raise ArgumentError(f"horizon must be nonnegative, got {T}")
    _check_boundary(initial, bc)

    t0 = initial.t
    requested = sorted(float(s) for s in (sample_times if sample_times is not None else [T]) if 0 < s <= T)
    times, states = [t0], [initial]
    if observer:
        observer(initial)
    if T == 0:
        return Trajectory(times=times, states=states, steps=0, dt=0.0)

    if scheme.mode == "explicit":
        limit = explicit_dt_limit(initial.grid, initial.n, scheme.cfl)
        if scheme.dt is not None and scheme.dt > limit:
            raise ConfigurationError(f"explicit dt={scheme.dt:.6g} exceeds the monotonicity limit {limit:.6g}")
        dt_max = scheme.dt or limit
    else:
        dt_max = scheme.dt
    steps = max(1, math.ceil(T / dt_max - 1e-9))
    dt = T / steps

    state = initial
    pending = 0
    diagnostics = {"steps": 0}
    for k in range(1, steps + 1):
        try:
            if scheme.mode == "explicit":
                state = step_explicit(state, bc, dt, cfl=scheme.cfl)
            else:
                state = step_implicit(state, bc, dt, scheme.newton_tol, scheme.newton_max_iters)
        except (ConfigurationError, ArgumentError):
            raise
        except SolitonLabError as e:
            partial = Trajectory(times=times, states=states, steps=k - 1, dt=dt, diagnostics=diagnostics)
            logger.error(f"Evolution aborted at step {k}: {e}")
            raise EvolutionAborted(f"evolution aborted at t={state.t:.6g}: {e}", partial, e) from e
        state = replace(state, t=t0 + k * dt)
        diagnostics["steps"] = k

        while pending < len(requested) and requested[pending] <= k * dt * (1.0 + 1e-12):
            if times[-1] != state.t:
                times.append(state.t)
                states.append(state)
                if observer:
                    observer(state)
            pending += 1

    logger.debug(f"Evolved {steps} {scheme.mode} steps of dt={dt:.4g} to t={state.t:.6g}")
    return Trajectory(times=times, states=states, steps=steps, dt=dt, diagnostics=diagnostics)


def shrinking_sphere_height(R: float, n: int, r, t: float) -> np.ndarray:
    """Lower cap of the sphere of radius sqrt(R^2 - 2nt) centred on the axis."""
    return -np.sqrt(R * R - 2.0 * n * t - np.asarray(r, dtype=float) ** 2)


def trajectory_frame(state: EvolutionState) -> pd.DataFrame:
    return pd.DataFrame({"r": state.grid.nodes, "u": state.u})


def write_trajectory(traj: Trajectory, directory, parameters: Optional[Dict[str, object]] = None) -> Path:
    """One ``r,u`` CSV per sample plus a manifest listing times and files."""
    directory = output_writer.ensure_dir(directory)
    files = []
    for k, state in enumerate(traj.states):
        name = f"sample_{k:04d}.csv"
        output_writer.write_csv(trajectory_frame(state), directory / name)
        files.append((state.t, name))
    lines = [f"sample t={t!r} file={name}" for t, name in files]
    return output_writer.write_manifest(directory, parameters or {}, [name for _, name in files], lines)
