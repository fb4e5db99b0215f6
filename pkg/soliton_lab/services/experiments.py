"""Desk-scale stability experiments for radial mean curvature flow.

Each experiment evolves perturbed data, measures the deviation from the exact
limit (the translating bowl U + t, or the plane) and checks that the evolving graph
stays between a pair of barriers: epsilon-shifted wings for the bowl, shifted
n-catenoids for the plane.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
import sympy
from pydantic import BaseModel, ConfigDict, Field

from soliton_lab.config import settings
from soliton_lab.errors import ArgumentError, ConfigurationError
from soliton_lab.services.catenoid import catenoid_barriers, neck_radius
from soliton_lab.services.mcf_evolver import (
    BoundarySpec,
    EvolutionState,
    RadialGrid,
    SchemeConfig,
    Trajectory,
    evolve,
)
from soliton_lab.services.soliton_profiles import HeightProfile, bowl_height, validate_dimension
from soliton_lab.services.wing_builder import WingPair, build_wing_pair, calibrate_shifts

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 200


class PerturbationSpec(BaseModel):
    """Initial deviation from the limit profile.

    ``compact-bump``: a * exp(1 - 1/(1 - (r/support)^2)) inside r < support, 0 outside.
    ``slow-decay``: a * (1 + r)^-decay.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["compact-bump", "slow-decay"] = "compact-bump"
    amplitude: float = Field(default=1.0, allow_inf_nan=False)
    support: float = Field(default=3.0, gt=0.0)
    decay: float = Field(default=0.5, gt=0.0)


def build_perturbation(spec: PerturbationSpec, r) -> np.ndarray:
    r_arr = np.asarray(r, dtype=float)
    if spec.kind == "slow-decay":
        return spec.amplitude * (1.0 + r_arr) ** (-spec.decay)
    x2 = (r_arr / spec.support) ** 2
    inside = x2 < 1.0
    out = np.zeros_like(r_arr)
    out[inside] = spec.amplitude * np.exp(1.0 - 1.0 / (1.0 - x2[inside]))
    return out


def hypothesis_radius(spec: PerturbationSpec, epsilon: float) -> float:
    """Smallest R0 with |perturbation| <= epsilon on [R0, inf)."""
    a = abs(spec.amplitude)
    if a <= epsilon:
        return 0.0
    if spec.kind == "slow-decay":
        return (a / epsilon) ** (1.0 / spec.decay) - 1.0
    level = math.log(epsilon / a)
    return spec.support * math.sqrt(1.0 - 1.0 / (1.0 - level))


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Deviation statistics of one run, one row per sampled time."""

    times: np.ndarray
    sup_dev: np.ndarray
    omega_count: np.ndarray
    omega_radius: np.ndarray
    barrier_violation: np.ndarray
    epsilon: float
    h: float
    parameters: Dict[str, object] = field(default_factory=dict)

    @property
    def barrier_violation_max(self) -> float:
        return float(np.max(self.barrier_violation))

    @property
    def T_star(self) -> Optional[float]:
        """First sampled time with sup_dev <= 2*epsilon."""
        hits = np.nonzero(self.sup_dev <= 2.0 * self.epsilon)[0]
        return float(self.times[hits[0]]) if len(hits) else None

    @property
    def converged(self) -> bool:
        return self.T_star is not None

    @property
    def rise_after_peak(self) -> float:
        """Largest increase of sup_dev between consecutive samples after its maximum."""
        tail = self.sup_dev[int(np.argmax(self.sup_dev)):]
        return float(max(np.max(np.diff(tail)), 0.0)) if len(tail) > 1 else 0.0

    @property
    def omega_after_T_star(self) -> int:
        """Largest omega_count at or after T_star; 0 when the run never converged."""
        if self.T_star is None:
            return 0
        return int(np.max(self.omega_count[self.times >= self.T_star]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.times,
            "sup_dev": self.sup_dev,
            "omega_count": self.omega_count,
            "barrier_violation": self.barrier_violation,
        })

    def summary_line(self) -> str:
        t_star = "none" if self.T_star is None else repr(self.T_star)
        return (
            f"T_star={t_star} sup_dev_final={self.sup_dev[-1]!r} "
            f"barrier_violation_max={self.barrier_violation_max!r}"
        )


def _sample_times(T: float, samples: int) -> np.ndarray:
    return np.linspace(0.0, T, samples + 1)[1:]


def _report(traj: Trajectory, reference: Callable[[float], np.ndarray],
            violation: Callable[[EvolutionState], float], epsilon: float,
            parameters: Dict[str, object]) -> StabilityReport:
    times, sup_dev, counts, radii, violations = [], [], [], [], []
    for state in traj.states:
        deviation = np.abs(state.u - reference(state.t))
        outside = deviation > 2.0 * epsilon
        times.append(state.t)
        sup_dev.append(float(np.max(deviation)))
        counts.append(int(np.count_nonzero(outside)))
        radii.append(float(state.grid.nodes[outside].max()) if np.any(outside) else 0.0)
        violations.append(violation(state))
    return StabilityReport(
        times=np.asarray(times),
        sup_dev=np.asarray(sup_dev),
        omega_count=np.asarray(counts, dtype=int),
        omega_radius=np.asarray(radii),
        barrier_violation=np.asarray(violations),
        epsilon=epsilon,
        h=traj.states[0].grid.h,
        parameters=parameters,
    )


def _wing_violation(state: EvolutionState, pair: WingPair, r_cut: float) -> float:
    r = state.grid.nodes
    mask = r > r_cut
    if not np.any(mask):
        return 0.0
    upper = pair.w_plus.evaluate(r[mask]) + state.t
    lower = pair.w_minus.evaluate(r[mask]) + state.t
    u = state.u[mask]
    return float(max(np.max(lower - u), np.max(u - upper)))


def check_barrier_ordering(traj: Trajectory, pair: WingPair, r_cut: Optional[float] = None) -> float:
    """Worst signed violation of W- + t <= u <= W+ + t over all samples, on r > r_cut.

    ``r_cut`` defaults to twice the wing neck radius. Nonpositive means ordered.
    """
    if not pair.calibrated:
        raise ArgumentError("barrier ordering needs a calibrated wing pair")
    if traj.states[0].n != pair.n:
        raise ArgumentError(f"trajectory dimension {traj.states[0].n} differs from wing dimension {pair.n}")
    r_cut = 2.0 * pair.R if r_cut is None else r_cut
    return max(_wing_violation(state, pair, r_cut) for state in traj.states)


def soliton_setting(n: int, epsilon: float, R_wing: float, r_max: float) -> Tuple[HeightProfile, WingPair]:
    """Bowl height and epsilon-calibrated wings covering [0, r_max]."""
    reach = max(r_max, 20.0 * max(R_wing, n - 1))
    bowl = bowl_height(n, reach)
    pair = calibrate_shifts(build_wing_pair(n, R_wing, reach), bowl, epsilon)
    return bowl, pair


def run_soliton_stability(n: int, pert: PerturbationSpec, epsilon: float, R_wing: float,
                          grid: RadialGrid, scheme: Optional[SchemeConfig], T: float,
                          samples: int = DEFAULT_SAMPLES,
                          setting: Optional[Tuple[HeightProfile, WingPair]] = None) -> StabilityReport:
    """Evolve U + pert and measure the return to the translating bowl.

    The wings are built with neck radius max(R_wing, R0), where R0 is the radius past
    which |pert| <= epsilon; ordering is checked on r > 2 * max(R_wing, R0).

    Raises:
        ConfigurationError: the perturbation exceeds epsilon at or beyond R_max/2
    """
    n = validate_dimension(n)
    if not grid.has_axis:
        raise ArgumentError("soliton stability runs on grids containing the axis")
    R0 = hypothesis_radius(pert, epsilon)
    bound = grid.R_max / 2.0
    if R0 >= bound:
        raise ConfigurationError(
            f"perturbation exceeds epsilon={epsilon} out to r={R0:.4f}, not inside R_max/2={bound}",
            violations=[f"perturbation must satisfy |pert| <= epsilon for r >= R0 with R0 < {bound}"],
        )
    wing_radius = max(R_wing, R0)
    if wing_radius > R_wing:
        logger.info(f"📏 Wing neck radius raised from {R_wing} to the hypothesis radius {wing_radius:.4f}")
    if setting is None or setting[1].R < wing_radius:
        setting = soliton_setting(n, epsilon, wing_radius, grid.R_max)
    bowl, pair = setting
    r = grid.nodes
    u_bowl = bowl.evaluate(r)
    perturbation = build_perturbation(pert, r)
    initial = EvolutionState(grid=grid, u=u_bowl + perturbation, t=0.0, n=n)

    edge_value, edge_pert = float(u_bowl[-1]), float(perturbation[-1])
    relaxation = settings.boundary_relaxation
    bc = BoundarySpec(outer=lambda t: edge_value + t + edge_pert * math.exp(-t / relaxation))

    logger.info(
        f"🚀 Soliton stability n={n} eps={epsilon} R_wing={pair.R} "
        f"R_max={grid.R_max} h={grid.h} T={T}"
    )
    traj = evolve(initial, bc, T, scheme, sample_times=_sample_times(T, samples))
    r_cut = 2.0 * pair.R
    report = _report(
        traj,
        reference=lambda t: u_bowl + t,
        violation=lambda state: _wing_violation(state, pair, r_cut),
        epsilon=epsilon,
        parameters={
            "n": n, "epsilon": epsilon, "R_wing": pair.R, "R_max": grid.R_max, "M": grid.M,
            "T": T, "C_plus": pair.C_plus, "C_minus": pair.C_minus,
        },
    )
    logger.info(f"✅ Soliton stability finished: {report.summary_line()}")
    return report


def run_plane_stability(n: int, pert: PerturbationSpec, catenoid_c: float, epsilon: float,
                        grid: RadialGrid, scheme: Optional[SchemeConfig], T: float,
                        samples: int = DEFAULT_SAMPLES) -> StabilityReport:
    """Evolve the perturbed plane with shifted catenoids as barriers.

    Raises:
        ArgumentError: n < 3, where catenoid ends are not asymptotically flat
        ConfigurationError: the perturbation exceeds epsilon beyond the catenoid neck
    """
    n = validate_dimension(n)
    if n < 3:
        raise ArgumentError(f"plane stability needs n >= 3, got n={n}")
    r0 = neck_radius(n, catenoid_c)
    if hypothesis_radius(pert, epsilon) > r0:
        raise ConfigurationError(f"perturbation exceeds epsilon={epsilon} beyond the catenoid neck r0={r0:.4f}")
    if 2.0 * r0 >= grid.R_max:
        raise ConfigurationError(f"catenoid neck r0={r0:.4f} leaves no comparison region inside R_max={grid.R_max}")

    r = grid.nodes
    mask = r > 2.0 * r0
    upper, lower = catenoid_barriers(n, catenoid_c, epsilon, r[mask])
    perturbation = build_perturbation(pert, r)
    initial = EvolutionState(grid=grid, u=perturbation, t=0.0, n=n)
    edge_pert = float(perturbation[-1])
    relaxation = settings.boundary_relaxation
    bc = BoundarySpec(outer=lambda t: edge_pert * math.exp(-t / relaxation))

    def violation(state: EvolutionState) -> float:
        u = state.u[mask]
        return float(max(np.max(lower - u), np.max(u - upper)))

    logger.info(f"🚀 Plane stability n={n} c={catenoid_c} eps={epsilon} R_max={grid.R_max} h={grid.h}")
    traj = evolve(initial, bc, T, scheme, sample_times=_sample_times(T, samples))
    zero = np.zeros_like(r)
    report = _report(
        traj,
        reference=lambda t: zero,
        violation=violation,
        epsilon=epsilon,
        parameters={"n": n, "epsilon": epsilon, "catenoid_c": catenoid_c, "R_max": grid.R_max, "M": grid.M, "T": T},
    )
    logger.info(f"✅ Plane stability finished: {report.summary_line()}")
    return report


def _sqrt(value):
    if isinstance(value, sympy.Basic):
        return sympy.sqrt(value)
    return math.sqrt(value)


@dataclass(frozen=True)
class ComparisonSphere:
    """Shrinking sphere touching the paraboloid C r^2 + 2Cn tau at radius r, time tau.

    Works with floats or sympy expressions.
    """

    C: object
    n: object
    tau: object
    r: object

    @property
    def center(self):
        return 1 / (2 * self.C) + self.C * (2 * self.n * self.tau + self.r ** 2)

    @property
    def radius_squared(self):
        return 2 * self.n * self.tau + self.r ** 2 + 1 / (4 * self.C ** 2)

    def lower_height(self, x, t):
        """Height of the lower cap over radius x at time t (radius^2 shrinks by 2n t)."""
        return self.center - _sqrt(self.radius_squared - 2 * self.n * t - x ** 2)


def comparison_sphere(C, n, tau, r) -> ComparisonSphere:
    return ComparisonSphere(C=C, n=n, tau=tau, r=r)


def quadratic_growth_series(C: float, grid: RadialGrid, scheme: Optional[SchemeConfig], tau: float,
                            n: int = 2, samples: int = 100) -> pd.DataFrame:
    """Per sampled time, max over nodes of u - (C r^2 + 2Cn t) for the flow from u0 = C r^2.

    The outer trace follows the comparison sphere touching the paraboloid at R_max.
    """
    n = validate_dimension(n)
    if C < 0:
        raise ArgumentError(f"C must be nonnegative, got {C}")
    r = grid.nodes
    R = grid.R_max
    if C > 0:
        outer = lambda t: comparison_sphere(C, n, t, R).lower_height(R, t)
    else:
        outer = lambda t: 0.0
    initial = EvolutionState(grid=grid, u=C * r ** 2, t=0.0, n=n)
    traj = evolve(initial, BoundarySpec(outer=outer), tau, scheme, sample_times=_sample_times(tau, samples))
    excess = [float(np.max(state.u - (C * r ** 2 + 2.0 * C * n * state.t))) for state in traj.states]
    return pd.DataFrame({"t": traj.times, "excess": excess})


def quadratic_growth_check(C: float, grid: RadialGrid, scheme: Optional[SchemeConfig], tau: float,
                           n: int = 2, samples: int = 100) -> float:
    """Max excess of the flow from C r^2 over the paraboloid C r^2 + 2Cn t on [0, tau]."""
    excess = float(quadratic_growth_series(C, grid, scheme, tau, n, samples)["excess"].max())
    logger.info(f"Quadratic growth C={C} tau={tau}: max excess {excess:.3e}")
    return excess


def truncation_robustness(n: int, pert: PerturbationSpec, epsilon: float, R_wing: float, h: float,
                          R_max: float, T: float, scheme: Optional[SchemeConfig] = None,
                          samples: int = DEFAULT_SAMPLES) -> Tuple[float, List[StabilityReport]]:
    """Uniform difference of sup_dev between runs on R_max and 2*R_max at equal h."""
    reports = []
    for radius in (R_max, 2.0 * R_max):
        grid = RadialGrid.with_spacing(radius, h)
        reports.append(run_soliton_stability(n, pert, epsilon, R_wing, grid, scheme, T, samples))
    short, long = reports
    if not np.allclose(short.times, long.times, rtol=0.0, atol=1e-12 * max(1.0, T)):
        raise ArgumentError("truncation runs were sampled at different times")
    difference = float(np.max(np.abs(short.sup_dev - long.sup_dev)))
    logger.info(f"Truncation robustness R_max={R_max} vs {2 * R_max}: max |delta s| = {difference:.3e}")
    return difference, reports
