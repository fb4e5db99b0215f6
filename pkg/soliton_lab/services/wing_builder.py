"""Winglike translators outside a ball of radius R.

Near the neck the surface is vertical over the circle r = R, so it is written as
r = h(y) over the axis, with

    h'' = ((n-1)/h - h') (1 + h'^2),    h(0) = R, h'(0) = 0.

Once the graph slope 1/|h'| is moderate on a side, the state (r, 1/h') is handed to
the radial slope equation and continued as a graph. The y > 0 side gives the upper
branch, the y < 0 side the lower branch.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from soliton_lab.config import settings
from soliton_lab.errors import ArgumentError, ConsistencyError, GeometryError, TailError
from soliton_lab.services.soliton_profiles import (
    HeightProfile,
    PhiProfile,
    height_from_phi,
    integrate_phi,
    translator_residual,
    uniform_grid,
    validate_dimension,
)

logger = logging.getLogger(__name__)

# The arc runs past each handoff until the graph slope reaches this fraction of
# the handoff slope; the stretch in between is checked in both charts.
_OVERLAP_FACTOR = 0.8
_OVERLAP_SAMPLES = 8
_COLLAPSE_FRACTION = 1e-3
# The first unit past each handoff is steep on the upper side; residuals there are
# taken on a finer window than on the rest of the branch.
_NEAR_ZONE = 1.0
_NEAR_STEP = 1e-4
_FAR_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class InnerArc:
    """Axis chart r = h(y) between the two handoff points, y ascending.

    ``*_handoff`` are (y, h, h') at the switch to the graph chart; ``*_overlap``
    holds (y, h, h') rows beyond it, used only for the consistency check.
    """

    n: int
    R: float
    y: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    upper_handoff: Tuple[float, float, float]
    lower_handoff: Tuple[float, float, float]
    upper_overlap: np.ndarray = field(repr=False)
    lower_overlap: np.ndarray = field(repr=False)

    def curvature(self) -> np.ndarray:
        """h'' along the arc."""
        return ((self.n - 1) / self.h - self.dh) * (1.0 + self.dh ** 2)


@dataclass(frozen=True, eq=False)
class WingPair:
    """The two graphical branches of a wing and their calibration against the bowl."""

    n: int
    R: float
    inner_arc: InnerArc
    upper_branch: HeightProfile
    lower_branch: HeightProfile
    upper_phi: PhiProfile = field(repr=False)
    lower_phi: PhiProfile = field(repr=False)
    shifts: Tuple[float, float] = (0.0, 0.0)
    C_plus: Optional[float] = None
    C_minus: Optional[float] = None
    epsilon: Optional[float] = None

    @property
    def upper_switch(self) -> float:
        return self.upper_branch.r_min

    @property
    def lower_switch(self) -> float:
        return self.lower_branch.r_min

    @property
    def w_plus(self) -> HeightProfile:
        """Upper barrier: the lower branch raised by s+."""
        return self.lower_branch.shifted(self.shifts[0])

    @property
    def w_minus(self) -> HeightProfile:
        """Lower barrier: the upper branch moved by s-."""
        return self.upper_branch.shifted(self.shifts[1])

    @property
    def calibrated(self) -> bool:
        return self.epsilon is not None


def _axis_rhs(n: int):
    m = n - 1

    def rhs(y, state):
        h, p = state
        return [p, (m / h - p) * (1.0 + p * p)]

    return rhs


def _handoff_slope(n: int, switch_slope: float, upper: bool):
    """Graph slope at which a side leaves the axis chart, as a function of h.

    On the upper side 1/h' stays near h/(n-1), so that side switches once the
    slope is within a factor 2 of it.
    """
    m = n - 1
    if upper:
        return lambda h: max(switch_slope, 2.0 * h / m)
    return lambda h: switch_slope


def _integrate_side(n: int, R: float, budget: int, step: float, switch_slope: float, upper: bool):
    threshold = _handoff_slope(n, switch_slope, upper)
    collapse = _COLLAPSE_FRACTION * R

    def handoff(y, state):
        return abs(state[1]) * threshold(state[0]) - 1.0

    def overlap_end(y, state):
        return abs(state[1]) * _OVERLAP_FACTOR * threshold(state[0]) - 1.0

    def collapsed(y, state):
        return state[0] - collapse

    handoff.direction = 1.0
    overlap_end.terminal = True
    overlap_end.direction = 1.0
    collapsed.terminal = True
    collapsed.direction = -1.0

    span = budget * step
    result = solve_ivp(
        _axis_rhs(n),
        (0.0, span if upper else -span),
        [R, 0.0],
        method="DOP853",
        rtol=settings.ode_tol,
        atol=settings.ode_tol,
        max_step=step,
        events=[handoff, overlap_end, collapsed],
        dense_output=True,
    )
    side = "upper" if upper else "lower"
    if not result.success:
        raise GeometryError(f"{side} inner arc integration failed: {result.message}")
    if len(result.t_events[2]):
        raise GeometryError(f"{side} inner arc collapsed towards the axis at y={result.t_events[2][0]}")
    if not len(result.t_events[1]) or not len(result.t_events[0]):
        raise GeometryError(f"{side} inner arc exhausted its budget of {budget} steps before the handoff")
    return result


def integrate_height_over_axis(n: int, R: float, arc_budget: Optional[int] = None,
                               step: Optional[float] = None,
                               switch_slope: Optional[float] = None) -> InnerArc:
    """Integrate the axis chart in both directions from the turning point (0, R).

    Args:
        n: Dimension, >= 2
        R: Neck radius
        arc_budget: Step budget per side; defaults to ``settings.arc_budget``
        step: Max step in y; defaults to ``settings.arc_step``
        switch_slope: Graph slope at which the lower side hands off

    Returns:
        InnerArc through the turning point with both handoff states
    """
    n = validate_dimension(n)
    arc_budget = arc_budget or settings.arc_budget
    step = step or settings.arc_step
    switch_slope = switch_slope or settings.switch_slope
    if not R > 0:
        raise ArgumentError(f"R must be positive, got {R}")
    if step * (n - 1) / R > 0.1:
        raise ArgumentError(f"step {step} does not resolve the neck curvature (n-1)/R = {(n - 1) / R}")

    pieces = {}
    for upper in (True, False):
        result = _integrate_side(n, R, arc_budget, step, switch_slope, upper)
        y_s = float(result.t_events[0][0])
        h_s, p_s = (float(v) for v in result.y_events[0][0])
        y_end = float(result.t_events[1][0])
        inside = np.abs(result.t) < abs(y_s)
        y = np.append(result.t[inside], y_s)
        h = np.append(result.y[0][inside], h_s)
        dh = np.append(result.y[1][inside], p_s)
        overlap_y = np.linspace(y_s, y_end, _OVERLAP_SAMPLES + 1)[1:]
        overlap = np.column_stack([overlap_y, result.sol(overlap_y).T])
        pieces[upper] = (y, h, dh, (y_s, h_s, p_s), overlap)

    y_up, h_up, dh_up, upper_handoff, upper_overlap = pieces[True]
    y_lo, h_lo, dh_lo, lower_handoff, lower_overlap = pieces[False]
    # The lower side runs backwards in y and both sides share the turning point.
    y = np.concatenate([y_lo[::-1], y_up[1:]])
    h = np.concatenate([h_lo[::-1], h_up[1:]])
    dh = np.concatenate([dh_lo[::-1], dh_up[1:]])

    if np.any(h < R * (1.0 - 1e-12)):
        raise GeometryError("inner arc dips below the neck radius")
    logger.debug(
        f"Inner arc n={n} R={R}: upper handoff at h={upper_handoff[1]:.6f}, "
        f"lower handoff at h={lower_handoff[1]:.6f}"
    )
    return InnerArc(
        n=n,
        R=float(R),
        y=y,
        h=h,
        dh=dh,
        upper_handoff=upper_handoff,
        lower_handoff=lower_handoff,
        upper_overlap=upper_overlap,
        lower_overlap=lower_overlap,
    )


def _graph_height(phi: PhiProfile, r_s: float, y_s: float, r: float) -> float:
    xi, weights = np.polynomial.legendre.leggauss(16)
    mid, half = 0.5 * (r + r_s), 0.5 * (r - r_s)
    return y_s + half * float(weights @ phi.evaluate(mid + half * xi))


def _check_handoff(phi: PhiProfile, handoff: Tuple[float, float, float],
                   overlap: np.ndarray, side: str) -> float:
    y_s, r_s, _ = handoff
    worst = 0.0
    for y_j, h_j, p_j in overlap:
        height_gap = abs(_graph_height(phi, r_s, y_s, h_j) - y_j)
        slope_gap = abs(float(phi.evaluate(h_j)[0]) - 1.0 / p_j)
        worst = max(worst, height_gap, slope_gap)
    if worst > settings.handoff_tolerance:
        raise ConsistencyError(
            f"{side} branch disagrees with the inner arc by {worst:.3e} "
            f"(tolerance {settings.handoff_tolerance:.1e})"
        )
    return worst


def build_wing_pair(n: int, R: float, r_max: float, switch_slope: Optional[float] = None,
                    tol: Optional[float] = None, step: Optional[float] = None) -> WingPair:
    """Assemble both graphical branches of the wing with neck radius R."""
    n = validate_dimension(n)
    switch_slope = settings.switch_slope if switch_slope is None else switch_slope
    if not 0.5 <= switch_slope <= 2.0:
        raise ArgumentError(f"switch_slope must lie in [0.5, 2], got {switch_slope}")
    if not r_max >= 20 * max(R, n - 1):
        raise ArgumentError(f"r_max must be at least 20*max(R, n-1), got {r_max}")

    arc = integrate_height_over_axis(n, R, switch_slope=switch_slope)
    branches = {}
    for side, handoff, overlap in (
        ("upper", arc.upper_handoff, arc.upper_overlap),
        ("lower", arc.lower_handoff, arc.lower_overlap),
    ):
        y_s, r_s, p_s = handoff
        phi = integrate_phi(n, r_s, 1.0 / p_s, r_max, tol)
        mismatch = _check_handoff(phi, handoff, overlap, side)
        height = height_from_phi(phi, (r_s, y_s), step=step, is_bowl=False)
        branches[side] = (phi, height)
        logger.debug(f"{side} branch handed off at r={r_s:.6f}, mismatch {mismatch:.2e}")

    logger.info(f"Wing pair n={n} R={R} built out to r_max={r_max}")
    return WingPair(
        n=n,
        R=float(R),
        inner_arc=arc,
        upper_branch=branches["upper"][1],
        lower_branch=branches["lower"][1],
        upper_phi=branches["upper"][0],
        lower_phi=branches["lower"][0],
    )


def branch_residual(phi: PhiProfile, r_lo: float, r_hi: float, step: float) -> float:
    """Max |translator residual| of the height of ``phi`` over [r_lo, r_hi] at spacing ``step``.

    The two samples at each end of the window are skipped.
    """
    height = height_from_phi(phi, (r_lo, 0.0), step=step, is_bowl=False, window=(r_lo, r_hi))
    return float(np.max(np.abs(translator_residual(height)[2:-2])))


def wing_residuals(pair: WingPair) -> Dict[str, float]:
    """Branch residuals next to the handoff (``*_near``) and beyond it (``*_far``)."""
    residuals = {}
    for side, phi in (("upper", pair.upper_phi), ("lower", pair.lower_phi)):
        r_s = phi.r_min
        r_far = min(r_s + _NEAR_ZONE, phi.r_max)
        residuals[f"{side}_near"] = branch_residual(phi, r_s, r_far, _NEAR_STEP)
        residuals[f"{side}_far"] = branch_residual(phi, r_far, phi.r_max, _FAR_STEP)
    return residuals


def asymptotic_offset(branch: HeightProfile, bowl: HeightProfile,
                      tail_tolerance: Optional[float] = None) -> float:
    """Limit of branch - bowl, read at the outermost common radius.

    The read is accepted only if it agrees with the read at half that radius.
    """
    tail_tolerance = settings.tail_tolerance if tail_tolerance is None else tail_tolerance
    r_lo = max(branch.r_min, bowl.r_min)
    r_hi = min(branch.r_max, bowl.r_max)
    r_mid = 0.5 * r_hi
    if r_mid < r_lo:
        raise TailError(f"common range [{r_lo}, {r_hi}] is too short for a tail estimate")

    far = float(branch.evaluate(r_hi)[0] - bowl.evaluate(r_hi)[0])
    mid = float(branch.evaluate(r_mid)[0] - bowl.evaluate(r_mid)[0])
    drift = abs(far - mid)
    if drift > tail_tolerance:
        raise TailError(f"offset estimate moved by {drift:.3e} between r={r_mid} and r={r_hi}")
    if drift > 0.1 * tail_tolerance:
        logger.warning(f"Offset estimate drift {drift:.3e} is close to the tail tolerance")
    return far


def calibrate_shifts(pair: WingPair, bowl: HeightProfile, epsilon: float) -> WingPair:
    """Shift the branches so that W+ - U -> +epsilon and W- - U -> -epsilon."""
    if pair.n != bowl.n:
        raise ArgumentError(f"wing dimension {pair.n} differs from bowl dimension {bowl.n}")
    if epsilon < 0:
        raise ArgumentError(f"epsilon must be nonnegative, got {epsilon}")
    C_plus = asymptotic_offset(pair.lower_branch, bowl)
    C_minus = asymptotic_offset(pair.upper_branch, bowl)
    shifts = (epsilon - C_plus, -epsilon - C_minus)
    logger.debug(f"Calibrated wings: C+={C_plus:.9f}, C-={C_minus:.9f}, shifts={shifts}")
    return replace(pair, shifts=shifts, C_plus=C_plus, C_minus=C_minus, epsilon=float(epsilon))


def branch_gap(pair: WingPair, step: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Unshifted upper minus lower branch on their common grid."""
    r = uniform_grid(max(pair.upper_switch, pair.lower_switch),
                     min(pair.upper_branch.r_max, pair.lower_branch.r_max),
                     step or settings.resample_step)
    return r, pair.upper_branch.evaluate(r) - pair.lower_branch.evaluate(r)


def neck_curvature_signs(pair: WingPair) -> Tuple[float, float]:
    """phi' of the upper branch at its inner end and at r_max.

    Negative then positive: the graph bends the other way near the neck than the
    bowl-like far field does.
    """
    m = pair.n - 1
    phi = pair.upper_phi
    values = []
    for r in (phi.r[0], phi.r[-1]):
        p = float(phi.evaluate(r)[0])
        values.append((1.0 + p * p) * (1.0 - m * p / r))
    return values[0], values[1]


def wing_frame(pair: WingPair, bowl: HeightProfile, step: Optional[float] = None) -> pd.DataFrame:
    """``r,w_plus,w_minus,u_bowl`` on the common resample grid."""
    r_lo = max(pair.upper_switch, pair.lower_switch, bowl.r_min)
    r_hi = min(pair.upper_branch.r_max, pair.lower_branch.r_max, bowl.r_max)
    r = uniform_grid(r_lo, r_hi, step or settings.resample_step)
    return pd.DataFrame({
        "r": r,
        "w_plus": pair.w_plus.evaluate(r),
        "w_minus": pair.w_minus.evaluate(r),
        "u_bowl": bowl.evaluate(r),
    })


def arc_frame(arc: InnerArc) -> pd.DataFrame:
    return pd.DataFrame({"y": arc.y, "h": arc.h})
