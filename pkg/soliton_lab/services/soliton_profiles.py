"""Radial translator profiles.

A rotationally symmetric graph u(r) translates with unit speed under mean curvature
flow when 1 = V''/(1+V'^2) + (n-1)V'/r. Writing phi = V' turns this into the
first-order slope equation

    phi' = (1 + phi^2) (1 - (n-1) phi / r)

which is integrated here with an embedded 8(5,3) Runge-Kutta pair. Heights are
recovered by Gauss-Legendre quadrature of the dense output.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import OdeSolution, solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from soliton_lab.config import settings
from soliton_lab.errors import (
    ArgumentError,
    ConfigurationError,
    IntegrationBlowupError,
    ProfileInvariantError,
)
from soliton_lab.services.series_expansion import (
    OriginSeries,
    eval_series,
    expand_origin,
    expand_tail,
    formal_residual,
)

logger = logging.getLogger(__name__)

# Gauss-Legendre nodes per quadrature interval
_QUADRATURE_POINTS = 6
_ODE_METHOD = "DOP853"


@dataclass(frozen=True, eq=False)
class PhiProfile:
    """Sampled solution of the slope equation on [r[0], r[-1]].

    ``r`` and ``phi`` hold every accepted integrator step. ``solution`` is the dense
    output used by :meth:`evaluate`; for origin-regular profiles the origin series
    covers [0, r[0]).
    """

    n: int
    r: np.ndarray
    phi: np.ndarray
    tol: float
    origin_regular: bool = False
    solution: Optional[OdeSolution] = field(default=None, repr=False, compare=False)
    origin_series: Optional[OriginSeries] = field(default=None, repr=False, compare=False)

    @property
    def r_min(self) -> float:
        return 0.0 if self.origin_regular else float(self.r[0])

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @cached_property
    def _interpolant(self):
        if self.solution is not None:
            return self.solution
        return CubicSpline(self.r, self.phi)

    def evaluate(self, r) -> np.ndarray:
        """Slope at arbitrary radii inside the profile's range."""
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        slack = 1e-12 * max(1.0, self.r_max)
        if np.any(r_arr < self.r_min - slack) or np.any(r_arr > self.r_max + slack):
            raise ArgumentError(
                f"radius outside profile range [{self.r_min}, {self.r_max}]"
            )
        r_arr = np.clip(r_arr, self.r_min, self.r_max)
        out = np.empty_like(r_arr)
        inner = r_arr < self.r[0]
        if np.any(inner):
            out[inner] = eval_series(self.origin_series, r_arr[inner])
        if np.any(~inner):
            values = self._interpolant(r_arr[~inner])
            out[~inner] = np.asarray(values).reshape(-1)
        return out

    def resample(self, step: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Values on the multiples of ``step`` inside the profile's range."""
        grid = uniform_grid(self.r_min, self.r_max, step or settings.resample_step)
        return grid, self.evaluate(grid)


@dataclass(frozen=True, eq=False)
class HeightProfile:
    """Graph height u(r) with its exact slopes at the sample radii."""

    n: int
    r: np.ndarray
    u: np.ndarray
    slope: np.ndarray
    anchor: Tuple[float, float]
    is_bowl: bool = False

    @cached_property
    def _spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.r, self.u, self.slope)

    @property
    def r_min(self) -> float:
        return float(self.r[0])

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def evaluate(self, r) -> np.ndarray:
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        slack = 1e-12 * max(1.0, self.r_max)
        if np.any(r_arr < self.r_min - slack) or np.any(r_arr > self.r_max + slack):
            raise ArgumentError(
                f"radius outside height profile range [{self.r_min}, {self.r_max}]"
            )
        return self._spline(np.clip(r_arr, self.r_min, self.r_max))

    def shifted(self, offset: float) -> "HeightProfile":
        """The same graph moved vertically by ``offset``."""
        r0, u0 = self.anchor
        return replace(self, u=self.u + offset, anchor=(r0, u0 + offset))


@dataclass(frozen=True, eq=False)
class TailDeviation:
    """phi - S(r) for the order-``order`` tail series S, from a deviation-form run."""

    n: int
    order: int
    r: np.ndarray
    deviation: np.ndarray

    def decay_rate(self, r_lo: float, r_hi: float) -> float:
        mask = (self.r >= r_lo) & (self.r <= r_hi)
        return fit_decay_rate(self.r[mask], self.deviation[mask])


def validate_dimension(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise ArgumentError(f"n must be an integer >= 2, got {n!r}")
    return int(n)


def uniform_grid(r_lo: float, r_hi: float, step: float) -> np.ndarray:
    """Multiples of ``step`` in [r_lo, r_hi]; shared by every resampled profile."""
    if step <= 0:
        raise ArgumentError(f"step must be positive, got {step}")
    k_lo = math.ceil(r_lo / step - 1e-9)
    k_hi = math.floor(r_hi / step + 1e-9)
    grid = step * np.arange(k_lo, k_hi + 1, dtype=float)
    return np.clip(grid, r_lo, r_hi)


def _slope_rhs(n: int):
    m = n - 1

    def rhs(r, y):
        phi = y[0]
        return [(1.0 + phi * phi) * (1.0 - m * phi / r)]

    return rhs


def _solve(n: int, r0: float, phi0: float, r_end: float, tol: float):
    result = solve_ivp(
        _slope_rhs(n),
        (r0, r_end),
        [phi0],
        method=_ODE_METHOD,
        rtol=tol,
        atol=tol,
        dense_output=True,
    )
    if not result.success:
        raise IntegrationBlowupError(f"slope integration failed at r={result.t[-1]}: {result.message}")
    if not np.all(np.isfinite(result.y)):
        raise IntegrationBlowupError("slope integration produced a non-finite value")
    return result


def _check_phi_invariants(p: PhiProfile) -> None:
    if not np.all(np.diff(p.r) > 0):
        raise ProfileInvariantError("profile radii are not strictly increasing")
    if not (np.all(np.isfinite(p.r)) and np.all(np.isfinite(p.phi))):
        raise ProfileInvariantError("profile contains non-finite values")

    m = p.n - 1
    tail = p.r >= p.r[-1] - 0.1 * (p.r[-1] - p.r[0])
    line = p.r[tail] / m
    if np.any(p.phi[tail] > line + 10 * p.tol * (1.0 + line)):
        raise ProfileInvariantError("slope stays above r/(n-1) on the final tenth of the range")

    if p.origin_regular:
        if np.any(p.phi <= 0):
            raise ProfileInvariantError("bowl slope is not positive")
        if not np.all(np.diff(p.phi) > 0):
            raise ProfileInvariantError("bowl slope is not strictly increasing")


def integrate_phi(n: int, R: float, phi0: float, r_max: float, tol: Optional[float] = None) -> PhiProfile:
    """Integrate the slope equation from (R, phi0) outward to r_max.

    Args:
        n: Dimension of the graph, >= 2
        R: Start radius, > 0
        phi0: Slope at R
        r_max: End radius, at least 2R
        tol: Per-step tolerance in (0, 1e-3]; defaults to ``settings.ode_tol``

    Returns:
        PhiProfile satisfying the attraction and ordering invariants
    """
    n = validate_dimension(n)
    tol = settings.ode_tol if tol is None else tol
    if not R > 0:
        raise ArgumentError(f"R must be positive, got {R}")
    if not r_max >= 2 * R:
        raise ArgumentError(f"r_max must be at least 2R, got r_max={r_max}, R={R}")
    if not 0 < tol <= 1e-3:
        raise ArgumentError(f"tol must lie in (0, 1e-3], got {tol}")
    if not math.isfinite(phi0):
        raise ArgumentError(f"phi0 must be finite, got {phi0}")

    result = _solve(n, R, phi0, r_max, tol)
    profile = PhiProfile(n=n, r=result.t, phi=result.y[0], tol=tol, solution=result.sol)
    _check_phi_invariants(profile)
    logger.debug(f"Slope profile n={n} from R={R} to {r_max}: {len(result.t)} steps")
    return profile


def origin_start(n: int, tol: float) -> Tuple[float, OriginSeries]:
    """Start radius and the shortest origin series resolving ``tol`` there."""
    r_start = settings.origin_start_factor * n
    cap = settings.series_order_cap
    full = expand_origin(n, cap if cap % 2 == 1 else cap - 1)
    for order in range(1, full.order - 1, 2):
        next_term = abs(float(full.coefficients[order + 2])) * r_start ** (order + 2)
        if next_term < tol:
            truncated = {j: a for j, a in full.coefficients.items() if j <= order}
            return r_start, OriginSeries(n=n, order=order, coefficients=truncated)
    raise ConfigurationError(
        f"origin series up to order {full.order} cannot resolve tol={tol} at r_start={r_start}",
        violations=[f"origin_start_factor={settings.origin_start_factor} too large for tol={tol}"],
    )


def bowl_phi(n: int, r_max: float, tol: Optional[float] = None) -> PhiProfile:
    """Slope of the entire bowl translator on [0, r_max]."""
    n = validate_dimension(n)
    tol = settings.ode_tol if tol is None else tol
    if not r_max >= 10:
        raise ArgumentError(f"r_max must be at least 10, got {r_max}")
    if not 0 < tol <= 1e-3:
        raise ArgumentError(f"tol must lie in (0, 1e-3], got {tol}")

    r_start, series = origin_start(n, tol)
    phi_start = eval_series(series, r_start)
    result = _solve(n, r_start, phi_start, r_max, tol)
    profile = PhiProfile(
        n=n,
        r=result.t,
        phi=result.y[0],
        tol=tol,
        origin_regular=True,
        solution=result.sol,
        origin_series=series,
    )
    _check_phi_invariants(profile)
    logger.info(f"Bowl slope n={n} on [0, {r_max}]: origin order {series.order}, {len(result.t)} steps")
    return profile


def _quadrature_nodes(r0: float, step: float, lo: float, hi: float) -> np.ndarray:
    grid = uniform_grid(lo, hi, step)
    keep = (grid > lo + step / 2) & (grid < hi - step / 2)
    nodes = np.concatenate(([lo], grid[keep], [hi]))
    if not np.any(np.isclose(nodes, r0, rtol=0.0, atol=1e-12)):
        drop = np.abs(nodes - r0) <= step / 2
        drop[0] = drop[-1] = False
        nodes = np.sort(np.append(nodes[~drop], r0))
    return nodes


def height_from_phi(p: PhiProfile, anchor: Tuple[float, float], step: Optional[float] = None,
                    is_bowl: Optional[bool] = None,
                    window: Optional[Tuple[float, float]] = None) -> HeightProfile:
    """Integrate the slope into a height profile pinned at ``anchor``.

    ``window`` restricts the samples to a subrange of [r_min, r_max], so a short
    stretch can be resolved with a finer step than the whole profile.
    """
    r0, u0 = float(anchor[0]), float(anchor[1])
    lo, hi = (p.r_min, p.r_max) if window is None else (float(window[0]), float(window[1]))
    if lo < p.r_min or hi > p.r_max or lo >= hi:
        raise ArgumentError(f"window [{lo}, {hi}] not inside [{p.r_min}, {p.r_max}]")
    if r0 < lo or r0 > hi:
        raise ArgumentError(f"anchor radius {r0} outside [{lo}, {hi}]")
    step = step or settings.resample_step
    nodes = _quadrature_nodes(r0, step, lo, hi)
    i0 = int(np.argmin(np.abs(nodes - r0)))
    nodes[i0] = r0

    xi, weights = np.polynomial.legendre.leggauss(_QUADRATURE_POINTS)
    mid = 0.5 * (nodes[1:] + nodes[:-1])
    half = 0.5 * (nodes[1:] - nodes[:-1])
    points = mid[:, None] + half[:, None] * xi[None, :]
    values = p.evaluate(points.ravel()).reshape(points.shape)
    pieces = half * (values @ weights)
    cumulative = np.concatenate(([0.0], np.cumsum(pieces)))
    u = (cumulative - cumulative[i0]) + u0

    bowl = p.origin_regular if is_bowl is None else is_bowl
    h = HeightProfile(
        n=p.n,
        r=nodes,
        u=u,
        slope=p.evaluate(nodes),
        anchor=(r0, u0),
        is_bowl=bowl,
    )
    if bowl:
        curvature = np.diff(np.diff(u) / np.diff(nodes))
        if np.any(curvature < -1e-9):
            raise ProfileInvariantError("bowl height is not convex")
    return h


def bowl_height(n: int, r_max: float, tol: Optional[float] = None,
                step: Optional[float] = None) -> HeightProfile:
    """Bowl translator at t = 0, normalised by u(0) = 0."""
    return height_from_phi(bowl_phi(n, r_max, tol), (0.0, 0.0), step=step)


def translator_residual(h: HeightProfile) -> np.ndarray:
    """1 - [V''/(1+V'^2) + (n-1)V'/r] by second-order differences.

    At r = 0 the term (n-1)V'/r is replaced by its limit (n-1)V''.
    """
    r, u = np.asarray(h.r, dtype=float), np.asarray(h.u, dtype=float)
    if len(r) < 5:
        raise ArgumentError("translator residual needs at least 5 samples")
    dv = np.gradient(u, r, edge_order=2)
    d2v = np.gradient(dv, r, edge_order=2)
    left = r[1:-1] - r[:-2]
    right = r[2:] - r[1:-1]
    d2v[1:-1] = 2.0 * ((u[2:] - u[1:-1]) / right - (u[1:-1] - u[:-2]) / left) / (left + right)

    m = h.n - 1
    drift = np.empty_like(r)
    at_axis = r == 0.0
    drift[at_axis] = m * d2v[at_axis]
    drift[~at_axis] = m * dv[~at_axis] / r[~at_axis]
    return 1.0 - (d2v / (1.0 + dv * dv) + drift)


def integrate_tail_deviation(n: int, order: int, r_start: float, r_end: float,
                             tol: float = 1e-10, samples: int = 400) -> TailDeviation:
    """Integrate psi = phi - S(r), S the order-``order`` tail series.

    The exact residual of S enters as forcing, so psi is resolved far below the
    double-precision spacing of phi itself. The start value comes from the bowl.
    """
    n = validate_dimension(n)
    m = n - 1
    series = expand_tail(n, order)
    tail_powers = np.array([k for k in series.coefficients if k < 0], dtype=float)
    tail_coeffs = np.array([float(c) for k, c in series.coefficients.items() if k < 0])
    residual = formal_residual(series)
    forcing_powers = np.array(list(residual), dtype=float)
    forcing_coeffs = np.array([-float(c) for c in residual.values()])

    def rhs(r, y):
        psi = y[0]
        t_part = float(tail_coeffs @ r ** tail_powers)
        s = r / m + t_part
        phi = s + psi
        f = float(forcing_coeffs @ r ** forcing_powers)
        return [f + (2.0 * s + psi) * psi * (-m * t_part / r) - (1.0 + phi * phi) * m * psi / r]

    bowl = bowl_phi(n, max(10.0, r_start), tol=settings.ode_tol)
    psi0 = float(bowl.evaluate(r_start)[0]) - eval_series(series, r_start)
    r_eval = np.linspace(r_start, r_end, samples)
    result = solve_ivp(
        rhs,
        (r_start, r_end),
        [psi0],
        method=_ODE_METHOD,
        rtol=tol,
        atol=1e-30,
        t_eval=r_eval,
    )
    if not result.success or not np.all(np.isfinite(result.y)):
        raise IntegrationBlowupError(f"tail deviation integration failed: {result.message}")
    logger.debug(f"Tail deviation n={n} order={order}: {result.nfev} evaluations")
    return TailDeviation(n=n, order=order, r=result.t, deviation=result.y[0])


def fit_decay_rate(r, values, floor: float = 0.0) -> float:
    """Least-squares slope of log|values| against log r, ignoring values at or below ``floor``."""
    r_arr, v_arr = np.asarray(r, dtype=float), np.abs(np.asarray(values, dtype=float))
    mask = (v_arr > floor) & (r_arr > 0)
    if np.count_nonzero(mask) < 3:
        raise ArgumentError("too few points above the noise floor to fit a decay rate")
    slope, _ = np.polyfit(np.log(r_arr[mask]), np.log(v_arr[mask]), 1)
    return float(slope)


def phi_frame(p: PhiProfile, step: Optional[float] = None) -> pd.DataFrame:
    grid, phi = p.resample(step)
    return pd.DataFrame({"r": grid, "phi": phi})


def height_frame(h: HeightProfile) -> pd.DataFrame:
    return pd.DataFrame({"r": h.r, "u": h.u})
