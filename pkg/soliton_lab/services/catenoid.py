"""n-catenoid profiles used as static barriers for the plane.

The upper half of the n-catenoid with neck radius r0 = c^(1/(n-1)) is the graph of
f over r > r0 with

    f'(r) = q / sqrt(1 - q^2),    q = c r^-(n-1),

a solution of the static relation f''/(1+f'^2) + (n-1) f'/r = 0. For n >= 3 the
height f tends to a finite limit F_inf, which is what makes it a barrier for the
plane.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import quad

from soliton_lab.errors import ArgumentError

logger = logging.getLogger(__name__)

_POINTS_PER_SEGMENT = 8
# panel width in s, relative to sqrt(r0)
_PANEL_WIDTH = 0.02


def _check(n: int, c: float) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 3:
        raise ArgumentError(f"catenoid barriers need n >= 3, got n={n}")
    if not c > 0:
        raise ArgumentError(f"catenoid parameter c must be positive, got {c}")


def neck_radius(n: int, c: float) -> float:
    _check(n, c)
    return c ** (1.0 / (n - 1))


def _one_minus_q_squared(n: int, r0: float, r: np.ndarray) -> np.ndarray:
    # q = (r0/r)^(n-1); computed through expm1/log1p so it stays accurate at r -> r0
    return -np.expm1(-2.0 * (n - 1) * np.log1p((r - r0) / r0))


def catenoid_slope(n: int, c: float, r) -> np.ndarray:
    r0 = neck_radius(n, c)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= r0):
        raise ArgumentError(f"catenoid slope is defined only for r > {r0}")
    q = (r0 / r_arr) ** (n - 1)
    return q / np.sqrt(_one_minus_q_squared(n, r0, r_arr))


def catenoid_second_derivative(n: int, c: float, r) -> np.ndarray:
    """f'' = q' / (1 - q^2)^(3/2) with q' = -(n-1) q / r."""
    r0 = neck_radius(n, c)
    r_arr = np.asarray(r, dtype=float)
    q = (r0 / r_arr) ** (n - 1)
    return -(n - 1) * q / r_arr / _one_minus_q_squared(n, r0, r_arr) ** 1.5


def catenoid_static_residual(n: int, c: float, r) -> np.ndarray:
    """f''/(1+f'^2) + (n-1) f'/r evaluated from the closed forms."""
    r_arr = np.asarray(r, dtype=float)
    fp = catenoid_slope(n, c, r_arr)
    fpp = catenoid_second_derivative(n, c, r_arr)
    return fpp / (1.0 + fp * fp) + (n - 1) * fp / r_arr


def catenoid_height(n: int, c: float, r) -> np.ndarray:
    """f(r) = integral of f' from the neck, with f(r0) = 0.

    Substituting r = r0 + s^2 removes the square-root singularity at the neck;
    the s-axis is then cut into short Gauss-Legendre panels.
    """
    r0 = neck_radius(n, c)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < r0):
        raise ArgumentError(f"catenoid height is defined only for r >= {r0}")
    s = np.sqrt(r_arr - r0)
    panel = _PANEL_WIDTH * np.sqrt(r0)
    edges = np.unique(np.concatenate((np.arange(0.0, s.max(initial=0.0), panel), s, [0.0])))

    xi, weights = np.polynomial.legendre.leggauss(_POINTS_PER_SEGMENT)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * xi[None, :]
    radius = r0 + nodes ** 2
    q = (r0 / radius) ** (n - 1)
    integrand = 2.0 * nodes * q / np.sqrt(_one_minus_q_squared(n, r0, radius))
    cumulative = np.concatenate(([0.0], np.cumsum(half * (integrand @ weights))))
    return cumulative[np.searchsorted(edges, s)]


def catenoid_limit(n: int, c: float, r_ref: Optional[float] = None) -> float:
    """F_inf, the height of the catenoid end at infinity."""
    r0 = neck_radius(n, c)
    r_ref = 2.0 * r0 if r_ref is None else r_ref
    tail, _ = quad(lambda x: float(catenoid_slope(n, c, x)), r_ref, np.inf, epsabs=1e-13, epsrel=1e-12)
    return float(catenoid_height(n, c, [r_ref])[0]) + tail


def catenoid_barriers(n: int, c: float, epsilon: float, r) -> Tuple[np.ndarray, np.ndarray]:
    """(P+, P-) at the radii r >= r0, with P+ = epsilon + F_inf - f and P- = -P+."""
    upper = epsilon + catenoid_limit(n, c) - catenoid_height(n, c, r)
    logger.debug(f"Catenoid barriers n={n} c={c}: neck {neck_radius(n, c):.6f}")
    return upper, -upper
