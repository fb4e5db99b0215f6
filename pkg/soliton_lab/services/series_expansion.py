"""Exact expansions of the radial slope equation.

    phi' = (1 + phi^2) (1 - (n-1) phi / r)

Two ansatzes are supported: the tail ansatz phi = c_1 r + sum c_k r^k (k <= 0) for
r -> infinity, and the regular origin ansatz phi = sum a_j r^j (j >= 1). Each is
substituted into the equation and the resulting triangular system is solved one
coefficient at a time. Arithmetic is exact throughout: ``fractions.Fraction`` when n
is a number, sympy rational functions in n when n is symbolic.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np
import sympy
from sympy.polys.domains import QQ
from sympy.polys.fields import field as rational_function_field

from soliton_lab.config import settings
from soliton_lab.errors import ArgumentError, SeriesError, SeriesModeError

logger = logging.getLogger(__name__)

N = sympy.Symbol("n")
MAX_ORDER = 21

Laurent = Dict[int, Any]
NumericN = Union[int, Fraction]


class SeriesMode(str, Enum):
    NUMERIC = "numeric"
    SYMBOLIC = "symbolic"


@dataclass(frozen=True)
class TailSeries:
    """Asymptotic expansion phi ~ c_1 r + c_-1 / r + c_-3 / r^3 + ..."""

    mode: SeriesMode
    order: int
    coefficients: Mapping[int, Any]
    n: Optional[Fraction] = None
    even_coefficients: Mapping[int, Any] = field(default_factory=dict, repr=False)
    exact_terms: Mapping[int, Any] = field(default_factory=dict, repr=False, compare=False)

    def polynomial(self, power: int) -> sympy.Poly:
        """Coefficient of r^power as a polynomial in n (symbolic mode, power <= -1)."""
        if self.mode is not SeriesMode.SYMBOLIC:
            raise SeriesModeError("polynomial form exists only for symbolic-n series")
        if power >= 0:
            raise ArgumentError(f"c_{power} is not a polynomial in n")
        return sympy.Poly(self.coefficients[power], N, domain=QQ)

    def integer_form(self, power: int) -> Tuple[int, sympy.Poly]:
        """(common denominator, integer-coefficient polynomial) for c_power."""
        denominator, poly = self.polynomial(power).clear_denoms(convert=True)
        return int(denominator), poly


@dataclass(frozen=True)
class OriginSeries:
    """Regular expansion phi = a_1 r + a_3 r^3 + ... of the bowl slope at r = 0."""

    n: int
    order: int
    coefficients: Mapping[int, Fraction]
    even_coefficients: Mapping[int, Fraction] = field(default_factory=dict, repr=False)


def _multiply(a: Laurent, b: Laurent, lowest: Optional[int] = None,
              highest: Optional[int] = None) -> Laurent:
    out: Laurent = {}
    for p, x in a.items():
        for q, y in b.items():
            k = p + q
            if lowest is not None and k < lowest:
                continue
            if highest is not None and k > highest:
                continue
            out[k] = out[k] + x * y if k in out else x * y
    return out


def _add(a: Laurent, b: Laurent, scale: Any = 1) -> Laurent:
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + scale * v if k in out else scale * v
    return out


def _ode_residual(phi: Laurent, m: Any, one: Any, lowest: Optional[int] = None,
                  highest: Optional[int] = None) -> Laurent:
    """phi' - (1 + phi^2)(1 - m phi / r), truncated to [lowest, highest]."""
    dphi = {p - 1: p * c for p, c in phi.items() if p != 0}
    one_plus_square = _add({0: one}, _multiply(phi, phi, lowest, highest))
    factor = _add({0: one}, {p - 1: c for p, c in phi.items()}, scale=-m)
    rhs = _multiply(one_plus_square, factor, lowest, highest)
    residual = _add(dphi, rhs, scale=-1)
    if lowest is not None:
        residual = {k: v for k, v in residual.items() if k >= lowest}
    if highest is not None:
        residual = {k: v for k, v in residual.items() if k <= highest}
    return residual


def _is_symbolic(n: Any) -> bool:
    return n == "n" or n is N


def _numeric_n(n: Any) -> Fraction:
    if isinstance(n, bool):
        raise ArgumentError(f"n must be a number, got {n!r}")
    try:
        value = Fraction(n)
    except (TypeError, ValueError) as e:
        raise ArgumentError(f"n must be an exact rational, got {n!r}") from e
    if value < 2:
        raise ArgumentError(f"n must be >= 2, got {value}")
    return value


def _check_order(order: int) -> None:
    cap = min(MAX_ORDER, settings.series_order_cap)
    if not isinstance(order, int) or order < 1 or order % 2 == 0:
        raise ArgumentError(f"order must be an odd integer >= 1, got {order!r}")
    if order > cap:
        raise ArgumentError(f"order {order} exceeds the cap {cap}")


def _coefficient_field(n: Any):
    """(mode, one, n - 1, numeric n) for the requested arithmetic."""
    if _is_symbolic(n):
        K, n_gen = rational_function_field("n", QQ)
        return SeriesMode.SYMBOLIC, K.one, n_gen - 1, None
    value = _numeric_n(n)
    return SeriesMode.NUMERIC, Fraction(1), value - 1, value


def expand_tail(n: Any, order: int) -> TailSeries:
    """Tail expansion of phi up to r^-order.

    Pass an exact rational (or int) for numeric mode, or ``"n"`` / ``N`` for
    coefficients as functions of n. Even slots are generated too and must vanish.
    """
    _check_order(order)
    mode, one, m, n_value = _coefficient_field(n)
    zero = one * 0

    # Adding c_k r^k changes the residual at r^(k+1) by c_k / (n-1) and leaves
    # every higher power untouched, so each slot is solved in isolation.
    phi: Laurent = {1: one / m}
    for k in range(0, -order - 1, -1):
        phi[k] = zero
        residual = _ode_residual(phi, m, one, lowest=k + 1)
        phi[k] = -m * residual.get(k + 1, zero)

    even = {k: v for k, v in phi.items() if k <= 0 and k % 2 == 0}
    nonzero_even = [k for k, v in even.items() if v != 0]
    if nonzero_even:
        raise SeriesError(f"even tail coefficients did not vanish at powers {nonzero_even}")

    exact = {k: v for k, v in phi.items() if k % 2 != 0}
    if mode is SeriesMode.SYMBOLIC:
        coefficients = {}
        for k, v in exact.items():
            if k < 0 and not v.denom.is_ground:
                raise SeriesError(f"tail coefficient c_{k} is not polynomial in n")
            expr = v.as_expr()
            coefficients[k] = sympy.expand(expr) if k < 0 else sympy.cancel(expr)
        even_out = {k: sympy.Integer(0) for k in even}
    else:
        coefficients = dict(exact)
        even_out = dict(even)

    logger.debug(f"Tail series ({mode.value}) generated to order {order}")
    return TailSeries(
        mode=mode,
        order=order,
        coefficients=dict(sorted(coefficients.items(), reverse=True)),
        n=n_value,
        even_coefficients=even_out,
        exact_terms=exact,
    )


def expand_origin(n: int, order: int) -> OriginSeries:
    """Regular expansion of the bowl slope about r = 0 up to r^order."""
    _check_order(order)
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ArgumentError(f"n must be an integer >= 2, got {n!r}")
    one = Fraction(1)
    m = Fraction(n - 1)

    # a_j enters the residual at r^(j-1) with weight j + n - 1.
    phi: Laurent = {}
    for j in range(1, order + 1):
        phi[j] = Fraction(0)
        residual = _ode_residual(phi, m, one, highest=j - 1)
        phi[j] = -residual.get(j - 1, Fraction(0)) / (j + m)

    even = {j: v for j, v in phi.items() if j % 2 == 0}
    if any(v != 0 for v in even.values()):
        raise SeriesError("even origin coefficients did not vanish")
    odd = {j: v for j, v in phi.items() if j % 2 == 1}
    return OriginSeries(n=n, order=order, coefficients=odd, even_coefficients=even)


def eval_series(s: Union[TailSeries, OriginSeries], r: Any) -> Any:
    """Floating-point value of the series at r (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if isinstance(s, OriginSeries):
        coeffs = np.zeros(s.order + 1)
        for j, a in s.coefficients.items():
            coeffs[j] = float(a)
        value = np.polynomial.polynomial.polyval(r_arr, coeffs)
    else:
        if s.mode is not SeriesMode.NUMERIC:
            raise SeriesModeError("symbolic-n series cannot be evaluated numerically")
        coeffs = np.zeros(s.order + 1)
        for k, c in s.coefficients.items():
            if k < 0:
                coeffs[-k] = float(c)
        value = float(s.coefficients[1]) * r_arr + np.polynomial.polynomial.polyval(1.0 / r_arr, coeffs)
    return float(value) if np.ndim(value) == 0 else value


def formal_residual(s: TailSeries) -> Laurent:
    """Exact residual of the finite series substituted into the ODE."""
    if s.mode is SeriesMode.SYMBOLIC:
        K, n_gen = rational_function_field("n", QQ)
        one, m = K.one, n_gen - 1
        terms = {k: K.from_expr(sympy.sympify(v)) for k, v in s.coefficients.items()}
    else:
        one, m = Fraction(1), s.n - 1
        terms = dict(s.exact_terms)
    residual = _ode_residual(terms, m, one)
    return {k: v for k, v in sorted(residual.items(), reverse=True) if v != 0}


def leading_residual_power(s: TailSeries) -> int:
    """Highest power of r with a nonzero residual coefficient."""
    residual = formal_residual(s)
    if not residual:
        raise SeriesError("formal residual vanished identically")
    return max(residual)


def closed_form_tail_coefficients() -> Dict[int, sympy.Expr]:
    """Closed forms of c_-1 ... c_-9 as functions of n."""
    return {
        -1: sympy.Integer(-1),
        -3: (N - 1) * (N - 4),
        -5: -(N - 1) ** 2 * (N ** 2 - 12 * N + 31),
        -7: (N - 1) ** 3 * (N ** 3 - 24 * N ** 2 + 164 * N - 330),
        -9: -(N - 1) ** 4 * (N ** 4 - 40 * N ** 3 + 510 * N ** 2 - 2554 * N + 4315),
    }


def matches_closed_forms(s: TailSeries) -> Dict[int, bool]:
    """Exact comparison of a symbolic series against the closed forms it covers."""
    if s.mode is not SeriesMode.SYMBOLIC:
        raise SeriesModeError("closed-form comparison needs a symbolic-n series")
    return {
        k: sympy.expand(s.coefficients[k] - expr) == 0
        for k, expr in closed_form_tail_coefficients().items()
        if k in s.coefficients
    }


def _format_poly(expr: sympy.Expr) -> str:
    terms = sympy.Poly(expr, N, domain=QQ).terms()
    parts = []
    for (degree,), coeff in terms:
        sign = "-" if coeff < 0 else "+"
        magnitude = abs(coeff)
        if degree == 0:
            body = str(magnitude)
        else:
            power = "n" if degree == 1 else f"n^{degree}"
            body = power if magnitude == 1 else f"{magnitude}*{power}"
        parts.append(f"{sign}{body}")
    return " ".join(parts) if parts else "+0"


def _format_coefficient(value: Any, mode: SeriesMode) -> str:
    if mode is SeriesMode.NUMERIC or isinstance(value, Fraction):
        value = Fraction(value)
        return f"{value.numerator}/{value.denominator}"
    numerator, denominator = sympy.fraction(sympy.cancel(value))
    if denominator == 1:
        return _format_poly(numerator)
    return f"({_format_poly(numerator)})/({_format_poly(denominator)})"


def dump_series(s: Union[TailSeries, OriginSeries]) -> str:
    """One ``power<TAB>value`` line per coefficient, highest power first."""
    mode = s.mode if isinstance(s, TailSeries) else SeriesMode.NUMERIC
    lines = [
        f"{power}\t{_format_coefficient(value, mode)}"
        for power, value in sorted(s.coefficients.items(), reverse=True)
    ]
    return "\n".join(lines) + "\n"
