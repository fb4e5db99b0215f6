"""Unit tests for the exact tail and origin expansions."""
from fractions import Fraction

import pytest
import sympy

from soliton_lab.errors import ArgumentError, SeriesModeError
from soliton_lab.services.series_expansion import (
    N,
    SeriesMode,
    closed_form_tail_coefficients,
    dump_series,
    eval_series,
    expand_origin,
    expand_tail,
    formal_residual,
    leading_residual_power,
    matches_closed_forms,
)


def _closed_form(power, n):
    expr = closed_form_tail_coefficients()[power].subs(N, n)
    return Fraction(int(sympy.numer(expr)), int(sympy.denom(expr)))


def test_leading_coefficients_numeric():
    for n in range(2, 13):
        s = expand_tail(n, 9)
        assert s.mode is SeriesMode.NUMERIC
        assert s.coefficients[1] == Fraction(1, n - 1)
        assert s.coefficients[-1] == -1
        assert s.coefficients[-3] == (n - 1) * (n - 4)


def test_planar_ninth_coefficient():
    s = expand_tail(2, 9)

    assert s.coefficients[-9] == -943
    assert [s.coefficients[k] for k in (-3, -5, -7)] == [-2, -11, -90]


def test_three_dimensional_values():
    s = expand_tail(3, 9)

    assert [s.coefficients[k] for k in (-3, -5, -7, -9)] == [-2, -16, -216, -3904]


def test_four_dimensional_third_coefficient_vanishes():
    assert expand_tail(4, 3).coefficients[-3] == 0


def test_symbolic_series_matches_closed_forms():
    s = expand_tail("n", 9)

    assert s.mode is SeriesMode.SYMBOLIC
    assert matches_closed_forms(s) == {-1: True, -3: True, -5: True, -7: True, -9: True}
    assert sympy.simplify(s.coefficients[1] - 1 / (N - 1)) == 0


def test_symbolic_coefficients_are_polynomials():
    s = expand_tail(N, 11)

    poly = s.polynomial(-11)
    assert poly.degree() == 10
    denominator, integer_poly = s.integer_form(-7)
    assert denominator == 1
    assert all(c == int(c) for c in integer_poly.coeffs())


def test_even_coefficients_vanish():
    for n in (2, 3, 5, Fraction(7, 2)):
        s = expand_tail(n, 15)
        assert s.even_coefficients
        assert all(v == 0 for v in s.even_coefficients.values())
    symbolic = expand_tail("n", 9)
    assert all(v == 0 for v in symbolic.even_coefficients.values())


def test_numeric_and_symbolic_agree():
    symbolic = expand_tail("n", 13)
    for n in range(2, 13):
        numeric = expand_tail(n, 13)
        for k, expr in symbolic.coefficients.items():
            value = sympy.nsimplify(expr.subs(N, n))
            assert Fraction(int(sympy.numer(value)), int(sympy.denom(value))) == numeric.coefficients[k]


def test_closed_forms_hold_for_each_dimension():
    for n in range(2, 9):
        s = expand_tail(n, 9)
        for k in (-1, -3, -5, -7, -9):
            assert s.coefficients[k] == _closed_form(k, n)


def test_residual_starts_past_the_order():
    for order in (1, 3, 9, 21):
        for n in (2, 3, 6):
            assert leading_residual_power(expand_tail(n, order)) <= -(order + 1)
    assert leading_residual_power(expand_tail("n", 7)) <= -8


def test_residual_is_exact():
    residual = formal_residual(expand_tail(2, 3))

    assert all(isinstance(v, Fraction) for v in residual.values())
    assert list(residual) == sorted(residual, reverse=True)
    assert all(v != 0 for v in residual.values())


def test_origin_coefficients():
    for n in range(2, 9):
        s = expand_origin(n, 9)
        assert s.coefficients[1] == Fraction(1, n)
        assert s.coefficients[3] == Fraction(1, n ** 3 * (n + 2))
        assert all(v == 0 for v in s.even_coefficients.values())


def test_eval_series_examples():
    assert eval_series(expand_tail(2, 1), 10.0) == pytest.approx(9.9, abs=1e-14)
    assert eval_series(expand_tail(4, 3), 7.0) == pytest.approx(eval_series(expand_tail(4, 1), 7.0), abs=1e-14)
    assert eval_series(expand_origin(3, 1), 0.6) == pytest.approx(0.2, abs=1e-15)


def test_eval_series_on_arrays():
    s = expand_tail(2, 9)
    r = [10.0, 20.0, 50.0]

    values = eval_series(s, r)

    assert values.shape == (3,)
    assert values[2] == pytest.approx(50 - 1 / 50 - 2 / 50 ** 3 - 11 / 50 ** 5 - 90 / 50 ** 7 - 943 / 50 ** 9, rel=1e-15)


def test_symbolic_series_cannot_be_evaluated():
    with pytest.raises(SeriesModeError):
        eval_series(expand_tail("n", 3), 10.0)


def test_invalid_arguments():
    with pytest.raises(ArgumentError):
        expand_tail(2, 4)
    with pytest.raises(ArgumentError):
        expand_tail(2, 23)
    with pytest.raises(ArgumentError):
        expand_tail(1, 3)
    with pytest.raises(ArgumentError):
        expand_origin(2.5, 3)


def test_dump_numeric_lines():
    text = dump_series(expand_tail(2, 9))

    lines = text.splitlines()
    assert lines[0] == "1\t1/1"
    assert "-3\t-2/1" in lines
    assert lines[-1] == "-9\t-943/1"


def test_dump_symbolic_polynomials():
    lines = dump_series(expand_tail("n", 3)).splitlines()

    assert "-1\t-1" in lines
    assert "-3\t+n^2 -5*n +4" in lines
    assert lines[0].startswith("1\t(")
