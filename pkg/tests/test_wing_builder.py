"""Unit tests for winglike translators and their calibration against the bowl."""
import numpy as np
import pytest

from soliton_lab.config import settings
from soliton_lab.errors import ArgumentError, ConsistencyError, GeometryError, TailError
from soliton_lab.services.soliton_profiles import HeightProfile, bowl_height, translator_residual
from soliton_lab.services.wing_builder import (
    asymptotic_offset,
    branch_gap,
    branch_residual,
    build_wing_pair,
    calibrate_shifts,
    integrate_height_over_axis,
    neck_curvature_signs,
    wing_frame,
    wing_residuals,
)


@pytest.fixture(scope="module")
def bowl():
    return bowl_height(2, 80.0)


@pytest.fixture(scope="module")
def pair():
    return build_wing_pair(2, 1.0, 40.0)


@pytest.fixture(scope="module")
def fine_pair():
    return build_wing_pair(2, 1.0, 20.0, step=1e-3)


def _bowl_plus(bowl, extra):
    return HeightProfile(n=bowl.n, r=bowl.r, u=bowl.u + extra(bowl.r), slope=bowl.slope, anchor=bowl.anchor)


@pytest.mark.parametrize("n,R", [(2, 1.0), (3, 2.0), (4, 0.5)])
def test_turning_point_curvature(n, R):
    arc = integrate_height_over_axis(n, R)

    i0 = int(np.argmin(np.abs(arc.y)))
    assert arc.y[i0] == 0.0
    assert arc.h[i0] == R
    assert arc.curvature()[i0] == pytest.approx((n - 1) / R, rel=1e-12)
    assert np.all(arc.h >= R)
    assert np.all(np.diff(arc.y) > 0)


def test_handoff_slopes(pair):
    arc = pair.inner_arc
    _, h_lo, p_lo = arc.lower_handoff
    _, h_up, p_up = arc.upper_handoff

    assert 1.0 / p_lo == pytest.approx(-settings.switch_slope, rel=1e-8)
    assert 1.0 / p_up == pytest.approx(max(settings.switch_slope, 2.0 * h_up), rel=1e-8)
    assert pair.lower_phi.phi[0] < 0.0 < pair.upper_phi.phi[0]
    assert pair.lower_switch == h_lo
    assert pair.upper_switch == h_up


def test_branches_start_at_the_arc_ends(pair):
    arc = pair.inner_arc

    assert pair.upper_branch.anchor == (arc.upper_handoff[1], arc.upper_handoff[0])
    assert pair.lower_branch.anchor == (arc.lower_handoff[1], arc.lower_handoff[0])
    assert pair.upper_branch.u[0] > 0.0 > pair.lower_branch.u[0]


def test_gap_is_positive_and_growing(pair):
    r, gap = branch_gap(pair)

    assert np.all(gap > 0.0)
    assert np.all(np.diff(gap) >= -1e-9)


def test_upper_branch_bends_both_ways(pair):
    inner, outer = neck_curvature_signs(pair)

    assert inner < 0.0 < outer


def test_offsets_are_stable_under_doubling(pair, bowl):
    longer = build_wing_pair(2, 1.0, 80.0)

    assert asymptotic_offset(longer.lower_branch, bowl) == pytest.approx(
        asymptotic_offset(pair.lower_branch, bowl), abs=1e-6)
    assert asymptotic_offset(longer.upper_branch, bowl) == pytest.approx(
        asymptotic_offset(pair.upper_branch, bowl), abs=1e-6)


def test_calibration_hits_epsilon(pair, bowl):
    calibrated = calibrate_shifts(pair, bowl, 0.05)

    assert calibrated.calibrated
    assert asymptotic_offset(calibrated.w_plus, bowl) == pytest.approx(0.05, abs=1e-10)
    assert asymptotic_offset(calibrated.w_minus, bowl) == pytest.approx(-0.05, abs=1e-10)
    assert calibrated.shifts == (0.05 - calibrated.C_plus, -0.05 - calibrated.C_minus)


def test_zero_epsilon_matches_the_bowl_at_infinity(pair, bowl):
    calibrated = calibrate_shifts(pair, bowl, 0.0)

    assert abs(asymptotic_offset(calibrated.w_plus, bowl)) < 1e-10
    assert abs(asymptotic_offset(calibrated.w_minus, bowl)) < 1e-10


def test_shift_equivariance(pair, bowl):
    one = calibrate_shifts(pair, bowl, 0.05)
    two = calibrate_shifts(pair, bowl, 0.10)

    np.testing.assert_allclose(two.w_plus.u - one.w_plus.u, 0.05, atol=1e-10)
    np.testing.assert_allclose(two.w_minus.u - one.w_minus.u, -0.05, atol=1e-10)


def test_barriers_enclose_the_shifted_bowl(pair, bowl):
    frame = wing_frame(calibrate_shifts(pair, bowl, 0.05), bowl, step=0.05)

    assert np.all(frame["w_plus"] - frame["u_bowl"] >= 0.05 - 1e-6)
    assert np.all(frame["w_minus"] - frame["u_bowl"] <= -0.05 + 1e-6)
    assert list(frame.columns) == ["r", "w_plus", "w_minus", "u_bowl"]


def test_branch_residuals(fine_pair):
    for branch, r_s in ((fine_pair.upper_branch, fine_pair.upper_switch),
                        (fine_pair.lower_branch, fine_pair.lower_switch)):
        residual = translator_residual(branch)[:-2]
        r = branch.r[:-2]
        assert np.max(np.abs(residual[r >= r_s + 1.0])) <= 1e-6
        assert np.max(np.abs(residual[r >= r_s + 0.2])) <= 1e-4



@pytest.mark.parametrize("n,R,r_max", [(2, 5.0, 100.0), (3, 2.0, 40.0)])
def test_residuals_hold_up_to_the_handoff(n, R, r_max):
    pair = build_wing_pair(n, R, r_max)

    residuals = wing_residuals(pair)

    assert set(residuals) == {"upper_near", "upper_far", "lower_near", "lower_far"}
    assert residuals["upper_far"] <= 1e-6
    assert residuals["lower_far"] <= 1e-6
    assert residuals["upper_near"] <= 1e-4
    assert residuals["lower_near"] <= 1e-4


def test_steep_stretch_needs_the_fine_window():
    pair = build_wing_pair(2, 5.0, 100.0)
    r_s = pair.upper_switch

    fine = branch_residual(pair.upper_phi, r_s, r_s + 1.0, 1e-4)

    assert fine <= 1e-4
    assert branch_residual(pair.upper_phi, r_s, r_s + 1.0, 1e-2) > fine


def test_offset_of_a_shifted_bowl(bowl):
    assert asymptotic_offset(bowl, bowl) == 0.0
    assert asymptotic_offset(bowl.shifted(5.0), bowl) == pytest.approx(5.0, abs=1e-9)


def test_drifting_offset_is_refused(bowl):
    drifting = _bowl_plus(bowl, lambda r: 1.0 / (1.0 + r))

    with pytest.raises(TailError):
        asymptotic_offset(drifting, bowl)


def test_short_common_range_is_refused(bowl):
    r = np.linspace(50.0, 60.0, 101)
    piece = HeightProfile(n=2, r=r, u=bowl.evaluate(r), slope=r, anchor=(50.0, 0.0))

    with pytest.raises(TailError):
        asymptotic_offset(piece, bowl)


def test_invalid_wing_arguments(bowl, pair):
    with pytest.raises(ArgumentError):
        build_wing_pair(2, 1.0, 10.0)
    with pytest.raises(ArgumentError):
        build_wing_pair(2, 1.0, 40.0, switch_slope=3.0)
    with pytest.raises(ArgumentError):
        integrate_height_over_axis(2, 0.001, step=1e-3)
    with pytest.raises(ArgumentError):
        calibrate_shifts(pair, bowl, -0.1)


def test_dimension_mismatch_is_refused(pair):
    with pytest.raises(ArgumentError):
        calibrate_shifts(pair, bowl_height(3, 40.0), 0.05)


def test_exhausted_arc_budget():
    with pytest.raises(GeometryError):
        integrate_height_over_axis(2, 1.0, arc_budget=10)


def test_inconsistent_handoff(monkeypatch):
    monkeypatch.setattr(settings, "handoff_tolerance", 1e-20)

    with pytest.raises(ConsistencyError):
        build_wing_pair(2, 1.0, 20.0)
