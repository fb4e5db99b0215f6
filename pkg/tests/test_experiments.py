"""Tests for the stability experiments and their barriers."""
import math
from dataclasses import replace

import numpy as np
import pytest
import sympy
from pydantic import ValidationError

from soliton_lab.errors import ArgumentError, ConfigurationError
from soliton_lab.services.experiments import (
    PerturbationSpec,
    build_perturbation,
    check_barrier_ordering,
    comparison_sphere,
    hypothesis_radius,
    quadratic_growth_check,
    quadratic_growth_series,
    run_plane_stability,
    run_soliton_stability,
    soliton_setting,
    truncation_robustness,
)
from soliton_lab.services.mcf_evolver import (
    BoundarySpec,
    EvolutionState,
    RadialGrid,
    SchemeConfig,
    evolve,
)


@pytest.fixture(scope="module")
def setting():
    return soliton_setting(2, 0.05, 5.0, 60.0)


def _bump(amplitude=1.0, support=3.0):
    return PerturbationSpec(kind="compact-bump", amplitude=amplitude, support=support)


def _slow(amplitude, decay=0.5):
    return PerturbationSpec(kind="slow-decay", amplitude=amplitude, decay=decay)


def _assert_settles(report, drift):
    peak = int(np.argmax(report.sup_dev))
    tail = report.sup_dev[peak:]
    assert np.all(np.diff(tail) <= drift)
    assert report.rise_after_peak <= drift
    counts = report.omega_count
    last_peak = int(np.flatnonzero(counts == counts.max())[-1])
    assert np.all(np.diff(counts[last_peak:]) <= 0)
    assert report.converged
    after = report.times >= report.T_star
    assert np.all(report.omega_count[after] == 0)
    assert report.omega_after_T_star == 0


def test_perturbation_validation():
    with pytest.raises(ValidationError):
        PerturbationSpec(support=0.0)
    with pytest.raises(ValidationError):
        PerturbationSpec(amplitude=math.inf)
    with pytest.raises(ValidationError):
        PerturbationSpec(kind="gaussian")


def test_compact_bump():
    spec = _bump(amplitude=0.7, support=2.0)
    r = np.array([0.0, 1.0, 1.999, 2.0, 5.0])

    values = build_perturbation(spec, r)

    assert values[0] == pytest.approx(0.7)
    assert 0.0 < values[1] < 0.7
    assert values[3] == 0.0 and values[4] == 0.0


def test_slow_decay():
    spec = PerturbationSpec(kind="slow-decay", amplitude=2.0, decay=0.5)

    assert build_perturbation(spec, [3.0])[0] == pytest.approx(1.0)


def test_hypothesis_radius():
    bump = _bump(amplitude=1.0, support=3.0)
    R0 = hypothesis_radius(bump, 0.05)

    assert 0.0 < R0 < 3.0
    assert build_perturbation(bump, [R0])[0] == pytest.approx(0.05, rel=1e-9)
    assert hypothesis_radius(_bump(amplitude=0.01), 0.05) == 0.0
    assert hypothesis_radius(_bump(amplitude=-1.0), 0.05) == pytest.approx(R0)
    slow = PerturbationSpec(kind="slow-decay", amplitude=1.0, decay=1.0)
    assert hypothesis_radius(slow, 0.05) == pytest.approx(19.0)


def test_comparison_sphere_touches_the_paraboloid():
    C, n, tau, r = sympy.symbols("C n tau r", positive=True)
    sphere = comparison_sphere(C, n, tau, r)

    assert sympy.simplify(sphere.lower_height(r, tau) - (C * r ** 2 + 2 * C * n * tau)) == 0
    x = sympy.Symbol("x", positive=True)
    slope = sympy.diff(sphere.lower_height(x, tau), x).subs(x, r)
    assert sympy.simplify(slope - 2 * C * r) == 0


def test_comparison_sphere_numeric():
    sphere = comparison_sphere(1.5, 3, 0.2, 2.0)

    assert sphere.lower_height(2.0, 0.2) == pytest.approx(1.5 * 4.0 + 2 * 1.5 * 3 * 0.2)
    assert sphere.lower_height(1.0, 0.2) >= 1.5 * 1.0 + 2 * 1.5 * 3 * 0.2


def test_quadratic_growth_bound():
    grid = RadialGrid.with_spacing(4.0, 0.1)

    excess = quadratic_growth_check(1.0, grid, SchemeConfig(), 0.1, n=2)

    assert excess <= 20 * grid.h ** 2


def test_quadratic_growth_series_columns():
    grid = RadialGrid.with_spacing(4.0, 0.2)

    frame = quadratic_growth_series(1.0, grid, SchemeConfig(), 0.1, n=3, samples=10)

    assert list(frame.columns) == ["t", "excess"]
    assert frame["t"].iloc[0] == 0.0
    assert frame["excess"].iloc[0] == 0.0
    assert len(frame) == 11


def test_flat_data_has_no_growth():
    grid = RadialGrid.with_spacing(4.0, 0.1)

    assert quadratic_growth_check(0.0, grid, None, 0.1) <= 10 * grid.h ** 2


def test_negative_growth_constant_is_refused():
    with pytest.raises(ArgumentError):
        quadratic_growth_check(-1.0, RadialGrid.with_spacing(4.0, 0.1), None, 0.1)


def test_soliton_hypothesis_is_enforced():
    grid = RadialGrid.with_spacing(40.0, 0.5)

    with pytest.raises(ConfigurationError):
        run_soliton_stability(2, _bump(amplitude=1.0, support=30.0), 0.05, 5.0, grid, None, 1.0)


def test_hypothesis_radius_must_lie_inside_half_the_domain():
    grid = RadialGrid.with_spacing(60.0, 0.5)
    assert hypothesis_radius(_slow(0.3), 0.05) == pytest.approx(35.0)

    with pytest.raises(ConfigurationError):
        run_soliton_stability(2, _slow(0.3), 0.05, 5.0, grid, None, 1.0)


def test_wings_widen_to_the_hypothesis_radius(setting):
    grid = RadialGrid.with_spacing(60.0, 0.5)
    assert hypothesis_radius(_slow(0.2), 0.05) == pytest.approx(15.0)

    report = run_soliton_stability(2, _slow(0.2), 0.05, 5.0, grid, None, 0.5, samples=5, setting=setting)

    assert report.parameters["R_wing"] == pytest.approx(15.0)
    assert report.barrier_violation_max <= 20 * grid.h ** 2


def test_plane_needs_three_dimensions():
    grid = RadialGrid.with_spacing(30.0, 0.5)

    with pytest.raises(ArgumentError):
        run_plane_stability(2, _bump(), 25.0, 0.05, grid, None, 1.0)


def test_plane_hypothesis_is_enforced():
    grid = RadialGrid.with_spacing(30.0, 0.5)

    with pytest.raises(ConfigurationError):
        run_plane_stability(3, _bump(support=20.0), 25.0, 0.05, grid, None, 1.0)
    with pytest.raises(ConfigurationError):
        run_plane_stability(3, _bump(), 225.0, 0.05, grid, None, 1.0)


def test_unperturbed_bowl_stays_put(setting):
    grid = RadialGrid.with_spacing(30.0, 0.2)

    report = run_soliton_stability(2, _bump(amplitude=0.0), 0.05, 5.0, grid, None, 5.0, samples=20,
                                   setting=setting)

    assert np.max(report.sup_dev) <= 10 * grid.h ** 2
    assert report.T_star == 0.0
    assert report.barrier_violation_max <= 0.0
    assert len(report.to_frame()) == 21


def test_unperturbed_plane_stays_flat():
    grid = RadialGrid.with_spacing(30.0, 0.5)

    report = run_plane_stability(3, _bump(amplitude=0.0), 25.0, 0.05, grid, None, 2.0, samples=10)

    assert np.max(report.sup_dev) <= 10 * grid.h ** 2
    assert report.barrier_violation_max <= -0.05


def test_initial_data_lies_between_the_wings(setting):
    bowl, pair = setting
    grid = RadialGrid.with_spacing(30.0, 0.2)
    u0 = bowl.evaluate(grid.nodes) + build_perturbation(_bump(), grid.nodes)
    traj = evolve(EvolutionState(grid=grid, u=u0, t=0.0, n=2), BoundarySpec.constant(float(u0[-1])), 0.0)

    assert check_barrier_ordering(traj, pair) <= -0.05 + 1e-6


def test_evolving_wing_stays_above_the_bowl(setting):
    bowl, pair = setting
    grid = RadialGrid(R_max=30.0, M=100, r_min=10.0)
    r = grid.nodes
    w0, u0 = pair.w_plus.evaluate(r), bowl.evaluate(r)
    gaps = []
    upper = EvolutionState(grid=grid, u=w0, t=0.0, n=2)
    lower = EvolutionState(grid=grid, u=u0, t=0.0, n=2)
    times = np.linspace(0.01, 2.0, 200)

    upper_traj = evolve(upper, BoundarySpec.translating(float(w0[-1]), inner=float(w0[0])), 2.0,
                         sample_times=times)
    lower_traj = evolve(lower, BoundarySpec.translating(float(u0[-1]), inner=float(u0[0])), 2.0,
                         sample_times=times)
    for a, b in zip(upper_traj.states, lower_traj.states):
        gaps.append(float(np.min(a.u - b.u)))

    assert len(gaps) == 201
    assert min(gaps) >= 0.0


def test_uncalibrated_pair_is_refused(setting):
    _, pair = setting
    grid = RadialGrid.with_spacing(30.0, 0.5)
    traj = evolve(EvolutionState(grid=grid, u=np.zeros(61), t=0.0, n=2), BoundarySpec.constant(0.0), 0.0)

    with pytest.raises(ArgumentError):
        check_barrier_ordering(traj, replace(pair, epsilon=None))


@pytest.mark.slow
def test_bowl_recovers_from_a_bump(setting):
    drift_grid = RadialGrid.with_spacing(60.0, 0.1)
    drift = run_soliton_stability(2, _bump(amplitude=0.0), 0.05, 5.0, drift_grid, None, 40.0, setting=setting)
    report = run_soliton_stability(2, _bump(), 0.05, 5.0, drift_grid, None, 40.0, setting=setting)

    assert report.barrier_violation_max <= 20 * drift_grid.h ** 2
    _assert_settles(report, float(np.max(drift.sup_dev)))
    assert report.sup_dev[-1] <= 0.1
    outside = report.omega_radius[report.omega_count > 0]
    assert np.all(outside <= 2 * 5.0 + drift_grid.h)


@pytest.mark.slow
def test_bowl_recovers_on_a_coarse_grid(setting):
    grid = RadialGrid.with_spacing(60.0, 0.2)

    report = run_soliton_stability(2, _bump(), 0.05, 5.0, grid, None, 40.0, setting=setting)

    assert report.barrier_violation_max <= 20 * grid.h ** 2
    assert report.converged


@pytest.mark.slow
def test_bowl_recovers_from_a_dent(setting):
    grid = RadialGrid.with_spacing(30.0, 0.2)

    report = run_soliton_stability(2, _bump(amplitude=-1.0), 0.05, 5.0, grid, None, 20.0, setting=setting)

    assert report.barrier_violation_max <= 20 * grid.h ** 2
    assert np.all(report.sup_dev <= report.sup_dev[0] + 20 * grid.h ** 2)


@pytest.mark.slow
def test_bowl_recovers_from_a_slowly_decaying_perturbation():
    grid = RadialGrid.with_spacing(60.0, 0.2)

    report = run_soliton_stability(2, _slow(0.2), 0.05, 5.0, grid, None, 20.0)

    assert report.parameters["R_wing"] == pytest.approx(15.0)
    assert report.barrier_violation_max <= 20 * grid.h ** 2
    assert np.all(report.sup_dev <= report.sup_dev[0] + 20 * grid.h ** 2)
    outside = report.omega_radius[report.omega_count > 0]
    assert np.all(outside <= 2 * 15.0 + grid.h)


@pytest.mark.slow
def test_plane_recovers_from_a_bump():
    grid = RadialGrid.with_spacing(60.0, 0.2)

    report = run_plane_stability(3, _bump(), 25.0, 0.05, grid, None, 30.0)

    assert report.barrier_violation_max <= 20 * grid.h ** 2
    assert report.converged
    assert report.sup_dev[-1] <= 0.1


@pytest.mark.slow
def test_truncation_radius_does_not_matter():
    difference, reports = truncation_robustness(2, _bump(), 0.05, 5.0, 0.1, 60.0, 40.0)

    assert difference < 1e-3
    assert [r.parameters["R_max"] for r in reports] == [60.0, 120.0]
