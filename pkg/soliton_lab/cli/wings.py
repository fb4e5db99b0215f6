"""``wings``: winglike translators calibrated against the bowl."""
import logging
from typing import List

from soliton_lab.cli.common import command_dir, finish
from soliton_lab.cli.run_config import RunConfig
from soliton_lab.services import output_writer
from soliton_lab.services.output_writer import PlotSpec
from soliton_lab.services.soliton_profiles import bowl_height
from soliton_lab.services.wing_builder import (
    arc_frame,
    build_wing_pair,
    calibrate_shifts,
    wing_frame,
    wing_residuals,
)

logger = logging.getLogger(__name__)

# residual bounds next to the handoff and beyond it, before the tolerance term
_NEAR_BOUND = 1e-4
_FAR_BOUND = 1e-6


def run(config: RunConfig) -> List[str]:
    directory = command_dir(config, "wings")
    n, step, tol = config.n, config.resample_step, config.tol
    reach = max(config.r_max, 20.0 * max(config.r_wing, n - 1))

    pair = build_wing_pair(n, config.r_wing, reach, config.switch_slope, tol, step)
    bowl = bowl_height(n, reach, tol, step)
    pair = calibrate_shifts(pair, bowl, config.epsilon)

    output_writer.write_csv(wing_frame(pair, bowl, step), directory / "wings.csv")
    output_writer.write_csv(arc_frame(pair.inner_arc), directory / "arc.csv")
    output_writer.write_plot_script(directory, [
        PlotSpec("wings.csv", "r", ["w_plus", "w_minus", "u_bowl"], "shifted wings and bowl"),
        PlotSpec("arc.csv", "h", ["y"], "inner arc"),
    ])

    residuals = wing_residuals(pair)
    bounds = {"near": _NEAR_BOUND + 10.0 * tol, "far": _FAR_BOUND + 10.0 * tol}
    s_plus, s_minus = pair.shifts
    results = [
        f"C_plus={pair.C_plus!r} C_minus={pair.C_minus!r}",
        f"s_plus={s_plus!r} s_minus={s_minus!r}",
        f"upper_switch={pair.upper_switch!r} lower_switch={pair.lower_switch!r}",
        " ".join(f"max_residual_{key}={value!r}" for key, value in residuals.items()),
        f"bound_near={bounds['near']!r} bound_far={bounds['far']!r}",
    ]
    failures = []
    for key, value in residuals.items():
        side, zone = key.split("_")
        if value > bounds[zone]:
            failures.append(f"{side} branch residual ({zone} zone) {value:.3e} exceeds {bounds[zone]:.3e}")
    return finish(directory, config, "wings", ["wings.csv", "arc.csv", "plot.gp"], results, failures)
