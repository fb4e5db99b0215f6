"""``soliton``: the bowl translator and a sample slope profile."""
import logging
from typing import List

import numpy as np
import pandas as pd

from soliton_lab.cli.common import command_dir, finish
from soliton_lab.cli.run_config import RunConfig
from soliton_lab.services import output_writer
from soliton_lab.services.output_writer import PlotSpec
from soliton_lab.services.soliton_profiles import (
    bowl_phi,
    height_frame,
    height_from_phi,
    integrate_phi,
    phi_frame,
    translator_residual,
)

logger = logging.getLogger(__name__)

# the residual is read on a grid at least this fine, against this bound plus 10*tol
_RESIDUAL_STEP = 1e-3
_RESIDUAL_BOUND = 1e-6


def run(config: RunConfig) -> List[str]:
    directory = command_dir(config, "soliton")
    n, step, tol = config.n, config.resample_step, config.tol

    bowl = bowl_phi(n, config.r_max, tol)
    height = height_from_phi(bowl, (0.0, 0.0), step=step)
    fine = height if step <= _RESIDUAL_STEP else height_from_phi(bowl, (0.0, 0.0), step=_RESIDUAL_STEP)
    residual = translator_residual(fine)
    profile = integrate_phi(n, config.R, config.phi0, config.r_max, tol)

    output_writer.write_csv(phi_frame(bowl, step), directory / "bowl_phi.csv")
    output_writer.write_csv(height_frame(height), directory / "bowl_height.csv")
    output_writer.write_csv(pd.DataFrame({"r": fine.r, "residual": residual}), directory / "residual.csv")
    output_writer.write_csv(phi_frame(profile, step), directory / "profile_phi.csv")
    output_writer.write_plot_script(directory, [
        PlotSpec("bowl_phi.csv", "r", ["phi"], "bowl slope"),
        PlotSpec("profile_phi.csv", "r", ["phi"], f"slope from (R, phi0) = ({config.R}, {config.phi0})"),
        PlotSpec("residual.csv", "r", ["residual"], "translator residual"),
    ])

    r_end = bowl.r_max
    tail = float(bowl.evaluate(r_end)[0]) - r_end / (n - 1) + 1.0 / r_end
    worst = float(np.max(np.abs(residual[2:-2])))
    bound = _RESIDUAL_BOUND + 10.0 * tol
    results = [
        f"bowl_steps={len(bowl.r)} origin_order={bowl.origin_series.order}",
        f"tail_remainder={tail!r}",
        f"max_residual={worst!r} bound={bound!r}",
    ]
    failures = [] if worst <= bound else [f"translator residual {worst:.3e} exceeds {bound:.3e}"]
    return finish(
        directory, config, "soliton",
        ["bowl_phi.csv", "bowl_height.csv", "residual.csv", "profile_phi.csv", "plot.gp"],
        results, failures,
    )
