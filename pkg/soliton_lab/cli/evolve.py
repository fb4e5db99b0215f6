"""``evolve``: a single flow run, against the shrinking sphere or the translating bowl."""
import logging
from typing import List

import numpy as np
import pandas as pd

from soliton_lab.cli.common import command_dir, finish, grid_for
from soliton_lab.cli.run_config import RunConfig
from soliton_lab.services import output_writer
from soliton_lab.services.mcf_evolver import (
    BoundarySpec,
    EvolutionState,
    evolve,
    shrinking_sphere_height,
    write_trajectory,
)
from soliton_lab.services.output_writer import PlotSpec
from soliton_lab.services.soliton_profiles import bowl_height

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> List[str]:
    directory = command_dir(config, "evolve")
    n, scheme = config.n, config.scheme_config()

    if config.initial == "sphere":
        radius = config.sphere_radius
        grid = grid_for(radius / 2.0, config.h)
        horizon = radius ** 2 / (8.0 * n)
        initial = EvolutionState.sample(grid, n, lambda r: shrinking_sphere_height(radius, n, r, 0.0))
        bc = BoundarySpec(outer=lambda t: float(shrinking_sphere_height(radius, n, grid.R_max, t)))
        exact = lambda t: shrinking_sphere_height(radius, n, grid.nodes, t)
        bound = None
    else:
        grid = grid_for(config.R_max, config.h)
        horizon = config.T
        bowl = bowl_height(n, max(grid.R_max, 10.0), config.tol, config.resample_step)
        u_bowl = bowl.evaluate(grid.nodes)
        initial = EvolutionState(grid=grid, u=u_bowl, t=0.0, n=n)
        bc = BoundarySpec.translating(float(u_bowl[-1]))
        exact = lambda t: u_bowl + t
        bound = 10.0 * grid.h ** 2

    times = np.linspace(0.0, horizon, config.samples + 1)[1:]
    traj = evolve(initial, bc, horizon, scheme, sample_times=times)
    errors = [float(np.max(np.abs(state.u - exact(state.t)))) for state in traj.states]

    write_trajectory(traj, directory / "trajectory", {"n": n, "initial": config.initial, "h": grid.h})
    output_writer.write_csv(pd.DataFrame({"t": traj.times, "error": errors}), directory / "error.csv")
    output_writer.write_plot_script(directory, [PlotSpec("error.csv", "t", ["error"], "max node error")])

    worst = max(errors)
    results = [
        f"initial={config.initial} steps={traj.steps} dt={traj.dt!r}",
        f"max_error={worst!r}",
    ]
    failures = []
    if bound is not None and worst > bound:
        failures.append(f"bowl drift {worst:.3e} exceeds {bound:.3e}")
    return finish(directory, config, "evolve", ["trajectory/manifest.txt", "error.csv", "plot.gp"], results, failures)
