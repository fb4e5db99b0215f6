"""``growth``: the paraboloid bound for data below C r^2."""
import logging
from typing import List

from soliton_lab.cli.common import command_dir, finish, grid_for
from soliton_lab.cli.run_config import RunConfig
from soliton_lab.services import output_writer
from soliton_lab.services.experiments import quadratic_growth_series
from soliton_lab.services.output_writer import PlotSpec

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> List[str]:
    directory = command_dir(config, "growth")
    grid = grid_for(config.growth_R_max, config.h)
    frame = quadratic_growth_series(
        config.growth_C, grid, config.scheme_config(), config.tau, n=config.n, samples=config.samples
    )
    output_writer.write_csv(frame, directory / "growth.csv")
    output_writer.write_plot_script(directory, [PlotSpec("growth.csv", "t", ["excess"], "excess over C r^2 + 2Cnt")])

    excess = float(frame["excess"].max())
    bound = 20.0 * grid.h ** 2
    results = [f"max_excess={excess!r} bound={bound!r}"]
    failures = [] if excess <= bound else [f"excess {excess:.3e} exceeds {bound:.3e}"]
    return finish(directory, config, "growth", ["growth.csv", "plot.gp"], results, failures)
