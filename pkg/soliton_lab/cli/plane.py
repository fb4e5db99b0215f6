"""``plane``: perturbed plane between shifted n-catenoids."""
import logging
from typing import List

from soliton_lab.cli.common import command_dir, finish, grid_for
from soliton_lab.cli.run_config import RunConfig
from soliton_lab.cli.stability import acceptance, write_report
from soliton_lab.services.experiments import run_plane_stability

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> List[str]:
    report = run_plane_stability(
        config.n,
        config.perturbation_spec(),
        config.catenoid_c,
        config.epsilon,
        grid_for(config.R_max, config.h),
        config.scheme_config(),
        config.T,
        samples=config.samples,
    )
    directory = command_dir(config, "plane")
    files = write_report(report, directory)
    return finish(directory, config, "plane", files, [report.summary_line()], acceptance(report))
