"""``stability``: perturbed bowl between epsilon-shifted wings."""
import logging
from typing import List

from soliton_lab.cli.common import command_dir, finish, grid_for
from soliton_lab.cli.run_config import RunConfig
from soliton_lab.services import output_writer
from soliton_lab.services.experiments import StabilityReport, run_soliton_stability
from soliton_lab.services.output_writer import PlotSpec

logger = logging.getLogger(__name__)


def write_report(report: StabilityReport, directory) -> List[str]:
    output_writer.write_csv(report.to_frame(), directory / "report.csv")
    output_writer.write_plot_script(directory, [
        PlotSpec("report.csv", "t", ["sup_dev"], "sup deviation", logscale="y"),
        PlotSpec("report.csv", "t", ["omega_count"], "nodes beyond 2 epsilon"),
        PlotSpec("report.csv", "t", ["barrier_violation"], "barrier violation"),
    ])
    return ["report.csv", "plot.gp"]


def acceptance(report: StabilityReport) -> List[str]:
    """Messages for every failed acceptance check; empty when the run passes."""
    failures = []
    bound = 20.0 * report.h ** 2
    if report.barrier_violation_max > bound:
        failures.append(f"barrier violation {report.barrier_violation_max:.3e} exceeds {bound:.3e}")
    drift = 10.0 * report.h ** 2
    if report.rise_after_peak > drift:
        failures.append(f"sup deviation rose by {report.rise_after_peak:.3e} after its peak, more than {drift:.3e}")
    if not report.converged:
        failures.append(f"sup deviation never reached 2*epsilon = {2 * report.epsilon}")
    elif report.omega_after_T_star > 0:
        failures.append(f"{report.omega_after_T_star} nodes beyond 2*epsilon after T_star={report.T_star}")
    return failures


def run(config: RunConfig) -> List[str]:
    directory = command_dir(config, "stability")
    report = run_soliton_stability(
        config.n,
        config.perturbation_spec(),
        config.epsilon,
        config.r_wing,
        grid_for(config.R_max, config.h),
        config.scheme_config(),
        config.T,
        samples=config.samples,
    )
    files = write_report(report, directory)
    return finish(directory, config, "stability", files, [report.summary_line()], acceptance(report))
