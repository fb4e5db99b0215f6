"""``series``: exact tail expansion of the slope equation."""
import logging
import sys
from typing import List

import pandas as pd
import sympy

from soliton_lab.cli.common import command_dir, finish
from soliton_lab.cli.run_config import RunConfig
from soliton_lab.services import output_writer
from soliton_lab.services.series_expansion import (
    N,
    SeriesMode,
    closed_form_tail_coefficients,
    dump_series,
    expand_tail,
    leading_residual_power,
    matches_closed_forms,
)

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> List[str]:
    directory = command_dir(config, "series")
    series = expand_tail("n" if config.symbolic else config.n, config.order)
    text = dump_series(series)
    sys.stdout.write(text)
    (directory / "series.txt").write_text(text, encoding="utf-8")
    files = ["series.txt"]

    if series.mode is SeriesMode.SYMBOLIC:
        checks = matches_closed_forms(series)
    else:
        checks = {
            k: sympy.Rational(series.coefficients[k].numerator, series.coefficients[k].denominator)
            == expr.subs(N, config.n)
            for k, expr in closed_form_tail_coefficients().items()
            if k in series.coefficients
        }
        frame = pd.DataFrame({
            "power": list(series.coefficients),
            "numerator": [c.numerator for c in series.coefficients.values()],
            "denominator": [c.denominator for c in series.coefficients.values()],
            "abs_value": [abs(float(c)) for c in series.coefficients.values()],
        })
        output_writer.write_csv(frame, directory / "series.csv")
        output_writer.write_plot_script(directory, [
            output_writer.PlotSpec("series.csv", "power", ["abs_value"], "|c_k|", logscale="y"),
        ])
        files += ["series.csv", "plot.gp"]

    leading = leading_residual_power(series)
    results = [
        f"mode={series.mode.value} order={series.order}",
        f"closed_forms_matched={sum(checks.values())}/{len(checks)}",
        f"leading_residual_power={leading}",
    ]
    failures = [f"c_{k} differs from its closed form" for k, ok in checks.items() if not ok]
    if leading > -(series.order + 1):
        failures.append(f"residual starts at r^{leading}, expected at most r^{-(series.order + 1)}")
    return finish(directory, config, "series", files, results, failures)
