"""Run artifacts: CSV data, gnuplot scripts and plain-text manifests.

Nothing written here carries wall-clock content, so identical runs produce
identical files.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Union

import pandas as pd

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class PlotSpec:
    """One gnuplot panel: columns ``x`` against each of ``ys`` from ``data_file``."""

    data_file: str
    x: str
    ys: Sequence[str]
    title: str = ""
    logscale: str = ""


def ensure_dir(path: PathLike) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_manifest(directory: PathLike, parameters: Mapping[str, Any], files: Iterable[str],
                   extra_lines: Sequence[str] = ()) -> Path:
    """``manifest.txt`` with sorted parameters, the files written and free-form lines."""
    path = Path(directory) / "manifest.txt"
    lines = ["# parameters"]
    lines += [f"{key} = {_format_value(parameters[key])}" for key in sorted(parameters)]
    lines.append("# files")
    lines += [str(name) for name in files]
    if extra_lines:
        lines.append("# results")
        lines += list(extra_lines)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_plot_script(directory: PathLike, plots: Sequence[PlotSpec], name: str = "plot.gp") -> Path:
    """A gnuplot script reading the CSVs next to it; it renders nothing by itself."""
    path = Path(directory) / name
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set grid",
    ]
    if len(plots) > 1:
        lines.append(f"set multiplot layout {len(plots)},1")
    for plot in plots:
        lines.append(f"set title '{plot.title}'")
        lines.append(f"set logscale {plot.logscale}" if plot.logscale else "unset logscale")
        curves = [
            f"'{plot.data_file}' using '{plot.x}':'{y}' with lines title '{y}'"
            for y in plot.ys
        ]
        lines.append("plot " + ", \\\n     ".join(curves))
    if len(plots) > 1:
        lines.append("unset multiplot")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
