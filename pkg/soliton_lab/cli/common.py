"""Helpers shared by the subcommand handlers."""
from pathlib import Path
from typing import List, Sequence

from soliton_lab.cli.run_config import RunConfig
from soliton_lab.errors import AcceptanceFailure
from soliton_lab.services import output_writer
from soliton_lab.services.mcf_evolver import RadialGrid


def command_dir(config: RunConfig, name: str) -> Path:
    return output_writer.ensure_dir(Path(config.output_dir) / name)


def grid_for(R_max: float, h: float) -> RadialGrid:
    return RadialGrid.with_spacing(R_max, h)


def finish(directory: Path, config: RunConfig, name: str, files: Sequence[str],
           results: List[str], failures: Sequence[str] = ()) -> List[str]:
    """Write the manifest, then raise if any acceptance check failed."""
    parameters = {key: value for key, value in config.model_dump().items() if value is not None}
    parameters["subcommand"] = name
    lines = list(results) + [f"FAILED {failure}" for failure in failures]
    output_writer.write_manifest(directory, parameters, files, lines)
    if failures:
        raise AcceptanceFailure(f"{name}: " + "; ".join(failures))
    return list(results)
