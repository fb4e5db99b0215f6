"""Command-line subcommands."""
import logging
import sys
from typing import Callable, Dict, List

from soliton_lab.cli import evolve, growth, plane, series, soliton, stability, wings
from soliton_lab.cli.run_config import RunConfig
from soliton_lab.errors import SolitonLabError

logger = logging.getLogger(__name__)

Handler = Callable[[RunConfig], List[str]]

# Subcommand registry
commands: Dict[str, Handler] = {
    "series": series.run,
    "soliton": soliton.run,
    "wings": wings.run,
    "evolve": evolve.run,
    "stability": stability.run,
    "plane": plane.run,
    "growth": growth.run,
}


def run(subcommand: str, config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit status.

    0 on success, 1 on numerical or acceptance failure, 2 on configuration errors.
    """
    handler = commands.get(subcommand)
    if handler is None:
        message = f"unknown subcommand {subcommand!r}; choose from {', '.join(sorted(commands))}"
        logger.error(message)
        print(message, file=sys.stderr)
        return 2
    try:
        results = handler(config)
    except SolitonLabError as e:
        logger.error(f"❌ {subcommand} failed: {e}")
        print(f"{subcommand}: {e}", file=sys.stderr)
        return e.exit_code
    for line in results:
        logger.info(f"{subcommand}: {line}")
    logger.info(f"✅ {subcommand} finished, outputs in {config.output_dir}/{subcommand}")
    return 0
