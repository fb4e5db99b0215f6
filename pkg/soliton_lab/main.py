"""
soliton-lab command-line entry point.

    python -m soliton_lab.main <subcommand> [--config FILE] [--<key> VALUE ...]

Settings come from the environment (SOLITON_LAB_*) and ``.env``; run parameters
from the config file, overridden by flags.
"""
import logging
import sys
from typing import Optional, Sequence

from soliton_lab.cli import commands, run
from soliton_lab.cli.run_config import build_parser, parse_config
from soliton_lab.config import settings
from soliton_lab.errors import ConfigurationError

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser(commands)
    args = parser.parse_args(argv)
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key not in ("subcommand", "config") and value is not None
    }
    try:
        config = parse_config(args.config, overrides)
    except ConfigurationError as e:
        logger.error(f"❌ {e}")
        print(str(e), file=sys.stderr)
        return e.exit_code

    logger.info(f"🚀 Running {args.subcommand}")
    return run(args.subcommand, config)


if __name__ == "__main__":
    sys.exit(main())
