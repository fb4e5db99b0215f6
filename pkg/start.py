#!/usr/bin/env python3
"""
Startup script for soliton-lab: checks the numerical stack, then runs every
subcommand once with the given config file.

    python start.py [CONFIG] [--only series,soliton,...]
"""
import argparse
import importlib
import sys

# Load environment variables from .env file if it exists
from dotenv import load_dotenv
load_dotenv()

REQUIRED_PACKAGES = ("numpy", "scipy", "sympy", "pandas", "pydantic", "pydantic_settings")
# Cheapest first; the stability runs take longest.
RUN_ORDER = ("series", "soliton", "wings", "evolve", "growth", "stability", "plane")


def check_requirements():
    """Check if all requirements are met."""
    print("🔍 Checking requirements...")

    missing = []
    for name in REQUIRED_PACKAGES:
        try:
            importlib.import_module(name)
        except ImportError:
            missing.append(name)
    if missing:
        print(f"❌ Missing packages: {', '.join(missing)}")
        print("   Install them with: pip install -r requirements.txt")
        return False

    print("✅ Numerical stack available")
    return True


def start_application(config=None, only=None):
    """Run the selected subcommands in order; returns the worst exit status."""
    print("🚀 Starting soliton-lab...")

    if not check_requirements():
        print("❌ Requirements check failed. Please fix the issues above.")
        return 1

    from soliton_lab.config import settings
    from soliton_lab.main import main

    selected = [name for name in RUN_ORDER if not only or name in only]
    print(f"\n📂 Writing outputs under {settings.output_dir}")

    worst = 0
    for name in selected:
        print(f"\n▶️  {name}")
        argv = [name] + (["--config", config] if config else [])
        status = main(argv)
        print(f"   {'✅' if status == 0 else '❌'} {name} exited with {status}")
        worst = max(worst, status)

    print("\n👋 Done." if worst == 0 else f"\n⚠️  Finished with exit status {worst}")
    return worst


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run every soliton-lab subcommand once")
    parser.add_argument("config", nargs="?", help="key = value run configuration")
    parser.add_argument("--only", help="comma-separated subset of subcommands")
    args = parser.parse_args()
    sys.exit(start_application(args.config, set(args.only.split(",")) if args.only else None))
