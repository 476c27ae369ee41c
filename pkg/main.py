#!/usr/bin/env python3
"""
nilcohom command-line entry point
Cohomological equations for nilflows: algebra analysis, coadjoint orbits, adapted
representations, Green solves, Diophantine certification and nilflow simulation.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from modules.config_manager import ConfigManager
from modules.constants import LOG_FILE
from modules.pipeline import EXIT_USAGE, EXIT_VALIDATION, run
from modules.validation import ValidationError

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilcohom",
        description="Cohomological equations for nilflows",
        epilog='Example: python main.py solve heisenberg --lambda "0,0,1" --X "1,0,0" --f dgaussian',
    )
    parser.add_argument("-c", "--config", help="JSON run configuration (flags override it)")
    parser.add_argument("--out", dest="out_dir", help="Output directory (default: output)")
    parser.add_argument("--precision", type=int, help="Significant digits in CSV files (default: 17)")
    parser.add_argument("--seed", type=int, help="Random seed recorded in the report")
    parser.add_argument(
        "--json", dest="json_output", action="store_true", default=None,
        help="Print the report as JSON",
    )

    sub = parser.add_subparsers(dest="subcommand")

    analyze = sub.add_parser("analyze", help="Central series, step and lattice data")
    _algebra_arg(analyze)

    orbit = sub.add_parser("orbit", help="Orbit invariants of lambda along X")
    _algebra_arg(orbit)
    _orbit_args(orbit)

    adapt = sub.add_parser("adapt", help="Adapted representation data")
    _algebra_arg(adapt)
    _orbit_args(adapt)

    solve = sub.add_parser("solve", help="Green solve of X u = f in one representation")
    _algebra_arg(solve)
    _orbit_args(solve)
    solve.add_argument("--f", dest="f_recipe", help='Data recipe, e.g. "2*t^2*gaussian(1/2)"')
    solve.add_argument("--alpha", type=float, help="Sobolev order of the data (default: 1.5)")
    solve.add_argument("--beta", type=float, help="Sobolev order of the solution (default: -1)")
    solve.add_argument("--part", type=int, choices=[1, 2], help="Estimate family to check")
    solve.add_argument("--grid-N", dest="grid_n", type=int, help="Grid points (default: 4096)")
    solve.add_argument("--grid-L", dest="grid_l", type=float, help="Window half-width (default: 12)")
    solve.add_argument("--mode", choices=["grid", "hermite"], help="Discretisation")
    solve.add_argument("--hermite-modes", type=int, help="Hermite modes (default: 384)")

    dioph = sub.add_parser("diophantine", help="Finite-range Diophantine certification")
    _algebra_arg(dioph, required=False)
    dioph.add_argument("--X", dest="x_vector", help="Flow direction; Omega is its first layer")
    dioph.add_argument("--omega", help='Frequency vector, e.g. "1,(1+sqrt(5))/2"')
    dioph.add_argument("--tau", type=float, help="Diophantine exponent excess (default: 0)")
    dioph.add_argument("--mmax", dest="m_max", type=int, help="Scan range (default: 1000)")

    simulate = sub.add_parser("simulate", help="Birkhoff averages along the nilflow")
    _algebra_arg(simulate)
    simulate.add_argument("--X", dest="x_vector", help="Flow direction")
    simulate.add_argument("--obs", dest="observable", help='"const", "char:1,-1" or "cob:1,0;0.5*0,1"')
    simulate.add_argument("--x0", help="Start point in Malcev coordinates (default: identity)")
    simulate.add_argument("--T", dest="t_values", type=float, nargs="+", help="Averaging times")
    simulate.add_argument("--dt", type=float, help="Integration step (default: 0.1)")
    return parser


def _algebra_arg(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "algebra_path",
        nargs=None if required else "?",
        help="Algebra file, or a bundled name (heisenberg, filiform4, abelian2, heisenberg_r)",
    )


def _orbit_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lambda_form", help='Linear form, e.g. "0,0,1"')
    parser.add_argument("--X", dest="x_vector", help='Flow direction, e.g. "1,0,0"')


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    values = vars(args).copy()
    values.pop("config", None)
    return values


def _attach_file_log(out_dir: str) -> logging.Handler:
    handler = logging.FileHandler(Path(out_dir) / LOG_FILE)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.getLogger().addHandler(handler)
    return handler


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point with argument parsing"""
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, handlers=[logging.StreamHandler()])

    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        parser.print_help()
        return 0
    args = parser.parse_args(argv)
    if args.subcommand is None and args.config is None:
        parser.error("a subcommand is required")

    try:
        config = ConfigManager(args.config).load_run_config(_overrides(args))
    except FileNotFoundError as e:
        logging.error(f"❌ {e}")
        return EXIT_USAGE
    except ValidationError as e:
        logging.error(f"❌ Invalid configuration: {e}")
        return EXIT_VALIDATION

    handler = _attach_file_log(config.out_dir)
    try:
        logging.info(f"🚀 nilcohom {config.subcommand}")
        return run(config)
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()


if __name__ == "__main__":
    sys.exit(main())
