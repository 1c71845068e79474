import argparse
import logging
import os
import sys
from typing import List, Optional

from nugap import __version__
from nugap.cli.commands import COMMANDS
from nugap.cli.documents import dumps
from nugap.config import NumericConfig
from nugap.errors import EXIT_INPUT, InputError, NugapError, describe

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Get logger
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, help="base circle grid size (power of two, default 4096)")
    common.add_argument("--tol-invertible", type=float, help="modulus floor for invertibility on the circle")
    common.add_argument("--json-only", action="store_true", help="only warnings and errors on stderr")
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(prog="nugap", description="nu-metric tools for discrete-time rational plants")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    numetric = sub.add_parser("numetric", parents=[common], help="nu-metric between two plants")
    numetric.add_argument("plant1")
    numetric.add_argument("plant2")
    numetric.add_argument("--plot", help="write theta, sigma_max, |det|, arg det as CSV")

    margin = sub.add_parser("margin", parents=[common], help="stability margin of a plant and controller")
    margin.add_argument("plant")
    margin.add_argument("controller")
    margin.add_argument("--plot", help="write theta, sigma_max(H) as CSV")

    factorize = sub.add_parser("factorize", parents=[common], help="normalized coprime factorizations")
    factorize.add_argument("plant")

    winding = sub.add_parser("winding", parents=[common], help="winding number of a scalar symbol")
    winding.add_argument("symbol")
    winding.add_argument("--toeplitz", action="store_true", help="add the index estimate and finite-section trace")
    winding.add_argument("--poisson", type=float, help="also wind the harmonic extension at this radius")
    winding.add_argument("--terms", type=int, default=512, help="Fourier terms kept for --poisson")

    report = sub.add_parser("report", parents=[common], help="run the seeded property campaign")
    report.add_argument("--seed", type=int, default=0)
    report.add_argument("--triples", type=int, default=200)
    report.add_argument("--table", action="store_true", help="print a summary table on stderr")
    return parser


def configure_logging(args: argparse.Namespace) -> None:
    level = os.getenv("NUGAP_LOG_LEVEL", "INFO").upper()
    if args.json_only:
        level = "WARNING"
    if args.verbose:
        level = "DEBUG"
    # stdout carries the result document
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=[logging.StreamHandler(sys.stderr)], force=True)


def build_config(args: argparse.Namespace) -> NumericConfig:
    try:
        return NumericConfig.from_env().with_overrides(grid_size=args.grid, tol_invertible=args.tol_invertible)
    except ValueError as e:
        raise InputError(f"invalid configuration: {e}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args)

    try:
        cfg = build_config(args)
        document, code = COMMANDS[args.command](args, cfg)
    except NugapError as e:
        logger.error(f"{args.command} failed: {e.message}", exc_info=args.verbose)
        print(dumps(describe(e, {"command": args.command})), file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        logger.error(f"{args.command} rejected its input: {e}", exc_info=args.verbose)
        print(dumps(describe(e, {"command": args.command})), file=sys.stderr)
        return EXIT_INPUT

    print(dumps(document))
    return code


if __name__ == "__main__":
    sys.exit(main())
