"""
Main entry point for boltzsynth.

This module builds the command-line parser, configures logging and maps
synthesis errors onto process exit codes.
"""

import argparse
import json
import logging
import sys

from . import __version__
from .cli.commands import (
    cmd_bounds,
    cmd_eval,
    cmd_gray,
    cmd_pair_cover,
    cmd_synth_dbn,
    cmd_synth_rbm,
)
from .systems.config_manager import ConfigManager
from .systems.error_handling import (
    CalibrationError,
    SynthesisError,
    get_metrics,
    synthesis_operation,
)

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per library entry point."""
    parser = argparse.ArgumentParser(
        prog="boltzsynth",
        description="Synthesize RBM and DBN weights for a target distribution.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--config", default="config", help="Configuration root directory."
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log debug output to stderr."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cover = commands.add_parser("pair-cover", help="Minimal pair cover of a support.")
    source = cover.add_mutually_exclusive_group(required=True)
    source.add_argument("--dist", help="dist/1 file whose support is covered.")
    source.add_argument("--support", help="support/1 file listing the states.")
    cover.add_argument("--out", help="Write the cover/1 document here.")
    cover.set_defaults(handler=cmd_pair_cover)

    rbm = commands.add_parser("synth-rbm", help="Synthesize an RBM.")
    rbm.add_argument("--target", required=True, help="dist/1 target file.")
    rbm.add_argument("--sharpness", type=float, help="Base weight scale a.")
    rbm.add_argument(
        "--no-calibrate", action="store_true", help="Skip refinement sweeps."
    )
    rbm.add_argument("--out", required=True, help="rbm/1 model file to write.")
    rbm.set_defaults(handler=cmd_synth_rbm)

    dbn = commands.add_parser("synth-dbn", help="Synthesize a DBN.")
    dbn.add_argument("--target", required=True, help="dist/1 target file.")
    dbn.add_argument("--b", type=int, help="Prefix width; inferred from n if omitted.")
    dbn.add_argument("--copy-sharpness", type=float, help="Copy margin T.")
    dbn.add_argument("--sharpness", type=float, help="Top RBM weight scale a.")
    dbn.add_argument(
        "--no-calibrate", action="store_true", help="Skip top RBM refinement."
    )
    dbn.add_argument("--trace", help="Write the exact push-forward trace CSV here.")
    dbn.add_argument("--out", required=True, help="dbn/1 model file to write.")
    dbn.set_defaults(handler=cmd_synth_dbn)

    evaluate = commands.add_parser("eval", help="Exact marginal or samples.")
    evaluate.add_argument("--model", required=True, help="rbm/1 or dbn/1 file.")
    evaluate.add_argument("--samples", type=int, help="Draw this many samples.")
    evaluate.add_argument("--seed", type=int, help="Sampler seed.")
    evaluate.add_argument("--out", help="Output file; standard output if omitted.")
    evaluate.set_defaults(handler=cmd_eval)

    bounds = commands.add_parser("bounds", help="Size and parameter-count table.")
    bounds.add_argument("--n-range", required=True, help="LO..HI or a single n.")
    bounds.add_argument("--b", type=int, help="Prefix width for the layer count.")
    bounds.add_argument("--s", type=int, help="Support size; 2**n if omitted.")
    bounds.add_argument("--format", choices=("text", "csv"), default="text")
    bounds.add_argument("--out", help="Output file; standard output if omitted.")
    bounds.set_defaults(handler=cmd_bounds)

    gray = commands.add_parser("gray", help="Dump a Gray-code sequence family.")
    gray.add_argument("--b", type=int, required=True, help="Prefix width, 1..5.")
    gray.add_argument(
        "--verify", action="store_true", help="Check the family exhaustively."
    )
    gray.add_argument("--out", help="Output file; standard output if omitted.")
    gray.set_defaults(handler=cmd_gray)
    return parser


def configure_logging(verbose: bool) -> None:
    """Send log records to stderr so stdout carries only command output."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: list[str] | None = None) -> int:
    """
    Run one boltzsynth command.

    Args:
        argv: Command-line arguments; sys.argv[1:] if omitted

    Returns:
        Process exit code
    """
    arguments = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(arguments)
    args.argv = arguments
    configure_logging(args.verbose)

    try:
        with synthesis_operation(args.command):
            settings = ConfigManager(args.config).load_settings()
            return int(args.handler(args, settings))
    except CalibrationError as e:
        logger.error(f"Calibration failed: {e}")
        sys.stderr.write(
            json.dumps({"residuals": {str(k): v for k, v in e.residuals.items()}})
            + "\n"
        )
        return e.exit_code
    except SynthesisError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    finally:
        logger.debug(f"Operation stats: {get_metrics().get_stats()}")


if __name__ == "__main__":
    sys.exit(main())
