"""Command-line front-end: TV denoising/inpainting, l1 recovery and the experiment drivers"""
import argparse
import sys
from typing import List, Optional

from loguru import logger
from pydantic import ValidationError

from src.cli.commands import EXIT_INVALID, run
from src.cli.spec import COMMANDS, DECOMPOSITIONS, RunSpec
from src.config import LOG_CONFIG, STRIPE_CONFIG, ensure_directories
from src.experiments.signals import EXPERIMENT_KINDS, SIGNAL_KINDS


def configure_logging(verbose: bool = False) -> None:
    """stderr at LOG_LEVEL (DEBUG with --verbose) plus the rotating file sink"""
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else LOG_CONFIG["level"])
    logger.add(
        LOG_CONFIG["file"],
        rotation=LOG_CONFIG["rotation"],
        retention=LOG_CONFIG["retention"],
        level="DEBUG" if verbose else LOG_CONFIG["level"],
    )


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, help="Regularization weight (command default if omitted)")
    parser.add_argument("--tau", type=float, help="Chambolle step (default 0.25)")
    parser.add_argument("--tol-projection", type=float, help="Chambolle stopping tolerance (default 1e-3)")
    parser.add_argument("--tol-outer", type=float, help="Outer energy-change tolerance (default 1e-10)")
    parser.add_argument("--subspaces", type=int, help="Number of subspaces")
    parser.add_argument("--inner", type=str, help="Inner iterations: an int or a comma list per subspace")
    parser.add_argument("--eta-iters", type=int, help="Fixed-point iterations for eta")
    parser.add_argument("--max-outer", type=int, help="Outer iteration cap")
    parser.add_argument("--parallel", action="store_true", help="Parallel subspace correction")
    parser.add_argument("--splitting", action="store_true", help="Plain thresholding when psi splits")
    parser.add_argument("--no-timing", dest="timing", action="store_false", help="Write 0 seconds in traces")


def _add_tv_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--stripe",
        type=int,
        nargs="?",
        const=STRIPE_CONFIG["half_width"],
        help=f"Half-width of the bands eta is computed on (default {STRIPE_CONFIG['half_width']})",
    )
    parser.add_argument(
        "--no-stripe", dest="no_stripe", action="store_true", help="Compute eta on the full complement"
    )


def _add_l1_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--decomposition", choices=[d for d in DECOMPOSITIONS if d != "stripes"])
    parser.add_argument("--switch-after", type=int, help="Switch to the index split after this many iterations")
    parser.add_argument("--rows", type=int, default=200, help="Rows of the generated Gaussian operator")
    parser.add_argument("--cols", type=int, default=40, help="Columns of the generated Gaussian operator")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subcorr",
        description="Subspace correction by oblique thresholding for TV and l1 minimization",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Seed for generated data and random decompositions")
    common.add_argument("--output-dir", type=str, help="Directory for all artifacts")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("tv-denoise-1d", "tv-inpaint-1d", "compare-naive-1d"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--signal", help="Signal file, one value per line")
        p.add_argument("--mask", help="0/1 mask file (1 = observed)")
        p.add_argument("--example", choices=SIGNAL_KINDS, help="Bundled example when no --signal")
        p.add_argument("--length", type=int, help="Length of the bundled example")
        _add_solver_flags(p)
        _add_tv_flags(p)
        if name == "compare-naive-1d":
            p.add_argument("--lambda0", type=float, default=1.0, help="Naive fidelity weight; alpha = 1/(2 lambda0)")
            p.add_argument("--naive-tau", type=float, default=0.5, help="Naive descent step")
            p.add_argument("--naive-iters", type=int, default=500, help="Naive iterations")
            p.add_argument("--eps", type=float, default=0.01, help="Naive diffusivity regularization")

    p = sub.add_parser("tv-inpaint-2d", parents=[common])
    p.add_argument("--image", help="Image, CSV rows or ASCII PGM")
    p.add_argument("--mask", help="0/1 mask image")
    p.add_argument("--size", type=int, help="Side of the synthetic image when no --image")
    _add_solver_flags(p)
    _add_tv_flags(p)

    p = sub.add_parser("l1-recover", parents=[common])
    p.add_argument("--operator", help="Dense operator CSV")
    p.add_argument("--datum", help="Datum, one value per line")
    p.add_argument("--weights", help="Positive l1 weights, one per coefficient")
    p.add_argument("--baseline", action="store_true", help="Also run plain iterative thresholding")
    _add_solver_flags(p)
    _add_l1_flags(p)

    p = sub.add_parser("l1-study", parents=[common])
    p.add_argument("--seeds", type=int, default=10, help="Number of consecutive seeds from --seed")
    _add_solver_flags(p)
    _add_l1_flags(p)

    p = sub.add_parser("generate", parents=[common])
    p.add_argument("--kind", required=True, choices=EXPERIMENT_KINDS)
    p.add_argument("--length", type=int, help="Signal length (1D kinds)")
    p.add_argument("--size", type=int, help="Image side (image-2d-synthetic)")
    p.add_argument("--rows", type=int, default=200)
    p.add_argument("--cols", type=int, default=40)

    return parser


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    """RunSpec from parsed flags; unset flags take the command defaults"""
    fields = {key: value for key, value in vars(args).items() if value is not None}
    return RunSpec(**fields)


def parse_spec(argv: Optional[List[str]] = None) -> RunSpec:
    """Parse argv into a RunSpec; raises pydantic ValidationError on bad values"""
    return spec_from_args(build_parser().parse_args(argv))


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    ensure_directories()
    log = logger.bind(component="cli")

    try:
        spec = spec_from_args(args)
    except ValidationError as e:
        log.error(f"Invalid arguments for {args.command}: {e}")
        return EXIT_INVALID

    log.info(f"Running {spec.command}")
    return run(spec)


__all__ = ["COMMANDS", "RunSpec", "build_parser", "configure_logging", "main", "parse_spec", "run", "spec_from_args"]
