"""
Command line entry point `rn-spectra`.

    rn-spectra analyze <input> --n 50 --dx sample [--basis chebyshev] [--out DIR]
    rn-spectra gen two-stage --rates -0.01 -0.1 --lengths 15 5 -o fixture.dat
"""

import argparse
import logging
import sys
from typing import List, Optional

from .analysis import RunConfig, SpectralAnalyzer
from .config_loader import get_config, load_config
from .datafile import write_timeserie
from .errors import RNSpectraError, exit_code_for
from .models import MODEL_DEFAULTS, RUNGE_COUNT, default_step, gen_runge, generate
from .moments import DXMode
from .orthopoly import BasisFamily

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level) -> None:
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rn-spectra",
        description="Radon-Nikodym interpolation and generalized spectra of sampled signals",
    )
    parser.add_argument("--config", help="Path to config.json")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="count", default=0,
                           help="More logging (-v info, -vv debug)")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Only log errors")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="Analyze a two-column timeserie file")
    analyze.add_argument("input", help="Tab-separated x, f file ('|' lines are comments)")
    analyze.add_argument("--n", type=int, help="Basis dimension (1..150)")
    analyze.add_argument("--dx", choices=[mode.value for mode in DXMode],
                         help="<Q_k> from sample sums or closed-form integrals")
    analyze.add_argument("--basis", choices=[family.value for family in BasisFamily])
    analyze.add_argument("--out", help="Output directory (default: run directory in the cache)")
    analyze.add_argument("--log-derivative", action="store_true", default=None,
                         help="Also write the d ln f/dx spectrum")
    analyze.add_argument("--histogram", type=int, metavar="BINS",
                         help="Write eigenvalue distributions with this many bins")

    gen = commands.add_parser("gen", help="Write a synthetic fixture file")
    models = gen.add_subparsers(dest="model", required=True)
    for name, help_text in (
        ("two-stage", "Piecewise-linear degradation, f(0)=1"),
        ("multi-exp", "Piecewise-exponential relaxation, f(0)=1"),
    ):
        model = models.add_parser(name, help=help_text)
        model.add_argument("--rates", type=float, nargs="+", help="Slope per stage")
        model.add_argument("--lengths", type=float, nargs="+", help="Duration per stage")
        model.add_argument("--step", type=float, help="Sampling step (default: shortest stage/500)")
        model.add_argument("-o", "--output", required=True)
    runge = models.add_parser("runge", help="1/(1+25x^2) on [-1, 1]")
    runge.add_argument("--count", type=int, default=RUNGE_COUNT)
    runge.add_argument("-o", "--output", required=True)
    return parser


def _log_level(args, config) -> int:
    if args.quiet:
        return logging.ERROR
    if args.verbose >= 2:
        return logging.DEBUG
    if args.verbose == 1:
        return logging.INFO
    return getattr(logging, config.get_log_level(), logging.WARNING)


def _cmd_analyze(args, config) -> int:
    cfg = RunConfig.from_config(
        args.input,
        config,
        n=args.n,
        dx_mode=args.dx,
        basis=args.basis,
        output_dir=args.out,
        log_derivative=args.log_derivative,
        histogram_bins=args.histogram,
    )
    result = SpectralAnalyzer.from_config(config).analyze(cfg)
    print(result.output_dir)
    return 0


def _cmd_gen(args) -> int:
    if args.model == "runge":
        ts = gen_runge(args.count)
        header = f"rn-spectra gen runge count={args.count}"
    else:
        default_rates, default_lengths = MODEL_DEFAULTS[args.model]
        rates = args.rates or default_rates
        lengths = args.lengths or default_lengths
        step = args.step or default_step(lengths)
        ts = generate(args.model, rates, lengths, step)
        header = (
            f"rn-spectra gen {args.model} rates={','.join(map(str, rates))} "
            f"lengths={','.join(map(str, lengths))} step={step}"
        )
    write_timeserie(args.output, ts, header)
    logger.info("Wrote %d samples to %s", len(ts), args.output)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI; returns 0 on success, 1 on input errors, 2 on numerical failures."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1

    config = load_config(args.config) if args.config else get_config()
    configure_logging(_log_level(args, config))

    try:
        if args.command == "analyze":
            return _cmd_analyze(args, config)
        return _cmd_gen(args)
    except (RNSpectraError, OSError, ValueError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
