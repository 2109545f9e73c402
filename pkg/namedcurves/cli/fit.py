"""Implementation of ``namedcurves fit``."""

import argparse

from logzero import logger

from namedcurves.cli.config import FitCommandConfig
from namedcurves.common import (
    format_number,
    setup_argparse_output,
    tabular_output,
    write_output_file,
)
from namedcurves.core.color_naming import load_model
from namedcurves.core.fitter import FitResult, fit
from namedcurves.core.fusion import FusionMode
from namedcurves.core.imaging import check_same_shape, load_png
from namedcurves.curve_file import save_curves


def setup_argparse_fit(parser):
    """Optimizer options shared by ``fit`` and ``fit-batch``."""
    parser.add_argument("--iters", dest="iterations", type=int, help="Optimizer iterations")
    parser.add_argument("--points", type=int, help="Control points per curve")
    parser.add_argument("--tau", type=float, help="Fusion probability threshold")
    parser.add_argument("--seed", type=int, help="Seed of the pixel sampling")
    parser.add_argument("--step-size", type=float, help="Adam step size")
    parser.add_argument(
        "--max-side", type=int, help="Longest side of the images used for fitting"
    )
    parser.add_argument("--batch-pixels", type=int, help="Pixels sampled per step")
    parser.add_argument(
        "--fusion",
        choices=[m.value for m in FusionMode],
        help="How the adjusted images are combined",
    )


def setup_argparse(parser):
    parser.add_argument("--hidden-cmd", dest="cli_cmd", default=run, help=argparse.SUPPRESS)
    setup_argparse_output(parser)
    setup_argparse_fit(parser)
    parser.add_argument("input_path", help="Path to input PNG.")
    parser.add_argument("target_path", help="Path to target PNG.")
    parser.add_argument("curves_path", help="Path to curve file to write.")


def summarize(result: FitResult):
    """Rows of ``(key, value)`` describing a fit."""
    return [
        {"key": "iterations", "value": str(len(result.trace) - 1)},
        {"key": "initial_objective", "value": format_number(result.initial_objective, 6)},
        {"key": "best_objective", "value": format_number(result.best_objective, 6)},
        {"key": "best_iteration", "value": str(result.best_iteration)},
        {"key": "psnr", "value": format_number(result.metrics.psnr)},
        {"key": "ssim", "value": format_number(result.metrics.ssim)},
        {"key": "de_ab", "value": format_number(result.metrics.de_ab)},
        {"key": "de_00", "value": format_number(result.metrics.de_00)},
    ]


def run(global_config, toml_config, args, _parser, _subparser):
    """Run fit command."""
    config = FitCommandConfig.create(args, global_config, toml_config)
    logger.info("Configuration: %s", config)
    model = load_model(global_config.cnlut_path, global_config.color_naming)
    input = load_png(config.input_path)
    target = load_png(config.target_path)
    check_same_shape(input, target)

    logger.info("Fitting %d iterations on %s", config.fit.iterations, input)
    result = fit(input, target, model, config.fit, progress=global_config.progress)
    logger.info(
        "Objective %.6g -> %.6g in %.1fs",
        result.initial_objective,
        result.best_objective,
        result.seconds,
    )
    save_curves(result.curves, config.curves_path)
    logger.info("Wrote curves to %s", config.curves_path)

    output = tabular_output(values=summarize(result), header=["key", "value"])
    write_output_file(
        output,
        config.output_config.output_file,
        config.output_config.output_format,
        config.output_config.output_delimiter,
    )
