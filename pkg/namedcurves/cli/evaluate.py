"""Implementation of ``namedcurves eval``."""

import argparse

import attr
from logzero import logger

from namedcurves.cli.config import EvalConfig
from namedcurves.common import (
    format_number,
    setup_argparse_output,
    tabular_output,
    write_output_file,
)
from namedcurves.core.imaging import check_same_shape, load_png
from namedcurves.core.metrics import DEFAULT_METRICS, Metric, available_metrics, evaluate


def setup_argparse(parser):
    parser.add_argument("--hidden-cmd", dest="cli_cmd", default=run, help=argparse.SUPPRESS)
    setup_argparse_output(parser)
    parser.add_argument(
        "--metrics",
        help=(
            "Comma-separated metrics, any of %s, default: %s"
            % (
                ",".join(m.value for m in Metric),
                ",".join(m.value for m in DEFAULT_METRICS),
            )
        ),
    )
    parser.add_argument(
        "--input",
        dest="input_path",
        help="Original input image, adds the loss with identity standardization",
    )
    parser.add_argument(
        "--alpha", type=float, default=0.5, help="Weight of the standardization loss term"
    )
    parser.add_argument("a_path", help="Path to output PNG.")
    parser.add_argument("b_path", help="Path to reference PNG.")


def run(global_config, toml_config, args, _parser, _subparser):
    """Run eval command."""
    config = EvalConfig.create(args, global_config, toml_config)
    logger.info("Configuration: %s", config)
    a = load_png(config.a_path)
    b = load_png(config.b_path)
    x_std = load_png(config.input_path) if config.input_path else None
    check_same_shape(*[img for img in (a, b, x_std) if img is not None])

    metrics = config.metrics
    if not args.metrics:
        metrics = available_metrics(a, metrics)
        if metrics != config.metrics:
            logger.warning("Images are too small for SSIM, skipping it")
    report = evaluate(a, b, metrics, x_std=x_std, loss_config=config.loss)

    requested = {m.value for m in metrics}
    rows = [
        {"key": key, "value": format_number(value)}
        for key, value in attr.asdict(report).items()
        if key in requested
    ]
    output = tabular_output(values=rows, header=["key", "value"])
    write_output_file(
        output,
        config.output_config.output_file,
        config.output_config.output_format,
        config.output_config.output_delimiter,
    )
