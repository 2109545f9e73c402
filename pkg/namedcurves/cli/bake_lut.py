"""Implementation of ``namedcurves bake-lut``."""

import argparse
import os

from logzero import logger

from namedcurves.cli.config import BakeLutConfig
from namedcurves.common import atomic_open
from namedcurves.core.tone_curves import (
    DEFAULT_LUT_RESOLUTION,
    ControlPoints,
    bake_lut,
    bezier_derivative,
)
from namedcurves.curve_file import load_curves


def setup_argparse(parser):
    parser.add_argument("--hidden-cmd", dest="cli_cmd", default=run, help=argparse.SUPPRESS)
    parser.add_argument(
        "--resolution",
        type=int,
        default=DEFAULT_LUT_RESOLUTION,
        help=f"Samples per table, default: {DEFAULT_LUT_RESOLUTION}",
    )
    parser.add_argument(
        "--with-slope",
        default=False,
        action="store_true",
        help="Add the slope of the curve as third column",
    )
    parser.add_argument("curves_path", help="Path to curve file.")
    parser.add_argument("out_dir", help="Directory to write the tables to.")


def lut_file_name(cp: ControlPoints) -> str:
    return f"{cp.group.value}.{cp.channel.value}.lut"


def format_lut(cp: ControlPoints, resolution: int, with_slope: bool = False) -> str:
    """Lines ``input output [slope]`` of the baked table of ``cp``."""
    lut = bake_lut(cp, resolution)
    columns = [lut.inputs, lut.samples]
    if with_slope:
        columns.append(bezier_derivative(cp, lut.inputs))
    return "".join(" ".join("%.9g" % v for v in row) + "\n" for row in zip(*columns))


def run(global_config, toml_config, args, _parser, _subparser):
    """Run bake-lut command."""
    config = BakeLutConfig.create(args, global_config, toml_config)
    logger.info("Configuration: %s", config)
    curves = load_curves(config.curves_path)
    tables = {
        lut_file_name(cp): format_lut(cp, config.resolution, config.with_slope)
        for cp in curves.curves()
    }
    os.makedirs(config.out_dir, exist_ok=True)
    for name, text in tables.items():
        with atomic_open(os.path.join(config.out_dir, name), "wt") as outputf:
            outputf.write(text)
    logger.info("Wrote %d tables to %s", len(tables), config.out_dir)
