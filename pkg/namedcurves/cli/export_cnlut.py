"""Implementation of ``namedcurves export-cnlut``."""

import argparse

from logzero import logger

from namedcurves.cli.config import ExportCnlutConfig
from namedcurves.core.color_naming import bake_parametric_table, save_cnlut


def setup_argparse(parser):
    parser.add_argument("--hidden-cmd", dest="cli_cmd", default=run, help=argparse.SUPPRESS)
    parser.add_argument("--size", type=int, default=32, help="Side of the table cube, default: 32")
    parser.add_argument("out_path", help="Path to CNLUT file to write.")


def run(global_config, toml_config, args, _parser, _subparser):
    """Write the parametric color naming model as a CNLUT table."""
    config = ExportCnlutConfig.create(args, global_config, toml_config)
    logger.info("Configuration: %s", config)
    model = bake_parametric_table(global_config.color_naming, config.size)
    save_cnlut(model, config.out_path)
    logger.info("Wrote %d^3 table to %s", config.size, config.out_path)
