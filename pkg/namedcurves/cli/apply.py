"""Implementation of ``namedcurves apply``."""

import argparse

from logzero import logger

from namedcurves.cli.config import ApplyConfig
from namedcurves.core.color_naming import load_model
from namedcurves.core.fitter import apply_fitted
from namedcurves.core.fusion import FusionMode
from namedcurves.core.imaging import load_png, save_png
from namedcurves.core.tone_curves import ApplyMode
from namedcurves.curve_file import load_curves


def setup_argparse(parser):
    parser.add_argument("--hidden-cmd", dest="cli_cmd", default=run, help=argparse.SUPPRESS)
    parser.add_argument("--tau", type=float, help="Fusion probability threshold")
    parser.add_argument(
        "--fusion",
        choices=[m.value for m in FusionMode],
        help="How the adjusted images are combined",
    )
    parser.add_argument(
        "--mode",
        choices=[m.value for m in ApplyMode],
        default=ApplyMode.LUT.value,
        help="Evaluate curves through lookup tables or directly, default: lut",
    )
    parser.add_argument("input_path", help="Path to input PNG.")
    parser.add_argument("curves_path", help="Path to curve file.")
    parser.add_argument("out_path", help="Path to output PNG.")


def run(global_config, toml_config, args, _parser, _subparser):
    """Run apply command."""
    config = ApplyConfig.create(args, global_config, toml_config)
    logger.info("Configuration: %s", config)
    curves = load_curves(config.curves_path)
    model = load_model(global_config.cnlut_path, global_config.color_naming)
    img = load_png(config.input_path)
    logger.info("Applying %s to %s", curves, img)
    output = apply_fitted(
        curves,
        img,
        model,
        tau=config.fusion.tau,
        mode=config.mode,
        fusion=config.fusion.mode,
    )
    save_png(output, config.out_path)
    logger.info("Wrote %s", config.out_path)
