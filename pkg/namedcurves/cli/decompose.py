"""Implementation of ``namedcurves decompose``."""

import argparse
import os

import attr
from logzero import logger

from namedcurves.cli.config import DecomposeConfig
from namedcurves.common import (
    atomic_write_bytes,
    format_number,
    setup_argparse_output,
    tabular_output,
    write_output_file,
)
from namedcurves.core.color_naming import (
    IntensityProfile,
    compute_maps,
    intensity_profile,
    load_model,
    render_map_visualization,
    render_threshold_visualization,
)
from namedcurves.core.fusion import active_branch_stats, make_weights
from namedcurves.core.imaging import encode_png, load_png


def setup_argparse(parser):
    parser.add_argument("--hidden-cmd", dest="cli_cmd", default=run, help=argparse.SUPPRESS)
    setup_argparse_output(parser)
    parser.add_argument(
        "--all-names",
        default=False,
        action="store_true",
        help="Write the 11 color name planes instead of the 6 groups",
    )
    parser.add_argument(
        "--masks",
        default=False,
        action="store_true",
        help="Also write thresholded visualizations <stem>.<plane>.mask.png",
    )
    parser.add_argument(
        "--tau", type=float, default=None, help="Threshold for --masks and the branch statistics"
    )
    parser.add_argument("input_path", help="Path to input PNG.")
    parser.add_argument("out_dir", help="Directory to write the planes to.")


def output_files(stem: str, label: str, masks: bool):
    yield "prob", f"{stem}.{label}.prob.png"
    yield "viz", f"{stem}.{label}.viz.png"
    if masks:
        yield "mask", f"{stem}.{label}.mask.png"


def run(global_config, toml_config, args, _parser, _subparser):
    """Run decompose command."""
    config = DecomposeConfig.create(args, global_config, toml_config)
    logger.info("Configuration: %s", config)
    model = load_model(global_config.cnlut_path, global_config.color_naming)
    img = load_png(config.input_path)
    maps = compute_maps(model, img, grouped=not config.all_names)
    stem = os.path.splitext(os.path.basename(config.input_path))[0]

    logger.info("Rendering %d planes of %s", len(maps.labels), img)
    rendered = {}
    for index, label in enumerate(maps.labels):
        for kind, name in output_files(stem, label, config.masks):
            if kind == "prob":
                data = encode_png(maps.plane(index))
            elif kind == "viz":
                data = encode_png(render_map_visualization(img, maps, index).data)
            else:
                data = encode_png(
                    render_threshold_visualization(img, maps, index, config.mask_threshold).data
                )
            rendered[name] = data

    os.makedirs(config.out_dir, exist_ok=True)
    for name, data in rendered.items():
        logger.debug("Writing %s", name)
        atomic_write_bytes(os.path.join(config.out_dir, name), data)
    logger.info("Wrote %d files to %s", len(rendered), config.out_dir)

    if maps.grouped:
        stats = active_branch_stats(make_weights(maps, config.mask_threshold))
        for active, count in stats.items():
            logger.info("Pixels with %d active branches: %d", active, count)

    profiles = [intensity_profile(img, maps, index) for index in range(len(maps.labels))]
    formatters = {
        key: (lambda p, key=key: format_number(getattr(p, key)))
        for key in ("minimum", "mean", "maximum")
    }
    output = tabular_output(
        values=profiles,
        header=[f.name for f in attr.fields(IntensityProfile)],
        field_formatters=formatters,
    )
    write_output_file(
        output,
        config.output_config.output_file,
        config.output_config.output_format,
        config.output_config.output_delimiter,
    )
