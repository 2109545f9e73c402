"""Implementation of ``namedcurves fit-batch``.

Fits, applies and evaluates curves for every pair of a corpus directory with
``input/`` and ``target/`` sub-directories holding images of the same name.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import math
import os
import typing

import attr
from logzero import logger
from tqdm import tqdm

from namedcurves.cli.config import FitBatchConfig
from namedcurves.cli.fit import setup_argparse_fit
from namedcurves.common import OutputFormat, atomic_open, format_number, write_output
from namedcurves.core.color_naming import ColorNamingModel, load_model
from namedcurves.core.fitter import FitConfig, fit
from namedcurves.core.imaging import ImageBuffer, check_same_shape, load_png, quantize8, save_png
from namedcurves.core.metrics import Metric, available_metrics, evaluate
from namedcurves.curve_file import save_curves
from namedcurves.exceptions import BatchFailed, EmptyCorpus, NamedCurvesException

#: Name of the summary file in the output directory.
SUMMARY_NAME = "summary.csv"

#: Columns of the summary.
SUMMARY_HEADER = ["name", "psnr_in", "psnr_out", "ssim_out", "de00_in", "de00_out", "seconds"]


@attr.s(frozen=True, auto_attribs=True)
class PairResult:
    """Summary of one corpus pair."""

    name: str
    psnr_in: typing.Optional[float] = None
    psnr_out: typing.Optional[float] = None
    ssim_out: typing.Optional[float] = None
    de00_in: typing.Optional[float] = None
    de00_out: typing.Optional[float] = None
    seconds: typing.Optional[float] = None


def setup_argparse(parser):
    parser.add_argument("--hidden-cmd", dest="cli_cmd", default=run, help=argparse.SUPPRESS)
    setup_argparse_fit(parser)
    parser.add_argument("--threads", type=int, default=1, help="Pairs processed concurrently")
    parser.add_argument(
        "--no-timing",
        dest="timing",
        default=True,
        action="store_false",
        help="Write NA instead of seconds so reruns give identical summaries",
    )
    parser.add_argument("corpus_root", help="Directory with input/ and target/.")
    parser.add_argument("out_dir", help="Directory for curves, images and summary.")


def list_pairs(corpus_root: str) -> typing.List[str]:
    """Sorted names of the files in ``input/``; raises ``EmptyCorpus`` if there are none."""
    input_dir = os.path.join(corpus_root, "input")
    if not os.path.isdir(input_dir):
        raise EmptyCorpus(f"Corpus {corpus_root} has no input/ directory")
    names = sorted(
        name
        for name in os.listdir(input_dir)
        if not name.startswith(".") and os.path.isfile(os.path.join(input_dir, name))
    )
    if not names:
        raise EmptyCorpus(f"Corpus {corpus_root} contains no images")
    return names


def process_pair(
    name: str, corpus_root: str, out_dir: str, model: ColorNamingModel, cfg: FitConfig
) -> PairResult:
    input = load_png(os.path.join(corpus_root, "input", name))
    target = load_png(os.path.join(corpus_root, "target", name))
    check_same_shape(input, target)
    before = evaluate(input, target, available_metrics(input, (Metric.PSNR, Metric.DE_00)))
    result = fit(input, target, model, cfg)
    # Scores refer to the 8 bit image that is written.
    written = ImageBuffer(quantize8(result.output.data) / 255.0)
    after = evaluate(
        written, target, available_metrics(input, (Metric.PSNR, Metric.SSIM, Metric.DE_00))
    )
    stem = os.path.splitext(name)[0]
    save_curves(result.curves, os.path.join(out_dir, f"{stem}.ncv"))
    save_png(written, os.path.join(out_dir, name))
    return PairResult(
        name=name,
        psnr_in=before.psnr,
        psnr_out=after.psnr,
        ssim_out=after.ssim,
        de00_in=before.de_00,
        de00_out=after.de_00,
        seconds=result.seconds,
    )


def _mean(values: typing.List[typing.Optional[float]]) -> typing.Optional[float]:
    values = [v for v in values if v is not None]
    if not values:
        return None
    return math.fsum(values) / len(values) if not any(map(math.isinf, values)) else math.inf


def summary_rows(results: typing.List[PairResult], timing: bool) -> typing.List[typing.List[str]]:
    """Rows of the CSV summary including the final row of means."""
    mean = PairResult(
        name="mean",
        **{
            key: _mean([getattr(r, key) for r in results])
            for key in SUMMARY_HEADER
            if key != "name"
        },
    )
    rows = [SUMMARY_HEADER]
    for result in results + [mean]:
        row = [result.name]
        for key in SUMMARY_HEADER[1:]:
            if key == "seconds":
                row.append(format_number(result.seconds, 3) if timing else "NA")
            else:
                row.append(format_number(getattr(result, key)))
        rows.append(row)
    return rows


def run(global_config, toml_config, args, _parser, _subparser):
    """Run fit-batch command."""
    config = FitBatchConfig.create(args, global_config, toml_config)
    logger.info("Configuration: %s", config)
    names = list_pairs(config.corpus_root)
    model = load_model(global_config.cnlut_path, global_config.color_naming)
    os.makedirs(config.out_dir, exist_ok=True)
    logger.info("Processing %d pairs with %d threads", len(names), config.threads)

    def job(name: str) -> typing.Optional[PairResult]:
        try:
            return process_pair(name, config.corpus_root, config.out_dir, model, config.fit)
        except (NamedCurvesException, OSError) as e:
            logger.warning("Skipping pair %s: %s", name, e)
            return None

    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        outcomes = list(
            tqdm(
                executor.map(job, names),
                total=len(names),
                disable=not global_config.progress,
                unit="pair",
            )
        )
    results = [r for r in outcomes if r is not None]
    skipped = [name for name, r in zip(names, outcomes) if r is None]
    if skipped:
        logger.warning("Skipped %d of %d pairs: %s", len(skipped), len(names), ", ".join(skipped))
    if not results:
        raise BatchFailed(f"None of the {len(names)} pairs in {config.corpus_root} succeeded")

    summary_path = os.path.join(config.out_dir, SUMMARY_NAME)
    with atomic_open(summary_path, "wt") as outputf:
        write_output(summary_rows(results, config.timing), outputf, OutputFormat.CSV)
    logger.info("Wrote summary of %d pairs to %s", len(results), summary_path)
