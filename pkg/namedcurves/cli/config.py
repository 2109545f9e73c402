"""Configuration classes for the ``namedcurves`` sub-commands."""

import typing

import attr

from namedcurves.common import CommonConfig, OutputFormat, structure_section
from namedcurves.core.fitter import FitConfig
from namedcurves.core.fusion import DEFAULT_TAU, FusionMode
from namedcurves.core.metrics import DEFAULT_METRICS, LossConfig, Metric
from namedcurves.core.tone_curves import DEFAULT_LUT_RESOLUTION, ApplyMode
from namedcurves.exceptions import InvalidConfiguration


@attr.s(frozen=True, auto_attribs=True)
class OutputConfig:
    """Where and how tabular output is written."""

    #: Path to output file, ``-`` for stdout.
    output_file: str = "-"

    #: Output format
    output_format: OutputFormat = OutputFormat.TABLE

    #: Delimiter for CSV output
    output_delimiter: str = ","

    @staticmethod
    def create(args):
        return OutputConfig(
            output_file=args.output_file,
            output_format=OutputFormat(args.output_format),
            output_delimiter=args.output_delimiter,
        )


@attr.s(frozen=True, auto_attribs=True)
class FusionConfig:
    """The ``[fusion]`` section."""

    #: Probability threshold of the fusion weights.
    tau: float = DEFAULT_TAU

    #: How the adjusted images are combined.
    mode: FusionMode = FusionMode.WEIGHTED

    @staticmethod
    def create(args, toml_config=None):
        base = structure_section(toml_config, "fusion", FusionConfig)
        fusion = getattr(args, "fusion", None)
        return attr.evolve(
            base,
            tau=base.tau if getattr(args, "tau", None) is None else args.tau,
            mode=base.mode if fusion is None else FusionMode(fusion),
        )


def create_fit_config(args, toml_config=None) -> FitConfig:
    """Merge command line over ``[fit]`` over ``[fusion]`` over the defaults."""
    fusion = structure_section(toml_config, "fusion", FusionConfig)
    section = (toml_config or {}).get("fit", {})
    fit = structure_section(toml_config, "fit", FitConfig)
    fit = attr.evolve(
        fit,
        tau=fit.tau if "tau" in section else fusion.tau,
        fusion=fit.fusion if "fusion" in section else fusion.mode,
    )
    overrides = {
        "iterations": getattr(args, "iterations", None),
        "points": getattr(args, "points", None),
        "tau": getattr(args, "tau", None),
        "seed": getattr(args, "seed", None),
        "step_size": getattr(args, "step_size", None),
        "max_side": getattr(args, "max_side", None),
        "batch_pixels": getattr(args, "batch_pixels", None),
        "fusion": FusionMode(args.fusion) if getattr(args, "fusion", None) else None,
    }
    return attr.evolve(fit, **{k: v for k, v in overrides.items() if v is not None})


@attr.s(frozen=True, auto_attribs=True)
class DecomposeConfig:
    """Configuration for ``namedcurves decompose``."""

    #: Global configuration
    global_config: CommonConfig
    #: Output of the statistics table.
    output_config: OutputConfig
    #: Input PNG.
    input_path: str
    #: Directory to write the planes to.
    out_dir: str
    #: Write the 11 name planes instead of the 6 groups.
    all_names: bool = False
    #: Also write thresholded visualizations.
    masks: bool = False
    #: Threshold of the mask visualizations.
    mask_threshold: float = DEFAULT_TAU

    @staticmethod
    def create(args, global_config, toml_config=None):
        fusion = FusionConfig.create(args, toml_config)
        return DecomposeConfig(
            global_config=global_config,
            output_config=OutputConfig.create(args),
            input_path=args.input_path,
            out_dir=args.out_dir,
            all_names=args.all_names,
            masks=args.masks,
            mask_threshold=fusion.tau,
        )


@attr.s(frozen=True, auto_attribs=True)
class FitCommandConfig:
    """Configuration for ``namedcurves fit``."""

    #: Global configuration
    global_config: CommonConfig
    #: Output of the summary table.
    output_config: OutputConfig
    #: Input PNG.
    input_path: str
    #: Target PNG.
    target_path: str
    #: Curve file to write.
    curves_path: str
    #: Optimizer settings.
    fit: FitConfig = FitConfig()

    @staticmethod
    def create(args, global_config, toml_config=None):
        return FitCommandConfig(
            global_config=global_config,
            output_config=OutputConfig.create(args),
            input_path=args.input_path,
            target_path=args.target_path,
            curves_path=args.curves_path,
            fit=create_fit_config(args, toml_config),
        )


@attr.s(frozen=True, auto_attribs=True)
class ApplyConfig:
    """Configuration for ``namedcurves apply``."""

    #: Global configuration
    global_config: CommonConfig
    #: Input PNG.
    input_path: str
    #: Curve file to apply.
    curves_path: str
    #: Output PNG.
    out_path: str
    #: Fusion settings.
    fusion: FusionConfig = FusionConfig()
    #: Curve evaluation mode.
    mode: ApplyMode = ApplyMode.LUT

    @staticmethod
    def create(args, global_config, toml_config=None):
        return ApplyConfig(
            global_config=global_config,
            input_path=args.input_path,
            curves_path=args.curves_path,
            out_path=args.out_path,
            fusion=FusionConfig.create(args, toml_config),
            mode=ApplyMode(args.mode),
        )


def parse_metrics(value: str) -> typing.Tuple[Metric, ...]:
    """Parse a comma-separated list of metric names."""
    try:
        return tuple(Metric(m.strip()) for m in value.split(",") if m.strip())
    except ValueError:
        choices = ", ".join(m.value for m in Metric)
        raise InvalidConfiguration(f"Invalid metrics {value!r}, choose from {choices}")


@attr.s(frozen=True, auto_attribs=True)
class EvalConfig:
    """Configuration for ``namedcurves eval``."""

    #: Global configuration
    global_config: CommonConfig
    #: Output of the report.
    output_config: OutputConfig
    #: Output image.
    a_path: str
    #: Reference image.
    b_path: str
    #: Metrics to compute.
    metrics: typing.Tuple[Metric, ...] = DEFAULT_METRICS
    #: Original input, enables the loss.
    input_path: typing.Optional[str] = None
    #: Loss weights.
    loss: LossConfig = LossConfig()

    @staticmethod
    def create(args, global_config, toml_config=None):
        _ = toml_config
        metrics = parse_metrics(args.metrics) if args.metrics else DEFAULT_METRICS
        if args.input_path and Metric.LOSS not in metrics:
            metrics = metrics + (Metric.LOSS,)
        if Metric.LOSS in metrics and not args.input_path:
            raise InvalidConfiguration("The loss needs the original input, use --input")
        return EvalConfig(
            global_config=global_config,
            output_config=OutputConfig.create(args),
            a_path=args.a_path,
            b_path=args.b_path,
            metrics=metrics,
            input_path=args.input_path,
            loss=LossConfig(alpha=args.alpha),
        )


@attr.s(frozen=True, auto_attribs=True)
class FitBatchConfig:
    """Configuration for ``namedcurves fit-batch``."""

    #: Global configuration
    global_config: CommonConfig
    #: Directory with ``input/`` and ``target/``.
    corpus_root: str
    #: Directory for curves, enhanced images and the summary.
    out_dir: str
    #: Optimizer settings.
    fit: FitConfig = FitConfig()
    #: Number of pairs processed concurrently.
    threads: int = 1
    #: Whether to report wall-clock seconds.
    timing: bool = True

    @staticmethod
    def create(args, global_config, toml_config=None):
        return FitBatchConfig(
            global_config=global_config,
            corpus_root=args.corpus_root,
            out_dir=args.out_dir,
            fit=create_fit_config(args, toml_config),
            threads=max(1, args.threads),
            timing=args.timing,
        )


@attr.s(frozen=True, auto_attribs=True)
class BakeLutConfig:
    """Configuration for ``namedcurves bake-lut``."""

    #: Global configuration
    global_config: CommonConfig
    #: Curve file to sample.
    curves_path: str
    #: Directory for the 18 tables.
    out_dir: str
    #: Samples per table.
    resolution: int = DEFAULT_LUT_RESOLUTION
    #: Add the curve slope as third column.
    with_slope: bool = False

    @staticmethod
    def create(args, global_config, toml_config=None):
        _ = toml_config
        return BakeLutConfig(
            global_config=global_config,
            curves_path=args.curves_path,
            out_dir=args.out_dir,
            resolution=args.resolution,
            with_slope=args.with_slope,
        )


@attr.s(frozen=True, auto_attribs=True)
class ExportCnlutConfig:
    """Configuration for ``namedcurves export-cnlut``."""

    #: Global configuration
    global_config: CommonConfig
    #: CNLUT file to write.
    out_path: str
    #: Side of the table cube.
    size: int = 32

    @staticmethod
    def create(args, global_config, toml_config=None):
        _ = toml_config
        return ExportCnlutConfig(
            global_config=global_config, out_path=args.out_path, size=args.size
        )
