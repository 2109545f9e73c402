"""Shared code."""

import csv
from enum import Enum, unique
import io
import math
import sys
import typing

import attr
import numpy as np
import simplejson
from tabulate import tabulate
from typeguard import check_type

from namedcurves.core.color_naming import ParametricConstants
from namedcurves.core.fileio import atomic_open, atomic_write_bytes  # noqa: F401
from namedcurves.core.models import CONVERTER
from namedcurves.exceptions import InvalidConfiguration


class CustomEncoder(simplejson.JSONEncoder):
    """JSON encoder for numpy scalars and enums"""

    def default(self, obj):
        if isinstance(obj, np.generic):
            return obj.item()
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, Enum):
            return obj.value
        else:
            return simplejson.JSONEncoder.default(self, obj)  # pragma: no cover


@unique
class OutputFormat(Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


def _coerce(value, expected):
    """Widen TOML values to the declared field type where the conversion is lossless."""
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if isinstance(expected, type) and issubclass(expected, Enum) and isinstance(value, str):
        try:
            return expected(value)
        except ValueError:
            raise InvalidConfiguration(f"Invalid value {value!r} for {expected.__name__}")
    if getattr(expected, "__origin__", None) is tuple and isinstance(value, list):
        return tuple(_coerce(v, t) for v, t in zip(value, expected.__args__))
    if getattr(expected, "__origin__", None) is typing.Union and value is not None:
        members = [t for t in expected.__args__ if t is not type(None)]
        if len(members) == 1:
            return _coerce(value, members[0])
    return value


def structure_section(toml_config, section: str, cls):
    """Build an attrs configuration class ``cls`` from a TOML ``section``.

    Unknown keys and values of the wrong type raise ``InvalidConfiguration``.
    """
    values = dict((toml_config or {}).get(section, {}))
    cls_fields = {field.name: field for field in attr.fields(cls)}
    for key, value in values.items():
        if key not in cls_fields:
            raise InvalidConfiguration(f"Unknown key {key} in section [{section}]")
        try:
            values[key] = _coerce(value, cls_fields[key].type)
            check_type(f"{section}.{key}", values[key], cls_fields[key].type)
        except TypeError as e:
            raise InvalidConfiguration(str(e))
    try:
        return CONVERTER.structure(values, cls)
    except ValueError as e:
        raise InvalidConfiguration(f"Invalid values in section [{section}]: {e}")


@attr.s(frozen=True, auto_attribs=True)
class CommonConfig:
    """Common configuration for all commands."""

    #: Verbose mode activated
    verbose: bool

    #: Whether to display progress bars.
    progress: bool = True

    #: Path to a CNLUT color naming table, parametric model if ``None``.
    cnlut_path: typing.Optional[str] = None

    #: Constants of the parametric color naming model.
    color_naming: ParametricConstants = ParametricConstants()

    @staticmethod
    def create(args, toml_config=None):
        toml_config = toml_config or {}
        return CommonConfig(
            verbose=args.verbose,
            progress=getattr(args, "progress", True),
            cnlut_path=(args.lut or toml_config.get("global", {}).get("cnlut_path")),
            color_naming=structure_section(toml_config, "color_naming", ParametricConstants),
        )


def run_nocmd(_config, _toml_config, _args, parser, subparser=None):  # pragma: no cover
    """No command given, print help and ``exit(1)``."""
    if subparser:
        subparser.print_help()
        subparser.exit(1)
    else:
        parser.print_help()
        parser.exit(1)


def format_number(value: typing.Optional[float], digits: int = 4) -> str:
    """Format ``value`` with fixed ``digits``, ``"inf"`` for the exact-match sentinel."""
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}f}"


def write_output(
    output: typing.List[typing.List[typing.Any]],
    output_file: io.TextIOBase,
    output_format: OutputFormat,
    delimiter: str = ",",
):
    """Write output to ``output_file``"""
    if output_format == OutputFormat.CSV:
        writer = csv.writer(output_file, delimiter=delimiter, lineterminator="\n")
        for row in output:
            writer.writerow(row)
    elif output_format == OutputFormat.JSON:
        header = output[0]
        output_json = []
        for obj in output[1:]:
            output_json.append(dict(zip(header, obj)))
        simplejson.dump(output_json, output_file, cls=CustomEncoder)
        output_file.write("\n")
    else:
        output_file.write(
            tabulate(output[1:], headers=output[0], tablefmt="grid", disable_numparse=True)
        )
        output_file.write("\n")
    output_file.flush()


def tabular_output(
    values: typing.List[typing.Any],
    header: typing.List[str],
    field_formatters: typing.Dict[str, typing.Callable[[typing.Any], str]] = {},
) -> typing.List[typing.List[str]]:
    """Convert list of values to list of strings for output."""
    output = [header]
    for value in values:
        row = []
        for field in header:
            if field in field_formatters:
                the_value = field_formatters[field](value)
            elif isinstance(value, dict):
                the_value = value[field]
            else:
                the_value = getattr(value, field)
            row.append(the_value)
        output.append(row)
    return output


def write_output_file(
    output: typing.List[typing.List[typing.Any]],
    output_file: str,
    output_format: OutputFormat,
    delimiter: str = ",",
):
    """Write output to the path ``output_file``, ``-`` for stdout."""
    if output_file == "-":
        write_output(output, sys.stdout, output_format, delimiter)
    else:
        with atomic_open(output_file, "wt") as outputf:
            write_output(output, outputf, output_format, delimiter)


def setup_argparse_output(parser):
    """Add the options controlling tabular output."""
    of_choices = [o.value for o in OutputFormat]
    of_default = OutputFormat.TABLE.value
    parser.add_argument(
        "--output-format",
        help=f"Output format, one of {of_choices}, default: {of_default}",
        choices=of_choices,
        default=of_default,
    )
    parser.add_argument(
        "--output-delimiter", help="Separator for CSV output, default: ','", default=","
    )
    parser.add_argument(
        "--output-file", help="Path to file to write to, defaults to stdout", default="-"
    )
