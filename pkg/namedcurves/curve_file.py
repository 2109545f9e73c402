"""Reading and writing of curve files.

A curve file is a header ``NCV 1 <M>`` followed by one line per color group and
channel::

    <group> <channel> <P_0> ... <P_{M-1}>

Values are written as shortest round-tripping decimals, so parsing a written
file gives back the identical ``CurveSet``.
"""

import typing

import numpy as np
from logzero import logger

from namedcurves.common import atomic_open
from namedcurves.core.color_naming import GROUP_INDEX, ColorGroup
from namedcurves.core.tone_curves import CHANNEL_INDEX, Channel, CurveSet, check_points
from namedcurves.exceptions import InvalidControlPoints, MalformedCurveFile, MissingInputFile

#: First token of the header line.
CURVE_FILE_MAGIC = "NCV"

#: Supported format version.
CURVE_FILE_VERSION = 1


def _format_value(value: float) -> str:
    return repr(float(value))


def serialize(curves: CurveSet) -> str:
    """Canonical text form of ``curves``."""
    lines = [f"{CURVE_FILE_MAGIC} {CURVE_FILE_VERSION} {curves.num_points}"]
    for cp in curves.curves():
        values = " ".join(_format_value(v) for v in cp.points)
        lines.append(f"{cp.group.value} {cp.channel.value} {values}")
    return "\n".join(lines) + "\n"


def _parse_header(tokens: typing.List[str]) -> int:
    if (
        len(tokens) != 3
        or tokens[0] != CURVE_FILE_MAGIC
        or tokens[1] != str(CURVE_FILE_VERSION)
        or not tokens[2].isdigit()
    ):
        raise MalformedCurveFile(
            f"expected header '{CURVE_FILE_MAGIC} {CURVE_FILE_VERSION} <M>'", line_no=1
        )
    num_points = int(tokens[2])
    if num_points < 2:
        raise MalformedCurveFile(f"need at least 2 control points, got {num_points}", line_no=1)
    return num_points


def parse(text: str) -> CurveSet:
    """Parse a curve file, raising ``MalformedCurveFile`` with the offending line."""
    lines = text.splitlines()
    if not lines:
        raise MalformedCurveFile("empty curve file", line_no=1)
    num_points = _parse_header(lines[0].split())
    points = np.empty((len(ColorGroup), len(Channel), num_points))
    seen: typing.Set[typing.Tuple[ColorGroup, Channel]] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        if len(tokens) != num_points + 2:
            raise MalformedCurveFile(
                f"expected group, channel and {num_points} values, got {len(tokens)} fields",
                line_no=line_no,
            )
        try:
            group = ColorGroup(tokens[0])
            channel = Channel(tokens[1])
        except ValueError:
            raise MalformedCurveFile(
                f"unknown curve {tokens[0]}/{tokens[1]}", line_no=line_no
            )
        if (group, channel) in seen:
            raise MalformedCurveFile(
                f"duplicate curve {group.value}/{channel.value}", line_no=line_no
            )
        try:
            values = np.array([float(x) for x in tokens[2:]])
        except ValueError as e:
            raise MalformedCurveFile(f"invalid number: {e}", line_no=line_no)
        try:
            check_points(values, f"{group.value}/{channel.value}")
        except InvalidControlPoints as e:
            raise MalformedCurveFile(str(e), line_no=line_no)
        seen.add((group, channel))
        points[GROUP_INDEX[group], CHANNEL_INDEX[channel]] = values
    missing = [
        f"{group.value}/{channel.value}"
        for group in ColorGroup
        for channel in Channel
        if (group, channel) not in seen
    ]
    if missing:
        raise MalformedCurveFile(f"missing curves: {', '.join(missing)}")
    return CurveSet(points)


def load_curves(path: str) -> CurveSet:
    logger.debug("Loading curves from %s", path)
    try:
        with open(path, "rt") as inputf:
            text = inputf.read()
    except (FileNotFoundError, IsADirectoryError):
        raise MissingInputFile(f"Curve file {path} does not exist")
    except UnicodeDecodeError:
        raise MalformedCurveFile(f"{path} is not a text file")
    return parse(text)


def save_curves(curves: CurveSet, path: str):
    with atomic_open(path, "wt") as outputf:
        outputf.write(serialize(curves))
