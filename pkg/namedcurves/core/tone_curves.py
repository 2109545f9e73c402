"""Monotone Bezier tone curves.

A curve with ``M`` control points has its points evenly spaced along the input
axis and is described by the output values ``P_0 .. P_{M-1}`` only.  ``P_0`` is
pinned at 0, and the remaining values are the normalized cumulative sum of
``M - 1`` nonnegative increments, which pins ``P_{M-1}`` at 1 and makes the curve
nondecreasing.
"""

from enum import Enum, unique
import functools
import typing

import attr
import numpy as np

from namedcurves.core.color_naming import GROUP_INDEX, NUM_GROUPS, ColorGroup
from namedcurves.core.imaging import ImageBuffer
from namedcurves.exceptions import (
    BadResolution,
    DegenerateIncrements,
    InvalidControlPoints,
)

#: Default number of control points per curve.
DEFAULT_POINTS = 11

#: Default number of samples in a baked lookup table.
DEFAULT_LUT_RESOLUTION = 4096

#: Smallest admissible sum of increments.
MIN_INCREMENT_SUM = 1e-12

#: Tolerance on the last control point.
ENDPOINT_TOLERANCE = 1e-12

#: Pixels per block when evaluating curves on images.
PIXELS_PER_BLOCK = 1 << 18


@unique
class Channel(Enum):
    """RGB channels."""

    R = "r"
    G = "g"
    B = "b"


#: Position of each channel in pixel triples.
CHANNEL_INDEX: typing.Dict[Channel, int] = {channel: i for i, channel in enumerate(Channel)}


@unique
class ApplyMode(Enum):
    """How curves are evaluated on images."""

    #: Exact Bernstein evaluation.
    DIRECT = "direct"
    #: Linear interpolation in a baked lookup table.
    LUT = "lut"


@functools.lru_cache(maxsize=None)
def binomials(degree: int) -> typing.Tuple[int, ...]:
    """Row ``degree`` of Pascal's triangle, in exact integer arithmetic."""
    row = [1]
    for _ in range(degree):
        row = [1] + [a + b for a, b in zip(row[:-1], row[1:])] + [1]
    return tuple(row)


def bernstein_basis(i, num_points: int) -> np.ndarray:
    """Bernstein polynomials of degree ``num_points - 1`` at ``i``, shape ``(..., num_points)``."""
    i = np.clip(np.asarray(i, dtype=np.float64), 0.0, 1.0)[..., np.newaxis]
    degree = num_points - 1
    m = np.arange(num_points)
    coefficients = np.array(binomials(degree), dtype=np.float64)
    return coefficients * (1.0 - i) ** (degree - m) * i**m


def _check_deltas(_instance, _attribute, value):
    if value.ndim != 1 or value.size < 1:
        raise DegenerateIncrements(f"Expected a vector of increments, got shape {value.shape}")
    if not np.all(np.isfinite(value)) or np.any(value < 0.0):
        raise InvalidControlPoints("Increments must be finite and nonnegative")


def _as_vector(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    arr.flags.writeable = False
    return arr


@attr.s(frozen=True, auto_attribs=True)
class IncrementSet:
    """Unnormalized increments between consecutive control points of one curve."""

    #: Color group of the curve.
    group: ColorGroup
    #: Channel of the curve.
    channel: Channel
    #: ``M - 1`` nonnegative increments.
    deltas: np.ndarray = attr.ib(converter=_as_vector, validator=_check_deltas, eq=False)


def check_points(points: np.ndarray, what: str = "control points"):
    """Raise ``InvalidControlPoints`` unless ``points`` is a normalized monotone curve."""
    if points.ndim != 1 or points.size < 2:
        raise InvalidControlPoints(f"{what}: need at least two values, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise InvalidControlPoints(f"{what}: values must be finite")
    if points[0] != 0.0:
        raise InvalidControlPoints(f"{what}: first value must be 0, got {points[0]!r}")
    if abs(points[-1] - 1.0) > ENDPOINT_TOLERANCE:
        raise InvalidControlPoints(f"{what}: last value must be 1, got {points[-1]!r}")
    if np.any(np.diff(points) < 0.0):
        raise InvalidControlPoints(f"{what}: values must be nondecreasing")
    if np.any(points < 0.0) or np.any(points > 1.0):
        raise InvalidControlPoints(f"{what}: values must be in [0, 1]")


@attr.s(frozen=True, auto_attribs=True)
class ControlPoints:
    """Output-axis values of the control points of one curve."""

    #: Color group of the curve.
    group: ColorGroup
    #: Channel of the curve.
    channel: Channel
    #: ``M`` values ``P_0 .. P_{M-1}``.
    points: np.ndarray = attr.ib(converter=_as_vector, eq=False)

    def __attrs_post_init__(self):
        check_points(self.points, f"{self.group.value}/{self.channel.value}")

    @property
    def num_points(self) -> int:
        return self.points.size


def normalize_increments(inc: IncrementSet) -> ControlPoints:
    """Turn increments into control points by normalized cumulative summation."""
    cumulative = np.cumsum(inc.deltas)
    total = cumulative[-1]
    if total <= MIN_INCREMENT_SUM:
        raise DegenerateIncrements(
            f"Increments of {inc.group.value}/{inc.channel.value} sum to {total}"
        )
    return ControlPoints(
        group=inc.group,
        channel=inc.channel,
        points=np.concatenate([[0.0], cumulative / total]),
    )


def identity_points(num_points: int) -> np.ndarray:
    """Evenly spaced control points, which reproduce the identity curve."""
    if num_points < 2:
        raise InvalidControlPoints(f"Need at least two control points, got {num_points}")
    points = np.arange(num_points, dtype=np.float64) / (num_points - 1)
    return points


def _as_curve_array(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != 3 or arr.shape[:2] != (NUM_GROUPS, len(Channel)):
        raise InvalidControlPoints(f"Expected curves of shape (6, 3, M), got {arr.shape}")
    arr.flags.writeable = False
    return arr


@attr.s(frozen=True, auto_attribs=True)
class CurveSet:
    """One curve per color group and channel, all with the same number of points."""

    #: Control point values of shape ``(6, 3, M)``.
    points: np.ndarray = attr.ib(converter=_as_curve_array, eq=False, repr=False)

    def __attrs_post_init__(self):
        for group in ColorGroup:
            for channel in Channel:
                self.curve(group, channel)

    @property
    def num_points(self) -> int:
        return self.points.shape[2]

    def curve(self, group: ColorGroup, channel: Channel) -> ControlPoints:
        return ControlPoints(
            group=group,
            channel=channel,
            points=self.points[GROUP_INDEX[group], CHANNEL_INDEX[channel]],
        )

    def curves(self) -> typing.Iterator[ControlPoints]:
        """All 18 curves in canonical group and channel order."""
        for group in ColorGroup:
            for channel in Channel:
                yield self.curve(group, channel)

    @staticmethod
    def identity(num_points: int = DEFAULT_POINTS) -> "CurveSet":
        points = identity_points(num_points)
        return CurveSet(np.broadcast_to(points, (NUM_GROUPS, len(Channel), num_points)))

    @staticmethod
    def from_control_points(curves: typing.Iterable[ControlPoints]) -> "CurveSet":
        """Assemble from exactly one ``ControlPoints`` per group and channel."""
        by_key = {}
        for cp in curves:
            key = (cp.group, cp.channel)
            if key in by_key:
                raise InvalidControlPoints(f"Duplicate curve {cp.group.value}/{cp.channel.value}")
            by_key[key] = cp
        sizes = {cp.num_points for cp in by_key.values()}
        if len(by_key) != NUM_GROUPS * len(Channel) or len(sizes) != 1:
            raise InvalidControlPoints("Need 18 curves with a common number of points")
        points = np.empty((NUM_GROUPS, len(Channel), sizes.pop()))
        for (group, channel), cp in by_key.items():
            points[GROUP_INDEX[group], CHANNEL_INDEX[channel]] = cp.points
        return CurveSet(points)

    def __str__(self):
        return f"CurveSet(M={self.num_points})"


def bezier_eval(cp: ControlPoints, i):
    """Evaluate the Bernstein form of the curve at ``i`` (scalar or array, clamped)."""
    result = bernstein_basis(i, cp.num_points) @ cp.points
    return float(result) if np.ndim(result) == 0 else result


def de_casteljau_eval(cp: ControlPoints, i):
    """Evaluate the curve at ``i`` by repeated linear interpolation."""
    i = np.clip(np.asarray(i, dtype=np.float64), 0.0, 1.0)[..., np.newaxis]
    values = np.broadcast_to(cp.points, i.shape[:-1] + (cp.num_points,))
    while values.shape[-1] > 1:
        values = (1.0 - i) * values[..., :-1] + i * values[..., 1:]
    result = values[..., 0]
    return float(result) if np.ndim(result) == 0 else result


def bezier_derivative(cp: ControlPoints, i):
    """Slope ``dB/di`` of the curve at ``i``."""
    degree = cp.num_points - 1
    result = degree * (bernstein_basis(i, degree) @ np.diff(cp.points))
    return float(result) if np.ndim(result) == 0 else result


def _check_samples(_instance, _attribute, value):
    if value.ndim != 1 or value.size < 2:
        raise BadResolution(f"A lookup table needs at least two samples, got {value.size}")


@attr.s(frozen=True, auto_attribs=True)
class TonemapLut:
    """A curve sampled on the uniform grid ``r / (R - 1)``."""

    #: The ``R`` samples.
    samples: np.ndarray = attr.ib(converter=_as_vector, validator=_check_samples, eq=False)

    @property
    def resolution(self) -> int:
        return self.samples.size

    @property
    def inputs(self) -> np.ndarray:
        return np.arange(self.resolution, dtype=np.float64) / (self.resolution - 1)

    def apply(self, values):
        """Linear interpolation between adjacent samples, inputs clamped to ``[0, 1]``."""
        values = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
        return np.interp(values, self.inputs, self.samples)


def bake_lut(cp: ControlPoints, resolution: int = DEFAULT_LUT_RESOLUTION) -> TonemapLut:
    """Sample the curve into a ``TonemapLut`` with ``resolution`` entries."""
    if resolution < 2:
        raise BadResolution(f"Lookup table resolution must be at least 2, got {resolution}")
    grid = np.arange(resolution, dtype=np.float64) / (resolution - 1)
    return TonemapLut(bezier_eval(cp, grid))


def apply_curveset(
    curves: CurveSet,
    img: ImageBuffer,
    mode: ApplyMode = ApplyMode.DIRECT,
    resolution: int = DEFAULT_LUT_RESOLUTION,
) -> typing.List[ImageBuffer]:
    """Apply the curves of every group to ``img``, giving six adjusted images."""
    pixels = np.clip(img.data.reshape(-1, 3), 0.0, 1.0)
    out = np.empty((NUM_GROUPS,) + pixels.shape)
    if mode == ApplyMode.LUT:
        for cp in curves.curves():
            c = CHANNEL_INDEX[cp.channel]
            out[GROUP_INDEX[cp.group], :, c] = bake_lut(cp, resolution).apply(pixels[:, c])
    else:
        for start in range(0, pixels.shape[0], PIXELS_PER_BLOCK):
            block = pixels[start : start + PIXELS_PER_BLOCK]
            for c in range(len(Channel)):
                basis = bernstein_basis(block[:, c], curves.num_points)
                out[:, start : start + PIXELS_PER_BLOCK, c] = (basis @ curves.points[:, c, :].T).T
    return [ImageBuffer(adjusted.reshape(img.data.shape)) for adjusted in out]


__all__ = [
    "ApplyMode",
    "DEFAULT_LUT_RESOLUTION",
    "DEFAULT_POINTS",
    "CHANNEL_INDEX",
    "Channel",
    "ControlPoints",
    "CurveSet",
    "IncrementSet",
    "TonemapLut",
    "apply_curveset",
    "bake_lut",
    "bernstein_basis",
    "bezier_derivative",
    "bezier_eval",
    "binomials",
    "de_casteljau_eval",
    "identity_points",
    "normalize_increments",
]
