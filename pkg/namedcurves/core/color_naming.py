"""Color naming: per-pixel probabilities over the eleven basic color names.

Two backends are available.  The ``lut`` backend reads an externally obtained
table in the CNLUT format (nearest-bin lookup on an ``N^3`` grid).  The
``parametric`` backend is built in and needs no data files: it splits the
probability mass into an achromatic share driven by HSV saturation and a
chromatic share distributed over fuzzy hue bands.
"""

from enum import Enum, unique
import math
import typing

import attr
from logzero import logger
import numpy as np

from namedcurves.core.fileio import atomic_write_bytes
from namedcurves.core.imaging import ImageBuffer
from namedcurves.exceptions import (
    BadMagic,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidConfiguration,
    MissingInputFile,
    NonNormalizedBin,
    TableDimensionMismatch,
)


@unique
class ColorName(Enum):
    """The eleven basic color names in canonical order."""

    BLACK = "black"
    BLUE = "blue"
    BROWN = "brown"
    GREEN = "green"
    GREY = "grey"
    ORANGE = "orange"
    PINK = "pink"
    PURPLE = "purple"
    RED = "red"
    WHITE = "white"
    YELLOW = "yellow"


@unique
class ColorGroup(Enum):
    """The six color groups used for the tone curves."""

    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    #: orange, brown and yellow
    OBY = "oby"
    #: pink and purple
    PINKPURPLE = "pinkpurple"
    #: white, grey and black
    ACHROMATIC = "achromatic"


#: Color names belonging to each group.
GROUP_MEMBERS: typing.Dict[ColorGroup, typing.Tuple[ColorName, ...]] = {
    ColorGroup.RED: (ColorName.RED,),
    ColorGroup.GREEN: (ColorName.GREEN,),
    ColorGroup.BLUE: (ColorName.BLUE,),
    ColorGroup.OBY: (ColorName.ORANGE, ColorName.BROWN, ColorName.YELLOW),
    ColorGroup.PINKPURPLE: (ColorName.PINK, ColorName.PURPLE),
    ColorGroup.ACHROMATIC: (ColorName.WHITE, ColorName.GREY, ColorName.BLACK),
}

#: Position of each name in probability vectors.
NAME_INDEX: typing.Dict[ColorName, int] = {name: i for i, name in enumerate(ColorName)}

#: Position of each group in grouped probability vectors.
GROUP_INDEX: typing.Dict[ColorGroup, int] = {group: i for i, group in enumerate(ColorGroup)}

#: Number of color names.
NUM_NAMES = len(ColorName)

#: Number of color groups.
NUM_GROUPS = len(ColorGroup)

#: Magic of the CNLUT table header.
CNLUT_MAGIC = "CNLUT"

#: Supported CNLUT format version.
CNLUT_VERSION = 1

#: Tolerance on the sum of a table bin.
CNLUT_BIN_TOLERANCE = 1e-4


def _check_increasing(low_name: str, high_name: str):
    def validator(instance, attribute, value):
        if getattr(instance, high_name) <= getattr(instance, low_name):
            raise InvalidConfiguration(f"{high_name} must be larger than {low_name}")

    return validator


def _check_core(_instance, attribute, value):
    if len(value) != 2 or not all(0.0 <= v < 360.0 for v in value):
        raise InvalidConfiguration(f"{attribute.name} must be two hues in [0, 360), got {value}")


@attr.s(frozen=True, auto_attribs=True)
class ParametricConstants:
    """Constants of the parametric color naming model.

    Saturation and value are in ``[0, 1]``, hues in degrees.  Hue cores are given
    as ``(start, end)`` and may wrap around 0 degrees.  Between adjacent cores the
    membership ramps linearly.
    """

    #: Saturation ramp from fully achromatic to fully chromatic.
    saturation_low: float = 0.15
    saturation_high: float = attr.ib(
        default=0.30, validator=_check_increasing("saturation_low", "saturation_high")
    )
    #: Value ramp ending the black share.
    black_low: float = 0.20
    black_high: float = attr.ib(
        default=0.35, validator=_check_increasing("black_low", "black_high")
    )
    #: Value ramp starting the white share.
    white_low: float = attr.ib(
        default=0.75, validator=_check_increasing("black_high", "white_low")
    )
    white_high: float = attr.ib(
        default=0.90, validator=_check_increasing("white_low", "white_high")
    )
    #: Value ramp ending the brown share of orange and yellow.
    brown_low: float = 0.45
    brown_high: float = attr.ib(
        default=0.65, validator=_check_increasing("brown_low", "brown_high")
    )

    red_core: typing.Tuple[float, float] = attr.ib(default=(345.0, 15.0), validator=_check_core)
    orange_core: typing.Tuple[float, float] = attr.ib(default=(25.0, 45.0), validator=_check_core)
    yellow_core: typing.Tuple[float, float] = attr.ib(default=(55.0, 70.0), validator=_check_core)
    green_core: typing.Tuple[float, float] = attr.ib(default=(85.0, 160.0), validator=_check_core)
    blue_core: typing.Tuple[float, float] = attr.ib(default=(200.0, 260.0), validator=_check_core)
    purple_core: typing.Tuple[float, float] = attr.ib(default=(270.0, 300.0), validator=_check_core)
    pink_core: typing.Tuple[float, float] = attr.ib(default=(315.0, 340.0), validator=_check_core)

    def __attrs_post_init__(self):
        self.hue_bands()

    def hue_bands(self) -> typing.List[typing.Tuple[ColorName, float, float, float, float]]:
        """Trapezoids ``(name, rise_start, core_start, core_end, fall_end)``, unwrapped degrees."""
        chain = [
            (ColorName.ORANGE, self.orange_core),
            (ColorName.YELLOW, self.yellow_core),
            (ColorName.GREEN, self.green_core),
            (ColorName.BLUE, self.blue_core),
            (ColorName.PURPLE, self.purple_core),
            (ColorName.PINK, self.pink_core),
            (ColorName.RED, self.red_core),
        ]
        cores = []
        prev_end = -math.inf
        for name, (start, end) in chain:
            while start < prev_end:
                start += 360.0
            while end < start:
                end += 360.0
            cores.append((name, start, end))
            prev_end = end
        if cores[-1][2] > cores[0][1] + 360.0:
            raise InvalidConfiguration("Hue cores overlap around the hue circle")
        bands = []
        for i, (name, start, end) in enumerate(cores):
            rise_start = cores[i - 1][2] if i > 0 else cores[-1][2] - 360.0
            fall_end = cores[i + 1][1] if i + 1 < len(cores) else cores[0][1] + 360.0
            bands.append((name, rise_start, start, end, fall_end))
        return bands


def smooth_step(x: np.ndarray, low: float, high: float) -> np.ndarray:
    """Hermite step, 0 below ``low``, 1 above ``high``."""
    t = np.clip((x - low) / (high - low), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _ramp(x: np.ndarray, low: float, high: float) -> np.ndarray:
    if high > low:
        return np.clip((x - low) / (high - low), 0.0, 1.0)
    return (x >= low).astype(np.float64)


def rgb_to_hsv(rgb: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hue in ``[0, 360)``, saturation and value in ``[0, 1]``; hue is 0 for greys."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    value = rgb.max(axis=-1)
    delta = value - rgb.min(axis=-1)
    safe_delta = np.where(delta > 0.0, delta, 1.0)
    saturation = np.where(value > 0.0, delta / np.where(value > 0.0, value, 1.0), 0.0)
    hue = np.where(
        value == r,
        np.mod((g - b) / safe_delta, 6.0),
        np.where(value == g, (b - r) / safe_delta + 2.0, (r - g) / safe_delta + 4.0),
    )
    hue = np.where(delta > 0.0, 60.0 * hue, 0.0)
    return np.where(hue >= 360.0, hue - 360.0, hue), saturation, value


def _classify_parametric(constants: ParametricConstants, rgb: np.ndarray) -> np.ndarray:
    hue, saturation, value = rgb_to_hsv(rgb)
    result = np.zeros(rgb.shape[:-1] + (NUM_NAMES,))

    achromatic = 1.0 - smooth_step(saturation, constants.saturation_low, constants.saturation_high)
    black = 1.0 - smooth_step(value, constants.black_low, constants.black_high)
    white = smooth_step(value, constants.white_low, constants.white_high)
    result[..., NAME_INDEX[ColorName.BLACK]] = achromatic * black
    result[..., NAME_INDEX[ColorName.WHITE]] = achromatic * white
    result[..., NAME_INDEX[ColorName.GREY]] = achromatic * (1.0 - black - white)

    chromatic = 1.0 - achromatic
    for name, rise_start, core_start, core_end, fall_end in constants.hue_bands():
        membership = np.zeros_like(hue)
        for shift in (0.0, 360.0):
            h = hue + shift
            band = np.minimum(
                _ramp(h, rise_start, core_start), 1.0 - _ramp(h, core_end, fall_end)
            )
            membership = np.maximum(membership, band)
        result[..., NAME_INDEX[name]] = chromatic * membership

    # Dark orange and yellow are brown.
    dark = 1.0 - smooth_step(value, constants.brown_low, constants.brown_high)
    orange = result[..., NAME_INDEX[ColorName.ORANGE]].copy()
    yellow = result[..., NAME_INDEX[ColorName.YELLOW]].copy()
    result[..., NAME_INDEX[ColorName.BROWN]] = (orange + yellow) * dark
    result[..., NAME_INDEX[ColorName.ORANGE]] = orange * (1.0 - dark)
    result[..., NAME_INDEX[ColorName.YELLOW]] = yellow * (1.0 - dark)
    return result


@unique
class Backend(Enum):
    """Color naming backends."""

    LUT = "lut"
    PARAMETRIC = "parametric"


@attr.s(frozen=True, auto_attribs=True)
class ColorNamingModel:
    """A color naming model, immutable after construction."""

    #: Backend to use.
    backend: Backend
    #: Table of shape ``(N, N, N, 11)`` for the ``lut`` backend.
    table: typing.Optional[np.ndarray] = attr.ib(default=None, eq=False, repr=False)
    #: Constants for the ``parametric`` backend.
    constants: ParametricConstants = ParametricConstants()

    @property
    def size(self) -> typing.Optional[int]:
        """Cube side of the table, if any."""
        return None if self.table is None else self.table.shape[0]

    @staticmethod
    def parametric(constants: typing.Optional[ParametricConstants] = None) -> "ColorNamingModel":
        return ColorNamingModel(
            backend=Backend.PARAMETRIC, constants=constants or ParametricConstants()
        )


def _check_table(table: np.ndarray):
    sums = table.sum(axis=-1)
    bad = (np.abs(sums - 1.0) > CNLUT_BIN_TOLERANCE) | (table < 0.0).any(axis=-1)
    bad |= ~np.isfinite(sums)
    if bad.any():
        ir, ig, ib = np.argwhere(bad)[0]
        raise NonNormalizedBin(
            f"Bin ({ir}, {ig}, {ib}) sums to {sums[ir, ig, ib]} instead of 1 "
            f"({int(bad.sum())} invalid bins in total)"
        )


def load_cnlut(path: str) -> ColorNamingModel:
    """Load a color naming table in CNLUT v1 format."""
    try:
        with open(path, "rb") as inputf:
            raw = inputf.read()
    except (FileNotFoundError, IsADirectoryError):
        raise MissingInputFile(f"Color naming table {path} does not exist")
    header, sep, payload = raw.partition(b"\n")
    try:
        tokens = header.decode("ascii").split()
    except UnicodeDecodeError:
        tokens = []
    if (
        not sep
        or len(tokens) != 4
        or tokens[0] != CNLUT_MAGIC
        or tokens[1] != str(CNLUT_VERSION)
        or tokens[3] != str(NUM_NAMES)
        or not tokens[2].isdigit()
        or int(tokens[2]) < 1
    ):
        raise BadMagic(f"File {path} does not start with 'CNLUT 1 <N> 11'")
    size = int(tokens[2])
    expected = size**3 * NUM_NAMES * 4
    if len(payload) != expected:
        raise TableDimensionMismatch(
            f"Table {path} has {len(payload)} payload bytes, expected {expected} for N={size}"
        )
    table = np.frombuffer(payload, dtype="<f4").reshape(size, size, size, NUM_NAMES)
    table = table.astype(np.float64)
    _check_table(table)
    table.flags.writeable = False
    logger.debug("Loaded color naming table %s with %d^3 bins", path, size)
    return ColorNamingModel(backend=Backend.LUT, table=table)


def save_cnlut(model: ColorNamingModel, path: str):
    """Write the table of a ``lut`` backend model in CNLUT v1 format."""
    if model.table is None:
        raise InvalidConfiguration("Only table-backed models can be written as CNLUT")
    header = f"{CNLUT_MAGIC} {CNLUT_VERSION} {model.size} {NUM_NAMES}\n".encode("ascii")
    atomic_write_bytes(path, header + model.table.astype("<f4").tobytes())


def bake_parametric_table(
    constants: typing.Optional[ParametricConstants] = None, size: int = 32
) -> ColorNamingModel:
    """Sample the parametric model at the bin centres of a ``size^3`` table."""
    if size < 1:
        raise InvalidConfiguration(f"Table size must be positive, got {size}")
    centres = (np.arange(size) + 0.5) / size
    grid = np.stack(np.meshgrid(centres, centres, centres, indexing="ij"), axis=-1)
    table = _classify_parametric(constants or ParametricConstants(), grid)
    table.flags.writeable = False
    return ColorNamingModel(backend=Backend.LUT, table=table)


def classify(model: ColorNamingModel, rgb: np.ndarray) -> np.ndarray:
    """Probabilities of shape ``(..., 11)`` for sRGB values of shape ``(..., 3)``."""
    rgb = np.clip(np.asarray(rgb, dtype=np.float64), 0.0, 1.0)
    if model.backend == Backend.PARAMETRIC:
        return _classify_parametric(model.constants, rgb)
    size = model.size
    index = (np.floor(rgb * 255.0 + 0.5).astype(np.int64) * size) // 256
    probs = model.table[index[..., 0], index[..., 1], index[..., 2]]
    return probs / probs.sum(axis=-1, keepdims=True)


def classify_pixel(model: ColorNamingModel, rgb: typing.Sequence[float]) -> np.ndarray:
    """Probability vector over the 11 names for one sRGB triple."""
    return classify(model, np.asarray(rgb, dtype=np.float64).reshape(3))


def group_probabilities(p11: np.ndarray) -> np.ndarray:
    """Sum member-name probabilities into the 6 groups, shape ``(..., 11) -> (..., 6)``."""
    p11 = np.asarray(p11, dtype=np.float64)
    if p11.shape[-1] != NUM_NAMES:
        raise DimensionMismatch(f"Expected {NUM_NAMES} probabilities, got {p11.shape[-1]}")
    result = np.zeros(p11.shape[:-1] + (NUM_GROUPS,))
    for group, members in GROUP_MEMBERS.items():
        for name in members:
            result[..., GROUP_INDEX[group]] += p11[..., NAME_INDEX[name]]
    return result


def _as_planes(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != 3 or arr.shape[2] not in (NUM_NAMES, NUM_GROUPS):
        raise DimensionMismatch(f"Expected planes of shape (height, width, 6|11), got {arr.shape}")
    arr.flags.writeable = False
    return arr


@attr.s(frozen=True, auto_attribs=True)
class ProbabilityMapSet:
    """Per-pixel probabilities over the 11 names or the 6 groups."""

    #: Probabilities of shape ``(height, width, K)``.
    planes: np.ndarray = attr.ib(converter=_as_planes, eq=False, repr=False)

    @property
    def grouped(self) -> bool:
        return self.planes.shape[2] == NUM_GROUPS

    @property
    def shape(self) -> typing.Tuple[int, int]:
        return self.planes.shape[:2]

    @property
    def labels(self) -> typing.List[str]:
        """Names of the planes in order."""
        return [x.value for x in (ColorGroup if self.grouped else ColorName)]

    def plane(self, index: int) -> np.ndarray:
        if not 0 <= index < self.planes.shape[2]:
            raise IndexOutOfRange(
                f"Plane index {index} out of range for {self.planes.shape[2]} planes"
            )
        return self.planes[..., index]

    def __str__(self):
        return f"ProbabilityMapSet({self.shape[1]}x{self.shape[0]}, K={self.planes.shape[2]})"


#: Rows per block in ``compute_maps``.
ROWS_PER_BLOCK = 256


def compute_maps(
    model: ColorNamingModel, img: ImageBuffer, grouped: bool = True
) -> ProbabilityMapSet:
    """Classify every pixel of ``img``, optionally grouping into the 6 categories."""
    planes = np.empty(img.shape + ((NUM_GROUPS if grouped else NUM_NAMES),))
    for start in range(0, img.height, ROWS_PER_BLOCK):
        block = classify(model, img.data[start : start + ROWS_PER_BLOCK])
        planes[start : start + ROWS_PER_BLOCK] = group_probabilities(block) if grouped else block
    return ProbabilityMapSet(planes)


def _check_aligned(img: ImageBuffer, maps: ProbabilityMapSet):
    if img.shape != maps.shape:
        raise DimensionMismatch(f"Image is {img.shape} but maps are {maps.shape}")


def render_map_visualization(img: ImageBuffer, maps: ProbabilityMapSet, plane: int) -> ImageBuffer:
    """Blend from white to the original color by the probability of ``plane``."""
    _check_aligned(img, maps)
    p = maps.plane(plane)[..., np.newaxis]
    return ImageBuffer((1.0 - p) + p * img.data)


def render_threshold_visualization(
    img: ImageBuffer, maps: ProbabilityMapSet, plane: int, threshold: float = 0.2
) -> ImageBuffer:
    """Original colors where the probability of ``plane`` exceeds ``threshold``, white elsewhere."""
    _check_aligned(img, maps)
    mask = (maps.plane(plane) > threshold)[..., np.newaxis]
    return ImageBuffer(np.where(mask, img.data, 1.0))


@attr.s(frozen=True, auto_attribs=True)
class IntensityProfile:
    """Intensity statistics of the pixels dominated by one plane."""

    #: Name of the plane.
    label: str
    #: Number of pixels above the probability cut-off.
    count: int
    #: Smallest, mean and largest intensity, ``None`` without pixels.
    minimum: typing.Optional[float] = None
    mean: typing.Optional[float] = None
    maximum: typing.Optional[float] = None


def intensity_profile(
    img: ImageBuffer, maps: ProbabilityMapSet, plane: int, min_probability: float = 0.5
) -> IntensityProfile:
    """Intensity (mean of RGB) range of pixels with probability above ``min_probability``."""
    _check_aligned(img, maps)
    selected = img.data.mean(axis=-1)[maps.plane(plane) > min_probability]
    label = maps.labels[plane]
    if not selected.size:
        return IntensityProfile(label=label, count=0)
    return IntensityProfile(
        label=label,
        count=int(selected.size),
        minimum=float(selected.min()),
        mean=float(selected.mean()),
        maximum=float(selected.max()),
    )


def load_model(
    cnlut_path: typing.Optional[str], constants: typing.Optional[ParametricConstants] = None
) -> ColorNamingModel:
    """Load the CNLUT at ``cnlut_path`` or fall back to the parametric model."""
    if cnlut_path:
        logger.info("Using color naming table %s", cnlut_path)
        return load_cnlut(cnlut_path)
    logger.info("Using parametric color naming model")
    return ColorNamingModel.parametric(constants)


__all__ = [
    "Backend",
    "ColorGroup",
    "ColorName",
    "ColorNamingModel",
    "GROUP_INDEX",
    "GROUP_MEMBERS",
    "IntensityProfile",
    "NAME_INDEX",
    "ParametricConstants",
    "ProbabilityMapSet",
    "bake_parametric_table",
    "classify",
    "classify_pixel",
    "compute_maps",
    "group_probabilities",
    "intensity_profile",
    "load_cnlut",
    "load_model",
    "render_map_visualization",
    "render_threshold_visualization",
    "save_cnlut",
]
