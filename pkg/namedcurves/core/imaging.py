"""Image buffers, PNG input/output and color space conversions.

Images are held as ``(height, width, 3)`` arrays of float64 sRGB values with a
nominal range of ``[0, 1]``.  The arrays are made read-only on construction so an
``ImageBuffer`` can be shared between threads.
"""

import os
import typing

import attr
import cv2
from logzero import logger
import numpy as np

from namedcurves.core.fileio import atomic_write_bytes
from namedcurves.exceptions import DimensionMismatch, MissingInputFile, UnsupportedFormat

#: The eight signature bytes every PNG file starts with.
PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

#: Linear sRGB to CIE XYZ (D65).
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)

#: D65 reference white.
WHITE_D65 = np.array([0.95047, 1.0, 1.08883])

#: CIE Lab constants ``epsilon = (6/29)^3`` and ``kappa``-derived slope.
_LAB_EPSILON = (6.0 / 29.0) ** 3
_LAB_SLOPE = 1.0 / (3.0 * (6.0 / 29.0) ** 2)


def _as_pixel_array(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionMismatch(f"Expected an array of shape (height, width, 3), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"Image must have at least one pixel, got {arr.shape}")
    arr.flags.writeable = False
    return arr


@attr.s(frozen=True, auto_attribs=True)
class ImageBuffer:
    """An RGB image with floating point values."""

    #: Pixel data of shape ``(height, width, 3)``.
    data: np.ndarray = attr.ib(converter=_as_pixel_array, eq=False, repr=False)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> typing.Tuple[int, int]:
        """``(height, width)`` of the image."""
        return self.data.shape[:2]

    @classmethod
    def filled(cls, width: int, height: int, rgb) -> "ImageBuffer":
        """Construct a constant image."""
        return cls(np.broadcast_to(np.asarray(rgb, dtype=np.float64), (height, width, 3)))

    def clamped(self) -> "ImageBuffer":
        return ImageBuffer(np.clip(self.data, 0.0, 1.0))

    def __str__(self):
        return f"ImageBuffer({self.width}x{self.height})"


def check_same_shape(*images: ImageBuffer):
    """Raise ``DimensionMismatch`` unless all ``images`` have the same size."""
    shapes = {img.shape for img in images}
    if len(shapes) > 1:
        raise DimensionMismatch(f"Image dimensions differ: {sorted(shapes)}")


def load_png(path: str) -> ImageBuffer:
    """Load an 8 or 16 bit RGB/RGBA PNG file, alpha is dropped."""
    if not os.path.isfile(path):
        raise MissingInputFile(f"Input file {path} does not exist")
    with open(path, "rb") as inputf:
        raw = inputf.read()
    if not raw.startswith(PNG_SIGNATURE):
        raise UnsupportedFormat(f"File {path} is not a PNG file")
    arr = cv2.imdecode(np.frombuffer(raw, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if arr is None:
        raise UnsupportedFormat(f"Could not decode PNG file {path}")
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise UnsupportedFormat(f"PNG file {path} is not RGB or RGBA")
    if arr.dtype == np.uint8:
        scale = 255.0
    elif arr.dtype == np.uint16:
        scale = 65535.0
    else:  # pragma: no cover
        raise UnsupportedFormat(f"Unsupported sample type {arr.dtype} in {path}")
    logger.debug("Loaded %s (%dx%d, %s)", path, arr.shape[1], arr.shape[0], arr.dtype)
    # OpenCV decodes to BGR(A) channel order.
    return ImageBuffer(arr[..., 2::-1].astype(np.float64) / scale)


def quantize8(values: np.ndarray) -> np.ndarray:
    """Clamp to ``[0, 1]`` and round half away from zero to bytes."""
    values = np.clip(np.nan_to_num(values, nan=0.0), 0.0, 1.0)
    return np.floor(values * 255.0 + 0.5).astype(np.uint8)


def encode_png(pixels: np.ndarray) -> bytes:
    """Encode an RGB or single-channel array of floats as 8 bit PNG."""
    arr = quantize8(pixels)
    if arr.ndim == 3:
        arr = np.ascontiguousarray(arr[..., ::-1])
    ok, buf = cv2.imencode(".png", arr)
    if not ok:  # pragma: no cover
        raise OSError("PNG encoding failed")
    return buf.tobytes()


def save_png(img: ImageBuffer, path: str):
    """Write ``img`` as 8 bit RGB PNG."""
    atomic_write_bytes(path, encode_png(img.data))


def save_gray_png(plane: np.ndarray, path: str):
    """Write a ``(height, width)`` plane of values in ``[0, 1]`` as 8 bit grayscale PNG."""
    atomic_write_bytes(path, encode_png(plane))


def downsample(img: ImageBuffer, max_side: typing.Optional[int]) -> ImageBuffer:
    """Area-weighted reduction so the longest side is at most ``max_side``."""
    if not max_side or max(img.shape) <= max_side:
        return img
    scale = max_side / max(img.shape)
    width = max(1, int(round(img.width * scale)))
    height = max(1, int(round(img.height * scale)))
    return ImageBuffer(cv2.resize(img.data, (width, height), interpolation=cv2.INTER_AREA))


@attr.s(frozen=True, auto_attribs=True)
class LabPixel:
    """A CIE Lab color."""

    #: Lightness in ``[0, 100]``.
    L: float
    #: Green-red axis.
    a: float
    #: Blue-yellow axis.
    b: float


def srgb_to_lab_array(rgb: np.ndarray) -> np.ndarray:
    """Convert sRGB values of shape ``(..., 3)`` to CIE Lab under D65."""
    rgb = np.clip(np.asarray(rgb, dtype=np.float64), 0.0, 1.0)
    linear = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    xyz = linear @ SRGB_TO_XYZ.T / WHITE_D65
    f = np.where(xyz > _LAB_EPSILON, np.cbrt(xyz), xyz * _LAB_SLOPE + 4.0 / 29.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def srgb_to_lab(rgb: typing.Sequence[float]) -> LabPixel:
    """Convert one sRGB triple to ``LabPixel``."""
    L, a, b = srgb_to_lab_array(np.asarray(rgb, dtype=np.float64).reshape(3))
    return LabPixel(L=float(L), a=float(a), b=float(b))


def lab_to_lch_array(lab: np.ndarray) -> np.ndarray:
    """Convert Lab of shape ``(..., 3)`` to ``(L, C, h)`` with ``h`` in degrees."""
    lab = np.asarray(lab, dtype=np.float64)
    chroma = np.hypot(lab[..., 1], lab[..., 2])
    hue = np.mod(np.degrees(np.arctan2(lab[..., 2], lab[..., 1])), 360.0)
    hue = np.where((chroma == 0.0) | (hue >= 360.0), 0.0, hue)
    return np.stack([lab[..., 0], chroma, hue], axis=-1)


def lab_to_lch(p: LabPixel) -> typing.Tuple[float, float, float]:
    L, C, h = lab_to_lch_array(np.array([p.L, p.a, p.b]))
    return float(L), float(C), float(h)


__all__ = [
    "ImageBuffer",
    "LabPixel",
    "check_same_shape",
    "downsample",
    "encode_png",
    "lab_to_lch",
    "lab_to_lch_array",
    "load_png",
    "quantize8",
    "save_gray_png",
    "save_png",
    "srgb_to_lab",
    "srgb_to_lab_array",
]
