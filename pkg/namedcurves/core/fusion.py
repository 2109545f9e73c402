"""Blending of the six curve-adjusted images by color naming weights."""

from enum import Enum, unique
import typing

import attr
import numpy as np

from namedcurves.core.color_naming import NUM_GROUPS, ProbabilityMapSet
from namedcurves.core.imaging import ImageBuffer
from namedcurves.exceptions import DimensionMismatch, InvalidConfiguration

#: Default probability threshold below which a group does not contribute.
DEFAULT_TAU = 0.2


@unique
class FusionMode(Enum):
    """How the adjusted images are combined."""

    #: Thresholded and renormalized color naming probabilities.
    WEIGHTED = "weighted"
    #: Plain average of the six images.
    MEAN = "mean"


def _as_weight_planes(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != 3 or arr.shape[2] != NUM_GROUPS:
        raise DimensionMismatch(f"Expected weights of shape (height, width, 6), got {arr.shape}")
    arr.flags.writeable = False
    return arr


@attr.s(frozen=True, auto_attribs=True)
class FusionWeights:
    """Per-pixel blending weights, summing to one at every pixel."""

    #: Weights of shape ``(height, width, 6)``.
    planes: np.ndarray = attr.ib(converter=_as_weight_planes, eq=False, repr=False)
    #: Threshold the weights were computed with.
    tau: float = DEFAULT_TAU

    @property
    def shape(self) -> typing.Tuple[int, int]:
        return self.planes.shape[:2]


def make_weights(maps: ProbabilityMapSet, tau: float = DEFAULT_TAU) -> FusionWeights:
    """Zero out probabilities below ``tau`` and renormalize the survivors.

    Pixels where every group falls below ``tau`` keep their unthresholded
    probabilities, renormalized.
    """
    if not maps.grouped:
        raise DimensionMismatch("Fusion weights need the 6 grouped probability maps")
    if not 0.0 <= tau <= 1.0:
        raise InvalidConfiguration(f"Threshold must be in [0, 1], got {tau}")
    probs = maps.planes
    kept = np.where(probs < tau, 0.0, probs)
    kept_sum = kept.sum(axis=-1, keepdims=True)
    fallback = kept_sum[..., 0] <= 0.0
    if fallback.any():
        raw_sum = probs.sum(axis=-1, keepdims=True)
        raw = np.where(raw_sum > 0.0, probs, 1.0 / NUM_GROUPS)
        kept = np.where(fallback[..., np.newaxis], raw, kept)
        kept_sum = kept.sum(axis=-1, keepdims=True)
    return FusionWeights(planes=kept / kept_sum, tau=tau)


def uniform_weights(width: int, height: int) -> FusionWeights:
    """Equal weights for all six images."""
    return FusionWeights(planes=np.full((height, width, NUM_GROUPS), 1.0 / NUM_GROUPS), tau=0.0)


def fusion_weights(maps: ProbabilityMapSet, mode: FusionMode, tau: float = DEFAULT_TAU):
    """Weights for ``mode``, computed from the grouped ``maps``."""
    if mode == FusionMode.MEAN:
        return uniform_weights(width=maps.shape[1], height=maps.shape[0])
    return make_weights(maps, tau)


def blend(adjusted: typing.Sequence[ImageBuffer], weights: FusionWeights) -> ImageBuffer:
    """Per-pixel weighted average of the adjusted images, clamped to ``[0, 1]``."""
    if len(adjusted) != NUM_GROUPS:
        raise DimensionMismatch(f"Expected {NUM_GROUPS} adjusted images, got {len(adjusted)}")
    for img in adjusted:
        if img.shape != weights.shape:
            raise DimensionMismatch(f"Image is {img.shape} but weights are {weights.shape}")
    stacked = np.stack([img.data for img in adjusted], axis=-2)
    out = np.einsum("hwn,hwnc->hwc", weights.planes, stacked)
    return ImageBuffer(np.clip(out, 0.0, 1.0))


def active_branch_stats(weights: FusionWeights) -> typing.Dict[int, int]:
    """Number of pixels with exactly ``k`` nonzero weights, for ``k`` in 1..6."""
    active = np.count_nonzero(weights.planes > 0.0, axis=-1)
    counts = np.bincount(active.ravel(), minlength=NUM_GROUPS + 1)
    return {k: int(counts[k]) for k in range(1, NUM_GROUPS + 1)}


__all__ = [
    "DEFAULT_TAU",
    "FusionMode",
    "FusionWeights",
    "active_branch_stats",
    "blend",
    "fusion_weights",
    "make_weights",
    "uniform_weights",
]
