"""Image-pair quality metrics and the training loss.

All metrics are computed in float64 on the ``[0, 1]`` scale.  Color differences
go through the D65 sRGB to Lab conversion of ``namedcurves.core.imaging``.
"""

from enum import Enum, unique
import math
import typing

import attr
import cv2
import numpy as np

from namedcurves.core.imaging import ImageBuffer, check_same_shape, srgb_to_lab_array
from namedcurves.exceptions import ImageTooSmall, InvalidConfiguration

#: Side of the Gaussian SSIM window.
SSIM_WINDOW = 11
#: Standard deviation of the Gaussian SSIM window.
SSIM_SIGMA = 1.5
#: SSIM stabilizing constants.
SSIM_K1 = 0.01
SSIM_K2 = 0.03
#: Dynamic range of pixel values.
DATA_RANGE = 1.0


@unique
class Metric(Enum):
    """Metrics that can be reported."""

    PSNR = "psnr"
    SSIM = "ssim"
    DE_AB = "de_ab"
    DE_00 = "de_00"
    LOSS = "loss"


#: Metrics computed by default.
DEFAULT_METRICS = (Metric.PSNR, Metric.SSIM, Metric.DE_AB, Metric.DE_00)


@attr.s(frozen=True, auto_attribs=True)
class LossConfig:
    """Weights of the training loss."""

    #: Weight of the standardization term.
    alpha: float = attr.ib(default=0.5)

    @alpha.validator
    def _check_alpha(self, _attribute, value):
        if not value >= 0.0:
            raise InvalidConfiguration(f"alpha must be nonnegative, got {value}")


@attr.s(frozen=True, auto_attribs=True)
class MetricsReport:
    """Metrics of an image pair, ``None`` for metrics not computed."""

    #: Peak signal-to-noise ratio in dB, ``inf`` for identical images.
    psnr: typing.Optional[float] = None
    #: Structural similarity.
    ssim: typing.Optional[float] = None
    #: Mean CIE76 color difference.
    de_ab: typing.Optional[float] = None
    #: Mean CIEDE2000 color difference.
    de_00: typing.Optional[float] = None
    #: Training loss.
    loss: typing.Optional[float] = None


def mse(a: ImageBuffer, b: ImageBuffer) -> float:
    check_same_shape(a, b)
    return float(np.mean((a.data - b.data) ** 2))


def rmse(a: ImageBuffer, b: ImageBuffer) -> float:
    return math.sqrt(mse(a, b))


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """Peak signal-to-noise ratio, ``math.inf`` for identical images."""
    error = mse(a, b)
    if error == 0.0:
        return math.inf
    return 10.0 * math.log10(DATA_RANGE**2 / error)


def _gaussian_filter_valid(x: np.ndarray) -> np.ndarray:
    kernel = cv2.getGaussianKernel(SSIM_WINDOW, SSIM_SIGMA, cv2.CV_64F)
    pad = SSIM_WINDOW // 2
    filtered = cv2.sepFilter2D(np.ascontiguousarray(x), cv2.CV_64F, kernel, kernel)
    return filtered[pad : x.shape[0] - pad, pad : x.shape[1] - pad]


def _ssim_channel(x: np.ndarray, y: np.ndarray) -> float:
    c1 = (SSIM_K1 * DATA_RANGE) ** 2
    c2 = (SSIM_K2 * DATA_RANGE) ** 2
    mu_x = _gaussian_filter_valid(x)
    mu_y = _gaussian_filter_valid(y)
    sigma_xx = _gaussian_filter_valid(x * x) - mu_x * mu_x
    sigma_yy = _gaussian_filter_valid(y * y) - mu_y * mu_y
    sigma_xy = _gaussian_filter_valid(x * y) - mu_x * mu_y
    numerator = (2.0 * mu_x * mu_y + c1) * (2.0 * sigma_xy + c2)
    denominator = (mu_x * mu_x + mu_y * mu_y + c1) * (sigma_xx + sigma_yy + c2)
    return float(np.mean(numerator / denominator))


def ssim(a: ImageBuffer, b: ImageBuffer) -> float:
    """Gaussian-window SSIM over the valid region, averaged over the RGB channels."""
    check_same_shape(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ImageTooSmall(f"SSIM needs images of at least {SSIM_WINDOW} pixels, got {a.shape}")
    return float(np.mean([_ssim_channel(a.data[..., c], b.data[..., c]) for c in range(3)]))


def cie76(lab1, lab2) -> np.ndarray:
    """Euclidean distance of Lab arrays of shape ``(..., 3)``."""
    diff = np.asarray(lab1, dtype=np.float64) - np.asarray(lab2, dtype=np.float64)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def delta_e_ab(a: ImageBuffer, b: ImageBuffer) -> float:
    """Mean Euclidean distance in CIE Lab."""
    check_same_shape(a, b)
    return float(np.mean(cie76(srgb_to_lab_array(a.data), srgb_to_lab_array(b.data))))


def _hue_degrees(b: np.ndarray, a: np.ndarray) -> np.ndarray:
    hue = np.mod(np.degrees(np.arctan2(b, a)), 360.0)
    return np.where(((a == 0.0) & (b == 0.0)) | (hue >= 360.0), 0.0, hue)


def ciede2000(lab1, lab2) -> np.ndarray:
    """CIEDE2000 difference of Lab arrays of shape ``(..., 3)`` with ``kL = kC = kH = 1``."""
    lab1 = np.asarray(lab1, dtype=np.float64)
    lab2 = np.asarray(lab2, dtype=np.float64)
    L1, a1, b1 = lab1[..., 0], lab1[..., 1], lab1[..., 2]
    L2, a2, b2 = lab2[..., 0], lab2[..., 1], lab2[..., 2]

    c_mean7 = ((np.hypot(a1, b1) + np.hypot(a2, b2)) / 2.0) ** 7
    g = 0.5 * (1.0 - np.sqrt(c_mean7 / (c_mean7 + 25.0**7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)
    h1p = _hue_degrees(b1, a1p)
    h2p = _hue_degrees(b2, a2p)

    chroma_product = c1p * c2p
    dh = h2p - h1p
    dhp = np.where(
        chroma_product == 0.0,
        0.0,
        np.where(np.abs(dh) <= 180.0, dh, np.where(dh > 180.0, dh - 360.0, dh + 360.0)),
    )
    dLp = L2 - L1
    dCp = c2p - c1p
    dHp = 2.0 * np.sqrt(chroma_product) * np.sin(np.radians(dhp / 2.0))

    lp_mean = (L1 + L2) / 2.0
    cp_mean = (c1p + c2p) / 2.0
    h_sum = h1p + h2p
    hp_mean = np.where(
        chroma_product == 0.0,
        h_sum,
        np.where(
            np.abs(dh) <= 180.0,
            h_sum / 2.0,
            np.where(h_sum < 360.0, (h_sum + 360.0) / 2.0, (h_sum - 360.0) / 2.0),
        ),
    )

    t = (
        1.0
        - 0.17 * np.cos(np.radians(hp_mean - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * hp_mean))
        + 0.32 * np.cos(np.radians(3.0 * hp_mean + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * hp_mean - 63.0))
    )
    d_theta = 30.0 * np.exp(-(((hp_mean - 275.0) / 25.0) ** 2))
    cp_mean7 = cp_mean**7
    r_c = 2.0 * np.sqrt(cp_mean7 / (cp_mean7 + 25.0**7))
    l_term = (lp_mean - 50.0) ** 2
    s_l = 1.0 + 0.015 * l_term / np.sqrt(20.0 + l_term)
    s_c = 1.0 + 0.045 * cp_mean
    s_h = 1.0 + 0.015 * cp_mean * t
    r_t = -np.sin(np.radians(2.0 * d_theta)) * r_c

    dl = dLp / s_l
    dc = dCp / s_c
    dh_ = dHp / s_h
    return np.sqrt(np.maximum(dl * dl + dc * dc + dh_ * dh_ + r_t * dc * dh_, 0.0))


def delta_e_00(a: ImageBuffer, b: ImageBuffer) -> float:
    """Mean CIEDE2000 difference."""
    check_same_shape(a, b)
    return float(np.mean(ciede2000(srgb_to_lab_array(a.data), srgb_to_lab_array(b.data))))


def loss_eq3(
    x_std: ImageBuffer, y_hat: ImageBuffer, y: ImageBuffer, cfg: LossConfig = LossConfig()
) -> float:
    """``alpha * RMSE(y, x_std) + RMSE(y, y_hat) + (1 - SSIM(y, y_hat))``."""
    check_same_shape(x_std, y_hat, y)
    return cfg.alpha * rmse(y, x_std) + rmse(y, y_hat) + (1.0 - ssim(y, y_hat))


#: Functions computing the pairwise metrics.
METRIC_FUNCS: typing.Dict[Metric, typing.Callable[[ImageBuffer, ImageBuffer], float]] = {
    Metric.PSNR: psnr,
    Metric.SSIM: ssim,
    Metric.DE_AB: delta_e_ab,
    Metric.DE_00: delta_e_00,
}


def available_metrics(img: ImageBuffer, metrics=DEFAULT_METRICS) -> typing.Tuple[Metric, ...]:
    """Drop SSIM from ``metrics`` for images smaller than the SSIM window."""
    if min(img.shape) < SSIM_WINDOW:
        return tuple(m for m in metrics if m not in (Metric.SSIM, Metric.LOSS))
    return tuple(metrics)


def evaluate(
    a: ImageBuffer,
    b: ImageBuffer,
    metrics: typing.Iterable[Metric] = DEFAULT_METRICS,
    x_std: typing.Optional[ImageBuffer] = None,
    loss_config: LossConfig = LossConfig(),
) -> MetricsReport:
    """Compute ``metrics`` of output ``a`` against target ``b``.

    The loss is computed when requested and ``x_std`` is given.
    """
    check_same_shape(a, b)
    values = {}
    for metric in metrics:
        if metric == Metric.LOSS:
            if x_std is not None:
                values["loss"] = loss_eq3(x_std, a, b, loss_config)
        else:
            values[metric.value] = METRIC_FUNCS[metric](a, b)
    return MetricsReport(**values)


__all__ = [
    "DEFAULT_METRICS",
    "LossConfig",
    "Metric",
    "MetricsReport",
    "available_metrics",
    "cie76",
    "ciede2000",
    "delta_e_00",
    "delta_e_ab",
    "evaluate",
    "loss_eq3",
    "mse",
    "psnr",
    "rmse",
    "ssim",
]
