"""Per-image fitting of tone curves by gradient descent.

The curves are parametrized by unconstrained values ``theta`` of shape
``(6, 3, M - 1)``.  The increments between control points are
``softplus(theta)``, normalized by their cumulative sum, so every iterate is a
valid monotone ``CurveSet`` and ``theta = 0`` is the identity.  The objective is
the MSE between the blended output and the target under fusion weights computed
once from the input.
"""

import time
import typing

import attr
import numpy as np
from logzero import logger
from tqdm import tqdm

from namedcurves.core.color_naming import NUM_GROUPS, ColorNamingModel, compute_maps
from namedcurves.core.fusion import (
    DEFAULT_TAU,
    FusionMode,
    FusionWeights,
    blend,
    fusion_weights,
)
from namedcurves.core.imaging import ImageBuffer, check_same_shape, downsample
from namedcurves.core.metrics import MetricsReport, available_metrics, evaluate
from namedcurves.core.tone_curves import (
    DEFAULT_POINTS,
    ApplyMode,
    Channel,
    CurveSet,
    apply_curveset,
    bernstein_basis,
)
from namedcurves.exceptions import DimensionMismatch, InvalidConfiguration

#: Smallest increment used when inverting a curve set into parameters.
MIN_INCREMENT = 1e-12


def softplus(theta: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, theta)


def sigmoid(theta: np.ndarray) -> np.ndarray:
    """Derivative of ``softplus``."""
    return 0.5 * (1.0 + np.tanh(0.5 * theta))


def inverse_softplus(delta: np.ndarray) -> np.ndarray:
    delta = np.maximum(np.asarray(delta, dtype=np.float64), MIN_INCREMENT)
    return delta + np.log(-np.expm1(-delta))


def _as_theta(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != 3 or arr.shape[:2] != (NUM_GROUPS, len(Channel)) or arr.shape[2] < 1:
        raise DimensionMismatch(f"Expected parameters of shape (6, 3, M - 1), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidConfiguration("Curve parameters must be finite")
    arr.flags.writeable = False
    return arr


@attr.s(frozen=True, auto_attribs=True)
class FitParams:
    """Unconstrained curve parameters."""

    #: Array of shape ``(6, 3, M - 1)``.
    theta: np.ndarray = attr.ib(converter=_as_theta, eq=False, repr=False)

    @property
    def num_points(self) -> int:
        return self.theta.shape[2] + 1

    @staticmethod
    def identity(num_points: int = DEFAULT_POINTS) -> "FitParams":
        if num_points < 2:
            raise InvalidConfiguration(f"Need at least two control points, got {num_points}")
        return FitParams(np.zeros((NUM_GROUPS, len(Channel), num_points - 1)))

    def increments(self) -> np.ndarray:
        return softplus(self.theta)

    def to_curveset(self) -> CurveSet:
        return CurveSet(_points_from_increments(self.increments()))

    @staticmethod
    def from_curveset(curves: CurveSet) -> "FitParams":
        """Parameters reproducing ``curves`` up to the smallest admissible increment."""
        deltas = np.diff(curves.points, axis=-1) * (curves.num_points - 1)
        return FitParams(inverse_softplus(deltas))


def _points_from_increments(deltas: np.ndarray) -> np.ndarray:
    cumulative = np.cumsum(deltas, axis=-1)
    points = cumulative / cumulative[..., -1:]
    return np.concatenate([np.zeros(points.shape[:-1] + (1,)), points], axis=-1)


def _check_positive(_instance, attribute, value):
    if not value > 0:
        raise InvalidConfiguration(f"{attribute.name} must be positive, got {value}")


def _check_decay(_instance, attribute, value):
    if not 0.0 <= value < 1.0:
        raise InvalidConfiguration(f"{attribute.name} must be in [0, 1), got {value}")


def _check_optional_positive(instance, attribute, value):
    if value is not None:
        _check_positive(instance, attribute, value)


def _check_points(_instance, attribute, value):
    if value < 2:
        raise InvalidConfiguration(f"{attribute.name} must be at least 2, got {value}")


def _check_tau(_instance, attribute, value):
    if not 0.0 <= value <= 1.0:
        raise InvalidConfiguration(f"{attribute.name} must be in [0, 1], got {value}")


@attr.s(frozen=True, auto_attribs=True)
class FitConfig:
    """Configuration of ``fit``."""

    #: Number of optimizer steps.
    iterations: int = attr.ib(default=500, validator=_check_positive)
    #: Adam step size.
    step_size: float = attr.ib(default=0.05, validator=_check_positive)
    #: Decay of the first moment estimate.
    beta1: float = attr.ib(default=0.9, validator=_check_decay)
    #: Decay of the second moment estimate.
    beta2: float = attr.ib(default=0.999, validator=_check_decay)
    #: Stabilizer of the Adam update.
    epsilon: float = attr.ib(default=1e-8, validator=_check_positive)
    #: Control points per curve.
    points: int = attr.ib(default=DEFAULT_POINTS, validator=_check_points)
    #: Longest side of the images used for fitting, ``None`` for full resolution.
    max_side: typing.Optional[int] = attr.ib(default=256, validator=_check_optional_positive)
    #: Fusion threshold.
    tau: float = attr.ib(default=DEFAULT_TAU, validator=_check_tau)
    #: How the adjusted images are combined.
    fusion: FusionMode = FusionMode.WEIGHTED
    #: Seed of the pixel sampling.
    seed: int = 0
    #: Pixels per gradient step, all pixels if ``None``.
    batch_pixels: typing.Optional[int] = attr.ib(
        default=None, validator=_check_optional_positive
    )


@attr.s(frozen=True, auto_attribs=True)
class FitResult:
    """Result of ``fit``."""

    #: Best curves found.
    curves: CurveSet
    #: Objective before the first step and after every step.
    trace: typing.Tuple[float, ...]
    #: Smallest value in ``trace``.
    best_objective: float
    #: Position of ``best_objective`` in ``trace``.
    best_iteration: int
    #: Metrics of the fitted output against the target at full resolution.
    metrics: MetricsReport
    #: Wall-clock time of the fit.
    seconds: float = attr.ib(default=0.0, eq=False)
    #: Fitted output at full resolution.
    output: typing.Optional[ImageBuffer] = attr.ib(default=None, eq=False, repr=False)

    @property
    def initial_objective(self) -> float:
        return self.trace[0]


class CurveObjective:
    """MSE of the blended output against a target, with its analytic gradient.

    The Bernstein basis of every input pixel is computed once, so evaluating
    a parameter set costs one matrix product per channel.
    """

    def __init__(
        self,
        input: ImageBuffer,
        target: ImageBuffer,
        weights: FusionWeights,
        num_points: int = DEFAULT_POINTS,
    ):
        check_same_shape(input, target)
        if weights.shape != input.shape:
            raise DimensionMismatch(f"Image is {input.shape} but weights are {weights.shape}")
        self.num_points = num_points
        self.num_pixels = input.height * input.width
        pixels = np.clip(input.data.reshape(-1, 3), 0.0, 1.0)
        #: Per channel basis of shape ``(N, M)``.
        self.basis = [bernstein_basis(pixels[:, c], num_points) for c in range(len(Channel))]
        self.weights = weights.planes.reshape(-1, NUM_GROUPS)
        self.target = target.data.reshape(-1, 3)

    def _check(self, params: FitParams):
        if params.num_points != self.num_points:
            raise DimensionMismatch(
                f"Parameters have {params.num_points} points, objective uses {self.num_points}"
            )

    def _output(self, points: np.ndarray, rows) -> np.ndarray:
        out = np.empty((self.weights[rows].shape[0], len(Channel)))
        for c in range(len(Channel)):
            adjusted = self.basis[c][rows] @ points[:, c, :].T
            out[:, c] = np.sum(adjusted * self.weights[rows], axis=-1)
        return out

    def value(self, params: FitParams, rows=slice(None)) -> float:
        self._check(params)
        out = np.clip(self._output(params.to_curveset().points, rows), 0.0, 1.0)
        return float(np.mean((out - self.target[rows]) ** 2))

    def value_and_gradient(
        self, params: FitParams, rows=slice(None)
    ) -> typing.Tuple[float, np.ndarray]:
        """Objective and its gradient with respect to ``params.theta``."""
        self._check(params)
        deltas = params.increments()
        points = _points_from_increments(deltas)
        out = self._output(points, rows)
        residual = np.clip(out, 0.0, 1.0) - self.target[rows]
        value = float(np.mean(residual**2))
        d_out = 2.0 * (out - self.target[rows]) / residual.size
        d_points = np.empty_like(points)
        weights = self.weights[rows]
        for c in range(len(Channel)):
            d_points[:, c, :] = (d_out[:, c : c + 1] * weights).T @ self.basis[c][rows]
        # P_m = C_m / S for m >= 1, so dP_m / dD_k = ([k <= m] - P_m) / S.
        total = np.sum(deltas, axis=-1, keepdims=True)
        d_tail = d_points[..., 1:]
        suffix = np.flip(np.cumsum(np.flip(d_tail, axis=-1), axis=-1), axis=-1)
        weighted = np.sum(d_tail * points[..., 1:], axis=-1, keepdims=True)
        d_deltas = (suffix - weighted) / total
        return value, d_deltas * sigmoid(params.theta)

    def gradient(self, params: FitParams, rows=slice(None)) -> np.ndarray:
        return self.value_and_gradient(params, rows)[1]


def objective(
    params: FitParams, input: ImageBuffer, target: ImageBuffer, weights: FusionWeights
) -> float:
    """MSE between the blended curve output for ``params`` and ``target``."""
    return CurveObjective(input, target, weights, params.num_points).value(params)


def gradient(
    params: FitParams, input: ImageBuffer, target: ImageBuffer, weights: FusionWeights
) -> np.ndarray:
    """Gradient of ``objective`` with respect to ``params.theta``."""
    return CurveObjective(input, target, weights, params.num_points).gradient(params)


class AdamOptimizer:
    """Adam with bias-corrected moment estimates for a single parameter array."""

    def __init__(
        self,
        step_size: float = 0.05,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ):
        self.step_size = step_size
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m: typing.Optional[np.ndarray] = None
        self.v: typing.Optional[np.ndarray] = None
        self.t = 0

    @staticmethod
    def from_config(cfg: FitConfig) -> "AdamOptimizer":
        return AdamOptimizer(
            step_size=cfg.step_size, beta1=cfg.beta1, beta2=cfg.beta2, epsilon=cfg.epsilon
        )

    def step(self, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """Return the updated parameters."""
        if self.m is None:
            self.m = np.zeros_like(theta)
            self.v = np.zeros_like(theta)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * (grad * grad)
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        return theta - self.step_size * m_hat / (np.sqrt(v_hat) + self.epsilon)


def apply_fitted(
    curves: CurveSet,
    input: ImageBuffer,
    model: ColorNamingModel,
    tau: float = DEFAULT_TAU,
    mode: ApplyMode = ApplyMode.LUT,
    fusion: FusionMode = FusionMode.WEIGHTED,
) -> ImageBuffer:
    """Run the full enhancement pipeline on ``input``."""
    weights = fusion_weights(compute_maps(model, input), fusion, tau)
    return blend(apply_curveset(curves, input, mode=mode), weights)


def fit(
    input: ImageBuffer,
    target: ImageBuffer,
    model: ColorNamingModel,
    cfg: FitConfig = FitConfig(),
    progress: bool = False,
) -> FitResult:
    """Fit a ``CurveSet`` mapping ``input`` to ``target``.

    Starts from the identity and returns the best iterate, so the result never
    does worse on the fit-resolution pair than the identity.
    """
    check_same_shape(input, target)
    started = time.perf_counter()
    small_input = downsample(input, cfg.max_side)
    small_target = downsample(target, cfg.max_side)
    logger.debug("Fitting on %s", small_input)
    weights = fusion_weights(compute_maps(model, small_input), cfg.fusion, cfg.tau)
    problem = CurveObjective(small_input, small_target, weights, cfg.points)

    rng = np.random.default_rng(cfg.seed)
    use_batches = cfg.batch_pixels is not None and cfg.batch_pixels < problem.num_pixels
    optimizer = AdamOptimizer.from_config(cfg)
    params = FitParams.identity(cfg.points)
    trace: typing.List[float] = []
    best_params, best_value, best_iteration = params, np.inf, 0

    def record(params: FitParams, value: float):
        nonlocal best_params, best_value, best_iteration
        trace.append(value)
        if value < best_value:
            best_params, best_value, best_iteration = params, value, len(trace) - 1

    for iteration in tqdm(range(cfg.iterations), disable=not progress, unit="it"):
        if use_batches:
            rows = rng.choice(problem.num_pixels, size=cfg.batch_pixels, replace=False)
            record(params, problem.value(params))
            _, grad = problem.value_and_gradient(params, rows)
        else:
            value, grad = problem.value_and_gradient(params)
            record(params, value)
        params = FitParams(optimizer.step(params.theta, grad))
        if iteration % 50 == 0:
            logger.debug("iteration %d: objective %.6g", iteration, trace[-1])
    record(params, problem.value(params))

    curves = best_params.to_curveset()
    output = apply_fitted(curves, input, model, cfg.tau, fusion=cfg.fusion)
    metrics = evaluate(output, target, available_metrics(input))
    seconds = time.perf_counter() - started
    logger.debug(
        "Objective %.6g -> %.6g (best at iteration %d)", trace[0], best_value, best_iteration
    )
    return FitResult(
        curves=curves,
        trace=tuple(trace),
        best_objective=float(best_value),
        best_iteration=best_iteration,
        metrics=metrics,
        seconds=seconds,
        output=output,
    )


__all__ = [
    "AdamOptimizer",
    "CurveObjective",
    "FitConfig",
    "FitParams",
    "FitResult",
    "apply_fitted",
    "fit",
    "gradient",
    "objective",
]
