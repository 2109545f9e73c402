"""Tests for ``namedcurves.core.fusion``."""

import numpy as np
import pytest

from namedcurves.core import fusion
from namedcurves.core.color_naming import (
    GROUP_INDEX,
    ColorGroup,
    ColorNamingModel,
    ProbabilityMapSet,
    compute_maps,
)
from namedcurves.core.fusion import FusionMode, FusionWeights
from namedcurves.core.imaging import ImageBuffer
from namedcurves.exceptions import DimensionMismatch, InvalidConfiguration


def _maps(*pixels):
    return ProbabilityMapSet(np.array([pixels], dtype=np.float64))


def test_make_weights_threshold():
    weights = fusion.make_weights(_maps([0.1, 0.5, 0.4, 0.0, 0.0, 0.0]), tau=0.2)
    np.testing.assert_allclose(weights.planes[0, 0], [0, 5 / 9, 4 / 9, 0, 0, 0])
    assert weights.planes[0, 0, 0] == 0.0


def test_make_weights_single_survivor():
    weights = fusion.make_weights(_maps([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]))
    np.testing.assert_array_equal(weights.planes[0, 0], [1, 0, 0, 0, 0, 0])


def test_make_weights_fallback():
    weights = fusion.make_weights(_maps([1 / 6] * 6), tau=0.2)
    np.testing.assert_allclose(weights.planes[0, 0], [1 / 6] * 6)
    assert fusion.active_branch_stats(weights) == {1: 0, 2: 0, 3: 0, 4: 0, 5: 0, 6: 1}


def test_make_weights_tau_one():
    weights = fusion.make_weights(_maps([0.5, 0.5, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]), tau=1.0)
    np.testing.assert_allclose(weights.planes[0, 0], [0.5, 0.5, 0, 0, 0, 0])
    np.testing.assert_allclose(weights.planes[0, 1], [1 / 6] * 6)


def test_make_weights_randomized(rng):
    probs = rng.dirichlet(np.full(6, 0.5), size=(40, 50))
    weights = fusion.make_weights(ProbabilityMapSet(probs), tau=0.2)
    np.testing.assert_allclose(weights.planes.sum(axis=-1), 1.0, atol=1e-9)
    fallback = np.all(probs < 0.2, axis=-1)
    below = (probs < 0.2) & ~fallback[..., np.newaxis]
    assert np.all(weights.planes[below] == 0.0)
    np.testing.assert_allclose(
        weights.planes[fallback], probs[fallback] / probs[fallback].sum(axis=-1, keepdims=True)
    )


def test_make_weights_rejects_ungrouped():
    with pytest.raises(DimensionMismatch):
        fusion.make_weights(ProbabilityMapSet(np.full((1, 1, 11), 1 / 11)))


@pytest.mark.parametrize("tau", [-0.1, 1.5])
def test_make_weights_rejects_tau(tau):
    with pytest.raises(InvalidConfiguration):
        fusion.make_weights(_maps([1.0, 0, 0, 0, 0, 0]), tau=tau)


def test_uniform_weights():
    weights = fusion.uniform_weights(width=3, height=2)
    assert weights.shape == (2, 3)
    np.testing.assert_allclose(weights.planes, 1 / 6)


def test_fusion_weights_modes(random_image):
    maps = compute_maps(ColorNamingModel.parametric(), random_image)
    mean = fusion.fusion_weights(maps, FusionMode.MEAN)
    np.testing.assert_allclose(mean.planes, 1 / 6)
    weighted = fusion.fusion_weights(maps, FusionMode.WEIGHTED, tau=0.3)
    np.testing.assert_array_equal(weighted.planes, fusion.make_weights(maps, 0.3).planes)


def test_blend_identical_inputs(random_image, rng):
    weights = FusionWeights(rng.dirichlet(np.ones(6), size=random_image.shape))
    out = fusion.blend([random_image] * 6, weights)
    np.testing.assert_allclose(out.data, random_image.data, atol=1e-12)


def test_blend_one_hot():
    adjusted = [ImageBuffer.filled(2, 2, (v, v, v)) for v in np.linspace(0.0, 1.0, 6)]
    planes = np.zeros((2, 2, 6))
    planes[..., 4] = 1.0
    out = fusion.blend(adjusted, FusionWeights(planes))
    np.testing.assert_array_equal(out.data, adjusted[4].data)


def test_blend_average():
    adjusted = [ImageBuffer.filled(1, 1, (0.0, 0.0, 0.0)) for _ in range(6)]
    adjusted[1] = ImageBuffer.filled(1, 1, (0.2, 0.2, 0.2))
    adjusted[2] = ImageBuffer.filled(1, 1, (0.6, 0.6, 0.6))
    out = fusion.blend(adjusted, FusionWeights(np.array([[[0, 0.5, 0.5, 0, 0, 0]]])))
    np.testing.assert_allclose(out.data, 0.4)


def test_blend_within_convex_hull(rng):
    adjusted = [ImageBuffer(rng.uniform(size=(8, 8, 3))) for _ in range(6)]
    weights = fusion.make_weights(ProbabilityMapSet(rng.dirichlet(np.ones(6), size=(8, 8))))
    out = fusion.blend(adjusted, weights).data
    stacked = np.stack([img.data for img in adjusted])
    assert np.all(out >= stacked.min(axis=0) - 1e-12)
    assert np.all(out <= stacked.max(axis=0) + 1e-12)


def test_blend_dimension_mismatch(random_image):
    with pytest.raises(DimensionMismatch):
        fusion.blend([random_image] * 5, fusion.uniform_weights(32, 24))
    with pytest.raises(DimensionMismatch):
        fusion.blend([random_image] * 6, fusion.uniform_weights(24, 32))


def test_active_branch_stats_one_hot():
    planes = np.zeros((3, 4, 6))
    planes[..., 2] = 1.0
    assert fusion.active_branch_stats(FusionWeights(planes)) == {
        1: 12,
        2: 0,
        3: 0,
        4: 0,
        5: 0,
        6: 0,
    }


def test_two_color_image_uses_at_most_two_branches():
    data = np.zeros((16, 16, 3))
    data[:, :8] = (0.0, 1.0, 0.0)
    data[:, 8:] = (0.0, 0.0, 1.0)
    maps = compute_maps(ColorNamingModel.parametric(), ImageBuffer(data))
    weights = fusion.make_weights(maps)
    stats = fusion.active_branch_stats(weights)
    assert sum(stats.values()) == 256
    assert sum(count for k, count in stats.items() if k > 2) == 0
    assert weights.planes[0, 0, GROUP_INDEX[ColorGroup.GREEN]] == pytest.approx(1.0)
    assert weights.planes[0, 15, GROUP_INDEX[ColorGroup.BLUE]] == pytest.approx(1.0)
