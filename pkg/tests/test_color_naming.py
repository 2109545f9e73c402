"""Tests for ``namedcurves.core.color_naming``."""

import numpy as np
import pytest

from namedcurves.core import color_naming as cn
from namedcurves.core.color_naming import ColorGroup, ColorName
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

#: Prototype colors and their expected most likely name.
PROTOTYPES = [
    ((1.0, 0.0, 0.0), ColorName.RED),
    ((0.0, 1.0, 0.0), ColorName.GREEN),
    ((0.0, 0.0, 1.0), ColorName.BLUE),
    ((1.0, 1.0, 0.0), ColorName.YELLOW),
    ((1.0, 0.5, 0.0), ColorName.ORANGE),
    ((0.45, 0.25, 0.05), ColorName.BROWN),
    ((1.0, 0.4, 0.7), ColorName.PINK),
    ((0.6, 0.2, 0.8), ColorName.PURPLE),
    ((1.0, 1.0, 1.0), ColorName.WHITE),
    ((0.5, 0.5, 0.5), ColorName.GREY),
    ((0.0, 0.0, 0.0), ColorName.BLACK),
]


@pytest.fixture
def model():
    return cn.ColorNamingModel.parametric()


def _write_cnlut(path, table, header=None):
    size = table.shape[0]
    header = header or f"CNLUT 1 {size} 11\n".encode("ascii")
    path.write_bytes(header + table.astype("<f4").tobytes())
    return str(path)


def test_canonical_name_order():
    names = [n.value for n in ColorName]
    assert names == sorted(names)
    assert cn.NUM_NAMES == 11
    assert cn.NUM_GROUPS == 6


def test_groups_partition_names():
    members = [name for group in ColorGroup for name in cn.GROUP_MEMBERS[group]]
    assert sorted(m.value for m in members) == sorted(n.value for n in ColorName)


@pytest.mark.parametrize("rgb,expected", PROTOTYPES)
def test_classify_pixel_prototypes(model, rgb, expected):
    probs = cn.classify_pixel(model, rgb)
    assert probs.shape == (11,)
    assert list(ColorName)[int(np.argmax(probs))] == expected


def test_classify_is_distribution(model, rng):
    probs = cn.classify(model, rng.uniform(size=(100_000, 3)))
    assert probs.shape == (100_000, 11)
    assert np.all(probs >= 0.0)
    assert np.all(probs <= 1.0)
    np.testing.assert_allclose(probs.sum(axis=-1), 1.0, atol=1e-6)


def test_classify_hue_circle_covered(model):
    hues = np.linspace(0.0, 1.0, 3601)
    rgb = np.stack([np.ones_like(hues), 1.0 - hues, np.zeros_like(hues)], axis=-1)
    probs = cn.classify(model, rgb)
    np.testing.assert_allclose(probs.sum(axis=-1), 1.0, atol=1e-12)


def test_classify_clamps_inputs(model):
    np.testing.assert_array_equal(
        cn.classify_pixel(model, (1.5, -0.2, 0.0)), cn.classify_pixel(model, (1.0, 0.0, 0.0))
    )


def test_smooth_step():
    x = np.array([0.0, 0.1, 0.15, 0.2, 0.3, 1.0])
    np.testing.assert_allclose(cn.smooth_step(x, 0.1, 0.3), [0.0, 0.0, 0.15625, 0.5, 1.0, 1.0])


def test_rgb_to_hsv():
    hue, saturation, value = cn.rgb_to_hsv(np.array([[1.0, 0.4, 0.7], [0.5, 0.5, 0.5]]))
    np.testing.assert_allclose(hue, [330.0, 0.0])
    np.testing.assert_allclose(saturation, [0.6, 0.0])
    np.testing.assert_allclose(value, [1.0, 0.5])


def test_group_probabilities_orange():
    p11 = np.zeros(11)
    p11[cn.NAME_INDEX[ColorName.ORANGE]] = 1.0
    p6 = cn.group_probabilities(p11)
    expected = np.zeros(6)
    expected[cn.GROUP_INDEX[ColorGroup.OBY]] = 1.0
    np.testing.assert_array_equal(p6, expected)


def test_group_probabilities_achromatic():
    p11 = np.zeros(11)
    p11[cn.NAME_INDEX[ColorName.BLACK]] = 0.2
    p11[cn.NAME_INDEX[ColorName.WHITE]] = 0.3
    p11[cn.NAME_INDEX[ColorName.GREY]] = 0.5
    p6 = cn.group_probabilities(p11)
    assert p6[cn.GROUP_INDEX[ColorGroup.ACHROMATIC]] == pytest.approx(1.0)


def test_group_probabilities_uniform():
    p6 = cn.group_probabilities(np.full(11, 1.0 / 11.0))
    np.testing.assert_allclose(p6, np.array([1, 1, 1, 3, 2, 3]) / 11.0)


def test_group_probabilities_conserves_mass(model, rng):
    p11 = cn.classify(model, rng.uniform(size=(1000, 3)))
    np.testing.assert_allclose(
        cn.group_probabilities(p11).sum(axis=-1), p11.sum(axis=-1), rtol=0, atol=1e-12
    )


def test_group_probabilities_wrong_size():
    with pytest.raises(DimensionMismatch):
        cn.group_probabilities(np.zeros(6))


def test_compute_maps_constant_red(model):
    img = ImageBuffer.filled(5, 4, (1.0, 0.0, 0.0))
    maps = cn.compute_maps(model, img)
    assert maps.grouped
    assert maps.shape == (4, 5)
    expected = cn.group_probabilities(cn.classify_pixel(model, (1.0, 0.0, 0.0)))
    np.testing.assert_allclose(maps.planes, np.broadcast_to(expected, (4, 5, 6)), atol=1e-15)


def test_compute_maps_single_pixel_ungrouped(model):
    img = ImageBuffer.filled(1, 1, (0.45, 0.25, 0.05))
    maps = cn.compute_maps(model, img, grouped=False)
    assert not maps.grouped
    assert maps.labels == [n.value for n in ColorName]
    np.testing.assert_allclose(
        maps.planes[0, 0], cn.classify_pixel(model, (0.45, 0.25, 0.05)), atol=1e-15
    )


def test_compute_maps_green_and_blue(model):
    img = ImageBuffer(np.array([[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]]))
    maps = cn.compute_maps(model, img)
    assert np.argmax(maps.planes[0, 0]) == cn.GROUP_INDEX[ColorGroup.GREEN]
    assert np.argmax(maps.planes[0, 1]) == cn.GROUP_INDEX[ColorGroup.BLUE]


def test_compute_maps_is_pixel_local(model, random_image, rng):
    maps = cn.compute_maps(model, random_image)
    perm = rng.permutation(random_image.width)
    permuted = cn.compute_maps(model, ImageBuffer(random_image.data[:, perm]))
    np.testing.assert_allclose(permuted.planes, maps.planes[:, perm], atol=1e-15)


def test_plane_out_of_range(model, random_image):
    maps = cn.compute_maps(model, random_image)
    with pytest.raises(IndexOutOfRange):
        maps.plane(6)
    with pytest.raises(IndexOutOfRange):
        maps.plane(-1)


def test_render_map_visualization():
    img = ImageBuffer.filled(2, 2, (0.0, 0.0, 0.0))
    for p, expected in ((0.0, 1.0), (1.0, 0.0), (0.5, 0.5)):
        maps = cn.ProbabilityMapSet(np.full((2, 2, 6), p))
        viz = cn.render_map_visualization(img, maps, 0)
        np.testing.assert_allclose(viz.data, expected)


def test_render_map_visualization_copy(random_image):
    maps = cn.ProbabilityMapSet(np.ones(random_image.shape + (6,)))
    viz = cn.render_map_visualization(random_image, maps, 3)
    np.testing.assert_allclose(viz.data, random_image.data)


def test_render_threshold_visualization():
    img = ImageBuffer(np.array([[[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]]]))
    planes = np.zeros((1, 2, 6))
    planes[0, 0, 2] = 0.5
    planes[0, 1, 2] = 0.1
    viz = cn.render_threshold_visualization(img, cn.ProbabilityMapSet(planes), 2)
    np.testing.assert_allclose(viz.data, [[[0.1, 0.2, 0.3], [1.0, 1.0, 1.0]]])


def test_render_rejects_misaligned(model, random_image):
    maps = cn.ProbabilityMapSet(np.ones((2, 2, 6)))
    with pytest.raises(DimensionMismatch):
        cn.render_map_visualization(random_image, maps, 0)


def test_intensity_profile(model):
    data = np.zeros((2, 4, 3))
    data[0] = (1.0, 0.0, 0.0)
    data[1] = (1.0, 1.0, 1.0)
    img = ImageBuffer(data)
    maps = cn.compute_maps(model, img)
    profile = cn.intensity_profile(img, maps, cn.GROUP_INDEX[ColorGroup.RED])
    assert profile.label == "red"
    assert profile.count == 4
    assert profile.mean == pytest.approx(1.0 / 3.0)
    empty = cn.intensity_profile(img, maps, cn.GROUP_INDEX[ColorGroup.BLUE])
    assert empty.count == 0
    assert empty.mean is None


def test_parametric_constants_validation():
    with pytest.raises(InvalidConfiguration):
        cn.ParametricConstants(saturation_low=0.5, saturation_high=0.3)
    with pytest.raises(InvalidConfiguration):
        cn.ParametricConstants(red_core=(345.0, 400.0))
    with pytest.raises(InvalidConfiguration):
        cn.ParametricConstants(orange_core=(10.0, 60.0))


def test_hue_bands_cover_circle():
    bands = cn.ParametricConstants().hue_bands()
    assert [b[0] for b in bands][0] == ColorName.ORANGE
    for (_, _, _, core_end, fall_end), (_, rise_start, core_start, _, _) in zip(
        bands, bands[1:]
    ):
        assert core_end == rise_start
        assert fall_end == core_start


def test_save_and_load_cnlut(tmp_path):
    baked = cn.bake_parametric_table(size=8)
    assert baked.backend == cn.Backend.LUT
    assert baked.size == 8
    path = str(tmp_path / "table.cnlut")
    cn.save_cnlut(baked, path)
    loaded = cn.load_cnlut(path)
    assert loaded.size == 8
    assert not loaded.table.flags.writeable
    np.testing.assert_allclose(loaded.table, baked.table, atol=1e-6)


def test_lut_backend_prototypes():
    model = cn.bake_parametric_table(size=32)
    for rgb, expected in [
        ((1.0, 0.0, 0.0), ColorName.RED),
        ((0.0, 1.0, 0.0), ColorName.GREEN),
        ((0.0, 0.0, 1.0), ColorName.BLUE),
        ((1.0, 1.0, 1.0), ColorName.WHITE),
        ((0.0, 0.0, 0.0), ColorName.BLACK),
    ]:
        probs = cn.classify_pixel(model, rgb)
        assert list(ColorName)[int(np.argmax(probs))] == expected
        assert probs.sum() == pytest.approx(1.0, abs=1e-6)


def test_lut_nearest_bin_lookup(tmp_path):
    table = np.zeros((2, 2, 2, 11))
    table[..., cn.NAME_INDEX[ColorName.GREY]] = 1.0
    table[1, 0, 0] = 0.0
    table[1, 0, 0, cn.NAME_INDEX[ColorName.RED]] = 1.0
    model = cn.load_cnlut(_write_cnlut(tmp_path / "t.cnlut", table))
    assert cn.classify_pixel(model, (1.0, 0.0, 0.0))[cn.NAME_INDEX[ColorName.RED]] == 1.0
    assert cn.classify_pixel(model, (0.49, 0.0, 0.0))[cn.NAME_INDEX[ColorName.GREY]] == 1.0
    assert cn.classify_pixel(model, (0.51, 0.2, 0.3))[cn.NAME_INDEX[ColorName.RED]] == 1.0


def test_load_cnlut_missing(tmp_path):
    with pytest.raises(MissingInputFile):
        cn.load_cnlut(str(tmp_path / "missing.cnlut"))
    with pytest.raises(MissingInputFile):
        cn.load_cnlut(str(tmp_path))


def test_load_cnlut_bad_magic(tmp_path):
    table = np.full((2, 2, 2, 11), 1.0 / 11.0)
    with pytest.raises(BadMagic) as e:
        cn.load_cnlut(_write_cnlut(tmp_path / "t.cnlut", table, b"CNLUT 2 2 11\n"))
    assert e.value.exit_code == 4
    with pytest.raises(BadMagic):
        cn.load_cnlut(_write_cnlut(tmp_path / "t.cnlut", table, b"LUT 1 2 11\n"))


def test_load_cnlut_truncated(tmp_path):
    path = tmp_path / "t.cnlut"
    _write_cnlut(path, np.full((2, 2, 2, 11), 1.0 / 11.0))
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(TableDimensionMismatch):
        cn.load_cnlut(str(path))


def test_load_cnlut_not_normalized(tmp_path):
    table = np.full((2, 2, 2, 11), 1.0 / 11.0)
    table[1, 1, 0] *= 0.8
    with pytest.raises(NonNormalizedBin) as e:
        cn.load_cnlut(_write_cnlut(tmp_path / "t.cnlut", table))
    assert "(1, 1, 0)" in str(e.value)


def test_load_model(tmp_path):
    assert cn.load_model(None).backend == cn.Backend.PARAMETRIC
    path = str(tmp_path / "t.cnlut")
    cn.save_cnlut(cn.bake_parametric_table(size=4), path)
    assert cn.load_model(path).size == 4
