"""Shared fixtures."""

import numpy as np
import pytest

from namedcurves.core.imaging import ImageBuffer, save_png


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """Keep the user's configuration and color naming table out of the tests."""
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    monkeypatch.delenv("NAMEDCURVES_CONFIG_PATH", raising=False)
    monkeypatch.delenv("NAMEDCURVES_CNLUT", raising=False)


def quantized(data) -> ImageBuffer:
    """Image with values on the 8 bit grid, so PNG round trips are exact."""
    return ImageBuffer(np.floor(np.asarray(data) * 255.0 + 0.5) / 255.0)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def random_image(rng):
    return quantized(rng.uniform(size=(24, 32, 3)))


@pytest.fixture
def smooth_image():
    """A 32x48 image with smooth gradients over all hues."""
    y, x = np.mgrid[0:32, 0:48]
    data = np.stack(
        [
            0.5 + 0.45 * np.sin(x / 7.0),
            0.5 + 0.45 * np.cos(y / 5.0),
            0.5 + 0.45 * np.sin((x + y) / 9.0),
        ],
        axis=-1,
    )
    return quantized(data)


@pytest.fixture
def write_png(tmp_path):
    """Write an image to ``tmp_path`` and return the path as string."""

    def write(img: ImageBuffer, name: str = "image.png") -> str:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        save_png(img, str(path))
        return str(path)

    return write
