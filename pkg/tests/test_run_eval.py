"""Tests for ``namedcurves eval``."""

from namedcurves.__main__ import main
from namedcurves.core.imaging import ImageBuffer


def _rows(capsys):
    return dict(line.split(",") for line in capsys.readouterr().out.splitlines()[1:])


def test_run_eval_identical(random_image, write_png, capsys):
    path = write_png(random_image)
    assert main(["eval", "--output-format", "csv", path, path]) == 0
    assert _rows(capsys) == {
        "psnr": "inf",
        "ssim": "1.0000",
        "de_ab": "0.0000",
        "de_00": "0.0000",
    }


def test_run_eval_black_white(write_png, capsys):
    black = write_png(ImageBuffer.filled(16, 16, (0.0, 0.0, 0.0)), "black.png")
    white = write_png(ImageBuffer.filled(16, 16, (1.0, 1.0, 1.0)), "white.png")
    assert main(["eval", "--output-format", "csv", "--metrics", "de_ab,psnr", black, white]) == 0
    assert _rows(capsys) == {"psnr": "0.0000", "de_ab": "100.0000"}


def test_run_eval_loss(random_image, write_png, capsys):
    path = write_png(random_image)
    res = main(
        ["eval", "--output-format", "csv", "--metrics", "loss", "--input", path, path, path]
    )
    assert res == 0
    assert _rows(capsys) == {"loss": "0.0000"}


def test_run_eval_loss_needs_input(random_image, write_png):
    path = write_png(random_image)
    assert main(["eval", "--metrics", "loss", path, path]) == 1


def test_run_eval_unknown_metric(random_image, write_png):
    path = write_png(random_image)
    assert main(["eval", "--metrics", "psnr,sharpness", path, path]) == 1


def test_run_eval_dimension_mismatch(random_image, smooth_image, write_png):
    a = write_png(random_image, "a.png")
    b = write_png(smooth_image, "b.png")
    assert main(["eval", a, b]) == 3


def test_run_eval_small_images(write_png, capsys):
    path = write_png(ImageBuffer.filled(8, 8, (0.2, 0.4, 0.6)), "small.png")
    assert main(["eval", "--output-format", "csv", path, path]) == 0
    assert "ssim" not in _rows(capsys)
    assert main(["eval", "--metrics", "ssim", path, path]) == 3


def test_run_eval_missing(tmp_path, random_image, write_png):
    path = write_png(random_image)
    assert main(["eval", path, str(tmp_path / "missing.png")]) == 2
