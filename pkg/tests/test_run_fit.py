"""Tests for ``namedcurves fit``."""

import numpy as np

from namedcurves.__main__ import main
from namedcurves.curve_file import load_curves
from tests.conftest import quantized


def test_run_fit(tmp_path, smooth_image, write_png, capsys):
    input_path = write_png(smooth_image, "input.png")
    target_path = write_png(quantized(smooth_image.data**1.5), "target.png")
    curves_path = str(tmp_path / "curves.ncv")
    res = main(
        [
            "--no-progress",
            "fit",
            "--iters",
            "40",
            "--points",
            "5",
            "--output-format",
            "csv",
            input_path,
            target_path,
            curves_path,
        ]
    )
    assert res == 0
    curves = load_curves(curves_path)
    assert curves.num_points == 5
    rows = dict(line.split(",") for line in capsys.readouterr().out.splitlines()[1:])
    assert rows["iterations"] == "40"
    assert float(rows["best_objective"]) <= float(rows["initial_objective"])
    assert set(rows) >= {"psnr", "ssim", "de_ab", "de_00", "best_iteration"}


def test_run_fit_config_file(tmp_path, smooth_image, write_png, capsys):
    config_path = tmp_path / "config.toml"
    config_path.write_text("[fit]\niterations = 3\npoints = 4\n")
    input_path = write_png(smooth_image, "input.png")
    curves_path = str(tmp_path / "curves.ncv")
    res = main(
        [
            "--no-progress",
            "--config",
            str(config_path),
            "fit",
            "--output-format",
            "json",
            input_path,
            input_path,
            curves_path,
        ]
    )
    assert res == 0
    assert load_curves(curves_path).num_points == 4
    assert '{"key": "iterations", "value": "3"}' in capsys.readouterr().out


def test_run_fit_dimension_mismatch(tmp_path, smooth_image, random_image, write_png):
    input_path = write_png(smooth_image, "input.png")
    target_path = write_png(random_image, "target.png")
    curves_path = tmp_path / "curves.ncv"
    res = main(["fit", "--iters", "2", input_path, target_path, str(curves_path)])
    assert res == 3
    assert not curves_path.exists()


def test_run_fit_missing_target(tmp_path, smooth_image, write_png):
    input_path = write_png(smooth_image, "input.png")
    res = main(["fit", input_path, str(tmp_path / "missing.png"), str(tmp_path / "c.ncv")])
    assert res == 2


def test_run_fit_invalid_points(tmp_path, smooth_image, write_png):
    input_path = write_png(smooth_image, "input.png")
    res = main(["fit", "--points", "1", input_path, input_path, str(tmp_path / "c.ncv")])
    assert res == 1


def test_run_fit_identity_target(tmp_path, smooth_image, write_png):
    input_path = write_png(smooth_image, "input.png")
    curves_path = str(tmp_path / "curves.ncv")
    assert main(["--no-progress", "fit", "--iters", "5", input_path, input_path, curves_path]) == 0
    curves = load_curves(curves_path)
    identity = np.linspace(0.0, 1.0, curves.num_points)
    assert np.max(np.abs(curves.points - identity)) <= 0.05
