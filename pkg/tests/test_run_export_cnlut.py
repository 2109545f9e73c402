"""Tests for ``namedcurves export-cnlut``."""

import numpy as np

from namedcurves.__main__ import main
from namedcurves.core.color_naming import Backend, load_cnlut


def test_run_export_cnlut(tmp_path):
    out_path = str(tmp_path / "model.cnlut")
    assert main(["export-cnlut", "--size", "4", out_path]) == 0
    model = load_cnlut(out_path)
    assert model.backend == Backend.LUT
    assert model.size == 4
    np.testing.assert_allclose(model.table.sum(axis=-1), 1.0, atol=1e-4)


def test_run_export_cnlut_used_by_decompose(tmp_path, random_image, write_png, monkeypatch):
    out_path = str(tmp_path / "model.cnlut")
    assert main(["export-cnlut", "--size", "8", out_path]) == 0
    path = write_png(random_image, "input.png")
    assert main(["--lut", out_path, "decompose", path, str(tmp_path / "out")]) == 0
    monkeypatch.setenv("NAMEDCURVES_CNLUT", str(tmp_path / "missing.cnlut"))
    assert main(["decompose", path, str(tmp_path / "out")]) == 2


def test_cnlut_path_precedence(tmp_path, random_image, write_png, monkeypatch):
    good = str(tmp_path / "model.cnlut")
    missing = str(tmp_path / "missing.cnlut")
    assert main(["export-cnlut", "--size", "4", good]) == 0
    path = write_png(random_image, "input.png")
    out_dir = str(tmp_path / "out")
    config_path = tmp_path / "config.toml"
    config_path.write_text(f'[global]\ncnlut_path = "{missing}"\n')
    config = ["--config", str(config_path)]
    assert main(config + ["decompose", path, out_dir]) == 2
    monkeypatch.setenv("NAMEDCURVES_CNLUT", good)
    assert main(config + ["decompose", path, out_dir]) == 0
    monkeypatch.setenv("NAMEDCURVES_CNLUT", missing)
    assert main(config + ["--lut", good, "decompose", path, out_dir]) == 0
