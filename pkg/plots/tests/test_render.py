import json

import numpy as np
import pytest

from topoplots import FigureRecipe, SchemaError, render
from topoplots.cli import main
from topoplots.render import color_for_index, _nearest_resample


class TestRecipe:
    def test_validation(self, artifacts):
        with pytest.raises(ValueError):
            FigureRecipe(kind="pie-chart", inputs=("x.csv",), output="o")
        with pytest.raises(ValueError):
            FigureRecipe(kind="sweep-curves", inputs=(), output="o")

    def test_from_json(self, artifacts, tmp_path):
        recipe_path = tmp_path / "r.json"
        recipe_path.write_text(json.dumps({
            "kind": "loglog-timing",
            "inputs": [str(artifacts / "timing.csv")],
            "output": str(tmp_path / "fig"),
            "reference_coefficient": 1e-9,
            "reference_exponent": 6,
        }))
        recipe = FigureRecipe.from_json(recipe_path)
        assert recipe.reference_exponent == 6


class TestColors:
    def test_fixed_mapping(self):
        assert color_for_index(0) == (0.05, 0.25, 0.95)  # blue
        assert color_for_index(1) == (0.95, 0.10, 0.10)  # red
        others = {color_for_index(i) for i in (2, 3, 4, 5)}
        assert len(others) == 4
        assert color_for_index(0) not in others
        assert color_for_index(1) not in others


class TestRenderKinds:
    @pytest.mark.parametrize("kind,inputs", [
        ("sweep-curves", ("sweep.csv",)),
        ("loglog-timing", ("timing.csv",)),
        ("loglog-error", ("errors.csv",)),
        ("slice-heatmap", ("gap.csv",)),
        ("slice-overlay", ("gap.csv", "regions.csv")),
    ])
    def test_renders_png_and_svg(self, artifacts, tmp_path, kind, inputs):
        recipe = FigureRecipe(
            kind=kind,
            inputs=tuple(str(artifacts / name) for name in inputs),
            output=str(tmp_path / f"{kind}.png"),
            reference_coefficient=1e-9,
            reference_exponent=6.0,
        )
        png, svg = render(recipe)
        assert png.exists() and png.stat().st_size > 0
        assert svg.exists() and svg.stat().st_size > 0

    def test_missing_column_names_it(self, artifacts, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("ef,mean\n0,1\n")
        recipe = FigureRecipe(kind="sweep-curves", inputs=(str(bad),),
                              output=str(tmp_path / "fig"))
        with pytest.raises(SchemaError, match="mean_index"):
            render(recipe)

    def test_deterministic_bytes(self, artifacts, tmp_path):
        recipe = FigureRecipe(
            kind="slice-overlay",
            inputs=(str(artifacts / "gap.csv"), str(artifacts / "regions.csv")),
            output=str(tmp_path / "fig"),
        )
        png1, svg1 = render(recipe)
        first = (png1.read_bytes(), svg1.read_bytes())
        png2, svg2 = render(recipe)
        assert png2.read_bytes() == first[0]
        assert svg2.read_bytes() == first[1]

    def test_checksum_embedded(self, artifacts, tmp_path):
        recipe = FigureRecipe(kind="sweep-curves",
                              inputs=(str(artifacts / "sweep.csv"),),
                              output=str(tmp_path / "fig"))
        png, svg = render(recipe)
        import hashlib

        checksum = hashlib.sha256((artifacts / "sweep.csv").read_bytes()).hexdigest()
        assert checksum.encode() in png.read_bytes()
        assert checksum.encode() in svg.read_bytes()

    def test_overlay_colors(self, artifacts, tmp_path):
        from PIL import Image

        recipe = FigureRecipe(
            kind="slice-overlay",
            inputs=(str(artifacts / "gap.csv"), str(artifacts / "regions.csv")),
            output=str(tmp_path / "fig"),
        )
        png, _ = render(recipe)
        rgb = np.asarray(Image.open(png).convert("RGB")).astype(float) / 255
        # red (index 1) pixels live left of center, blue (index 0) right,
        # black along the small-gap wall
        reddish = (rgb[..., 0] > 0.6) & (rgb[..., 2] < 0.3) & (rgb[..., 1] < 0.3)
        bluish = (rgb[..., 2] > 0.6) & (rgb[..., 0] < 0.3)
        assert reddish.sum() > 100
        assert bluish.sum() > 100
        red_cols = np.where(reddish.any(axis=0))[0]
        blue_cols = np.where(bluish.any(axis=0))[0]
        assert red_cols.mean() < blue_cols.mean()

    def test_nearest_resample(self):
        src = np.arange(9, dtype=float).reshape(3, 3)
        a = np.array([0.0, 1.0, 2.0])
        fine = np.linspace(0, 2, 5)
        out = _nearest_resample(a, a, src, fine, fine)
        assert out.shape == (5, 5)
        assert out[0, 0] == src[0, 0]
        assert out[-1, -1] == src[-1, -1]
        assert out[2, 2] == src[1, 1]


class TestCli:
    def test_render_subcommand(self, artifacts, tmp_path, capsys):
        recipe_path = tmp_path / "r.json"
        recipe_path.write_text(json.dumps({
            "kind": "sweep-curves",
            "inputs": [str(artifacts / "sweep.csv")],
            "output": str(tmp_path / "fig"),
        }))
        assert main(["render", "--recipe", str(recipe_path)]) == 0
        assert (tmp_path / "fig.png").exists()

    def test_bad_recipe_exits_1(self, tmp_path, capsys):
        recipe_path = tmp_path / "r.json"
        recipe_path.write_text(json.dumps({
            "kind": "sweep-curves",
            "inputs": ["/nonexistent.csv"],
            "output": str(tmp_path / "fig"),
        }))
        assert main(["render", "--recipe", str(recipe_path)]) == 1
