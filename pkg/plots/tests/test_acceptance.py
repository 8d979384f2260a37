"""AC-11: end-to-end rendering from artifacts produced by the primary CLI.

Desk-scale artifacts (small L, few samples) in the exact production
schemas: a disorder-averaged sweep CSV, a timing CSV, and a 21x21
pseudospectrum slice.  Each figure must come out byte-identical across
two renders.
"""

import json
import subprocess
import sys

import pytest

from topoplots import FigureRecipe, render


def run_primary(*argv):
    proc = subprocess.run([sys.executable, "-m", "topoindex.cli", *argv],
                          capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def primary_artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("artifacts")
    periodic = root / "periodic.json"
    periodic.write_text(json.dumps(
        {"L": 8, "boundary": "periodic", "disorder_width": 8.0, "seed": 3}))
    open_cfg = root / "open.json"
    open_cfg.write_text(json.dumps(
        {"L": 8, "boundary": "open", "disorder_width": 0.0, "seed": 3}))

    run_primary("sweep", str(periodic), "--method", "bott",
                "--ef-grid=-6,-3,0", "--samples", "3",
                "--out", str(root / "sweep"))
    run_primary("timing", "--method", "localizer", "--L", "6,8",
                "--samples", "1", "--out", str(root / "timing"))
    # display-scale tau: the small-gap ring must actually disconnect the
    # interior from the exterior at this grid resolution
    run_primary("pseudospectrum", str(open_cfg), "--slice", "0",
                "--grid", "21", "--kappa", "1", "--tau", "0.25",
                "--out", str(root / "slice"))
    return root


def render_twice(recipe):
    png, svg = render(recipe)
    first = (png.read_bytes(), svg.read_bytes())
    png, svg = render(recipe)
    return first == (png.read_bytes(), svg.read_bytes()), png, svg


def test_ac11_sweep_curve(primary_artifacts, tmp_path):
    recipe = FigureRecipe(
        kind="sweep-curves",
        inputs=(str(primary_artifacts / "sweep" / "sweep.csv"),),
        output=str(tmp_path / "sweep_fig"),
    )
    stable, png, _ = render_twice(recipe)
    print(f"AC-11a {'PASS' if stable else 'FAIL'} (sweep curve, {png.stat().st_size} bytes)")
    assert stable


def test_ac11_timing_with_reference(primary_artifacts, tmp_path):
    recipe = FigureRecipe(
        kind="loglog-timing",
        inputs=(str(primary_artifacts / "timing" / "timing.csv"),),
        output=str(tmp_path / "timing_fig"),
        reference_coefficient=1e-9,
        reference_exponent=6.0,
    )
    stable, png, svg = render_twice(recipe)
    # the reference curve legend entry must actually be drawn
    assert b"1e-09" in svg.read_bytes() or b"L^{6}" in svg.read_bytes()
    print(f"AC-11b {'PASS' if stable else 'FAIL'} (timing + reference line)")
    assert stable


def test_ac11_slice_overlay(primary_artifacts, tmp_path):
    import numpy as np
    from PIL import Image

    recipe = FigureRecipe(
        kind="slice-overlay",
        inputs=(str(primary_artifacts / "slice" / "gap.csv"),
                str(primary_artifacts / "slice" / "regions.csv")),
        output=str(tmp_path / "overlay_fig"),
        tau=0.25,
    )
    stable, png, _ = render_twice(recipe)
    rgb = np.asarray(Image.open(png).convert("RGB")).astype(float) / 255
    bluish = ((rgb[..., 2] > 0.5) & (rgb[..., 0] < 0.35)).sum()
    reddish = ((rgb[..., 0] > 0.5) & (rgb[..., 2] < 0.35) & (rgb[..., 1] < 0.35)).sum()
    dark = (rgb.sum(axis=2) < 0.25).sum()
    ok = stable and bluish > 50 and reddish > 50 and dark > 20
    print(f"AC-11c {'PASS' if ok else 'FAIL'} "
          f"(blue px {bluish}, red px {reddish}, black px {dark}, stable {stable})")
    assert ok
