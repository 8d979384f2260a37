"""Fixture artifacts in the exact schemas the primary component emits."""

import pytest


SWEEP_CSV = """ef,mean_index,sample_count,mean_integer_error,failure_count
-8.0,0.0,4,1.1e-15,0
-4.0,0.25,4,2.0e-15,0
0.0,1.0,4,1.5e-15,0
"""

TIMING_CSV = """L,phase,mean_seconds,samples
20,diagonalize,0.5,3
20,index,0.3,3
40,diagonalize,38.0,3
40,index,12.0,3
60,diagonalize,130.0,3
60,index,40.0,3
"""

ERROR_CSV = """L,mean_error,sample_count,failure_count
10,4.1e-16,32,0
20,9.3e-16,32,0
40,3.9e-15,32,0
"""


def grid_csvs(n=5, tau=1e-8):
    """A tiny slice pair: gap dip along the middle column, two regions."""
    gap_lines = ["l1,l2,l3,gap,status"]
    region_lines = ["l1,l2,l3,region,index"]
    for j in range(n):
        for i in range(n):
            l1 = -1.0 + 2.0 * i / (n - 1)
            l2 = -1.0 + 2.0 * j / (n - 1)
            if i == n // 2:
                gap, region, index = tau / 10, 0, ""
            elif i < n // 2:
                gap, region, index = 0.8, 1, 1
            else:
                gap, region, index = 1.2, 2, 0
            gap_lines.append(f"{l1},{l2},0.0,{gap},computed")
            region_lines.append(f"{l1},{l2},0.0,{region},{index}")
    return "\n".join(gap_lines) + "\n", "\n".join(region_lines) + "\n"


@pytest.fixture
def artifacts(tmp_path):
    (tmp_path / "sweep.csv").write_text(SWEEP_CSV)
    (tmp_path / "timing.csv").write_text(TIMING_CSV)
    (tmp_path / "errors.csv").write_text(ERROR_CSV)
    gap, regions = grid_csvs()
    (tmp_path / "gap.csv").write_text(gap)
    (tmp_path / "regions.csv").write_text(regions)
    return tmp_path
