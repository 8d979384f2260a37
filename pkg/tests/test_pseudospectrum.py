import csv

import numpy as np
import pytest

from topoindex import (
    GridSpec,
    LocalizerProbe,
    ModelSpec,
    build_hamiltonian,
    build_lattice,
    gap_slice,
    gap_volume,
    index_regions,
    localizer_gap,
    position_operators,
    sample_disorder,
)
from topoindex.pseudospectrum import (
    STATUS_COMPUTED,
    write_gap_csv,
    write_regions_csv,
    write_sidecar,
)
from oracles import SX, SY, SZ


def toy_single_site(p=0.75):
    # one site at (p, 0), two orbitals, H = 0
    X = np.diag([p, p])
    Y = np.zeros((2, 2))
    H = np.zeros((2, 2))
    return X, Y, H


class TestGridSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(range1=(0, 1), range2=(0, 1), resolution=1)
        with pytest.raises(ValueError):
            GridSpec(range1=(0, np.inf), range2=(0, 1), resolution=3)
        with pytest.raises(ValueError):
            GridSpec(range1=(0, 1), range2=(0, 1), resolution=3,
                     range3=(0, 1), resolution3=1)

    def test_slice_vs_volume(self):
        g = GridSpec(range1=(0, 1), range2=(0, 1), resolution=3)
        assert not g.is_volume
        g3 = GridSpec(range1=(0, 1), range2=(0, 1), resolution=3,
                      range3=(-1, 1), resolution3=2)
        assert g3.is_volume


class TestGapSlice:
    def test_toy_zero_at_site_and_lipschitz_growth(self):
        X, Y, H = toy_single_site(0.75)
        grid = GridSpec(range1=(0.25, 1.25), range2=(-0.5, 0.5), resolution=5)
        fld = gap_slice(X, Y, H, 1.0, grid)
        a1, a2, _ = fld.grid.axes()
        i = int(np.argmin(np.abs(a1 - 0.75)))
        j = int(np.argmin(np.abs(a2 - 0.0)))
        assert fld.values[i, j, 0] == pytest.approx(0.0, abs=1e-12)
        # the toy gap is exactly the distance to the site in probe space
        for ii, l1 in enumerate(a1):
            for jj, l2 in enumerate(a2):
                expected = np.hypot(l1 - 0.75, l2)
                assert fld.values[ii, jj, 0] == pytest.approx(expected, abs=1e-10)

    def test_pruning_soundness_and_value_invariance(self, disordered_open_l12):
        # module-scale audit; the acceptance suite repeats this on the
        # full 21x21 slice
        _, _, H, X, Y = disordered_open_l12
        grid = GridSpec(range1=(-8, 8), range2=(-8, 8), resolution=11)
        full = gap_slice(X, Y, H, 1.0, grid, pruning_cutoff=0.0)
        pruned = gap_slice(X, Y, H, 1.0, grid, pruning_cutoff=0.05)
        assert full.computed.all()
        assert not pruned.computed.all()  # pruning actually pruned something
        both = pruned.computed
        # computed values identical where both computed
        assert np.array_equal(full.values[both], pruned.values[both])
        # every pruned point's true gap clears its stored bound, exactly
        pr = ~pruned.computed
        assert np.all(full.values[pr] >= pruned.values[pr])
        # and the stored bounds clear the cutoff
        assert np.all(pruned.values[pr] >= pruned.pruning_cutoff)

    def test_deterministic(self, disordered_open_l12):
        _, _, H, X, Y = disordered_open_l12
        grid = GridSpec(range1=(-6, 6), range2=(-6, 6), resolution=7)
        a = gap_slice(X, Y, H, 1.0, grid, pruning_cutoff=0.05)
        b = gap_slice(X, Y, H, 1.0, grid, pruning_cutoff=0.05)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.computed, b.computed)

    def test_rejects_volume_grid(self):
        X, Y, H = toy_single_site()
        grid = GridSpec(range1=(0, 1), range2=(0, 1), resolution=3,
                        range3=(0, 1), resolution3=3)
        with pytest.raises(ValueError):
            gap_slice(X, Y, H, 1.0, grid)


class TestGapVolume:
    def test_sigma_triple_minimum_near_unit_sphere(self):
        # Clifford spectrum of (sx, sy, sz) is the unit sphere: grid minima
        # sit near radius 1
        grid = GridSpec(range1=(-2, 2), range2=(-2, 2), resolution=9,
                        range3=(-2, 2), resolution3=9)
        fld = gap_volume(SX, SY, SZ, 1.0, grid)
        a1, a2, a3 = fld.grid.axes()
        radii = np.sqrt(a1[:, None, None] ** 2 + a2[None, :, None] ** 2
                        + a3[None, None, :] ** 2)
        near = np.abs(radii - 1.0) < 0.3
        assert fld.values[near].min() < 0.35
        far = np.abs(radii - 1.0) > 0.8
        assert fld.values[far].min() > 0.5

    def test_axis_adjacent_lipschitz(self):
        grid = GridSpec(range1=(-1.5, 1.5), range2=(-1.5, 1.5), resolution=6,
                        range3=(-1.5, 1.5), resolution3=6)
        fld = gap_volume(SX, SY, SZ, 1.0, grid)
        a1, a2, a3 = fld.grid.axes()
        h1 = a1[1] - a1[0]
        d = np.abs(np.diff(fld.values, axis=0))
        assert d.max() <= h1 + 1e-9

    def test_degenerate_corners(self):
        X, Y, H = toy_single_site()
        grid = GridSpec(range1=(0.5, 0.5), range2=(0.5, 0.5), resolution=2,
                        range3=(0.0, 0.0), resolution3=2)
        fld = gap_volume(X, Y, H, 1.0, grid)
        assert fld.values.size == 8
        assert fld.computed.all()

    def test_slice_matches_volume_plane(self):
        X, Y, H = toy_single_site()
        grid3 = GridSpec(range1=(0, 1.5), range2=(-1, 1), resolution=5,
                         range3=(-1.0, 1.0), resolution3=3)
        vol = gap_volume(X, Y, H, 1.0, grid3)
        a1, a2, a3 = grid3.axes()
        grid2 = GridSpec(range1=(0, 1.5), range2=(-1, 1), resolution=5,
                         slice_value=float(a3[1]))
        sli = gap_slice(X, Y, H, 1.0, grid2)
        assert np.allclose(sli.values[:, :, 0], vol.values[:, :, 1], atol=1e-12)


class TestIndexRegions:
    def test_uniform_trivial_field(self):
        X, Y, H = toy_single_site(2.0)
        grid = GridSpec(range1=(-0.5, 0.5), range2=(-0.5, 0.5), resolution=5)
        fld = gap_slice(X, Y, H, 1.0, grid)
        regions = index_regions(fld, X, Y, H, 1.0, tau=1e-8)
        assert regions.n_regions == 1
        assert list(regions.indices.values()) == [0]

    @pytest.fixture(scope="class")
    def clean_l12_regions(self):
        spec = ModelSpec(L=12, boundary="open", disorder_width=0.0)
        lattice = build_lattice(spec)
        H = build_hamiltonian(spec, lattice, sample_disorder(spec, 0))
        X, Y = position_operators(lattice, "raw")
        # sample edge sits at 5.5; spacing ~1.1 resolves the small-gap ring
        grid = GridSpec(range1=(-8.8, 8.8), range2=(-8.8, 8.8), resolution=17)
        fld = gap_slice(X, Y, H, 1.0, grid)
        regions = index_regions(fld, X, Y, H, 1.0, tau=0.4)
        return X, Y, H, fld, regions

    def test_clean_interior_and_exterior(self, clean_l12_regions):
        X, Y, H, fld, regions = clean_l12_regions
        values = sorted(v for v in regions.indices.values() if v is not None)
        assert 1 in values and 0 in values
        assert regions.n_regions == 2
        # interior point got index 1, the grid corner sits outside with 0
        a1, a2, _ = fld.grid.axes()
        i = int(np.argmin(np.abs(a1)))
        j = int(np.argmin(np.abs(a2)))
        assert regions.indices[regions.labels[i, j, 0]] == 1
        assert regions.indices[regions.labels[0, 0, 0]] == 0

    def test_spot_reevaluation_matches_region(self, clean_l12_regions):
        X, Y, H, fld, regions = clean_l12_regions
        rng = np.random.default_rng(23)
        a1, a2, a3 = fld.grid.axes()
        from topoindex import localizer_index

        for region, ridx in regions.indices.items():
            pts = np.argwhere(regions.labels == region)
            picks = pts[rng.choice(len(pts), size=min(5, len(pts)), replace=False)]
            for i, j, k in picks:
                rep = localizer_index(
                    X, Y, H,
                    LocalizerProbe(lam=(a1[i], a2[j], a3[k]), kappa=1.0),
                    with_gap=False)
                assert rep.index == ridx

    def test_clean_l20_plateau_and_edge_ring(self, clean_open_l20):
        # radial profile: large interior plateau, sharp dip at the sample
        # edge (9.5), linear growth outside
        _, _, H, X, Y = clean_open_l20
        gaps = {}
        for r in (0.0, 6.0, 9.6, 12.0):
            gaps[r] = localizer_gap(X, Y, H, LocalizerProbe(lam=(r, 0.0, 0.0)))
        assert gaps[0.0] > 1.2 and gaps[6.0] > 1.2
        assert gaps[0.0] == pytest.approx(gaps[6.0], abs=0.01)  # plateau
        assert gaps[9.6] < 0.2                                  # edge ring
        assert gaps[12.0] > 2.0                                 # exterior

    def test_tau_validation(self):
        X, Y, H = toy_single_site()
        grid = GridSpec(range1=(0, 1), range2=(0, 1), resolution=3)
        fld = gap_slice(X, Y, H, 1.0, grid)
        with pytest.raises(ValueError):
            index_regions(fld, X, Y, H, 1.0, tau=-1.0)


class TestExports:
    def test_gap_csv(self, tmp_path):
        X, Y, H = toy_single_site()
        grid = GridSpec(range1=(0, 1), range2=(0, 1), resolution=3)
        fld = gap_slice(X, Y, H, 1.0, grid)
        path = tmp_path / "gap.csv"
        write_gap_csv(fld, path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 9
        assert set(rows[0]) == {"l1", "l2", "l3", "gap", "status"}
        assert all(r["status"] == STATUS_COMPUTED for r in rows)

    def test_regions_csv_and_sidecar(self, tmp_path):
        X, Y, H = toy_single_site(2.0)
        grid = GridSpec(range1=(0, 1), range2=(0, 1), resolution=3)
        fld = gap_slice(X, Y, H, 1.0, grid)
        regions = index_regions(fld, X, Y, H, 1.0)
        write_regions_csv(regions, tmp_path / "regions.csv")
        with open(tmp_path / "regions.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 9
        assert set(rows[0]) == {"l1", "l2", "l3", "region", "index"}
        write_sidecar(tmp_path / "manifest.json", grid, 1.0, 1e-8, "abc123", 0.0)
        import json

        meta = json.loads((tmp_path / "manifest.json").read_text())
        assert meta["kappa"] == 1.0 and meta["config_hash"] == "abc123"
