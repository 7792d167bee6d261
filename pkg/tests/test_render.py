import json
import math

import numpy as np
import pytest

from bicritical_atlas.errors import OutOfWorld, UnknownFigure
from bicritical_atlas.families import Family
from bicritical_atlas.render import (
    KIND_NAME,
    PALETTE,
    TILE_SIZE,
    Tile,
    TileKey,
    Viewport,
    WORLDS,
    cached_tile_png,
    colorize_classification,
    figure_command,
    render_dynamical_tile,
    render_parameter_tile,
    render_parameter_view,
    tile_grid,
)
from bicritical_atlas.raster import KIND_OUTSIDE, KIND_TRICORN


def key_containing(family, plane, value, zoom, tier="standard", anchor=None):
    from bicritical_atlas.render import WORLDS_DYN
    center, half = (WORLDS if plane == "param" else WORLDS_DYN)[family]
    n = 1 << zoom
    span = 2.0 * half / n
    x = int((value.real - (center.real - half)) / span)
    y = int(((center.imag + half) - value.imag) / span)
    return TileKey(family, plane, zoom, x, y, tier, anchor)


class TestTileGeometry:
    def test_out_of_world(self):
        with pytest.raises(OutOfWorld):
            tile_grid(TileKey(Family.NEWTON, "param", 2, 4, 0))

    def test_tiles_partition_world(self):
        # the four zoom-1 tiles cover exactly the world square
        pts = [tile_grid(TileKey(Family.NEWTON, "param", 1, x, y))
               for x in (0, 1) for y in (0, 1)]
        allpts = np.concatenate([p.ravel() for p in pts])
        center, half = WORLDS[Family.NEWTON]
        assert abs(allpts.real.min() - (center.real - half)) < 2 * half / 512
        assert abs(allpts.real.max() - (center.real + half)) < 2 * half / 512
        assert np.unique(allpts.round(12)).size == allpts.size

    def test_key_validation(self):
        with pytest.raises(ValueError):
            TileKey(Family.NEWTON, "nope", 0, 0, 0)
        with pytest.raises(ValueError):
            TileKey(Family.NEWTON, "dyn", 0, 0, 0)   # anchor missing
        with pytest.raises(ValueError):
            Viewport(0j, -1.0, 256, 256)


class TestParameterTiles:
    def test_outside_domain_matches_inequality(self):
        key = TileKey(Family.NEWTON, "param", 2, 1, 3, "preview")
        grid = tile_grid(key)
        tile = render_parameter_tile(key)
        outside = ~((2.0 * grid.imag ** 2 - grid.real ** 2 - 2.0 > 0.0)
                    & (grid.imag > 0.0))
        out_color = np.array(PALETTE[KIND_OUTSIDE], dtype=np.uint8)
        is_out = (tile.pixels[..., :3] == out_color).all(axis=-1)
        assert (is_out == outside).mean() >= 0.99

    def test_tile_at_tricorn_center(self, newton_center_2):
        key = key_containing(Family.NEWTON, "param", newton_center_2, 4)
        grid = tile_grid(key)
        tile = render_parameter_tile(key)
        i = np.argmin(np.abs(grid[:, 0].imag - newton_center_2.imag))
        j = np.argmin(np.abs(grid[0].real - newton_center_2.real))
        tric = np.array(PALETTE[KIND_TRICORN], dtype=float)
        # period-4 shading darkens the base orange
        expect = np.round(tric / (1.0 + 0.12 * 3)).astype(np.uint8)
        assert (tile.pixels[i, j, :3] == expect).all()
        assert tile.meta["class_histogram"].get("Tricorn", 0) > 0
        assert tile.meta["max_period"] >= 4

    def test_byte_determinism(self):
        key = TileKey(Family.NEWTON, "param", 3, 4, 2, "preview")
        assert render_parameter_tile(key).png_bytes() == \
            render_parameter_tile(key).png_bytes()


class TestDynamicalTiles:
    def test_newton_real_axis_basins(self):
        # right of the single real pole the real line is in the basin of 1
        key = key_containing(Family.NEWTON, "dyn", 5.0 + 0j, 3, anchor=2j)
        grid = tile_grid(key)
        tile = render_dynamical_tile(key)
        from bicritical_atlas.render import BASIN_PALETTE
        i = np.argmin(np.abs(grid[:, 0].imag - 0.0))
        for target in (5.0, 1.0):
            j = np.argmin(np.abs(grid[0].real - target))
            assert (tile.pixels[i, j, :3]
                    == np.array(BASIN_PALETTE[1], dtype=np.uint8)).all()

    def test_antipodal_eta_swaps_zero_and_escape(self):
        from bicritical_atlas.raster import basin_grid
        from bicritical_atlas.families import antipodal_parameter
        param = antipodal_parameter(0.01 + 0j)
        rng = np.random.default_rng(5)
        z = rng.normal(size=16) * 0.5 + 1j * rng.normal(size=16) * 0.5 + 0.8
        eta = -1.0 / np.conj(z)
        from bicritical_atlas.orbits import BUDGET_STANDARD
        a = basin_grid(param, z, BUDGET_STANDARD)
        b = basin_grid(param, eta, BUDGET_STANDARD)
        decided = (a > 0) & (b > 0)
        assert decided.mean() > 0.5
        swap = {1: 2, 2: 1}
        assert all(swap[int(x)] == int(y)
                   for x, y in zip(a[decided], b[decided]))


class TestViewRendering:
    def test_thread_count_invariance(self):
        viewport = Viewport(2j, 8.0 / 128, 128, 128)
        k1, p1 = render_parameter_view(Family.NEWTON, viewport, "preview",
                                       threads=1)
        k3, p3 = render_parameter_view(Family.NEWTON, viewport, "preview",
                                       threads=3)
        assert np.array_equal(k1, k3)
        assert np.array_equal(p1, p3)
        b1 = Tile(colorize_classification(k1, p1), {}).png_bytes()
        b3 = Tile(colorize_classification(k3, p3), {}).png_bytes()
        assert b1 == b3


class TestCache:
    def test_cache_transparency(self, tmp_path, monkeypatch):
        key = TileKey(Family.NEWTON, "param", 2, 1, 1, "preview")
        monkeypatch.delenv("ATLAS_CACHE_DIR", raising=False)
        cold = cached_tile_png(key)
        monkeypatch.setenv("ATLAS_CACHE_DIR", str(tmp_path))
        first = cached_tile_png(key)
        warm = cached_tile_png(key)
        assert cold == first == warm
        assert any(f.suffix == ".png" for f in tmp_path.iterdir())
        assert not any(f.suffix == ".tmp" for f in tmp_path.iterdir())


class TestFigures:
    def test_unknown_figure(self):
        with pytest.raises(UnknownFigure) as exc:
            figure_command("fig-nope")
        assert "fig-region" in str(exc.value)

    def test_fig_region(self, tmp_path):
        files = figure_command("fig-region", str(tmp_path))
        assert len(files) == 2
        with open(files[1], encoding="utf-8") as fh:
            meta = json.load(fh)
        assert meta["family"] == "newton"
        assert meta["palette_version"] >= 1
        assert "OutsideDomain" in meta["class_histogram"]
