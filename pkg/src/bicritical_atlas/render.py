"""Deterministic tile and figure rendering for both parameter planes.

Tiles are 256x256 RGBA rasters addressed slippy-style over a fixed world
square per family.  Rendering is embarrassingly parallel over tiles and
byte-deterministic for a given key, palette version and configuration, so a
disk cache (write-temp-then-rename) and thread pools never change output.
"""

from __future__ import annotations

import cmath
import io
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import OutOfWorld, UnknownFigure
from .families import Family, antipodal_parameter, newton_parameter
from .orbits import BUDGET_ANALYSIS, BUDGET_PREVIEW, BUDGET_STANDARD
from .raster import (
    KIND_CAPTURE,
    KIND_MANDELBROT,
    KIND_OUTSIDE,
    KIND_PRINCIPAL,
    KIND_TRICORN,
    KIND_UNDECIDED,
    basin_grid,
    classify_grid,
)

TILE_SIZE = 256
MAX_ZOOM = 40
PALETTE_VERSION = 1

# world squares: (center, half-width)
WORLDS = {
    Family.NEWTON: (2j, 4.0),
    Family.ANTIPODAL: (0j, 4.0),
}
# dynamical planes center on the origin where the basins live
WORLDS_DYN = {
    Family.NEWTON: (0j, 8.0),
    Family.ANTIPODAL: (0j, 8.0),
}

TIER_BUDGETS = {
    "preview": BUDGET_PREVIEW,
    "standard": BUDGET_STANDARD,
    "analysis": BUDGET_ANALYSIS,
}

# class base colors, shaded by period
PALETTE = {
    KIND_UNDECIDED: (24, 24, 32),
    KIND_PRINCIPAL: (208, 64, 48),      # red
    KIND_CAPTURE: (232, 196, 48),       # yellow
    KIND_MANDELBROT: (64, 160, 64),     # green
    KIND_TRICORN: (232, 128, 32),       # orange
    KIND_OUTSIDE: (240, 240, 240),
}

BASIN_PALETTE = {
    0: (16, 16, 20),                    # undecided / Julia
    1: (70, 110, 200),
    2: (200, 90, 70),
    3: (90, 180, 110),
    4: (190, 160, 70),
    5: (150, 100, 180),
}

KIND_NAME = {
    KIND_UNDECIDED: "Undecided",
    KIND_PRINCIPAL: "Principal",
    KIND_CAPTURE: "Capture",
    KIND_MANDELBROT: "Mandelbrot",
    KIND_TRICORN: "Tricorn",
    KIND_OUTSIDE: "OutsideDomain",
}


@dataclass(frozen=True)
class Viewport:
    center: complex
    scale: float                        # plane units per pixel
    width: int
    height: int

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if not (1 <= self.width <= 4096 and 1 <= self.height <= 4096):
            raise ValueError("viewport size out of range")

    def grid(self) -> np.ndarray:
        xs = self.center.real + self.scale * (np.arange(self.width)
                                              - (self.width - 1) / 2.0)
        ys = self.center.imag + self.scale * ((self.height - 1) / 2.0
                                              - np.arange(self.height))
        return xs[None, :] + 1j * ys[:, None]


@dataclass(frozen=True)
class TileKey:
    family: Family
    plane: str                          # "param" | "dyn"
    zoom: int
    x: int
    y: int
    tier: str = "standard"
    anchor: complex | None = None       # required for plane == "dyn"

    def __post_init__(self):
        if self.plane not in ("param", "dyn"):
            raise ValueError(f"unknown plane {self.plane!r}")
        if self.tier not in TIER_BUDGETS:
            raise ValueError(f"unknown tier {self.tier!r}")
        if self.plane == "dyn" and self.anchor is None:
            raise ValueError("dynamical tiles need an anchor parameter")

    def cache_token(self) -> str:
        anchor = "" if self.anchor is None else \
            f"{self.anchor.real!r}_{self.anchor.imag!r}"
        return (f"{self.family.value}-{self.plane}-{self.zoom}-{self.x}-"
                f"{self.y}-{self.tier}-{anchor}-p{PALETTE_VERSION}")


@dataclass
class Tile:
    pixels: np.ndarray                  # (256, 256, 4) uint8
    meta: dict

    def png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, mode="RGBA").save(buf, format="PNG")
        return buf.getvalue()


def tile_grid(key: TileKey) -> np.ndarray:
    """Pixel-center coordinates of a tile, row 0 at the top of the world."""
    n = 1 << key.zoom
    if not (0 <= key.x < n and 0 <= key.y < n):
        raise OutOfWorld(f"tile ({key.x}, {key.y}) outside zoom {key.zoom}")
    worlds = WORLDS if key.plane == "param" else WORLDS_DYN
    center, half = worlds[key.family]
    span = 2.0 * half / n
    x0 = center.real - half + key.x * span
    y0 = center.imag + half - key.y * span
    step = span / TILE_SIZE
    xs = x0 + step * (np.arange(TILE_SIZE) + 0.5)
    ys = y0 - step * (np.arange(TILE_SIZE) + 0.5)
    return xs[None, :] + 1j * ys[:, None]


def _shade(base, period):
    """Darken the base color with the period, keeping period 1 pure."""
    f = 1.0 / (1.0 + 0.12 * max(0, period - 1))
    return tuple(int(round(c * f)) for c in base)


def colorize_classification(kind: np.ndarray, period: np.ndarray) -> np.ndarray:
    out = np.zeros(kind.shape + (4,), dtype=np.uint8)
    out[..., 3] = 255
    for code, base in PALETTE.items():
        mask = kind == code
        if not mask.any():
            continue
        if code in (KIND_TRICORN, KIND_MANDELBROT, KIND_CAPTURE):
            for p in np.unique(period[mask]):
                sub = mask & (period == p)
                out[sub, :3] = _shade(base, int(p))
        else:
            out[mask, :3] = base
    return out


def colorize_basins(codes: np.ndarray) -> np.ndarray:
    out = np.zeros(codes.shape + (4,), dtype=np.uint8)
    out[..., 3] = 255
    for code in np.unique(codes):
        c = int(code)
        if c >= 100:
            base = BASIN_PALETTE[5]
            color = _shade(base, c - 99)
        else:
            color = BASIN_PALETTE.get(c, BASIN_PALETTE[0])
        out[codes == code, :3] = color
    return out


def _classification_meta(kind: np.ndarray, period: np.ndarray, tier: str) -> dict:
    hist = {KIND_NAME[int(c)]: int((kind == c).sum())
            for c in np.unique(kind)}
    return {"class_histogram": hist,
            "max_period": int(period.max(initial=0)),
            "tier": tier,
            "palette_version": PALETTE_VERSION}


def render_parameter_tile(key: TileKey) -> Tile:
    grid = tile_grid(key)
    kind, period = classify_grid(key.family, grid, TIER_BUDGETS[key.tier])
    return Tile(colorize_classification(kind, period),
                _classification_meta(kind, period, key.tier))


def render_dynamical_tile(key: TileKey) -> Tile:
    if key.family is Family.NEWTON:
        param = newton_parameter(key.anchor)
    else:
        param = antipodal_parameter(key.anchor)
    grid = tile_grid(key)
    codes = basin_grid(param, grid, TIER_BUDGETS[key.tier])
    hist = {str(int(c)): int((codes == c).sum()) for c in np.unique(codes)}
    meta = {"class_histogram": hist, "max_period": 0, "tier": key.tier,
            "palette_version": PALETTE_VERSION,
            "anchor": [key.anchor.real, key.anchor.imag]}
    return Tile(colorize_basins(codes), meta)


def render_tile(key: TileKey) -> Tile:
    if key.plane == "param":
        return render_parameter_tile(key)
    return render_dynamical_tile(key)


# ---------------------------------------------------------------------------
# disk cache
# ---------------------------------------------------------------------------


def cache_dir() -> str | None:
    return os.environ.get("ATLAS_CACHE_DIR")


def cached_tile_png(key: TileKey) -> bytes:
    """PNG bytes for a tile, going through the disk cache when configured."""
    root = cache_dir()
    if root is None:
        return render_tile(key).png_bytes()
    path = os.path.join(root, key.cache_token() + ".png")
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except FileNotFoundError:
        pass
    data = render_tile(key).png_bytes()
    os.makedirs(root, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=root, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return data


# ---------------------------------------------------------------------------
# viewport renders and figures
# ---------------------------------------------------------------------------


def render_parameter_view(family: Family, viewport: Viewport, tier: str,
                          threads: int = 1):
    """Classify a whole viewport, split row-blockwise across threads.

    The per-pixel work is independent, so the assembled raster is identical
    for any thread count.
    """
    grid = viewport.grid()
    budget = TIER_BUDGETS[tier]
    if threads <= 1:
        kind, period = classify_grid(family, grid, budget)
    else:
        blocks = np.array_split(np.arange(viewport.height), threads)
        kind = np.zeros(grid.shape, dtype=np.int8)
        period = np.zeros(grid.shape, dtype=np.int32)

        def work(rows):
            if rows.size:
                kind[rows], period[rows] = classify_grid(family, grid[rows],
                                                         budget)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, blocks))
    return kind, period


def render_dynamical_view(param, viewport: Viewport, tier: str,
                          cycle=None) -> np.ndarray:
    return basin_grid(param, viewport.grid(), TIER_BUDGETS[tier], cycle=cycle)


def _write_png(path: str, pixels: np.ndarray) -> None:
    Image.fromarray(pixels, mode="RGBA").save(path, format="PNG")


def _write_meta(path: str, family: Family, viewport: Viewport, extra: dict) -> None:
    doc = {"family": family.value,
           "viewport": {"center": [viewport.center.real, viewport.center.imag],
                        "scale": viewport.scale,
                        "width": viewport.width, "height": viewport.height},
           "palette_version": PALETTE_VERSION}
    doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def _world_viewport(family: Family, size: int) -> Viewport:
    center, half = WORLDS[family]
    return Viewport(center, 2.0 * half / size, size, size)


def _plot_points(pixels: np.ndarray, viewport: Viewport, points,
                 color, radius: int = 0) -> None:
    h, w = pixels.shape[:2]
    for z in points:
        j = (z.real - viewport.center.real) / viewport.scale + (w - 1) / 2.0
        i = (viewport.center.imag - z.imag) / viewport.scale + (h - 1) / 2.0
        ji, ii = int(round(j)), int(round(i))
        for di in range(-radius, radius + 1):
            for dj in range(-radius, radius + 1):
                if 0 <= ii + di < h and 0 <= ji + dj < w:
                    pixels[ii + di, ji + dj, :3] = color


def _figure_region(outdir: str) -> list:
    viewport = _world_viewport(Family.NEWTON, 512)
    kind, period = render_parameter_view(Family.NEWTON, viewport, "preview")
    pixels = colorize_classification(kind, period)
    # overlay the region hyperbola 2 Im(a)^2 = Re(a)^2 + 2
    xs = viewport.grid()[0].real
    curve = [complex(x, math.sqrt((x * x + 2.0) / 2.0)) for x in xs]
    _plot_points(pixels, viewport, curve, (255, 0, 0))
    png = os.path.join(outdir, "fig-region.png")
    meta = os.path.join(outdir, "fig-region.meta.json")
    _write_png(png, pixels)
    _write_meta(meta, Family.NEWTON, viewport,
                _classification_meta(kind, period, "preview"))
    return [png, meta]


def _figure_overview(outdir: str) -> list:
    viewport = _world_viewport(Family.NEWTON, 512)
    kind, period = render_parameter_view(Family.NEWTON, viewport, "standard")
    png = os.path.join(outdir, "fig-newton-overview.png")
    meta = os.path.join(outdir, "fig-newton-overview.meta.json")
    _write_png(png, colorize_classification(kind, period))
    _write_meta(meta, Family.NEWTON, viewport,
                _classification_meta(kind, period, "standard"))
    return [png, meta]


def _newton_center_2() -> complex:
    from .orbits import center_search_newton
    centers = center_search_newton(2, (1.001, 10.0), samples=2000)
    return min(centers, key=abs)


def _figure_tricorn_n2(outdir: str) -> list:
    from .parabolic import find_boundary_parabolic, trace_arc
    a2 = _newton_center_2()
    viewport = Viewport(a2, 0.3 / 512, 512, 512)
    kind, period = render_parameter_view(Family.NEWTON, viewport, "standard")
    pixels = colorize_classification(kind, period)
    arcs = []
    for deg in (60, 180, 300):
        datum = find_boundary_parabolic(newton_parameter(a2),
                                        cmath.exp(1j * math.radians(deg)), 4)
        targets = [t / 10.0 for t in range(-4, 5)]
        arcs.append([s.param for s in trace_arc(datum, targets)])
    for arc in arcs:
        _plot_points(pixels, viewport, arc, (255, 255, 255), radius=1)
    png = os.path.join(outdir, "fig-tricorn-n2.png")
    meta = os.path.join(outdir, "fig-tricorn-n2.meta.json")
    _write_png(png, pixels)
    extra = _classification_meta(kind, period, "standard")
    extra["arcs"] = [[[z.real, z.imag] for z in arc] for arc in arcs]
    _write_meta(meta, Family.NEWTON, viewport, extra)
    return [png, meta]


def _figure_invisible_zoom(outdir: str) -> list:
    from .orbits import classify
    from .visibility import half_return_boundary_points
    a2 = _newton_center_2()
    param = newton_parameter(a2)
    triple = half_return_boundary_points(param)
    point = triple.points[triple.symmetric_index] \
        if triple.symmetric_index is not None else triple.points[0]
    cycle = list(classify(param).cycle.points)
    viewport = Viewport(point, 0.02 / 512, 512, 512)
    codes = render_dynamical_view(param, viewport, "standard", cycle=cycle)
    pixels = colorize_basins(codes)
    _plot_points(pixels, viewport, [point], (255, 255, 255), radius=2)
    png = os.path.join(outdir, "fig-invisible-zoom.png")
    meta = os.path.join(outdir, "fig-invisible-zoom.meta.json")
    _write_png(png, pixels)
    _write_meta(meta, Family.NEWTON, viewport,
                {"anchor": [a2.real, a2.imag],
                 "boundary_point": [point.real, point.imag],
                 "tier": "standard"})
    return [png, meta]


def _figure_antipodal_tongue2(outdir: str) -> list:
    viewport = _world_viewport(Family.ANTIPODAL, 512)
    kind, period = render_parameter_view(Family.ANTIPODAL, viewport, "preview")
    png = os.path.join(outdir, "fig-antipodal-tongue2.png")
    meta = os.path.join(outdir, "fig-antipodal-tongue2.meta.json")
    _write_png(png, colorize_classification(kind, period))
    _write_meta(meta, Family.ANTIPODAL, viewport,
                _classification_meta(kind, period, "preview"))
    return [png, meta]


FIGURES = {
    "fig-region": _figure_region,
    "fig-newton-overview": _figure_overview,
    "fig-tricorn-n2": _figure_tricorn_n2,
    "fig-invisible-zoom": _figure_invisible_zoom,
    "fig-antipodal-tongue2": _figure_antipodal_tongue2,
}


def figure_command(figure_id: str, outdir: str = ".") -> list:
    if figure_id not in FIGURES:
        raise UnknownFigure(figure_id, FIGURES)
    os.makedirs(outdir, exist_ok=True)
    return FIGURES[figure_id](outdir)
