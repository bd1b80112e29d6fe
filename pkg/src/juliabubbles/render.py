"""Deterministic classification-grid rendering and PPM emission."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dynamics import AttractorSet, default_budget
from .errors import OutOfWindowError
from .families import FamilyInstance

KIND_NAMES = ("escape", "attracted", "parabolic", "undecided")


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle of the plane on an (nx, ny) pixel lattice.

    Pixel (i, j) has center
        re = cx + ((i + 0.5)/nx - 0.5) * width
        im = cy - ((j + 0.5)/ny - 0.5) * height
    with row j = 0 at the top.
    """

    center: complex
    width: float
    height: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise ValueError("resolution must be at least 16x16")

    @classmethod
    def square(cls, center, width, res):
        return cls(complex(center), float(width), float(width), int(res), int(res))

    def re_axis(self):
        i = np.arange(self.nx, dtype=np.float64)
        return self.center.real + ((i + 0.5) / self.nx - 0.5) * self.width

    def im_axis(self):
        j = np.arange(self.ny, dtype=np.float64)
        return self.center.imag - ((j + 0.5) / self.ny - 0.5) * self.height

    @property
    def pixel_width(self):
        return self.width / self.nx

    def contains(self, z) -> bool:
        z = complex(z)
        return (abs(z.real - self.center.real) <= self.width / 2
                and abs(z.imag - self.center.imag) <= self.height / 2)

    def locate(self, z):
        """(row j, col i) of the pixel containing z."""
        z = complex(z)
        if not self.contains(z):
            raise OutOfWindowError(f"{z} outside window")
        i = int((z.real - self.center.real) / self.width * self.nx + self.nx / 2)
        j = int((self.center.imag - z.imag) / self.height * self.ny + self.ny / 2)
        return min(max(j, 0), self.ny - 1), min(max(i, 0), self.nx - 1)

    def pixel_center(self, j, i):
        return complex(self.center.real + ((i + 0.5) / self.nx - 0.5) * self.width,
                       self.center.imag - ((j + 0.5) / self.ny - 0.5) * self.height)


@dataclass
class ClassificationGrid:
    window: Window
    kind: np.ndarray     # int8 (ny, nx), kernel fate codes
    attr: np.ndarray     # int16 attractor/cycle index, -1 for undecided
    iters: np.ndarray    # int32 iteration counts

    @property
    def undecided_fraction(self) -> float:
        return float(np.mean(self.kind == kernels.UNDECIDED))

    def class_key(self):
        """Per-pixel (kind, attractor) composite label for component analyses."""
        return self.kind.astype(np.int32) * 4096 + (self.attr.astype(np.int32) + 1)


TILE = 64


def render_grid(instance: FamilyInstance, window: Window,
                attractors: AttractorSet, budget=None,
                eps_trap=None, eps_par=None, workers=1) -> ClassificationGrid:
    """Per-pixel classification at pixel centers.

    Work is decomposed into 64x64 tiles, statically assigned and merged by
    tile index. Output is bitwise deterministic: each pixel is classified
    independently, so tile decomposition and thread count cannot change
    labels.
    """
    if budget is None:
        budget = default_budget(attractors)
    kwargs = {}
    if eps_trap is not None:
        kwargs["eps_trap"] = eps_trap
    if eps_par is not None:
        kwargs["eps_par"] = eps_par
    pack = attractors.pack(instance.map, **kwargs)
    re, im = window.re_axis(), window.im_axis()
    if workers <= 1 and window.nx * window.ny <= TILE * TILE:
        kind, attr, iters = kernels.classify_grid(re, im, pack, int(budget))
        return ClassificationGrid(window=window, kind=kind, attr=attr,
                                  iters=iters)
    ny, nx = window.ny, window.nx
    kind = np.empty((ny, nx), dtype=np.int8)
    attr = np.empty((ny, nx), dtype=np.int16)
    iters = np.empty((ny, nx), dtype=np.int32)
    tiles = [(j, i) for j in range(0, ny, TILE) for i in range(0, nx, TILE)]

    def work(t):
        j, i = t
        return kernels.classify_grid(re[i:i + TILE], im[j:j + TILE],
                                     pack, int(budget))

    if workers <= 1:
        results = map(work, tiles)
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, tiles))
    for (j, i), (k, a, n) in zip(tiles, results):
        kind[j:j + TILE, i:i + TILE] = k
        attr[j:j + TILE, i:i + TILE] = a
        iters[j:j + TILE, i:i + TILE] = n
    return ClassificationGrid(window=window, kind=kind, attr=attr, iters=iters)


# ---------------------------------------------------------------------------
# palettes and image output
# ---------------------------------------------------------------------------

_BASE_COLORS = np.array([
    [66, 106, 235], [235, 130, 60], [90, 200, 120], [200, 80, 160],
    [240, 220, 90], [120, 210, 220], [180, 120, 240], [160, 160, 160],
], dtype=np.float64)


def default_palette(kind, attr, iters):
    """(ny, nx, 3) uint8 image: hue by attractor, shade by iteration count."""
    ny, nx = kind.shape
    img = np.zeros((ny, nx, 3), dtype=np.uint8)
    shade = 0.35 + 0.65 * (0.5 + 0.5 * np.cos(0.25 * iters.astype(np.float64)))
    esc = kind == kernels.ESCAPE
    img[esc] = (np.array([20, 28, 60]) +
                shade[esc, None] * np.array([90, 110, 170])).astype(np.uint8)
    for code, dim in ((kernels.ATTRACTED, 1.0), (kernels.PARABOLIC, 0.8)):
        sel = kind == code
        if not np.any(sel):
            continue
        base = _BASE_COLORS[attr[sel] % len(_BASE_COLORS)]
        img[sel] = np.clip(base * dim * (0.45 + 0.55 * shade[sel, None]),
                           0, 255).astype(np.uint8)
    return img


def write_ppm(grid: ClassificationGrid, palette, path):
    """Binary PPM (P6), row-major, top row first."""
    img = palette(grid.kind, grid.attr, grid.iters)
    ny, nx, _ = img.shape
    header = f"P6\n{nx} {ny}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())
    except OSError as exc:
        raise OSError(f"writing PPM to {path}: {exc}") from exc
