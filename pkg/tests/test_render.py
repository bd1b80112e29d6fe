import numpy as np
import pytest

from juliabubbles import dynamics, families, kernels, render
from juliabubbles.errors import OutOfWindowError

from conftest import make_square_instance


@pytest.fixture(scope="module")
def square_grid():
    inst = make_square_instance()
    att = dynamics.find_attractors(inst)
    win = render.Window.square(0, 4.0, 256)
    return inst, render.render_grid(inst, win, att)


def test_window_pixel_mapping():
    win = render.Window.square(0, 4.0, 256)
    # pixel (i=0, j=0) is the top-left corner
    z = win.pixel_center(0, 0)
    assert z.real == pytest.approx(-2.0 + 0.5 * win.pixel_width)
    assert z.imag == pytest.approx(2.0 - 0.5 * win.pixel_width)
    j, i = win.locate(z)
    assert (j, i) == (0, 0)


def test_window_locate_roundtrip():
    win = render.Window(center=0.3 - 0.2j, width=3.0, height=2.0, nx=64, ny=32)
    for j in (0, 7, 31):
        for i in (0, 20, 63):
            assert win.locate(win.pixel_center(j, i)) == (j, i)
    with pytest.raises(OutOfWindowError):
        win.locate(100.0)


def test_window_minimum_resolution():
    with pytest.raises(ValueError):
        render.Window.square(0, 4.0, 8)


def test_square_grid_partition(square_grid):
    _, grid = square_grid
    win = grid.window
    j, i = win.locate(0.2 + 0.1j)
    assert grid.kind[j, i] == kernels.ATTRACTED
    j, i = win.locate(1.8 + 0.0j)
    assert grid.kind[j, i] == kernels.ESCAPE
    assert grid.undecided_fraction < 0.01


def test_grid_reproducible(square_grid):
    inst, grid = square_grid
    att = dynamics.find_attractors(inst)
    again = render.render_grid(inst, grid.window, att)
    assert np.array_equal(grid.kind, again.kind)
    assert np.array_equal(grid.attr, again.attr)
    assert np.array_equal(grid.iters, again.iters)


def test_worker_count_does_not_change_labels(square_grid):
    inst, grid = square_grid
    att = dynamics.find_attractors(inst)
    g8 = render.render_grid(inst, grid.window, att, workers=8)
    assert np.array_equal(grid.kind, g8.kind)
    assert np.array_equal(grid.iters, g8.iters)


def test_resolution_monotone_attracted_set():
    # attracted pixels at 512 downsample into the 1-dilated 1024 attracted set
    from scipy import ndimage
    inst = families.make("cubic_bubble")
    att = dynamics.find_attractors(inst)
    lo = render.render_grid(inst, render.Window.square(0, 4.0, 256), att)
    hi = render.render_grid(inst, render.Window.square(0, 4.0, 512), att)
    hi_att = hi.kind == kernels.ATTRACTED
    hi_down = hi_att.reshape(256, 2, 256, 2).any(axis=(1, 3))
    hi_down = ndimage.binary_dilation(hi_down, iterations=1)
    lo_att = lo.kind == kernels.ATTRACTED
    assert float(np.mean(lo_att & ~hi_down)) < 0.002


def test_ppm_bytes(tmp_path, square_grid):
    _, grid = square_grid
    path = tmp_path / "grid.ppm"
    render.write_ppm(grid, render.default_palette, path)
    data = path.read_bytes()
    header = b"P6\n256 256\n255\n"
    assert data.startswith(header)
    assert len(data) == len(header) + 256 * 256 * 3


def test_ppm_io_error(square_grid):
    _, grid = square_grid
    with pytest.raises(OSError):
        render.write_ppm(grid, render.default_palette, "/nonexistent/x.ppm")


def test_class_key_distinguishes_attractors():
    inst = families.make("g", a=2.5)
    att = dynamics.find_attractors(inst)
    win = render.Window.square(1.0, 7.0, 128)
    grid = render.render_grid(inst, win, att)
    keys = set(np.unique(grid.class_key()))
    assert len(keys) >= 2  # at least escape and the finite basin
