import math

import numpy as np
import pytest

from juliabubbles import dynamics, families, metrics, render, topology
from juliabubbles.errors import DegenerateSetError
from juliabubbles.rmap import INF


def circle(n=512, r=1.0, center=0j):
    t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    return center + r * np.exp(1j * t)


def test_chordal_distance_values():
    assert metrics.chordal_distance(0.1, 1.0) == pytest.approx(
        1.2664755805145254)
    assert metrics.chordal_distance(0.0, INF) == pytest.approx(2.0)
    assert metrics.chordal_distance(INF, INF) == 0.0
    assert metrics.chordal_distance(1.0, INF) == pytest.approx(math.sqrt(2.0))
    assert metrics.chordal_distance(0.3j, 0.3j) == 0.0


def test_chordal_distance_symmetry_and_bound():
    rng = np.random.default_rng(7)
    zs = rng.normal(size=8) + 1j * rng.normal(size=8)
    for z in zs:
        for w in zs:
            d = metrics.chordal_distance(z, w)
            assert d == pytest.approx(metrics.chordal_distance(w, z))
            assert 0.0 <= d <= 2.0 + 1e-12


def test_chordal_diameter_circle():
    assert metrics.chordal_diameter(circle()) == pytest.approx(2.0, rel=1e-3)


def test_set_and_relative_distance():
    a = np.array([0.0, 0.1])
    b = np.array([1.0, 1.1])
    assert metrics.set_distance(a, b) == pytest.approx(
        metrics.chordal_distance(0.1, 1.0))
    rel = metrics.relative_distance(a, b)
    expected = metrics.chordal_distance(0.1, 1.0) / min(
        metrics.chordal_distance(0.0, 0.1), metrics.chordal_distance(1.0, 1.1))
    assert rel == pytest.approx(expected)


def test_relative_distance_degenerate():
    with pytest.raises(DegenerateSetError):
        metrics.relative_distance(np.array([0.0, 0.0]), np.array([1.0, 1.1]))


def test_bounded_turning_circle():
    t = metrics.bounded_turning(circle())
    assert 1.0 <= t <= 1.2


def test_bounded_turning_monotone_in_pairs():
    pts = circle(400, r=0.8, center=0.2 + 0.1j)
    t100 = metrics.bounded_turning(pts, n_pairs=100)
    t200 = metrics.bounded_turning(pts, n_pairs=200)
    t400 = metrics.bounded_turning(pts, n_pairs=400)
    assert t100 <= t200 <= t400


def test_bounded_turning_detects_pinch():
    # a figure-like pinched curve has a large turning constant
    t = np.linspace(0.0, 2 * np.pi, 600, endpoint=False)
    pts = np.cos(t) + 0.08j * np.sin(2 * t)
    assert metrics.bounded_turning(pts) > 3.0


def test_bounded_turning_rejects_tiny_curves():
    with pytest.raises(DegenerateSetError):
        metrics.bounded_turning(circle(4))


def test_curve_geometry_roundness():
    g = metrics.curve_geometry(circle())
    assert g.roundness == pytest.approx(1.0, abs=1e-9)
    assert g.turning <= 1.2


def test_separation_report_two_circles():
    rep = metrics.separation_report([circle(128, 0.5, -1.0),
                                     circle(128, 0.5, 1.5)])
    assert rep.curve_count == 2
    assert rep.min_delta > 0
    assert len(rep.deltas) == 1


def test_separation_report_needs_two():
    with pytest.raises(DegenerateSetError):
        metrics.separation_report([circle()])


def test_critical_accumulation_distance_positive():
    inst = families.make("cubic_bubble")
    att = dynamics.find_attractors(inst)
    from juliabubbles.criterion import default_window
    win = default_window(inst, att, 512)
    grid = render.render_grid(inst, win, att)
    pot = dynamics.escape_potential_grid(inst.map, grid,
                                         dynamics.escape_radius(inst.map))
    graph = topology.label_components(grid, pot)
    curves = topology.largest_bounded_curves(graph, n=10)
    d = metrics.critical_accumulation_distance(inst, curves)
    assert d > 0


def test_critical_accumulation_all_escaping_is_inf():
    # McMullen lam=100: every critical orbit escapes
    inst = families.make("mcmullen", n=2, m=2, lam=100.0)
    d = metrics.critical_accumulation_distance(inst, [circle()])
    assert d == math.inf
