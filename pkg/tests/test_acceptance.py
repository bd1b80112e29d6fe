"""End-to-end acceptance gate.

One test per acceptance criterion, named test_criterion_<n>_*, so a verbose
run shows exactly one pass/fail line per criterion. Each test also prints a
"CRITERION n: PASS" summary line.
"""

import math
import time

import numpy as np
import pytest

from juliabubbles import (cli, criterion, dynamics, families, kernels,
                          metrics, render, solver, topology)
from juliabubbles.rmap import critical_points, deriv_eval, is_inf, map_eval

from conftest import make_square_instance

_CACHE = {}


def pipeline(name, res, budget=None, **params):
    """Cached family -> attractors -> window -> grid -> component graph."""
    key = (name, res, budget, tuple(sorted(params.items())))
    if key not in _CACHE:
        inst = families.make(name, **params)
        att = dynamics.find_attractors(inst)
        win = criterion.default_window(inst, att, res)
        grid = render.render_grid(inst, win, att, budget=budget)
        pot = None
        f = inst.map
        if f.num.degree >= f.den.degree + 2:
            pot = dynamics.escape_potential_grid(f, grid,
                                                 dynamics.escape_radius(f))
        graph = topology.label_components(grid, pot)
        _CACHE[key] = (inst, att, win, grid, graph)
    return _CACHE[key]


def verdict_for(name, res, budget=None, **params):
    key = ("verdict", name, res, budget, tuple(sorted(params.items())))
    if key not in _CACHE:
        inst, att, _, grid, _ = pipeline(name, res, budget, **params)
        t0 = time.perf_counter()
        v = criterion.check_theorem1(inst, resolution=res, budget=budget,
                                     attractors=att, grid=grid)
        _CACHE[key] = (v, time.perf_counter() - t0)
    return _CACHE[key]


def test_criterion_1_algebraic_identities():
    t0 = time.perf_counter()

    f = families.make("p1_cubic").map
    z1 = map_eval(f, 2.0)
    z2 = map_eval(f, z1)
    assert abs(z1 + 4.0) < 1e-12 and abs(z2 + 112.0) < 1e-12

    g = families.make("g", a=2.5).map
    assert abs(map_eval(g, 0.0) - 2.5) < 1e-12
    assert abs(map_eval(g, 2.5)) < 1e-12
    assert abs(deriv_eval(g, 29.0 / 15.0)) < 1e-12

    fp = families.make("para_cubic", a=-1.05).map
    assert abs(map_eval(fp, 1.0) - 1.0) < 1e-12
    assert abs(deriv_eval(fp, 1.0) - 1.0) < 1e-12
    assert abs(map_eval(fp, 0.0) - 22.0 / 23.0) < 1e-9
    # free critical value; exact rational value 30091/32000 = 0.94034375
    assert abs(map_eval(fp, 1.575) - 30091.0 / 32000.0) < 1e-9

    h = families.make("h", a=1.05).map
    assert abs(map_eval(h, 1.05) - 1.05) < 1e-9
    assert abs(deriv_eval(h, 1.05) - 1.0) < 1e-6
    assert abs(deriv_eval(h, 0.634375)) < 1e-9

    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"\nCRITERION 1: PASS - algebraic identities ({elapsed * 1e3:.0f} ms)")


_VERDICT_CASES = [
    ("cubic_bubble", {}, None, "CantorBubbles"),
    ("g", {"a": 2.5}, None, "CantorBubbles"),
    ("g", {"a": 0.5}, None, "not-bubbles"),
    ("devaney_marotta", {}, None, "CantorBubbles"),
    ("mcmullen", {"n": 3, "m": 3, "lam": 1e-3}, None, "CantorCirclesLike"),
    ("mcmullen", {"n": 2, "m": 2, "lam": 100.0}, None, "CantorLike"),
]


def test_criterion_2_topology_verdicts():
    for name, params, budget, expected in _VERDICT_CASES:
        got = {}
        for res in (512, 1024):
            v, dt = verdict_for(name, res, budget, **params)
            assert dt < 60.0, (name, params, res, dt)
            got[res] = v
        lo, hi = got[512], got[1024]
        if expected == "not-bubbles":
            assert lo.topology_class != "CantorBubbles"
            assert hi.topology_class != "CantorBubbles"
        else:
            assert hi.topology_class == expected, (name, params,
                                                   hi.topology_class)
            assert lo.topology_class == expected, (name, params,
                                                   lo.topology_class)
        assert lo.topology_class == hi.topology_class  # resolution stability

    # the quadratic-like cubic needs all three hypotheses affirmative
    v, _ = verdict_for("cubic_bubble", 1024)
    assert v.all_yes

    # negative control: 0 and 0.5 share a Fatou region for g at a=1/2
    _, _, _, grid_half, _ = pipeline("g", 1024, a=0.5)
    assert topology.same_component(grid_half, 0.0, 0.5)
    _, _, _, grid_two5, _ = pipeline("g", 1024, a=2.5)
    assert not topology.same_component(grid_two5, 0.0, 2.5)
    print("\nCRITERION 2: PASS - verdicts correct and stable 512/1024")


def test_criterion_3_parabolic_maps():
    # parabolic boundaries converge sub-geometrically; budget 1e5 and the
    # relaxed 10% undecided ceiling apply
    for name, params in (("para_cubic", {"a": -1.05}), ("h", {"a": 1.05})):
        v, _ = verdict_for(name, 512, 100000, **params)
        assert v.topology_class == "CantorBubbles", (name, v.topology_class)
        assert v.undecided_fraction <= 0.10, (name, v.undecided_fraction)
    print("\nCRITERION 3: PASS - parabolic maps classified as bubbles")


def test_criterion_4_superattracting_solver():
    r1 = solver.solve_superattracting(1, 2.5)
    assert abs(r1.parameter - 3.0) < 1e-12 and r1.residual <= 1e-12

    r2 = solver.solve_superattracting(2, 2.5)
    assert abs(r2.parameter - 2.6180339887498949) < 1e-9
    assert r2.newton_iters <= 20

    solved = [r1, r2, solver.solve_superattracting(3, 2.3)]
    for r in solved:
        inst = families.make("solver_cubic", v=r.parameter)
        ok, mult = solver.verify_superattracting(inst, 1.0, r.cycle.period)
        assert ok and abs(mult) <= 1e-9

    # a solved parameter with escaping co-critical point realizes bubbles
    assert r1.other_critical_fate.kind == "escape"
    echo = criterion.check_theorem1(families.make("solver_cubic",
                                                  v=r1.parameter),
                                    resolution=512)
    assert echo.topology_class == "CantorBubbles"
    print("\nCRITERION 4: PASS - solver roots, verification, bubbles echo")


def test_criterion_5_box_dimension():
    inst = make_square_instance()
    att = dynamics.find_attractors(inst)
    win = render.Window.square(0, 4.0, 2048)
    grid = render.render_grid(inst, win, att)
    pot = dynamics.escape_potential_grid(inst.map, grid,
                                         dynamics.escape_radius(inst.map))
    fit = topology.box_dimension(grid, topology.julia_mask(grid, pot))
    assert 0.9 <= fit["slope"] <= 1.1, fit
    assert fit["r2"] >= 0.99, fit

    _, _, _, grid2, _ = pipeline("cubic_bubble", 1024)
    pot2 = dynamics.escape_potential_grid(
        families.make("cubic_bubble").map, grid2,
        dynamics.escape_radius(families.make("cubic_bubble").map))
    fit2 = topology.box_dimension(grid2, topology.julia_mask(grid2, pot2))
    assert fit2["slope"] > 1.0, fit2
    print(f"\nCRITERION 5: PASS - dim(circle)={fit['slope']:.3f} "
          f"(r2={fit['r2']:.4f}), bubble Julia dim={fit2['slope']:.3f}")


def test_criterion_6_curve_geometry():
    # turning constant of the extracted unit circle
    inst = make_square_instance()
    att = dynamics.find_attractors(inst)
    win = render.Window.square(0, 4.0, 512)
    grid = render.render_grid(inst, win, att)
    pot = dynamics.escape_potential_grid(inst.map, grid,
                                         dynamics.escape_radius(inst.map))
    graph = topology.label_components(grid, pot)
    disk = max((c for c in graph.components if c.kind == kernels.ATTRACTED),
               key=lambda c: c.pixels)
    circle = topology.extract_boundary(graph, disk.id)
    turning = metrics.bounded_turning(circle, pixel_width=win.pixel_width)
    assert turning <= 1.2, turning

    # pairwise relative separation of the largest bubble curves, stable in
    # resolution
    seps = {}
    for res in (512, 1024):
        inst_b, _, win_b, _, graph_b = pipeline("cubic_bubble", res)
        curves = topology.largest_bounded_curves(graph_b, n=30)
        rep = metrics.separation_report(curves, max_curves=30)
        assert rep.min_delta > 0
        seps[res] = rep.min_delta
        cad = metrics.critical_accumulation_distance(inst_b, curves)
        assert cad > 0
    drift = abs(seps[512] - seps[1024]) / min(seps.values())
    assert drift <= 0.30, seps

    # critical orbits stay away from the parabolic blob boundary as well
    inst_p, _, _, _, graph_p = pipeline("para_cubic", 512, 100000, a=-1.05)
    curves_p = topology.largest_bounded_curves(graph_p, n=5)
    assert curves_p
    cad_p = metrics.critical_accumulation_distance(inst_p, curves_p)
    assert cad_p > 0
    print(f"\nCRITERION 6: PASS - turning={turning:.3f}, "
          f"min separation {seps[512]:.3f}/{seps[1024]:.3f}, "
          f"accumulation distances positive")


def test_criterion_7_infrastructure(tmp_path):
    # byte-identical images and reports across worker counts
    inst = families.make("cubic_bubble")
    att = dynamics.find_attractors(inst)
    win = render.Window.square(0, 4.0, 512)
    paths = {}
    for workers in (1, 8):
        grid = render.render_grid(inst, win, att, workers=workers)
        p = tmp_path / f"w{workers}.ppm"
        render.write_ppm(grid, render.default_palette, p)
        paths[workers] = p.read_bytes()
    assert paths[1] == paths[8]

    reports = {}
    for workers in (1, 8):
        out = tmp_path / "report.json"
        rc = cli.run(["criterion", "--family", "g", "--a", "2.5",
                      "--res", "256", "--workers", str(workers),
                      "--out", str(out)])
        assert rc == 0
        text = out.read_text().replace(f'"workers": {workers}',
                                       '"workers": N')
        reports[workers] = text
    assert reports[1] == reports[8]

    # analytic derivative vs central finite difference on every family
    rng = np.random.default_rng(3)
    for entry in families.list_families():
        f = families.make(entry["name"]).map
        checked = 0
        for _ in range(40):
            z = complex(*rng.uniform(-1.5, 1.5, 2))
            d = deriv_eval(f, z)
            if is_inf(d) or abs(d) < 1e-3 or abs(complex(f.den(z))) < 1e-2:
                continue
            h = 1e-6
            fd = (map_eval(f, z + h) - map_eval(f, z - h)) / (2 * h)
            fdi = (map_eval(f, z + 1j * h) - map_eval(f, z - 1j * h)) / (2j * h)
            assert abs(d - fd) / abs(d) < 1e-6, (entry["name"], z)
            assert abs(d - fdi) / abs(d) < 1e-6, (entry["name"], z)
            checked += 1
        assert checked >= 10, entry["name"]

    # critical points counted with multiplicity satisfy the degree identity
    for entry in families.list_families():
        f = families.make(entry["name"]).map
        assert sum(m - 1 for _, m in critical_points(f)) == 2 * f.degree - 2
    print("\nCRITERION 7: PASS - determinism, derivatives, critical counts")
