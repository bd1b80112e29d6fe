import pytest

from juliabubbles import criterion, dynamics, families, render, topology

from conftest import make_square_instance


def test_classify_topology_names():
    assert criterion.CANTOR_BUBBLES == "CantorBubbles"
    assert criterion.CANTOR_CIRCLES == "CantorCirclesLike"
    assert criterion.CANTOR_LIKE == "CantorLike"


def test_square_map_is_connected_like():
    inst = make_square_instance()
    att = dynamics.find_attractors(inst)
    win = render.Window.square(0, 4.0, 256)
    grid = render.render_grid(inst, win, att)
    pot = dynamics.escape_potential_grid(inst.map, grid,
                                         dynamics.escape_radius(inst.map))
    graph = topology.label_components(grid, pot)
    assert criterion.classify_topology(graph, 0.0) == criterion.CONNECTED_LIKE


def test_undecided_demotes_to_unknown():
    inst = make_square_instance()
    att = dynamics.find_attractors(inst)
    win = render.Window.square(0, 4.0, 256)
    grid = render.render_grid(inst, win, att)
    graph = topology.label_components(grid)
    assert criterion.classify_topology(graph, 0.5) == criterion.UNKNOWN


def test_cubic_bubble_verdict_all_yes():
    inst = families.make("cubic_bubble")
    v = criterion.check_theorem1(inst, resolution=512)
    assert v.topology_class == criterion.CANTOR_BUBBLES
    assert v.all_yes
    assert bool(v.U_completely_invariant)
    assert bool(v.V_not_completely_invariant)
    assert bool(v.critical_values_in_UV)
    assert v.U_id != v.V_id and v.U_id > 0 and v.V_id > 0


def test_g_half_negative_control():
    v = criterion.check_theorem1(families.make("g", a=0.5), resolution=512)
    assert v.topology_class != criterion.CANTOR_BUBBLES
    assert not v.all_yes
    assert any("same" in n or "component" in n for n in v.notes)


def test_mcmullen_small_lambda_circles():
    inst = families.make("mcmullen", n=3, m=3, lam=1e-3)
    v = criterion.check_theorem1(inst, resolution=512)
    assert v.topology_class == criterion.CANTOR_CIRCLES


def test_mcmullen_large_lambda_cantor():
    inst = families.make("mcmullen", n=2, m=2, lam=100.0)
    v = criterion.check_theorem1(inst, resolution=512)
    assert v.topology_class == criterion.CANTOR_LIKE


def test_parabolic_quartic_bubbles():
    inst = families.make("h", a=1.05)
    v = criterion.check_theorem1(inst, resolution=512, budget=100000)
    assert v.topology_class == criterion.CANTOR_BUBBLES
    assert v.undecided_fraction <= criterion.PARABOLIC_UNDECIDED_THRESHOLD


def test_verdict_as_dict_round_trip():
    v = criterion.check_theorem1(families.make("cubic_bubble"), resolution=256)
    d = v.as_dict()
    assert d["topology_class"] == v.topology_class
    assert d["U_completely_invariant"]["value"] in ("yes", "no",
                                                    "inconclusive")
    assert isinstance(d["notes"], list)


def test_default_window_contains_special_points():
    inst = families.make("g", a=2.5)
    att = dynamics.find_attractors(inst)
    win = criterion.default_window(inst, att, 256)
    assert win.contains(0.0) and win.contains(2.5)
    assert win.contains(29.0 / 15.0)


def test_default_window_grows_for_parabolic_cubic():
    inst = families.make("para_cubic", a=-1.05)
    att = dynamics.find_attractors(inst)
    win = criterion.default_window(inst, att, 256)
    # the bounded non-escaping set reaches out to |z| ~ 2/|b| ~ 460
    assert win.width > 500


def test_tristate_truthiness():
    assert bool(criterion.TriState("yes", []))
    assert not bool(criterion.TriState("no", []))
    assert not bool(criterion.TriState("inconclusive", []))
