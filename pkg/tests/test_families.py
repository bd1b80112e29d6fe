import numpy as np
import pytest

from juliabubbles import families
from juliabubbles.errors import ExcludedParameterError
from juliabubbles.rmap import deriv_eval, map_eval


def test_catalog_listing():
    listing = families.list_families()
    names = {e["name"] for e in listing}
    assert names == {"mcmullen", "devaney_marotta", "gen_mcmullen",
                     "para_cubic", "cubic_bubble", "p1_cubic", "g", "h",
                     "solver_cubic"}
    for entry in listing:
        assert entry["formula"]
        assert isinstance(entry["params"], dict)


def test_unknown_family():
    with pytest.raises(KeyError):
        families.make("nope")


def test_all_defaults_validate():
    for entry in families.list_families():
        inst = families.make(entry["name"])
        inst.validate()


@pytest.mark.parametrize("name,key,value", [
    ("mcmullen", "lam", 0.0),
    ("g", "a", 0.0),
    ("para_cubic", "a", -1.0),
    ("para_cubic", "a", -2.0 / 3.0),
    ("h", "a", 2.0),
    ("h", "a", 0.75),
    ("devaney_marotta", "a", 0.0),
])
def test_excluded_parameters(name, key, value):
    with pytest.raises(ExcludedParameterError):
        families.make(name, **{key: value})


def test_mcmullen_formula():
    f = families.make("mcmullen", n=3, m=2, lam=0.5).map
    z = 1.3 - 0.4j
    assert map_eval(f, z) == pytest.approx(z ** 3 + 0.5 / z ** 2)


def test_devaney_marotta_formula():
    inst = families.make("devaney_marotta")
    a = inst.params["a"]
    lam = inst.params["lam"]
    z = 0.9 + 0.1j
    assert map_eval(inst.map, z) == pytest.approx(z ** 4 + lam / (z - a) ** 4)


def test_gen_mcmullen_formula():
    f = families.make("gen_mcmullen", n=2, a=1e-3, b=1e-2).map
    z = 0.8 + 0.3j
    assert map_eval(f, z) == pytest.approx(z ** 2 + 1e-3 / z ** 2 + 1e-2)


def test_p1_cubic_orbit():
    f = families.make("p1_cubic").map
    z1 = map_eval(f, 2.0)
    z2 = map_eval(f, z1)
    assert abs(z1 - (-4.0)) < 1e-12
    assert abs(z2 - (-112.0)) < 1e-12


def test_g_cycle_and_critical_point():
    inst = families.make("g", a=2.5)
    f = inst.map
    assert map_eval(f, 0.0) == pytest.approx(2.5)
    assert abs(map_eval(f, 2.5)) < 1e-12
    # free critical point (2/3)(a + 1/a)
    c0 = (2.0 / 3.0) * (2.5 + 1.0 / 2.5)
    assert c0 == pytest.approx(29.0 / 15.0)
    assert abs(deriv_eval(f, c0)) < 1e-12


def test_para_cubic_identities():
    inst = families.make("para_cubic", a=-1.05)
    f = inst.map
    assert map_eval(f, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert deriv_eval(f, 1.0) == pytest.approx(1.0, abs=1e-12)
    # f(0) = (1+2a)/(2+3a) = 22/23
    assert map_eval(f, 0.0) == pytest.approx(22.0 / 23.0, abs=1e-9)
    # free critical value f(-3a/2) = 30091/32000 exactly
    assert map_eval(f, -3 * (-1.05) / 2) == pytest.approx(30091.0 / 32000.0,
                                                          abs=1e-9)


def test_h_identities():
    inst = families.make("h", a=1.05)
    f = inst.map
    a = 1.05
    assert map_eval(f, a) == pytest.approx(a, abs=1e-9)
    assert deriv_eval(f, a) == pytest.approx(1.0, abs=1e-6)
    c1 = a * (9 * a - 8) / (2 * (4 * a - 3))
    assert c1 == pytest.approx(0.634375)
    assert abs(deriv_eval(f, c1)) < 1e-9
    assert abs(map_eval(f, 0.0)) < 1e-12 and abs(deriv_eval(f, 0.0)) < 1e-12


def test_known_critical_points_are_critical():
    # critical points are zeros of f' or multiple poles (where f' blows up)
    from juliabubbles.rmap import is_inf
    for entry in families.list_families():
        inst = families.make(entry["name"])
        for c in inst.known_critical:
            if is_inf(c):
                continue
            if abs(complex(inst.map.den(c))) < 1e-9:
                continue  # multiple pole: critical, but f' blows up there
            d = deriv_eval(inst.map, c)
            assert abs(d) < 1e-6, (entry["name"], c)
