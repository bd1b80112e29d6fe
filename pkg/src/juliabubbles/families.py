"""Constructors for the concrete map families under study.

Each family bundles the rational map with analytically known fixed points,
cycles and critical points so downstream stages can cross-check numerics
against closed forms. All coefficient vectors were derived by hand once and
are unit-tested against direct formula evaluation at random points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ExcludedParameterError
from .rmap import (
    INF,
    Cycle,
    RationalMap,
    cycle_multiplier,
    is_inf,
    map_deriv_raw,
    map_eval,
    poly_eval,
    poly_mul,
    poly_pow,
)

_EXCL_GUARD = 1e-12


@dataclass
class FamilyInstance:
    map: RationalMap
    name: str
    params: dict
    known_cycles: list = field(default_factory=list)
    known_critical: list = field(default_factory=list)

    def validate(self, tau_cycle=1e-9, tau_root=1e-9):
        """Check metadata invariants: cycles close up, criticals annihilate f'."""
        f = self.map
        for cyc in self.known_cycles:
            for i, z in enumerate(cyc.points):
                w = map_eval(f, z)
                tgt = cyc.points[(i + 1) % cyc.period]
                if is_inf(tgt) != is_inf(w):
                    raise AssertionError(f"{self.name}: cycle does not close at {z}")
                if not is_inf(tgt):
                    if abs(w - tgt) > tau_cycle * (1.0 + abs(tgt)):
                        raise AssertionError(
                            f"{self.name}: |f({z}) - {tgt}| = {abs(w - tgt):.2e}"
                        )
            m = cycle_multiplier(f, cyc.points)
            if abs(m - cyc.multiplier) > 1e-6 * (1.0 + abs(m)):
                raise AssertionError(f"{self.name}: multiplier mismatch {m}")
        dnum, _ = map_deriv_raw(f)
        scale = float(np.max(np.abs(dnum)))
        for c in self.known_critical:
            if is_inf(c):
                if f.num.degree < f.den.degree + 2:
                    raise AssertionError(f"{self.name}: infinity is not critical")
                continue
            v = abs(poly_eval(dnum, c))
            if v > tau_root * scale * max(1.0, abs(c)) ** max(len(dnum) - 1, 0):
                raise AssertionError(
                    f"{self.name}: critical point {c} has f'-numerator {v:.2e}"
                )
        return True


def _guard(name, key, value, excluded):
    for ex, label in excluded:
        if abs(value - ex) <= _EXCL_GUARD:
            raise ExcludedParameterError(name, key, value, label)


def _inf_cycle():
    return Cycle(points=[INF], period=1, multiplier=0j, kind="superattracting")


def _make_mcmullen(n=2, m=2, lam=1e-3):
    n, m = int(n), int(m)
    if n < 2 or m < 1:
        raise ExcludedParameterError("mcmullen", "n,m", (n, m), "n>=2, m>=1")
    lam = complex(lam)
    _guard("mcmullen", "lam", lam, [(0.0, "lam != 0")])
    num = np.zeros(n + m + 1, dtype=np.complex128)
    num[0] = lam
    num[-1] = 1.0
    den = np.zeros(m + 1, dtype=np.complex128)
    den[-1] = 1.0
    f = RationalMap(num, den)
    crit = [INF]
    if m >= 2:
        crit.append(0j)
    # ring critical points: n z^(n+m) = m lam
    w = (m * lam / n) ** (1.0 / (n + m))
    crit.extend(w * np.exp(2j * np.pi * np.arange(n + m) / (n + m)))
    return FamilyInstance(f, "mcmullen", {"n": n, "m": m, "lam": lam},
                          [_inf_cycle()], crit)


def _make_devaney_marotta(n=4, m=4, lam=1e-4 * np.exp(4j * np.pi / 3),
                          a=0.5 * np.exp(1j * np.pi / 4)):
    n, m = int(n), int(m)
    if n < 2 or m < 1:
        raise ExcludedParameterError("devaney_marotta", "n,m", (n, m), "n>=2, m>=1")
    lam, a = complex(lam), complex(a)
    _guard("devaney_marotta", "lam", lam, [(0.0, "lam != 0")])
    _guard("devaney_marotta", "a", a, [(0.0, "a != 0")])
    zn = np.zeros(n + 1, dtype=np.complex128)
    zn[-1] = 1.0
    pole = poly_pow(np.array([-a, 1.0]), m)
    num = poly_mul(zn, pole)
    num[0] += lam
    f = RationalMap(num, pole)
    crit = [INF]
    if m >= 2:
        crit.append(a)
    return FamilyInstance(f, "devaney_marotta",
                          {"n": n, "m": m, "lam": lam, "a": a},
                          [_inf_cycle()], crit)


def _make_gen_mcmullen(n=2, a=1e-3, b=1e-2):
    n = int(n)
    if n < 2:
        raise ExcludedParameterError("gen_mcmullen", "n", n, "n>=2")
    a, b = complex(a), complex(b)
    _guard("gen_mcmullen", "a", a, [(0.0, "a != 0")])
    _guard("gen_mcmullen", "b", b, [(0.0, "b != 0")])
    num = np.zeros(2 * n + 1, dtype=np.complex128)
    num[0] = a
    num[n] = b
    num[-1] = 1.0
    den = np.zeros(n + 1, dtype=np.complex128)
    den[-1] = 1.0
    f = RationalMap(num, den)
    crit = [INF]
    if n >= 2:
        crit.append(0j)
    w = a ** (1.0 / (2 * n))
    crit.extend(w * np.exp(2j * np.pi * np.arange(2 * n) / (2 * n)))
    return FamilyInstance(f, "gen_mcmullen", {"n": n, "a": a, "b": b},
                          [_inf_cycle()], crit)


def _make_para_cubic(a=-1.05):
    a = complex(a)
    _guard("para_cubic", "a", a,
           [(0.0, "a != 0"), (-1.0, "a != -1"), (-2.0 / 3.0, "a != -2/3")])
    b = (1 + a) ** 2 / (2 + 3 * a)
    c = (1 + 2 * a) / (1 + a) ** 2
    d = a * (1 + 2 * a) / (1 + a) ** 2
    num = b * np.array([d, c, 0.0, 1.0], dtype=np.complex128)
    den = np.array([a, 1.0], dtype=np.complex128)
    f = RationalMap(num, den)
    cycles = [
        _inf_cycle(),
        Cycle(points=[1.0 + 0j], period=1, multiplier=1.0 + 0j, kind="parabolic"),
    ]
    crit = [0j, -1.5 * a, INF]
    return FamilyInstance(f, "para_cubic", {"a": a}, cycles, crit)


def _make_cubic_bubble(a=0.06 + 1.31j):
    a = complex(a)
    num = np.array([0.0, 0.0, 1.5 * a, 1.0], dtype=np.complex128)
    f = RationalMap(num)
    cycles = [
        _inf_cycle(),
        Cycle(points=[0j], period=1, multiplier=0j, kind="superattracting"),
    ]
    return FamilyInstance(f, "cubic_bubble", {"a": a}, cycles, [0j, -a, INF])


def _make_p1_cubic():
    f = RationalMap(np.array([0.0, 0.0, -3.0, 1.0], dtype=np.complex128))
    cycles = [
        _inf_cycle(),
        Cycle(points=[0j], period=1, multiplier=0j, kind="superattracting"),
    ]
    return FamilyInstance(f, "p1_cubic", {}, cycles, [0j, 2.0 + 0j, INF])


def _make_g(a=2.5):
    a = complex(a)
    _guard("g", "a", a, [(0.0, "a != 0")])
    s = a + 1.0 / a
    num = np.array([a, 0.0, -s, 1.0], dtype=np.complex128)
    f = RationalMap(num)
    cycles = [
        _inf_cycle(),
        Cycle(points=[0j, a], period=2, multiplier=0j, kind="superattracting"),
    ]
    crit = [0j, (2.0 / 3.0) * s, INF]
    return FamilyInstance(f, "g", {"a": a}, cycles, crit)


def _make_h(a=1.05):
    a = complex(a)
    _guard("h", "a", a, [(0.0, "a != 0"), (1.0, "a != 1"), (2.0, "a != 2"),
                         (0.75, "a != 3/4")])
    b = -a * (9 * a - 8)
    c = 6 * a * a - 4
    d = -4 * a + 3
    s = 2 * a * a * (a - 1) * (a - 2)
    num = np.array([0.0, 0.0, b / s, c / s, d / s], dtype=np.complex128)
    f = RationalMap(num)
    c1 = a * (9 * a - 8) / (2 * (4 * a - 3))
    cycles = [
        _inf_cycle(),
        Cycle(points=[0j], period=1, multiplier=0j, kind="superattracting"),
        Cycle(points=[a], period=1, multiplier=1.0 + 0j, kind="parabolic"),
    ]
    return FamilyInstance(f, "h", {"a": a}, cycles, [0j, 1.0 + 0j, c1, INF])


def _make_solver_cubic(v=0.0):
    v = complex(v)
    num = np.array([v, -3.0, 0.0, 1.0], dtype=np.complex128)
    f = RationalMap(num)
    return FamilyInstance(f, "solver_cubic", {"v": v}, [_inf_cycle()],
                          [1.0 + 0j, -1.0 + 0j, INF])


_CATALOG = [
    ("mcmullen", _make_mcmullen,
     "z^n + lam/z^m", {"n": "int >= 2", "m": "int >= 1", "lam": "complex != 0"}),
    ("devaney_marotta", _make_devaney_marotta,
     "z^n + lam/(z-a)^m",
     {"n": "int >= 2", "m": "int >= 1", "lam": "complex != 0", "a": "complex != 0"}),
    ("gen_mcmullen", _make_gen_mcmullen,
     "z^n + a/z^n + b", {"n": "int >= 2", "a": "complex != 0", "b": "complex != 0"}),
    ("para_cubic", _make_para_cubic,
     "b(z^3+cz+d)/(z+a), parabolic fixed point 1",
     {"a": "complex, not in {0, -1, -2/3}"}),
    ("cubic_bubble", _make_cubic_bubble,
     "(3/2) a z^2 + z^3", {"a": "complex"}),
    ("p1_cubic", _make_p1_cubic, "z^3 - 3z^2", {}),
    ("g", _make_g,
     "z^3 - (a + 1/a) z^2 + a, superattracting cycle {0, a}",
     {"a": "complex != 0"}),
    ("h", _make_h,
     "z^2(b + cz + dz^2) / (2a^2(a-1)(a-2)), parabolic fixed point a",
     {"a": "complex, not in {0, 1, 2, 3/4}"}),
    ("solver_cubic", _make_solver_cubic,
     "z^3 - 3z + v, marked critical points +-1", {"v": "complex"}),
]

_BUILDERS = {name: fn for name, fn, _, _ in _CATALOG}


def make(name: str, **params) -> FamilyInstance:
    """Build a family instance by catalog name."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown family {name!r}; see list_families()")
    return _BUILDERS[name](**params)


def list_families():
    """Stable, documented catalog: (name, formula, parameter schema)."""
    return [{"name": name, "formula": formula, "params": schema}
            for name, _, formula, schema in _CATALOG]
