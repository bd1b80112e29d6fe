"""Orbit iteration and fate classification.

Fates: escape to infinity, convergence to an attracting/superattracting cycle,
parabolic convergence (sub-geometric, multiplier-1 cycles), or undecided.
Undecided is a value, not an error; undecided pixels later count toward the
Julia pixel set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .families import FamilyInstance
from .rmap import (
    INF,
    Cycle,
    RationalMap,
    critical_points,
    cycle_multiplier,
    deriv_eval,
    is_inf,
    map_eval,
)

EPS_TRAP = 1e-6      # chordal trap radius for (super)attracting cycles
EPS_PAR = 1e-3       # chordal convergence radius for parabolic points
PAR_START = 0.05     # chordal radius at which parabolic monitoring starts
PAR_WINDOW = 200     # monotone-decrease verification window


@dataclass
class AttractorSet:
    cycles: list            # Cycle objects with kind tags; INF cycle included
    escape_radius: float

    @property
    def inf_index(self):
        for i, c in enumerate(self.cycles):
            if any(is_inf(p) for p in c.points):
                return i
        return -1

    @property
    def has_parabolic(self):
        return any(c.kind == "parabolic" for c in self.cycles)

    def pack(self, f: RationalMap, eps_trap=EPS_TRAP, eps_par=EPS_PAR,
             par_start=PAR_START, window=PAR_WINDOW):
        tp, tp_cycle, tp_period = [], [], []
        pp, pp_cycle = [], []
        for i, c in enumerate(self.cycles):
            finite = [p for p in c.points if not is_inf(p)]
            if c.kind in ("superattracting", "attracting"):
                for p in finite:
                    tp.append(p)
                    tp_cycle.append(i)
                    tp_period.append(c.period)
            elif c.kind == "parabolic":
                for p in finite:
                    pp.append(p)
                    pp_cycle.append(i)
        return kernels.AttractorPack(
            f.num.coeffs, f.den.coeffs, self.escape_radius, self.inf_index,
            np.array(tp, dtype=np.complex128), np.array(tp_cycle, dtype=np.int16),
            np.array(tp_period, dtype=np.int32),
            np.array(pp, dtype=np.complex128), np.array(pp_cycle, dtype=np.int16),
            eps_trap=eps_trap, eps_par=eps_par, par_start=par_start, window=window)


@dataclass
class OrbitFate:
    kind: str               # "escape" | "attracted" | "parabolic" | "undecided"
    cycle: int = -1         # index into AttractorSet.cycles
    phase: int = -1
    iterations: int = 0
    final_point: object = None


_KIND_NAMES = {kernels.ESCAPE: "escape", kernels.ATTRACTED: "attracted",
               kernels.PARABOLIC: "parabolic", kernels.UNDECIDED: "undecided"}


def escape_radius(f: RationalMap, floor=4.0):
    """Radius beyond which orbits verifiably march to infinity.

    Polynomials use the Cauchy-style bound 1 + sum|c_i|/|lead| (floored).
    Rational maps that are polynomial-like at infinity get an empirically
    doubled radius where |f(z)| >= 2|z| on a circle sample.
    """
    if f.num.degree < f.den.degree + 2:
        raise ValueError("infinity is not superattracting for this map")
    c = f.num.coeffs
    base = 1.0 + float(np.sum(np.abs(c[:-1])) / abs(c[-1]))
    if f.is_polynomial:
        return max(floor, base)
    r = max(floor, base)
    theta = np.exp(2j * np.pi * np.arange(64) / 64)
    for _ in range(60):
        zs = r * theta
        vals = np.abs(np.asarray(f.num(zs)) / np.asarray(f.den(zs)))
        if np.all(vals >= 2.0 * r):
            return r
        r *= 2.0
    raise ValueError("could not find an escape radius")


def _detect_cycle(f: RationalMap, z, p_max=8, tol=1e-3):
    """Near-periodicity of the orbit tail at z; returns (period, points) or None."""
    pts = [z]
    w = z
    for _ in range(p_max):
        w = map_eval(f, w)
        if is_inf(w):
            return None
        pts.append(w)
    for p in range(1, p_max + 1):
        if abs(pts[p] - pts[0]) < tol * (1.0 + abs(pts[0])):
            return p, pts[:p]
    return None


def _newton_refine_cycle(f: RationalMap, z, p, iters=60, tol=1e-13):
    """Newton on f^p(z) - z, derivative by the chain rule."""
    for _ in range(iters):
        w = z
        dp = 1.0 + 0j
        ok = True
        for _ in range(p):
            d = deriv_eval(f, w)
            w = map_eval(f, w)
            if is_inf(w) or is_inf(d):
                ok = False
                break
            dp *= d
        if not ok:
            return z
        g = w - z
        dg = dp - 1.0
        if abs(dg) < 1e-300:
            break
        step = g / dg
        z = z - step
        if abs(step) < tol * (1.0 + abs(z)):
            break
    return z


def find_attractors(instance: FamilyInstance, budget: int = 10000) -> AttractorSet:
    """Metadata cycles plus cycles discovered from the critical orbits."""
    f = instance.map
    cycles = [Cycle(points=list(c.points), period=c.period,
                    multiplier=c.multiplier, kind=c.kind or c.classify())
              for c in instance.known_cycles]
    radius = escape_radius(f)

    def known(z):
        for c in cycles:
            for p in c.points:
                if not is_inf(p) and abs(p - z) < 1e-6 * (1.0 + abs(p)):
                    return True
        return False

    for c0, _deg in critical_points(f):
        if is_inf(c0):
            continue
        z = c0
        escaped = False
        for _ in range(budget):
            z = map_eval(f, z)
            if is_inf(z) or abs(z) > radius:
                escaped = True
                break
        if escaped:
            continue
        det = _detect_cycle(f, z)
        if det is None:
            continue
        p, _pts = det
        z0 = _newton_refine_cycle(f, z, p)
        if known(z0):
            continue
        pts = [z0]
        w = z0
        bad = False
        for _ in range(p - 1):
            w = map_eval(f, w)
            if is_inf(w):
                bad = True
                break
            pts.append(w)
        if bad:
            continue
        # exact period: drop to the smallest q | p that closes up
        period = p
        for q in range(1, p):
            if p % q == 0:
                wq = z0
                for _ in range(q):
                    wq = map_eval(f, wq)
                if not is_inf(wq) and abs(wq - z0) < 1e-9 * (1.0 + abs(z0)):
                    period = q
                    pts = pts[:q]
                    break
        cyc = Cycle(points=pts, period=period, multiplier=cycle_multiplier(f, pts))
        cyc.kind = cyc.classify()
        if cyc.kind in ("superattracting", "attracting", "parabolic"):
            cycles.append(cyc)
    return AttractorSet(cycles=cycles, escape_radius=radius)


def default_budget(attractors: AttractorSet) -> int:
    return 100000 if attractors.has_parabolic else 10000


def classify_orbit(f: RationalMap, z0, attractors: AttractorSet,
                   budget=None, pack=None) -> OrbitFate:
    """Fate of a single seed point."""
    if budget is None:
        budget = default_budget(attractors)
    if is_inf(z0):
        return OrbitFate(kind="escape", cycle=attractors.inf_index,
                         iterations=0, final_point=INF)
    if pack is None:
        pack = attractors.pack(f)
    kind, attr, iters = kernels.classify_points(complex(z0), pack, budget)
    k, a, n = _KIND_NAMES[int(kind[0])], int(attr[0]), int(iters[0])
    # replay the orbit for the final point and (if attracted) the phase
    z = complex(z0)
    for _ in range(n):
        z = map_eval(f, z)
        if is_inf(z):
            break
    phase = -1
    if k == "attracted" and not is_inf(z):
        cyc = attractors.cycles[a]
        finite = [(i, p) for i, p in enumerate(cyc.points) if not is_inf(p)]
        if finite:
            phase = min(finite, key=lambda ip: abs(ip[1] - z))[0]
    return OrbitFate(kind=k, cycle=a, phase=phase, iterations=n, final_point=z)


def critical_orbit_fates(instance: FamilyInstance, attractors: AttractorSet,
                         budget=None):
    """(critical point, fate) for every critical point; INF reports escape."""
    f = instance.map
    pack = attractors.pack(f)
    out = []
    for c, _deg in critical_points(f):
        if is_inf(c):
            out.append((INF, OrbitFate(kind="escape", cycle=attractors.inf_index,
                                       iterations=0, final_point=INF)))
        else:
            out.append((c, classify_orbit(f, c, attractors, budget=budget,
                                          pack=pack)))
    return out


def escape_potential_grid(f: RationalMap, grid, radius: float) -> np.ndarray:
    """Escape-rate potential at every Escape pixel of a classified grid.

    Uses the local degree at infinity d = deg num - deg den and the leading
    ratio c, with the tail correction log|c|/(d-1) so values are continuous
    across iteration-count bands:
        h = d^{-k} (log|z_k| + log|c|/(d-1))  at the first k with |z_k| > R.
    Non-escape pixels get 0. The potential vanishes toward the Julia set, so
    h divided by its per-pixel gradient approximates distance to J in pixels.
    """
    d = f.num.degree - f.den.degree
    if d < 2:
        raise ValueError("infinity is not superattracting for this map")
    corr = math.log(abs(f.num.coeffs[-1] / f.den.coeffs[-1])) / (d - 1)
    re = grid.window.re_axis()
    im = grid.window.im_axis()
    z = (re[None, :] + 1j * im[:, None]).ravel()
    esc = (grid.kind == kernels.ESCAPE).ravel()
    H = np.zeros(z.size, dtype=np.float64)
    idx = np.nonzero(esc)[0]
    zs = z[idx]
    budget = int(grid.iters.max()) + 16
    nrev = f.num.coeffs[::-1]
    drev = f.den.coeffs[::-1]
    for k in range(budget + 1):
        az = np.abs(zs)
        done = az > radius
        if np.any(done):
            di = idx[done]
            H[di] = (np.log(az[done]) + corr) * float(d) ** (-k)
            keep = ~done
            idx, zs = idx[keep], zs[keep]
            if idx.size == 0:
                break
        with np.errstate(all="ignore"):
            zs = np.polyval(nrev, zs) / np.polyval(drev, zs)
        bad = ~np.isfinite(zs)
        if np.any(bad):
            zs[bad] = 2.0 * radius   # went through a pole: escaping
    return H.reshape(grid.kind.shape)


def potential(instance, z, k_max: int = 200) -> float:
    """Escape-rate potential d^{-k} log_+|f^k(z)| at the first escaping index.

    Satisfies potential(f(z)) = d * potential(z) for escaping seeds; returns 0
    when the orbit stays bounded for k_max steps.
    """
    f = instance.map if isinstance(instance, FamilyInstance) else instance
    if not f.is_polynomial:
        raise ValueError("potential requires a polynomial map")
    d = f.degree
    radius = escape_radius(f)
    z = complex(z)
    for k in range(k_max + 1):
        az = abs(z)
        if az > radius:
            return max(math.log(az), 0.0) / d ** k
        z = complex(map_eval(f, z)) if not is_inf(z) else z
        if is_inf(z):
            return math.inf
    return 0.0
