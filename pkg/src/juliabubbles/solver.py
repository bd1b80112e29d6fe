"""Parameter solving for superattracting cycles in the marked cubic slice.

The slice is f_v(z) = z^3 - 3z + v with critical points +-1. Newton's method
on G(v) = f_v^p(1) - 1 finds parameters where the orbit of the marked
critical point 1 closes up with period p; the cycle is then automatically
superattracting. Roots whose exact period divides p properly are rejected
rather than deflated, since the composition polynomial is only available
pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import criterion, dynamics, families
from .errors import NoConvergenceError, WrongPeriodError
from .rmap import Cycle, cycle_multiplier, is_inf, map_eval

TAU_SOLVE = 1e-12
TAU_CYCLE = 1e-9
_MARKED = 1.0 + 0j      # critical point whose orbit is driven onto a cycle
_CO_CRITICAL = -1.0 + 0j


@dataclass
class SolveResult:
    parameter: complex
    residual: float
    newton_iters: int
    cycle: Cycle
    other_critical_fate: dynamics.OrbitFate
    verdict: object = None          # CriterionVerdict when chained


def _orbit_return(v, p):
    """Deflated return value of the marked orbit, or None when it blows up.

    The raw objective is G_p(v) = f_v^p(1) - 1. Every root of G_q for a
    proper divisor q of p is also a root of G_p, so Newton on the pointwise
    quotient G_p / prod_q G_q cannot be captured by lower-period solutions
    (no coefficient-level deflation is needed: the G_q are the intermediate
    orbit values).
    """
    f = families.make("solver_cubic", v=v).map
    z = _MARKED
    returns = {}
    for k in range(1, p + 1):
        z = map_eval(f, z)
        if is_inf(z) or abs(z) > 1e12:
            return None
        if p % k == 0:
            returns[k] = z - _MARKED
    g = returns[p]
    for q, gq in returns.items():
        if q == p:
            continue
        if abs(gq) < 1e-300:
            return None        # sitting exactly on a lower-period root
        g /= gq
    return g


def _exact_period(f, z0, p, tol=TAU_CYCLE):
    """Smallest q <= p with f^q(z0) ~ z0, or 0 if none closes up."""
    z = z0
    for q in range(1, p + 1):
        z = map_eval(f, z)
        if is_inf(z):
            return 0
        if abs(z - z0) <= tol * (1.0 + abs(z0)):
            return q
    return 0


def verify_superattracting(instance, point, p):
    """(is a superattracting cycle of exact period p through point, multiplier).

    True requires the orbit of the point to return within tolerance at step p
    and at no earlier step, with cycle multiplier of magnitude <= tolerance.
    """
    f = instance.map if isinstance(instance, families.FamilyInstance) else instance
    z0 = complex(point)
    if _exact_period(f, z0, p) != p:
        return False, None
    pts = [z0]
    z = z0
    for _ in range(p - 1):
        z = map_eval(f, z)
        pts.append(z)
    mult = cycle_multiplier(f, pts)
    return abs(mult) <= TAU_CYCLE, mult


def solve_superattracting(p, v0, max_iters=50, chain_criterion=False,
                          resolution=512):
    """Newton solve for a parameter whose marked cycle has exact period p.

    Central-difference derivative with step 1e-7 (1 + |v|); steps are halved
    (up to 12 times) whenever |G| fails to decrease. Raises NoConvergenceError
    after max_iters without reaching the residual target, WrongPeriodError
    when the limit parameter closes up at a proper divisor of p (a root of a
    lower-period component of G).
    """
    if p < 1:
        raise ValueError("period must be at least 1")
    v = complex(v0)
    g = _orbit_return(v, p)
    if g is None:
        raise NoConvergenceError(f"orbit of 1 escapes at the start v0={v0}")
    iters = 0
    for iters in range(1, max_iters + 1):
        if abs(g) <= TAU_SOLVE:
            break
        h = 1e-7 * (1.0 + abs(v))
        gp = _orbit_return(v + h, p)
        gm = _orbit_return(v - h, p)
        if gp is None or gm is None:
            raise NoConvergenceError(f"orbit escapes near v={v:.6g}")
        dg = (gp - gm) / (2.0 * h)
        if abs(dg) < 1e-300:
            raise NoConvergenceError(f"vanishing derivative at v={v:.6g}")
        step = g / dg
        for _ in range(12):
            g_new = _orbit_return(v - step, p)
            if g_new is not None and abs(g_new) < abs(g):
                break
            step /= 2.0
        else:
            raise NoConvergenceError(f"damped step stalled at v={v:.6g}")
        v -= step
        g = g_new
    if abs(g) > TAU_SOLVE:
        raise NoConvergenceError(
            f"residual {abs(g):.3e} after {max_iters} iterations from v0={v0}")

    instance = families.make("solver_cubic", v=v)
    f = instance.map
    z = _MARKED
    for _ in range(p):
        z = map_eval(f, z)
    residual = abs(z - _MARKED)          # raw, undeflated
    if residual > TAU_SOLVE:
        raise NoConvergenceError(
            f"raw residual {residual:.3e} above target at v={v:.6g}")
    q = _exact_period(f, _MARKED, p)
    if q != p:
        raise WrongPeriodError(p, q, v)
    pts = [_MARKED]
    z = _MARKED
    for _ in range(p - 1):
        z = map_eval(f, z)
        pts.append(z)
    cyc = Cycle(points=pts, period=p, multiplier=cycle_multiplier(f, pts))
    cyc.kind = cyc.classify()
    instance.known_cycles.append(cyc)

    attractors = dynamics.find_attractors(instance)
    fate = dynamics.classify_orbit(f, _CO_CRITICAL, attractors)
    verdict = None
    if chain_criterion:
        verdict = criterion.check_theorem1(instance, resolution=resolution,
                                           attractors=attractors)
    return SolveResult(parameter=v, residual=float(residual), newton_iters=iters,
                       cycle=cyc, other_critical_fate=fate, verdict=verdict)
