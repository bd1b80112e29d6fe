"""Spherical geometry of plane sets: chordal metric, separation, turning.

All measurements act on finite point samples (boundary polylines, pixel
centers), so the results are estimates of the underlying continuous
quantities, deterministic for a fixed sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import escape_radius
from .errors import DegenerateSetError
from .rmap import is_inf, map_eval

_DEGENERATE_DIAM = 1e-12


def chordal_distance(z, w) -> float:
    """Chordal metric on the sphere: 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)).

    Either argument may be the point at infinity; the limit 2/sqrt(1+|z|^2)
    is used, and the distance between infinity and itself is 0.
    """
    zi, wi = is_inf(z), is_inf(w)
    if zi and wi:
        return 0.0
    if zi:
        return 2.0 / math.sqrt(1.0 + abs(complex(w)) ** 2)
    if wi:
        return 2.0 / math.sqrt(1.0 + abs(complex(z)) ** 2)
    z, w = complex(z), complex(w)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def _scales(pts):
    return 2.0 / np.sqrt(1.0 + np.abs(pts) ** 2)


def chordal_diameter(points) -> float:
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if pts.size < 2:
        return 0.0
    if pts.size > 2000:
        step = pts.size // 2000 + 1
        pts = pts[::step]
    s = _scales(pts)
    d = np.abs(pts[:, None] - pts[None, :]) * (s[:, None] * s[None, :]) / 2.0
    return float(d.max())


def set_distance(a, b) -> float:
    """Minimal chordal distance between two finite point sets."""
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    sa, sb = _scales(a), _scales(b)
    d = np.abs(a[:, None] - b[None, :]) * (sa[:, None] * sb[None, :]) / 2.0
    return float(d.min())


def relative_distance(a, b) -> float:
    """dist(A, B) / min(diam A, diam B), all in the chordal metric."""
    da, db = chordal_diameter(a), chordal_diameter(b)
    m = min(da, db)
    if m < _DEGENERATE_DIAM:
        raise DegenerateSetError(f"set diameter {m:.3e} below {_DEGENERATE_DIAM}")
    return set_distance(a, b) / m


# ---------------------------------------------------------------------------
# bounded turning (quasicircle witness)
# ---------------------------------------------------------------------------

def _curve_points(curve):
    pts = np.asarray(curve.points if hasattr(curve, "points") else curve,
                     dtype=np.complex128)
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    return pts


def _arc_chordal_diameter(pts, s, i, j):
    """Chordal diameter of the closed-polyline arc from vertex i to j."""
    n = len(pts)
    if i <= j:
        arc, sc = pts[i:j + 1], s[i:j + 1]
    else:
        arc = np.concatenate([pts[i:], pts[:j + 1]])
        sc = np.concatenate([s[i:], s[:j + 1]])
    if len(arc) > 256:
        idx = np.unique(np.linspace(0, len(arc) - 1, 256).astype(int))
        arc, sc = arc[idx], sc[idx]
    d = np.abs(arc[:, None] - arc[None, :]) * (sc[:, None] * sc[None, :]) / 2.0
    return float(d.max())


def bounded_turning(curve, n_pairs=200, min_sep=None, pixel_width=None):
    """Turning constant estimate of a closed curve (chordal metric).

    For vertex pairs (x, y) the curve splits into two subarcs; the statistic
    is max over pairs of min(diam arc1, diam arc2) / dist(x, y). Pairs closer
    than min_sep (default 3 pixel widths, euclidean, when known) are excluded
    so pixel quantization noise cannot dominate. The pair sequence is a fixed
    design enumerated in order, so the estimate is monotone nondecreasing in
    n_pairs.
    """
    pts = _curve_points(curve)
    n = len(pts)
    if n < 8:
        raise DegenerateSetError("curve has too few vertices")
    if min_sep is None:
        min_sep = 3.0 * pixel_width if pixel_width else 0.0
    s = _scales(pts)
    best = 0.0
    used = 0
    k = 0
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    while used < n_pairs and k < 50 * n_pairs:
        i = (k * 7919) % n
        j = (i + max(1, int((0.5 * phi * (1 + (k % 17)) / 17 + 0.1) * n))) % n
        k += 1
        if i == j:
            continue
        if abs(pts[i] - pts[j]) <= min_sep:
            continue
        chord = chordal_distance(pts[i], pts[j])
        if chord == 0.0:
            continue
        used += 1
        d1 = _arc_chordal_diameter(pts, s, i, j)
        d2 = _arc_chordal_diameter(pts, s, j, i)
        best = max(best, min(d1, d2) / chord)
    if used == 0:
        raise DegenerateSetError("no admissible vertex pairs")
    return best


@dataclass
class CurveGeometry:
    turning: float          # bounded-turning constant estimate, >= 1 in theory
    roundness: float        # max/min euclidean distance to the centroid
    diameter: float         # chordal diameter


def curve_geometry(curve, n_pairs=200, pixel_width=None) -> CurveGeometry:
    pts = _curve_points(curve)
    c = pts.mean()
    r = np.abs(pts - c)
    rmin = float(r.min())
    roundness = float(r.max() / rmin) if rmin > 0 else math.inf
    return CurveGeometry(
        turning=bounded_turning(pts, n_pairs=n_pairs, pixel_width=pixel_width),
        roundness=roundness,
        diameter=chordal_diameter(pts),
    )


# ---------------------------------------------------------------------------
# relative separation of curve families
# ---------------------------------------------------------------------------

@dataclass
class SeparationReport:
    curve_count: int
    min_delta: float
    deltas: np.ndarray      # condensed pairwise relative distances


def separation_report(curves, max_curves=30) -> SeparationReport:
    """Pairwise relative distances among the largest curves (by diameter)."""
    samples = [_curve_points(c) for c in curves]
    samples = [p for p in samples if len(p) >= 2]
    samples.sort(key=lambda p: -chordal_diameter(p))
    samples = samples[:max_curves]
    if len(samples) < 2:
        raise DegenerateSetError("need at least two curves")
    deltas = []
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            deltas.append(relative_distance(samples[i], samples[j]))
    deltas = np.array(deltas)
    return SeparationReport(curve_count=len(samples),
                            min_delta=float(deltas.min()), deltas=deltas)


def critical_accumulation_distance(instance, curves, tail_start=100,
                                   tail_len=50) -> float:
    """Minimal chordal distance from non-escaping critical orbit tails to
    the curves; escaping critical orbits contribute nothing."""
    from .rmap import critical_points
    f = instance.map
    radius = escape_radius(f)
    tails = []
    for c0, _deg in critical_points(f):
        if is_inf(c0):
            continue
        z = complex(c0)
        escaped = False
        for _ in range(tail_start):
            z = map_eval(f, z)
            if is_inf(z) or abs(z) > radius:
                escaped = True
                break
        if escaped:
            continue
        for _ in range(tail_len):
            tails.append(z)
            z = map_eval(f, z)
            if is_inf(z) or abs(z) > radius:
                break
    if not tails:
        return math.inf
    tails = np.array(tails, dtype=np.complex128)
    return min(set_distance(_curve_points(c), tails) for c in curves)
