"""Rational-map algebra on the Riemann sphere.

Maps are stored as pairs of polynomial coefficient vectors (ascending degree).
Infinity is an explicit tag (``INF``) rather than a large-magnitude sentinel,
since the maps of interest have superattracting behaviour at infinity and poles
where sentinel arithmetic corrupts classification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IndeterminateError,
    NoConvergenceError,
    PeriodTooLargeError,
)

# Default tolerances (double precision with headroom); all overridable per call.
TAU_ROOT = 1e-12
TAU_CLUSTER = 1e-8
TAU_GCD = 1e-10
TAU_CYCLE = 1e-9

DEGREE_CAP = 2000


class _Infinity:
    """Singleton marker for the point at infinity."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = _Infinity()


def is_inf(z) -> bool:
    return z is INF


# ---------------------------------------------------------------------------
# Polynomial helpers (coefficients ascending, trailing near-zeros trimmed)
# ---------------------------------------------------------------------------

def poly_trim(coeffs, rel=1e-14):
    """Normalize a coefficient vector: complex ndarray, trailing ~zeros cut."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).ravel()
    if c.size == 0:
        return c
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(0, dtype=np.complex128)
    keep = np.nonzero(np.abs(c) > rel * scale)[0]
    if keep.size == 0:
        return np.zeros(0, dtype=np.complex128)
    return c[: keep[-1] + 1]


def poly_degree(coeffs) -> int:
    c = poly_trim(coeffs)
    return len(c) - 1 if c.size else -1


def poly_eval(coeffs, z):
    """Horner evaluation; works for scalars and ndarrays of z."""
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.size == 0:
        return np.zeros_like(np.asarray(z, dtype=np.complex128))
    acc = np.full_like(np.asarray(z, dtype=np.complex128), c[-1])
    for k in range(c.size - 2, -1, -1):
        acc = acc * z + c[k]
    return acc


def poly_deriv(coeffs):
    c = poly_trim(coeffs)
    if c.size <= 1:
        return np.zeros(0, dtype=np.complex128)
    return c[1:] * np.arange(1, c.size)


def poly_mul(a, b):
    a = poly_trim(a)
    b = poly_trim(b)
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.complex128)
    return np.convolve(a, b)


def poly_add(a, b):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=np.complex128)
    out[: a.size] += a
    out[: b.size] += b
    return poly_trim(out)


def poly_sub(a, b):
    return poly_add(a, -np.asarray(b, dtype=np.complex128))


def poly_pow(a, k):
    out = np.ones(1, dtype=np.complex128)
    for _ in range(k):
        out = poly_mul(out, a)
    return out


def poly_divexact(num, den, rel=1e-9):
    """Divide num by den if the division is (numerically) exact.

    Returns the quotient, or None when the remainder is not negligible.
    """
    num = poly_trim(num)
    den = poly_trim(den)
    if den.size == 0:
        return None
    if num.size == 0:
        return num
    if num.size < den.size:
        return None
    q, r = np.polydiv(num[::-1], den[::-1])
    nscale = np.max(np.abs(num))
    if np.max(np.abs(r)) > rel * max(nscale, 1e-300):
        return None
    return poly_trim(q[::-1])


# ---------------------------------------------------------------------------
# Root finding: simultaneous Aberth-Ehrlich iteration
# ---------------------------------------------------------------------------

def poly_roots(coeffs, tol=TAU_ROOT, cluster_tol=TAU_CLUSTER, max_iter=400,
               seed=0, with_multiplicity=False):
    """All complex roots of a polynomial, with multiplicity estimates.

    Simultaneous (Aberth-Ehrlich) iteration from a randomized circle scaled by
    the Cauchy root bound. Clustered roots (pairwise distance < cluster_tol)
    are merged into a single root carrying the cluster size as multiplicity.
    """
    c = poly_trim(coeffs)
    n = c.size - 1
    if n < 1:
        raise ValueError("poly_roots requires degree >= 1")
    if n > DEGREE_CAP:
        raise PeriodTooLargeError(f"degree {n} exceeds cap {DEGREE_CAP}")
    if n == 1:
        roots = np.array([-c[0] / c[1]])
        return _cluster(roots, cluster_tol) if with_multiplicity else roots

    lead = c[-1]
    bound = 1.0 + float(np.max(np.abs(c[:-1] / lead)))
    rng = np.random.default_rng(seed)
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n + rng.uniform(0, 2 * np.pi / n)
    radii = 0.5 * bound * (1.0 + 0.1 * rng.uniform(-1, 1, size=n))
    z = radii * np.exp(1j * theta)

    dcoef = poly_deriv(c)
    cabs = np.abs(c)
    converged = False
    for _ in range(max_iter):
        p = poly_eval(c, z)
        # backward-error style residual: |p(z)| relative to sum |a_k||z|^k
        denom_scale = poly_eval(cabs, np.abs(z)).real
        res = np.abs(p) / np.maximum(denom_scale, 1e-300)
        if np.max(res) <= tol:
            converged = True
            break
        dp = poly_eval(dcoef, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = np.sum(1.0 / diff, axis=1) - 1.0  # remove diagonal 1/1 term
        corr = w / (1.0 - w * s)
        bad = ~np.isfinite(corr)
        if np.any(bad):
            corr = np.where(bad, w, corr)
        z = z - corr
        # resolve accidental collisions
        coll = np.abs(z[:, None] - z[None, :]) < 1e-300
        np.fill_diagonal(coll, False)
        if np.any(coll):
            z = z + 1e-12 * bound * rng.standard_normal(n)
    if not converged:
        p = poly_eval(c, z)
        denom_scale = poly_eval(cabs, np.abs(z)).real
        res = np.abs(p) / np.maximum(denom_scale, 1e-300)
        # multiple roots converge linearly; accept if backward error is tiny
        if np.max(res) > 1e3 * tol:
            raise NoConvergenceError(
                f"Aberth iteration: max residual {np.max(res):.3e} after {max_iter} iters"
            )
    if with_multiplicity:
        return _cluster(z, cluster_tol)
    return z


def _cluster(roots, cluster_tol):
    """Merge roots closer than cluster_tol*(1+|r|) into (root, multiplicity)."""
    roots = np.asarray(roots)
    n = roots.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < cluster_tol * (1.0 + abs(roots[i])):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(roots[i])
    return [(complex(np.mean(g)), len(g)) for g in groups.values()]


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Coefficients ascending; the zero polynomial has empty coeffs."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", poly_trim(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs.size else -1

    def __call__(self, z):
        return poly_eval(self.coeffs, z)

    def deriv(self) -> "Polynomial":
        return Polynomial(poly_deriv(self.coeffs))


@dataclass(frozen=True)
class RationalMap:
    """p(z)/q(z) with no common roots (checked numerically)."""

    num: Polynomial
    den: Polynomial

    def __init__(self, num, den=(1.0,), check=True, tau_gcd=TAU_GCD):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.degree < 0:
            raise IndeterminateError("zero denominator")
        if max(num.degree, den.degree) < 1:
            raise ValueError("degree must be >= 1")
        if check and den.degree >= 1:
            for r in poly_roots(den.coeffs, seed=7):
                scale = np.max(np.abs(num.coeffs)) * max(1.0, abs(r)) ** num.degree
                if abs(num(r)) <= tau_gcd * scale:
                    raise IndeterminateError(
                        f"num and den share a root near {r}"
                    )
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __call__(self, z):
        return map_eval(self, z)


@dataclass
class Cycle:
    """A periodic cycle; points may include INF."""

    points: list
    period: int
    multiplier: complex
    kind: str = field(default="")  # "superattracting" | "attracting" | "parabolic" | ...

    def classify(self, tau_cycle=TAU_CYCLE, tau_par=1e-6):
        m = abs(self.multiplier)
        if m <= tau_cycle:
            return "superattracting"
        if m < 1.0 - tau_par:
            return "attracting"
        # roots of unity up to order 4
        for q in range(1, 5):
            if abs(self.multiplier ** q - 1.0) <= tau_par * q:
                return "parabolic"
        if m < 1.0:
            return "attracting"
        return "repelling"


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def map_eval(f: RationalMap, z):
    """Evaluate with sphere conventions for poles and infinity."""
    if is_inf(z):
        dn, dd = f.num.degree, f.den.degree
        if dn > dd:
            return INF
        if dn < dd:
            return 0j
        return f.num.coeffs[-1] / f.den.coeffs[-1]
    z = complex(z)
    p = complex(f.num(z))
    q = complex(f.den(z))
    if q == 0.0:
        if p == 0.0:
            raise IndeterminateError(f"0/0 at z={z}")
        return INF
    aq = abs(q)
    scale_q = np.max(np.abs(f.den.coeffs)) * max(1.0, abs(z)) ** max(f.den.degree, 0)
    if aq <= 1e-300 * scale_q:
        return INF
    return p / q


def map_deriv_raw(f: RationalMap):
    """Unreduced derivative numerator p'q - pq' and denominator q^2."""
    n = poly_sub(poly_mul(poly_deriv(f.num.coeffs), f.den.coeffs),
                 poly_mul(f.num.coeffs, poly_deriv(f.den.coeffs)))
    d = poly_mul(f.den.coeffs, f.den.coeffs)
    return n, d


def derivative(f: RationalMap) -> RationalMap:
    """f' as a rational map, common powers of the denominator cancelled."""
    n, d = map_deriv_raw(f)
    if f.den.degree == 0:
        return RationalMap(n / f.den.coeffs[0], (1.0,), check=False)
    # cancel common monomial factors z^k (exact zeros at the low end)
    def _lead_zeros(c):
        nz = np.nonzero(c != 0)[0]
        return int(nz[0]) if nz.size else 0

    k = min(_lead_zeros(n), _lead_zeros(d))
    if k > 0:
        n, d = n[k:], d[k:]
    # cancel exact common factors of den from the numerator
    q = f.den.coeffs
    while True:
        quo = poly_divexact(n, q)
        if quo is None:
            break
        quo_d = poly_divexact(d, q)
        if quo_d is None:
            break
        n, d = quo, quo_d
    return RationalMap(n, d, check=False)


def deriv_eval(f: RationalMap, z):
    """f'(z) for finite z, avoiding the reduced-form construction."""
    z = complex(z)
    p = complex(f.num(z))
    q = complex(f.den(z))
    dp = complex(poly_eval(poly_deriv(f.num.coeffs), z))
    dq = complex(poly_eval(poly_deriv(f.den.coeffs), z))
    if q == 0.0:
        return INF
    return (dp * q - p * dq) / (q * q)


def critical_points(f: RationalMap, tol=TAU_ROOT, cluster_tol=1e-6):
    """Finite critical points with local degrees, plus INF when polynomial-like.

    Finite points are the roots of the unreduced p'q - pq' (so multiple poles
    are reported with the correct local degree); the total satisfies
    Riemann-Hurwitz, sum(local degree - 1) = 2d - 2.
    """
    if f.degree < 2:
        raise ValueError("critical_points requires degree >= 2")
    n, _ = map_deriv_raw(f)
    out = []
    if poly_degree(n) >= 1:
        for r, m in poly_roots(n, tol=tol, cluster_tol=cluster_tol,
                               with_multiplicity=True):
            out.append((r, m + 1))
    elif poly_degree(n) == 0:
        pass
    dn, dd = f.num.degree, f.den.degree
    if dn >= dd + 2:
        out.append((INF, dn - dd))
    return out


def compose_self(f: RationalMap, p: int):
    """(num, den) coefficient pair of f^(composed p times), max-norm rescaled."""
    N = f.num.coeffs.copy()
    D = f.den.coeffs.copy()
    for _ in range(p - 1):
        pn, qn = f.num.coeffs, f.den.coeffs
        m = max(len(pn), len(qn)) - 1
        # powers of N and D up to m
        Npow = [np.ones(1, dtype=np.complex128)]
        Dpow = [np.ones(1, dtype=np.complex128)]
        for k in range(m):
            Npow.append(poly_mul(Npow[-1], N))
            Dpow.append(poly_mul(Dpow[-1], D))
        new_n = np.zeros(1, dtype=np.complex128)
        new_d = np.zeros(1, dtype=np.complex128)
        for i, a in enumerate(pn):
            new_n = poly_add(new_n, a * poly_mul(Npow[i], Dpow[m - i]))
        for i, b in enumerate(qn):
            new_d = poly_add(new_d, b * poly_mul(Npow[i], Dpow[m - i]))
        scale = max(np.max(np.abs(new_n)) if new_n.size else 0.0,
                    np.max(np.abs(new_d)) if new_d.size else 0.0)
        if scale > 0:
            new_n = new_n / scale
            new_d = new_d / scale
        N, D = poly_trim(new_n), poly_trim(new_d)
    return N, D


def cycle_multiplier(f: RationalMap, points):
    mult = 1.0 + 0j
    for z in points:
        if is_inf(z):
            dn, dd = f.num.degree, f.den.degree
            if dn >= dd + 2:
                return 0j
            if dn == dd + 1:
                mult *= f.den.coeffs[-1] / f.num.coeffs[-1]
            else:
                return 0j  # not fixed at infinity; caller guards
        else:
            d = deriv_eval(f, z)
            if is_inf(d):
                return 0j
            mult *= d
    return mult


def periodic_points(f: RationalMap, p: int, tol=TAU_ROOT, cluster_tol=TAU_CLUSTER,
                    p_max=6):
    """Cycles among the roots of the numerator of f^p(z) - z.

    Each returned cycle carries its exact period (points of lower exact period
    appear only under their exact period) and its multiplier.
    """
    if not (1 <= p <= p_max):
        raise ValueError(f"period must be in [1, {p_max}]")
    if f.degree ** p > DEGREE_CAP:
        raise PeriodTooLargeError(
            f"degree {f.degree}^{p} exceeds root cap {DEGREE_CAP}"
        )
    N, D = compose_self(f, p)
    target = poly_sub(N, poly_mul(np.array([0.0, 1.0], dtype=np.complex128), D))
    merged = poly_roots(target, tol=tol, cluster_tol=max(cluster_tol, 1e-7),
                        with_multiplicity=True)
    roots = [r for r, _ in merged]

    cycles = []
    used = [False] * len(roots)
    arr = np.array(roots) if roots else np.zeros(0, dtype=np.complex128)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        orbit = [i]
        z = r
        for _ in range(p + 1):
            w = map_eval(f, z)
            if is_inf(w):
                break
            j = int(np.argmin(np.abs(arr - w)))
            if abs(arr[j] - w) > 1e-5 * (1.0 + abs(w)):
                break
            if j == orbit[0]:
                pts = [roots[k] for k in orbit]
                for k in orbit:
                    used[k] = True
                cycles.append(Cycle(points=pts, period=len(pts),
                                    multiplier=cycle_multiplier(f, pts)))
                break
            if j in orbit:
                break
            orbit.append(j)
            z = arr[j]
    # infinity, fixed whenever deg num > deg den
    if f.num.degree > f.den.degree:
        if f.num.degree >= f.den.degree + 2:
            m = 0j
        else:
            m = f.den.coeffs[-1] / f.num.coeffs[-1]
        cycles.append(Cycle(points=[INF], period=1, multiplier=m))
    for c in cycles:
        c.kind = c.classify()
    return cycles


def preimages(f: RationalMap, w, tol=TAU_ROOT):
    """The d solutions of f(z) = w, counted with multiplicity (INF included)."""
    d = f.degree
    if is_inf(w):
        out = []
        if f.den.degree >= 1:
            for r, m in poly_roots(f.den.coeffs, tol=tol, with_multiplicity=True):
                out.extend([r] * m)
        if f.num.degree > f.den.degree:
            out.extend([INF] * (f.num.degree - f.den.degree))
        return out
    w = complex(w)
    target = poly_sub(f.num.coeffs, w * f.den.coeffs)
    dt = poly_degree(target)
    out = []
    if dt >= 1:
        for r, m in poly_roots(target, tol=tol, with_multiplicity=True):
            out.extend([r] * m)
    if dt < d:
        out.extend([INF] * (d - max(dt, 0)))
    return out
