"""Component topology of classification grids.

Fatou pixels are labeled with 4-connectivity; the separating Julia pixel set
(boundary pixels between differing labels, plus undecided pixels) uses the
dual 8-connectivity. The component containing the window border is treated as
containing infinity for hole-counting purposes (sphere convention).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import kernels
from .errors import (
    DegenerateComponentError,
    InsufficientScalesError,
    OutOfWindowError,
)
from .render import ClassificationGrid, Window

_S4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_S8 = np.ones((3, 3), dtype=bool)


def julia_mask(grid: ClassificationGrid, potential=None,
               kappa: float = 2.0) -> np.ndarray:
    """Pixels on the boundary between differing labels, plus undecided ones.

    When an escape-rate potential grid is supplied, escape pixels whose
    potential is at most kappa times the neighboring potential increment are
    also marked: the ratio approximates distance to the Julia set in pixels,
    which separates same-class Fatou components (nested escape annuli) that
    share no class boundary.
    """
    key = grid.class_key()
    m = np.zeros(key.shape, dtype=bool)
    m[:-1, :] |= key[:-1, :] != key[1:, :]
    m[1:, :] |= key[1:, :] != key[:-1, :]
    m[:, :-1] |= key[:, :-1] != key[:, 1:]
    m[:, 1:] |= key[:, 1:] != key[:, :-1]
    m |= grid.kind == kernels.UNDECIDED
    if potential is not None:
        esc = grid.kind == kernels.ESCAPE
        h = np.where(esc, potential, np.nan)
        grad = np.zeros(h.shape, dtype=np.float64)
        dv = np.abs(h[1:, :] - h[:-1, :])
        dv = np.where(np.isnan(dv), 0.0, dv)
        np.fmax(grad[1:, :], dv, out=grad[1:, :])
        np.fmax(grad[:-1, :], dv, out=grad[:-1, :])
        dh = np.abs(h[:, 1:] - h[:, :-1])
        dh = np.where(np.isnan(dh), 0.0, dh)
        np.fmax(grad[:, 1:], dh, out=grad[:, 1:])
        np.fmax(grad[:, :-1], dh, out=grad[:, :-1])
        m |= esc & (potential <= kappa * grad)
    return m


@dataclass
class Component:
    id: int
    kind: int               # kernel fate code
    attr: int               # attractor/cycle index
    pixels: int
    holes: int
    fatou_holes: int        # holes that enclose Fatou pixels of other components
    enclosed: int           # distinct other components inside the holes
    contains_inf: bool      # touches the window border (sphere convention)
    bbox: tuple

    @property
    def kind_name(self):
        return ("escape", "attracted", "parabolic", "undecided")[self.kind]

    @property
    def bounded(self):
        return not self.contains_inf

    @property
    def multiply_connected(self):
        # Judged on enclosed Fatou material so isolated Julia specks do not
        # count. For the component containing infinity, Julia dust can chain
        # all enclosed components into a single pixel hole, so the criterion
        # is enclosing two or more distinct components; a disk-like end
        # enclosing the single remaining blob stays simply connected.
        if self.contains_inf:
            return self.enclosed >= 2
        return self.fatou_holes >= 1

    @property
    def simply_connected(self):
        return not self.multiply_connected


@dataclass
class ComponentGraph:
    grid: ClassificationGrid
    labels: np.ndarray          # int32 (ny, nx); 0 = Julia/undecided separator
    components: list
    julia: np.ndarray           # bool separator mask
    edges: dict = field(default_factory=dict)   # id -> {target id: sample count}
    edge_flags: dict = field(default_factory=dict)

    def by_id(self, cid) -> Component:
        return self.components[cid - 1]

    def component_at(self, z) -> int:
        j, i = self.grid.window.locate(z)
        return int(self.labels[j, i])


def _hole_counts(labels, cid, bbox):
    """(holes, fatou_holes, enclosed): complement regions inside the bounding
    box that do not reach its border. fatou_holes are regions enclosing
    pixels of other Fatou components rather than only Julia/undecided
    pixels; enclosed counts the distinct other components inside them."""
    y0, y1, x0, x1 = bbox
    sub = labels[y0:y1, x0:x1]
    comp = np.pad(sub != cid, 1, constant_values=True)
    lab, n = ndimage.label(comp, structure=_S8)
    if n == 0:
        return 0, 0, 0
    border = np.unique(np.concatenate([
        lab[0, :], lab[-1, :], lab[:, 0], lab[:, -1]]))
    is_border = np.zeros(n + 1, dtype=bool)
    is_border[border[border != 0]] = True
    inner = lab[1:-1, 1:-1]
    holes = 0
    fatou_holes = 0
    enclosed = set()
    for h in range(1, n + 1):
        if is_border[h]:
            continue
        holes += 1
        inside = sub[inner == h]
        ids = np.unique(inside[inside > 0])
        if ids.size:
            fatou_holes += 1
            enclosed.update(int(i) for i in ids)
    return holes, fatou_holes, len(enclosed)


def label_components(grid: ClassificationGrid,
                     potential=None) -> ComponentGraph:
    """4-connectivity labeling of Fatou pixels; holes by enclosure analysis."""
    jm = julia_mask(grid, potential=potential)
    fatou = ~jm
    labels, n = ndimage.label(fatou, structure=_S4)
    comps = []
    slices = ndimage.find_objects(labels)
    ny, nx = labels.shape
    for cid in range(1, n + 1):
        sl = slices[cid - 1]
        mask_local = labels[sl] == cid
        ys, xs = sl
        bbox = (ys.start, ys.stop, xs.start, xs.stop)
        # a representative pixel for the class
        jj, ii = np.nonzero(mask_local)
        j0, i0 = jj[0] + ys.start, ii[0] + xs.start
        touches = (ys.start == 0 or xs.start == 0 or ys.stop == ny or xs.stop == nx)
        holes, fatou_holes, enclosed = _hole_counts(
            labels, cid, (max(bbox[0] - 1, 0), min(bbox[1] + 1, ny),
                          max(bbox[2] - 1, 0), min(bbox[3] + 1, nx)))
        comps.append(Component(
            id=cid,
            kind=int(grid.kind[j0, i0]),
            attr=int(grid.attr[j0, i0]),
            pixels=int(mask_local.sum()),
            holes=holes,
            fatou_holes=fatou_holes,
            enclosed=enclosed,
            contains_inf=touches,
            bbox=bbox,
        ))
    return ComponentGraph(grid=grid, labels=labels, components=comps, julia=jm)


def deep_interior_pixels(graph: ComponentGraph, cid: int, depth=3):
    """Pixels >= depth Chebyshev distance from any non-component pixel,
    ordered by increasing iteration count."""
    mask = graph.labels == cid
    core = ndimage.binary_erosion(mask, structure=_S8, iterations=depth)
    jj, ii = np.nonzero(core)
    if jj.size == 0:
        # fall back to a single erosion, then the raw mask
        core = ndimage.binary_erosion(mask, structure=_S8, iterations=1)
        jj, ii = np.nonzero(core)
        if jj.size == 0:
            jj, ii = np.nonzero(mask)
    order = np.argsort(graph.grid.iters[jj, ii], kind="stable")
    return jj[order], ii[order]


def component_map_edges(instance, graph: ComponentGraph,
                        samples_per_component=8) -> ComponentGraph:
    """Forward-map edges from sampled deep-interior pixels of each component."""
    f = instance.map
    win = graph.grid.window
    for comp in graph.components:
        jj, ii = deep_interior_pixels(graph, comp.id)
        take = min(samples_per_component, jj.size)
        targets = {}
        flags = {"julia": 0, "outside": 0}
        for j, i in zip(jj[:take], ii[:take]):
            z = win.pixel_center(int(j), int(i))
            from .rmap import is_inf, map_eval
            w = map_eval(f, z)
            if is_inf(w) or not win.contains(w):
                flags["outside"] += 1
                continue
            tj, ti = win.locate(w)
            t = int(graph.labels[tj, ti])
            if t == 0:
                flags["julia"] += 1
            else:
                targets[t] = targets.get(t, 0) + 1
        graph.edges[comp.id] = targets
        graph.edge_flags[comp.id] = flags
    return graph


def same_component(grid: ClassificationGrid, z1, z2, kind_class="not-escape"):
    """True iff z1 and z2 lie in the same 4-connected region of the class.

    kind_class: "not-escape" (undecided included), "escape", or a kernel
    fate code. The region is taken closed: class pixels plus adjacent
    boundary pixels, so sub-pixel pinch points do not disconnect it while
    full-pixel channels of the opposite class still do.
    """
    win = grid.window
    for z in (z1, z2):
        if not win.contains(z):
            raise OutOfWindowError(f"{complex(z)} outside window")
    if kind_class == "not-escape":
        mask = grid.kind != kernels.ESCAPE
    elif kind_class == "escape":
        mask = grid.kind == kernels.ESCAPE
    else:
        mask = grid.kind == int(kind_class)
    mask = mask | (julia_mask(grid) & ndimage.binary_dilation(mask, _S8))
    labels, _ = ndimage.label(mask, structure=_S4)
    j1, i1 = win.locate(z1)
    j2, i2 = win.locate(z2)
    l1, l2 = labels[j1, i1], labels[j2, i2]
    return bool(l1 != 0 and l1 == l2)


# ---------------------------------------------------------------------------
# boundary extraction (marching squares on the binary component mask)
# ---------------------------------------------------------------------------

@dataclass
class Curve:
    points: np.ndarray      # closed complex polyline, first == last
    component: int

    @property
    def n_vertices(self):
        return len(self.points) - 1


# Segment table: for each 2x2 cell pattern, pairs of cell-edge keys.
# Edges: 0 top, 1 right, 2 bottom, 3 left (midpoints).
_SEGS = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 5: [(3, 0), (1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(2, 0)], 10: [(0, 1), (2, 3)],
    11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}

_EDGE_OFF = {0: (0.0, 0.5), 1: (0.5, 1.0), 2: (1.0, 0.5), 3: (0.5, 0.0)}


def _trace_mask(mask):
    """All closed marching-squares loops of a padded binary mask.

    Returns loops as lists of (y, x) float points in padded pixel-index space.
    """
    m = np.pad(mask, 1).astype(np.int8)
    pat = (m[:-1, :-1] + 2 * m[:-1, 1:] + 4 * m[1:, 1:] + 8 * m[1:, :-1])
    ys, xs = np.nonzero((pat != 0) & (pat != 15))
    segs = []
    for y, x in zip(ys, xs):
        for e0, e1 in _SEGS[int(pat[y, x])]:
            a = (y + _EDGE_OFF[e0][0], x + _EDGE_OFF[e0][1])
            b = (y + _EDGE_OFF[e1][0], x + _EDGE_OFF[e1][1])
            segs.append((a, b))
    # chain undirected segments into loops
    adj = {}
    for si, (a, b) in enumerate(segs):
        adj.setdefault(a, []).append((si, b))
        adj.setdefault(b, []).append((si, a))
    used = [False] * len(segs)
    loops = []
    for si, (a, b) in enumerate(segs):
        if used[si]:
            continue
        used[si] = True
        loop = [a, b]
        cur = b
        while cur != a:
            nxt = None
            for sj, other in adj[cur]:
                if not used[sj]:
                    nxt = (sj, other)
                    break
            if nxt is None:
                break
            used[nxt[0]] = True
            cur = nxt[1]
            loop.append(cur)
        if loop[0] == loop[-1] and len(loop) > 3:
            loops.append(loop)
    return loops


def extract_boundary(graph: ComponentGraph, cid: int) -> Curve:
    """Closed subpixel boundary polyline of a bounded, hole-free component."""
    comp = graph.by_id(cid)
    if comp.pixels < 16:
        raise DegenerateComponentError(f"component {cid} has {comp.pixels} pixels")
    if comp.contains_inf:
        raise DegenerateComponentError(f"component {cid} touches the border")
    mask = graph.labels == cid
    loops = _trace_mask(mask)
    if not loops:
        raise DegenerateComponentError(f"component {cid} yields no contour")
    loop = max(loops, key=len)
    win = graph.grid.window
    # padded pixel index q sits at continuous coordinate (q - 0.5) / n
    pts = np.array([
        complex(win.center.real + ((x - 0.5) / win.nx - 0.5) * win.width,
                win.center.imag - ((y - 0.5) / win.ny - 0.5) * win.height)
        for (y, x) in loop])
    return Curve(points=pts, component=cid)


def largest_bounded_curves(graph: ComponentGraph, n=30, kinds=None):
    """Boundary curves of the n largest bounded hole-free components."""
    comps = [c for c in graph.components
             if c.bounded and c.holes == 0 and c.pixels >= 16
             and (kinds is None or c.kind in kinds)]
    comps.sort(key=lambda c: -c.pixels)
    out = []
    for c in comps[:n]:
        try:
            out.append(extract_boundary(graph, c.id))
        except DegenerateComponentError:
            continue
    return out


def julia_residue(graph: ComponentGraph, dilate=3) -> np.ndarray:
    """Julia pixels farther than `dilate` Chebyshev steps from every bounded
    simply connected Fatou component (every bubble): the pixel proxy for the
    point components of the Julia set."""
    ids = [c.id for c in graph.components if c.bounded and c.simply_connected]
    bounded = np.isin(graph.labels, ids) if ids else np.zeros_like(graph.julia)
    if bounded.any():
        bounded = ndimage.binary_dilation(bounded, structure=_S8,
                                          iterations=dilate)
    return graph.julia & ~bounded


def julia_component_count(graph: ComponentGraph) -> int:
    """Number of 8-connected components of the Julia pixel set."""
    _, n = ndimage.label(graph.julia, structure=_S8)
    return int(n)


# ---------------------------------------------------------------------------
# box-counting dimension
# ---------------------------------------------------------------------------

def box_dimension(grid: ClassificationGrid, mask: np.ndarray, k_range=None):
    """Least-squares slope of log N(eps) vs log(1/eps) over dyadic box scales.

    mask marks the Julia/undecided pixel set; k gives boxes of nx / 2^k pixels.
    """
    ny, nx = mask.shape
    if k_range is None:
        kmax = int(np.log2(nx // 8))
        k_range = range(1, kmax + 1)
    ks = [k for k in k_range if nx // 2 ** k >= 8 and nx % 2 ** k == 0]
    if len(ks) < 4:
        raise InsufficientScalesError(f"only {len(ks)} usable scales")
    if not mask.any():
        raise InsufficientScalesError("empty Julia pixel set")
    logs_inv_eps, log_counts, counts = [], [], []
    for k in ks:
        b = nx // 2 ** k
        occ = mask[: (ny // b) * b, : (nx // b) * b].reshape(
            ny // b, b, nx // b, b).any(axis=(1, 3))
        n_occ = int(occ.sum())
        counts.append({"k": k, "box_pixels": b, "count": n_occ})
        logs_inv_eps.append(np.log(2.0 ** k))
        log_counts.append(np.log(max(n_occ, 1)))
    x = np.array(logs_inv_eps)
    y = np.array(log_counts)
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return {"slope": float(slope), "r2": float(r2), "counts": counts}
