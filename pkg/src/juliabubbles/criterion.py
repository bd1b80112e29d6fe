"""Cantor-bubble criterion: hypothesis checks and topology verdicts.

The criterion asks for two invariant Fatou components U and V such that U is
completely invariant, V is not, and U together with V absorbs every critical
value; the conclusion is that the Julia set is a Cantor set with bubbles.
All checks here are numerical evidence on a finite grid, so each hypothesis
is tri-state: yes, no, or inconclusive, with recorded reasons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels, topology
from .dynamics import (
    AttractorSet,
    classify_orbit,
    default_budget,
    escape_potential_grid,
    find_attractors,
)
from .errors import OutOfWindowError
from .rmap import critical_points, is_inf, map_eval, preimages
from .render import ClassificationGrid, Window, render_grid

UNDECIDED_THRESHOLD = 0.05
PARABOLIC_UNDECIDED_THRESHOLD = 0.10   # parabolic boundaries converge slowly
MIN_COMPONENT_PIXELS = 16

CANTOR_BUBBLES = "CantorBubbles"
CANTOR_CIRCLES = "CantorCirclesLike"
CANTOR_LIKE = "CantorLike"
CONNECTED_LIKE = "ConnectedLike"
UNKNOWN = "Unknown"


@dataclass
class TriState:
    value: str              # "yes" | "no" | "inconclusive"
    evidence: list = field(default_factory=list)

    def __bool__(self):
        return self.value == "yes"


@dataclass
class CriterionVerdict:
    U_id: int = -1
    V_id: int = -1
    U_completely_invariant: TriState = None
    V_not_completely_invariant: TriState = None
    critical_values_in_UV: TriState = None
    topology_class: str = UNKNOWN
    undecided_fraction: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def all_yes(self):
        return all(h is not None and h.value == "yes" for h in (
            self.U_completely_invariant, self.V_not_completely_invariant,
            self.critical_values_in_UV))

    def as_dict(self):
        def tri(t):
            return None if t is None else {"value": t.value,
                                           "evidence": list(t.evidence)}
        return {
            "U_id": self.U_id, "V_id": self.V_id,
            "U_completely_invariant": tri(self.U_completely_invariant),
            "V_not_completely_invariant": tri(self.V_not_completely_invariant),
            "critical_values_in_UV": tri(self.critical_values_in_UV),
            "topology_class": self.topology_class,
            "undecided_fraction": self.undecided_fraction,
            "notes": list(self.notes),
        }


def classify_topology(graph: topology.ComponentGraph,
                      undecided_fraction: float,
                      threshold: float = UNDECIDED_THRESHOLD) -> str:
    """Topology class of the rendered picture.

    Multiple connectivity is judged on Fatou-bearing holes, components below
    MIN_COMPONENT_PIXELS are ignored as pixel noise, and the Julia residue
    (pixels away from every bounded Fatou component) stands in for the point
    components of a Cantor-with-bubbles set.
    """
    if undecided_fraction > threshold:
        return UNKNOWN
    comps = [c for c in graph.components if c.pixels >= MIN_COMPONENT_PIXELS]
    mc = [c for c in comps if c.multiply_connected]
    bounded = [c for c in comps if c.bounded]
    bounded_sc = [c for c in bounded if c.simply_connected]
    residue = topology.julia_residue(graph)
    if len(mc) == 1 and bounded_sc and residue.any():
        return CANTOR_BUBBLES
    if len(mc) >= 2:
        # nested rings: everything escapes, no attracting/parabolic bubbles
        if all(c.kind == kernels.ESCAPE for c in comps):
            return CANTOR_CIRCLES
    if not bounded:
        return CANTOR_LIKE
    if topology.julia_component_count(graph) == 1 and not residue.any():
        return CONNECTED_LIKE
    return UNKNOWN


def complete_invariance_test(instance, graph: topology.ComponentGraph,
                             cid: int, n_samples: int = 6) -> TriState:
    """Do all finite preimages of sampled component points stay inside it?

    yes: every located preimage lies in the component.
    no: some preimage lies strictly inside a different component (witness).
    inconclusive: preimages only leave through Julia pixels or the window edge.
    """
    f = instance.map
    win = graph.grid.window
    jj, ii = topology.deep_interior_pixels(graph, cid)
    take = min(n_samples, jj.size)
    if take == 0:
        return TriState("inconclusive", ["no deep interior pixels"])
    witnesses = []
    fuzzy = 0
    checked = 0
    for j, i in zip(jj[:take], ii[:take]):
        w = win.pixel_center(int(j), int(i))
        for z in preimages(f, w):
            if is_inf(z):
                continue
            checked += 1
            if not win.contains(z):
                fuzzy += 1
                continue
            pj, pi = win.locate(z)
            lab = int(graph.labels[pj, pi])
            if lab == cid:
                continue
            nb = graph.labels[max(pj - 1, 0):pj + 2, max(pi - 1, 0):pi + 2]
            if lab == 0:
                # boundary-marked pixel: still inside if the component itself
                # reaches into the 3x3 neighborhood
                if np.any(nb == cid):
                    continue
                fuzzy += 1
                continue
            # require the preimage pixel to sit strictly inside the other
            # component before accepting it as a witness
            if np.all(nb == lab):
                witnesses.append((complex(w), complex(z), lab))
            else:
                fuzzy += 1
    if witnesses:
        return TriState("no", [f"preimage {z:.6g} of {w:.6g} lies in "
                               f"component {lab}"
                               for w, z, lab in witnesses[:3]])
    if fuzzy:
        return TriState("inconclusive",
                        [f"{fuzzy}/{checked} preimages on Julia pixels or "
                         "outside the window"])
    return TriState("yes", [f"all {checked} finite preimages of {take} "
                            "samples stay in the component"])


def _attractor_components(graph, attractors, notes):
    """Candidate (component, cycle index) pairs: one representative Fatou
    component per attractor visible in the window."""
    from scipy import ndimage
    win = graph.grid.window
    out = []
    seen = set()

    def add(comp, ci):
        if comp is not None and comp.id not in seen:
            seen.add(comp.id)
            out.append((comp, ci))

    for ci, cyc in enumerate(attractors.cycles):
        if any(is_inf(p) for p in cyc.points):
            unbounded = [c for c in graph.components if c.contains_inf
                         and c.kind == kernels.ESCAPE]
            if unbounded:
                add(max(unbounded, key=lambda c: c.pixels), ci)
            continue
        if cyc.kind in ("superattracting", "attracting"):
            for p in cyc.points:
                try:
                    j, i = win.locate(p)
                except OutOfWindowError:
                    continue
                lab = int(graph.labels[j, i])
                if lab > 0:
                    add(graph.by_id(lab), ci)
                    break
        elif cyc.kind == "parabolic":
            # a parabolic point sits on the Julia set: take the largest
            # basin component whose dilation reaches it
            for p in cyc.points:
                try:
                    j, i = win.locate(p)
                except OutOfWindowError:
                    continue
                best = None
                for c in graph.components:
                    if c.kind != kernels.PARABOLIC:
                        continue
                    mask = graph.labels == c.id
                    mask = ndimage.binary_dilation(mask, iterations=2)
                    if mask[j, i] and (best is None or c.pixels > best.pixels):
                        best = c
                if best is not None:
                    notes.append("parabolic basin component "
                                 f"{best.id} reaches the parabolic point "
                                 f"{p:.6g}")
                    add(best, ci)
                    break
    return out


def _forward_invariant(graph, comp):
    targets = graph.edges.get(comp.id, {})
    if not targets:
        flags = graph.edge_flags.get(comp.id, {})
        return flags.get("outside", 0) > 0 and comp.contains_inf
    return max(targets, key=targets.get) == comp.id


def check_theorem1(instance, window: Window = None, resolution: int = 512,
                   budget: int = None, attractors: AttractorSet = None,
                   grid: ClassificationGrid = None) -> CriterionVerdict:
    """Full pipeline: attractors, grid, components, edges, hypotheses, class.

    When all three hypotheses come out yes, the verdict class is the
    criterion's conclusion (Cantor bubbles) even if the picture alone is
    inconclusive, e.g. when the bubbles are below pixel size.
    """
    verdict = CriterionVerdict()
    if attractors is None:
        attractors = find_attractors(instance)
    if grid is None:
        if window is None:
            window = default_window(instance, attractors, resolution)
        grid = render_grid(instance, window, attractors, budget=budget)
    potential = None
    if instance.map.num.degree >= instance.map.den.degree + 2:
        potential = escape_potential_grid(instance.map, grid,
                                          attractors.escape_radius)
    graph = topology.label_components(grid, potential=potential)
    topology.component_map_edges(instance, graph)
    verdict.undecided_fraction = grid.undecided_fraction
    threshold = (PARABOLIC_UNDECIDED_THRESHOLD if attractors.has_parabolic
                 else UNDECIDED_THRESHOLD)
    verdict.topology_class = classify_topology(graph, grid.undecided_fraction,
                                               threshold)

    candidates = _attractor_components(graph, attractors, verdict.notes)
    inv = {comp.id: complete_invariance_test(instance, graph, comp.id)
           for comp, _ in candidates}

    # U: the completely invariant candidate; V: an invariant candidate that
    # is provably not completely invariant
    U = V = None
    vcyc = -1
    yes = [comp for comp, _ in candidates if inv[comp.id].value == "yes"]
    if yes:
        U = max(yes, key=lambda c: c.pixels)
    for comp, ci in candidates:
        if U is not None and comp.id == U.id:
            continue
        if V is None or comp.pixels > V.pixels:
            V, vcyc = comp, ci

    if U is None:
        verdict.U_completely_invariant = TriState(
            "inconclusive",
            ["no candidate component passed the complete-invariance test"]
            + [e for t in inv.values() for e in t.evidence])
    else:
        verdict.U_id = U.id
        verdict.U_completely_invariant = inv[U.id]

    if V is None:
        verdict.V_not_completely_invariant = TriState(
            "inconclusive", ["no second attractor component in the window"])
    else:
        verdict.V_id = V.id
        t = inv[V.id]
        if not _forward_invariant(graph, V):
            verdict.V_not_completely_invariant = TriState(
                "inconclusive",
                [f"component {V.id} is not forward-invariant under the "
                 "sampled edges"] + t.evidence)
        elif t.value == "no":
            verdict.V_not_completely_invariant = TriState("yes", t.evidence)
        elif t.value == "yes":
            verdict.V_not_completely_invariant = TriState("no", t.evidence)
        else:
            verdict.V_not_completely_invariant = t

    # cycle points sharing a single Fatou component mean the pixel component
    # merges several true Fatou components (a pinched, basilica-like basin);
    # V-related evidence is then unreliable and a bubble verdict unsound
    witness = False
    for cyc in attractors.cycles:
        finite = [p for p in cyc.points if not is_inf(p)]
        if cyc.period >= 2 and len(finite) >= 2:
            try:
                if topology.same_component(grid, finite[0], finite[1],
                                           "not-escape"):
                    witness = True
                    verdict.notes.append(
                        f"same_component({finite[0]:.6g}, {finite[1]:.6g}) "
                        "= true: cycle points share a non-escape component")
            except OutOfWindowError:
                pass
    if witness:
        if verdict.V_not_completely_invariant.value == "yes":
            verdict.V_not_completely_invariant = TriState(
                "inconclusive",
                ["cycle points share one pixel component; its boundary is "
                 "not a Jordan curve at this scale"]
                + verdict.V_not_completely_invariant.evidence)
        if verdict.topology_class == CANTOR_BUBBLES:
            verdict.topology_class = UNKNOWN
            verdict.notes.append("bubble verdict withdrawn: a basin "
                                 "component contains a full cycle")

    verdict.critical_values_in_UV = _critical_values_check(
        instance, graph, attractors, U, V, budget)

    if verdict.all_yes and verdict.topology_class != CANTOR_BUBBLES:
        verdict.notes.append(
            f"class {verdict.topology_class} upgraded: all three hypotheses "
            "hold, so the criterion concludes Cantor bubbles")
        verdict.topology_class = CANTOR_BUBBLES
    return verdict


def _critical_values_check(instance, graph, attractors, U, V, budget):
    """Does U together with V absorb every critical value?"""
    f = instance.map
    win = graph.grid.window
    if U is None or V is None:
        return TriState("inconclusive", ["U or V not identified"])
    uv = {U.id, V.id}
    ev = []
    bad = 0
    soft = 0
    for c, _deg in critical_points(f):
        if is_inf(c):
            continue
        w = map_eval(f, c)
        if is_inf(w):
            which = "U" if U.contains_inf else ("V" if V.contains_inf else "")
            if which:
                ev.append(f"f({c:.4g}) = inf, in {which}")
            else:
                bad += 1
                ev.append(f"f({c:.4g}) = inf outside U and V")
            continue
        lab = 0
        if win.contains(w):
            j, i = win.locate(w)
            lab = int(graph.labels[j, i])
        if lab in uv:
            ev.append(f"f({c:.4g}) lies in {'U' if lab == U.id else 'V'}")
            continue
        # off the window or on a Julia pixel: fall back to the orbit fate
        fate = classify_orbit(f, w, attractors, budget=budget)
        if fate.kind == "escape" and (U.contains_inf or V.contains_inf):
            which = "U" if U.contains_inf else "V"
            ev.append(f"f({c:.4g}) escapes toward infinity, in {which}")
        elif fate.kind == "undecided":
            soft += 1
            ev.append(f"f({c:.4g}) undecided after its budget")
        elif lab == 0 and win.contains(w):
            soft += 1
            ev.append(f"f({c:.4g}) lands on a Julia/undecided pixel")
        else:
            bad += 1
            ev.append(f"f({c:.4g}) lies in component {lab}, not U or V")
    if bad:
        return TriState("no", ev)
    if soft:
        return TriState("inconclusive", ev)
    return TriState("yes", ev)


def default_window(instance, attractors: AttractorSet = None,
                   resolution: int = 512, max_doublings: int = 12) -> Window:
    """Square window covering the finite special points, grown until the
    window border lies in the escape region (the non-escaping set is then
    strictly interior, in the polynomial-like cases)."""
    if attractors is None:
        attractors = find_attractors(instance)
    pts = [complex(c) for c, _ in critical_points(instance.map)
           if not is_inf(c)]
    for cyc in attractors.cycles:
        pts.extend(complex(p) for p in cyc.points if not is_inf(p))
    if not pts:
        return Window.square(0, 4.0, resolution)
    arr = np.array(pts)
    center = complex(np.mean(arr.real), np.mean(arr.imag))
    spread = float(np.max(np.abs(arr - center))) if len(arr) > 1 else 1.0
    width = max(4.0, 2.0 * spread * 1.8)
    f = instance.map
    probe_budget = min(2000, 10 * 200)
    for _ in range(max_doublings):
        t = np.arange(64) / 64.0
        border = np.concatenate([
            center + width * (-0.5 + t) + 0.5j * width,
            center + width * (-0.5 + t) - 0.5j * width,
            center + 0.5 * width + 1j * width * (-0.5 + t),
            center - 0.5 * width + 1j * width * (-0.5 + t)])
        ok = True
        for z in border:
            fate = classify_orbit(f, z, attractors, budget=probe_budget)
            if fate.kind != "escape":
                ok = False
                break
        if ok:
            break
        width *= 2.0
    return Window.square(center, width, resolution)
