"""Triples (G, H, sigma), reduction witnesses and the structural checks on them."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from ..connectivity import EdgeCut, lambda_, lambda_count
from ..immersion import Immersion, Multistar, compose, immersion_to_dict, validate
from ..ksystem import KSystem
from ..multigraph import EdgeId, EdgePath, MultiGraph, VertexId


class PipelineError(RuntimeError):
    """A step hit a state the reductions rule out; this is a bug sentinel."""


@dataclass(frozen=True)
class Triple:
    sys: KSystem

    @property
    def g(self) -> MultiGraph:
        return self.sys.host

    @property
    def k(self) -> int:
        return self.sys.k

    @property
    def center(self) -> VertexId:
        return self.sys.center_image

    @property
    def H(self) -> MultiGraph:
        return self.sys.pattern

    def measure(self) -> int:
        """|V(G)| + |E(G)| + |E(sigma)|."""
        return self.g.num_vertices() + self.g.num_edges() + len(self.sys.sigma.used_edges())

    def sigma_path(self, e: EdgeId) -> EdgePath:
        """Image of pattern edge e, walked from the center image."""
        return self.sys.sigma.path(e, start=self.sys.star.center)

    def sigma_edges(self) -> FrozenSet[EdgeId]:
        return self.sys.sigma.used_edges()

    def owner(self) -> Dict[EdgeId, EdgeId]:
        """Host edge -> pattern edge whose image contains it."""
        return {f: e for e, s in self.sys.sigma.emap.items() for f in s}

    def ray_of_image(self) -> Dict[VertexId, VertexId]:
        return {self.sys.sigma.vmap[r]: r for r in self.sys.rays}


def rebuild(
    t: Triple,
    g: MultiGraph,
    H: Optional[MultiGraph] = None,
    vmap: Optional[Mapping[VertexId, VertexId]] = None,
    emap: Optional[Mapping[EdgeId, FrozenSet[EdgeId]]] = None,
) -> Triple:
    """New triple on host ``g``; unspecified parts are carried over, isolated rays dropped."""
    s = t.sys
    H = s.pattern if H is None else H
    center = s.star.center
    lonely = [v for v in H.vertices if v != center and H.degree(v) == 0]
    if lonely:
        H = H.remove_vertices(lonely)
    vmap = dict(s.sigma.vmap if vmap is None else vmap)
    vmap = {v: x for v, x in vmap.items() if H.has_vertex(v)}
    emap = dict(s.sigma.emap if emap is None else emap)
    emap = {e: f for e, f in emap.items() if H.has_edge(e)}
    star = Multistar(H, center)
    return Triple(KSystem(s.k, star, Immersion(H, g, vmap, emap)))


@dataclass(frozen=True)
class ReductionWitness:
    """theta: weak immersion of the child host in the parent host."""

    theta: Immersion

    def then(self, later: "ReductionWitness") -> "ReductionWitness":
        """Witness for parent -> grandchild, given ``later`` for child -> grandchild."""
        return ReductionWitness(compose(self.theta, later.theta))

    def digest(self) -> str:
        blob = json.dumps(immersion_to_dict(self.theta), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def identity_witness(g: MultiGraph) -> ReductionWitness:
    return make_witness(g, g)


def make_witness(
    child: MultiGraph,
    parent: MultiGraph,
    vmap: Optional[Mapping[VertexId, VertexId]] = None,
    emap: Optional[Mapping[EdgeId, Iterable[EdgeId]]] = None,
) -> ReductionWitness:
    """Identity on shared ids, overridden where given."""
    vm = {v: v for v in child.vertices}
    vm.update(vmap or {})
    em = {e: frozenset([e]) for e in child.edges}
    em.update({e: frozenset(s) for e, s in (emap or {}).items()})
    return ReductionWitness(Immersion(child, parent, vm, em))


def check_reduction(parent: Triple, child: Triple, w: ReductionWitness) -> List[str]:
    """The three reduction conditions plus weak validity of theta; empty list means sound."""
    theta = w.theta
    problems = []
    if theta.pattern != child.g or theta.host != parent.g:
        return ["witness graphs do not match the triples"]
    problems += [f"theta: {v}" for v in validate(theta, "weak").violations]
    if problems:
        return problems
    if theta.vmap[child.center] != parent.center:
        problems.append("center image is not preserved")
    parent_rays = parent.sys.ray_images()
    for x in child.sys.ray_images():
        if theta.vmap[x] not in parent_rays:
            problems.append(f"child ray image {x} maps outside the parent ray images")
    branch = set(child.sys.sigma.vmap.values())
    for e in child.g.edges:
        ends = set(child.g.endpoints(e))
        touched = parent.g.edge_subgraph_vertices(theta.emap[e])
        for v in branch - ends:
            if theta.vmap[v] in touched:
                problems.append(f"theta({e}) passes through the image of branch vertex {v}")
    return problems


# -- well-behaved --------------------------------------------------------------


@dataclass
class WellBehavedReport:
    c1: Optional[EdgeCut] = None  # an edge cut of size <= 2
    c2: List[VertexId] = field(default_factory=list)
    c3: Dict[VertexId, EdgeCut] = field(default_factory=dict)  # ray -> nonconforming k-cut
    c4: List[EdgeId] = field(default_factory=list)
    c5: List[VertexId] = field(default_factory=list)

    @property
    def c1_ok(self) -> bool:
        return self.c1 is None

    @property
    def c2_ok(self) -> bool:
        return not self.c2

    @property
    def c3_ok(self) -> bool:
        return not self.c3

    @property
    def c4_ok(self) -> bool:
        return not self.c4

    @property
    def c5_ok(self) -> bool:
        return not self.c5

    @property
    def ok(self) -> bool:
        return self.c1_ok and self.c2_ok and self.c3_ok and self.c4_ok and self.c5_ok

    def __bool__(self):
        return self.ok


def small_cut(g: MultiGraph, root: VertexId) -> Optional[EdgeCut]:
    """An edge cut with at most two edges, or None if g is 3-edge-connected.

    A disconnected graph yields the empty cut with the root's component as side.
    Otherwise the vertex with the smallest connectivity to ``root`` (lowest id
    on ties) gives the cut, taken closest to ``root``.
    """
    comps = g.components()
    if len(comps) > 1:
        side = next(c for c in comps if root in c)
        return EdgeCut(frozenset(), side)
    best = None
    for u in sorted(g.vertices - {root}):
        lam = lambda_count(g, root, u, limit=3)
        if lam < 3 and (best is None or lam < best[0]):
            best = (lam, u)
            if lam <= 1:
                break
    if best is None:
        return None
    return lambda_(g, root, best[1]).cut


def nonconforming_cut(t: Triple, r: VertexId) -> Optional[EdgeCut]:
    """A k-edge cut between the center and ray r's image other than the edges at that image.

    The minimum cut closest to the center has the largest far side; if it is
    the single ray image then the cut at that image is the only k-cut.
    """
    x = t.sys.ray_image(r)
    res = lambda_(t.g, t.center, x)
    if res.count != t.k:
        return None
    at_x = frozenset(e for e in t.g.incident(x) if not t.g.is_loop(e))
    if res.cut.edges == at_x:
        return None
    return res.cut


def c4_violations(t: Triple) -> List[EdgeId]:
    sig = t.sigma_edges()
    good = {x for x in t.sys.ray_images() if t.g.degree(x) == t.k}
    out = []
    for e, (a, b) in t.g.edges.items():
        if e in sig:
            continue
        if a not in good and b not in good:
            out.append(e)
    return out


def c5_violations(t: Triple) -> List[VertexId]:
    g, k = t.g, t.k
    sig = t.sigma_edges()
    branch = set(t.sys.sigma.vmap.values())
    inner = t.sys.sigma.used_vertices() - branch
    paths = {e: t.sigma_path(e) for e in t.H.edges}
    out = []
    for v in sorted(inner):
        loose = [e for e in g.incident(v) if e not in sig]
        if len(loose) > 1:
            out.append(v)
            continue
        if not loose:
            continue
        for p in paths.values():
            if v in p.vertices:
                if p.vertices[-2] != v or g.degree(p.vertices[-1]) != k:
                    out.append(v)
                    break
    return out


def check_well_behaved(t: Triple) -> WellBehavedReport:
    g = t.g
    rep = WellBehavedReport()
    rep.c1 = small_cut(g, t.center)
    used = t.sys.sigma.used_vertices()
    rep.c2 = [v for v in sorted(g.vertices - used) if g.degree(v) != 3]
    for r in t.sys.rays:
        cut = nonconforming_cut(t, r)
        if cut is not None:
            rep.c3[r] = cut
    rep.c4 = c4_violations(t)
    rep.c5 = c5_violations(t)
    return rep


# -- peeled --------------------------------------------------------------------


def n_sigma(t: Triple) -> FrozenSet[VertexId]:
    """Ray images plus every endpoint of an edge outside E(sigma)."""
    sig = t.sigma_edges()
    out = set(t.sys.ray_images())
    for e, (a, b) in t.g.edges.items():
        if e not in sig:
            out.add(a)
            out.add(b)
    return frozenset(out)


def m_sigma(t: Triple) -> FrozenSet[VertexId]:
    return (n_sigma(t) & t.sys.sigma.used_vertices()) - t.sys.ray_images()


@dataclass
class PeeledReport:
    well_behaved: WellBehavedReport
    bad_ray_degrees: List[VertexId] = field(default_factory=list)
    stray_center_edges: List[EdgeId] = field(default_factory=list)
    extra_vertices: List[VertexId] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.well_behaved.ok
            and not self.bad_ray_degrees
            and not self.stray_center_edges
            and not self.extra_vertices
        )

    def __bool__(self):
        return self.ok


def check_peeled(t: Triple) -> PeeledReport:
    rep = PeeledReport(check_well_behaved(t))
    g, c = t.g, t.center
    rep.bad_ray_degrees = [r for r in t.sys.rays if g.degree(t.sys.ray_image(r)) != t.k]
    sig = t.sigma_edges()
    rep.stray_center_edges = [e for e in g.incident(c) if e not in sig]
    rep.extra_vertices = sorted(g.vertices - n_sigma(t) - {c})
    return rep


def is_peeled(t: Triple) -> bool:
    return check_peeled(t).ok


def s3_holds(g: MultiGraph, center: VertexId, images: Iterable[VertexId], k: int) -> bool:
    return all(lambda_count(g, center, x, limit=k) >= k for x in images)
