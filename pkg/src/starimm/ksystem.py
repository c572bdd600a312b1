"""k-systems: a star pattern strongly immersed around a center vertex.

A k-system of magnitude d in G is a star H with a strong slim immersion
sigma such that H has at least d edges, every ray of H has degree at most
k, and no edge cut of size below k separates the center image from a ray
image.  This module validates them, finds them with a flow network, and
otherwise produces a cut certificate ``(Y, K)`` of cost ``k|Y| + |K|``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Union

from .connectivity import (
    SINK,
    Arc,
    CapacitatedNetwork,
    EdgeCut,
    lambda_,
    lambda_count,
    sep_flow,
)
from .immersion import Immersion, Multistar, immersion_from_dict, immersion_to_dict, validate
from .multigraph import EdgeId, GraphError, MultiGraph, VertexId, format_edgelist, parse_edgelist

Number = Union[int, Fraction]


def d_of(k: int) -> int:
    """(2k+1)^(8k+4) * k^2 * (k+1), exactly."""
    return (2 * k + 1) ** (8 * k + 4) * k * k * (k + 1)


def ball_bound(k: int) -> int:
    """(2k+1)^(8k+4): bound on vertices within distance 8k+4 when degrees are at most 2k+1."""
    return (2 * k + 1) ** (8 * k + 4)


@dataclass(frozen=True)
class Threshold:
    k: int
    n: int

    @property
    def value(self) -> int:
        return d_of(self.k) * self.n


@dataclass(frozen=True)
class KSystem:
    k: int
    star: Multistar
    sigma: Immersion

    def __post_init__(self):
        if self.k < 3:
            raise ValueError("k-systems need k >= 3")
        if self.sigma.pattern != self.star.graph:
            raise GraphError("sigma does not immerse the star pattern")

    @property
    def host(self) -> MultiGraph:
        return self.sigma.host

    @property
    def pattern(self) -> MultiGraph:
        return self.star.graph

    @property
    def center_image(self) -> VertexId:
        return self.sigma.vmap[self.star.center]

    @property
    def rays(self):
        return self.star.rays

    def ray_image(self, r: VertexId) -> VertexId:
        return self.sigma.vmap[r]

    def ray_images(self) -> FrozenSet[VertexId]:
        return frozenset(self.sigma.vmap[r] for r in self.star.rays)

    @property
    def size(self) -> int:
        return self.star.graph.num_edges()


@dataclass
class KSystemReport:
    violations: List[str] = field(default_factory=list)
    weak_rays: Dict[VertexId, EdgeCut] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_ksystem(s: KSystem, magnitude: Number) -> KSystemReport:
    rep = KSystemReport()
    imrep = validate(s.sigma, "slim")
    rep.violations += [f"sigma: {v}" for v in imrep.violations]
    if s.size < magnitude:
        rep.violations.append(f"S1: pattern has {s.size} edges, fewer than {magnitude}")
    H = s.pattern
    for r in s.rays:
        if H.degree(r) > s.k:
            rep.violations.append(f"S2: ray {r} has degree {H.degree(r)} > {s.k}")
    if imrep.violations:
        return rep
    c = s.center_image
    for r in s.rays:
        x = s.ray_image(r)
        if lambda_count(s.host, c, x, limit=s.k) < s.k:
            cut = lambda_(s.host, c, x).cut
            rep.weak_rays[r] = cut
            rep.violations.append(f"S3: ray {r} is separated by a cut of size {len(cut)} {sorted(cut.edges)}")
    return rep


# -- separation network --------------------------------------------------------


def build_sep_network(g: MultiGraph, c: VertexId, X: Iterable[VertexId], k: int) -> CapacitatedNetwork:
    """Unit arcs both ways for X-free edges, one unit arc into X for edges entering X, cap-k arcs X -> sink."""
    xs = frozenset(X)
    if c in xs:
        raise GraphError("center belongs to the terminal set")
    if not xs:
        raise GraphError("terminal set is empty")
    for x in xs:
        g._check_vertex(x)
    g._check_vertex(c)
    arcs = []
    for e, (u, v) in g.edges.items():
        if u == v:
            continue
        if u not in xs and v not in xs:
            arcs.append(Arc(u, v, 1, e))
            arcs.append(Arc(v, u, 1, e))
        elif u not in xs:
            arcs.append(Arc(u, v, 1, e))
        elif v not in xs:
            arcs.append(Arc(v, u, 1, e))
        # edges inside X get no arc
    for x in sorted(xs):
        arcs.append(Arc(x, SINK, k, None))
    return CapacitatedNetwork(frozenset(g.vertices) | {SINK}, tuple(arcs), k, xs)


@dataclass(frozen=True)
class CutCertificate:
    Y: FrozenSet[VertexId]
    K: FrozenSet[EdgeId]
    k: int

    @property
    def cost(self) -> int:
        return self.k * len(self.Y) + len(self.K)


def certificate_holds(g: MultiGraph, c: VertexId, X: Iterable[VertexId], cert: CutCertificate) -> bool:
    """Component of G - Y - K containing c has no vertex of X."""
    h = g.remove_edges(cert.K).remove_vertices(cert.Y)
    reach = h.bfs_distances(c)
    return not (set(reach) & set(X))


def find_cut_certificate(
    g: MultiGraph, c: VertexId, X: Iterable[VertexId], k: int, threshold: int
) -> Union[KSystem, CutCertificate]:
    """A k-system with rays in X of magnitude >= threshold, or a certificate of cost < threshold.

    The k-system uses every path of the maximum flow; its rays must still pass
    S3, which holds when no cut below k separates c from a vertex of X.
    """
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    xs = frozenset(X)
    net = build_sep_network(g, c, xs, k)
    flow = sep_flow(net, c)
    if flow.value >= threshold:
        return _ksystem_from_paths(g, c, k, flow.paths)
    Y = frozenset(net.arcs[i].tail for i in flow.cut_arcs if net.arcs[i].head == SINK)
    K = frozenset(net.arcs[i].edge for i in flow.cut_arcs if net.arcs[i].head != SINK)
    cert = CutCertificate(Y, K, k)
    assert cert.cost == flow.value, "cut capacity differs from flow value"
    return cert


def _ksystem_from_paths(g: MultiGraph, c: VertexId, k: int, paths) -> KSystem:
    terminals = sorted({p.terminal for p in paths})
    ray_of = {x: i + 1 for i, x in enumerate(terminals)}
    ordered = sorted(paths, key=lambda p: (p.terminal, p.edges))
    pairs = [(0, ray_of[p.terminal]) for p in ordered]
    H = MultiGraph.from_edges(len(terminals) + 1, pairs)
    vmap = {0: c}
    vmap.update({i: x for x, i in ray_of.items()})
    emap = {i: frozenset(p.edges) for i, p in enumerate(ordered)}
    for p in ordered:
        # arcs into X lead only to the sink, so X is met at the path's end only
        assert p.edges, "flow path without graph edges"
    return KSystem(k, Multistar(H, 0), Immersion(H, g, vmap, emap))


# -- auxiliary graph on a terminal set -----------------------------------------


def build_gx(g: MultiGraph, X: Iterable[VertexId], m: int) -> MultiGraph:
    """Simple graph on X; u ~ v iff m edge-disjoint u-v paths avoid the rest of X."""
    xs = sorted(set(X))
    if m < 1:
        raise ValueError("m must be at least 1")
    if len(xs) < 2:
        raise ValueError("need at least two terminals")
    edges = {}
    for u, v in combinations(xs, 2):
        others = set(xs) - {u, v}
        if lambda_count(g, u, v, limit=m, forbidden=others) >= m:
            edges[len(edges)] = (u, v)
    return MultiGraph(xs, edges)


def respects(star_im: Immersion, s: KSystem, star_center: VertexId = 0) -> bool:
    if star_im.host != s.host:
        raise GraphError("star immersion and k-system live in different hosts")
    if star_im.vmap.get(star_center) != s.center_image:
        return False
    rays = s.ray_images()
    return all(x in rays for v, x in star_im.vmap.items() if v != star_center)


# -- JSON ---------------------------------------------------------------------


def certificate_to_dict(cert: CutCertificate) -> dict:
    return {"Y": sorted(cert.Y), "K": sorted(cert.K), "cost": str(cert.cost)}


def certificate_from_dict(d: dict, k: int) -> CutCertificate:
    try:
        cert = CutCertificate(frozenset(int(y) for y in d["Y"]), frozenset(int(e) for e in d["K"]), k)
        cost = int(d["cost"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed certificate JSON: {exc}") from None
    if cost != cert.cost:
        raise ValueError(f"certificate cost {cost} does not equal k|Y|+|K| = {cert.cost}")
    return cert


def ksystem_to_dict(s: KSystem) -> dict:
    return {
        "k": s.k,
        "center": s.star.center,
        "pattern": format_edgelist(s.pattern),
        "immersion": immersion_to_dict(s.sigma),
    }


def ksystem_from_dict(d: dict, host: MultiGraph) -> KSystem:
    try:
        H = parse_edgelist(d["pattern"])
        star = Multistar(H, int(d["center"]))
        sigma = immersion_from_dict(d["immersion"], H, host)
        return KSystem(int(d["k"]), star, sigma)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed k-system JSON: {exc}") from None


def certificate_to_json(cert: CutCertificate) -> str:
    return json.dumps(certificate_to_dict(cert))


def ksystem_to_json(s: KSystem) -> str:
    return json.dumps(ksystem_to_dict(s))
