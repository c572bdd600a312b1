"""Short path families, greedy star extraction and the end-to-end driver."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..connectivity import is_edge_disjoint_family, lambda_
from ..immersion import Immersion, StarShape, compose, make_star, slim, validate
from ..ksystem import KSystem, respects, validate_ksystem
from ..multigraph import EdgeId, EdgePath, MultiGraph, VertexId
from .canonical import Step, canonicalize
from .core import build_core, peel, reduce_ray_degrees
from .triple import PipelineError, ReductionWitness, Triple, check_peeled, m_sigma


def length_bound(k: int) -> int:
    return 4 * k + 2


def separation(k: int) -> int:
    return 8 * k + 5


@dataclass(frozen=True)
class PathFamily:
    ray: VertexId
    source: VertexId  # ray image
    target: VertexId  # center image
    paths: Tuple[EdgePath, ...]

    def edges(self) -> FrozenSet[EdgeId]:
        return frozenset(e for p in self.paths for e in p.edges)

    def max_length(self) -> int:
        return max((len(p) for p in self.paths), default=0)


def _erase_loops(g: MultiGraph, start: VertexId, edges: Sequence[EdgeId]) -> List[EdgeId]:
    verts = [start]
    out: List[EdgeId] = []
    pos = {start: 0}
    for e in edges:
        nxt = g.other_end(e, verts[-1])
        if nxt in pos:
            i = pos[nxt]
            for v in verts[i + 1:]:
                del pos[v]
            verts = verts[: i + 1]
            out = out[:i]
        else:
            pos[nxt] = len(verts)
            verts.append(nxt)
            out.append(e)
    return out


def short_paths(t: Triple, ray: VertexId, initial: Optional[Sequence[Sequence[EdgeId]]] = None) -> PathFamily:
    """k edge-disjoint paths from the ray image to the center, each of length at most 4k+2.

    Starts from ``initial`` (default: a maximum flow family) and applies two
    exchanges while they lower (total length, -number of images swallowed
    whole):
    (a) a path using the far edge of a two-edge image finishes through that
        image's free center edge;
    (b) at a vertex z that is a ray image or in M(sigma), and lies on no
        image sharing an edge with the family, the path follows such an image
        from z straight to the center.
    """
    g, c, k = t.g, t.center, t.k
    x = t.sys.ray_image(ray)
    if initial is None:
        res = lambda_(g, x, c)
        if res.count < k:
            raise PipelineError(f"ray {ray} has only {res.count} edge-disjoint paths to the center")
        Q: List[List[EdgeId]] = [list(p.edges) for p in res.paths[:k]]
    else:
        Q = [list(p) for p in initial]
        if len(Q) != k or not is_edge_disjoint_family(g, [EdgePath(g, x, p) for p in Q], x, c):
            raise ValueError("initial family is not k edge-disjoint paths from the ray image to the center")
    images = {h: t.sigma_path(h) for h in sorted(t.H.edges)}
    owner = t.owner()
    anchors = sorted(t.sys.ray_images() | m_sigma(t))

    def potential(fam):
        used = {e for p in fam for e in p}
        swallowed = sum(1 for h, p in images.items() if set(p.edges) <= used)
        return (sum(len(p) for p in fam), -swallowed)

    def candidates(fam):
        used = {e for p in fam for e in p}
        for i, p in enumerate(fam):
            walk = EdgePath(g, x, p).vertices
            # rule (a)
            for j, f in enumerate(p):
                h = owner.get(f)
                if h is None:
                    continue
                img = images[h]
                if len(img.edges) != 2 or f == img.edges[0]:
                    continue
                free = img.edges[0]
                if free in used:
                    continue
                m = img.vertices[1]
                if m not in walk[: j + 2]:
                    continue
                cut = walk.index(m)
                yield i, _erase_loops(g, x, p[:cut] + [free])
            # rule (b)
            touched = {v for h, img in images.items() if set(img.edges) & used for v in img.vertices}
            for j, z in enumerate(walk[:-1]):
                if z not in anchors or z in touched:
                    continue
                for h, img in images.items():
                    if z not in img.vertices:
                        continue
                    to_center = list(reversed(img.edges[: img.vertices.index(z)]))
                    if len(to_center) < len(p) - j:
                        yield i, _erase_loops(g, x, p[:j] + to_center)
                    break

    cur = potential(Q)
    improved = True
    while improved:
        improved = False
        for i, newp in candidates(Q):
            trial = Q[:i] + [newp] + Q[i + 1:]
            pot = potential(trial)
            if pot < cur:
                Q, cur, improved = trial, pot, True
                break
    fam = PathFamily(ray, x, c, tuple(EdgePath(g, x, p) for p in Q))
    if fam.max_length() > length_bound(k):
        raise PipelineError(f"path family for ray {ray} has length {fam.max_length()} > {length_bound(k)}")
    seen = set()
    for p in fam.paths:
        if p.end != c or not p.is_path() or seen & set(p.edges):
            raise PipelineError(f"path family for ray {ray} is not edge-disjoint")
        seen |= set(p.edges)
    return fam


@dataclass
class StarResult:
    requested: int
    rays: Tuple[VertexId, ...]  # chosen rays of the triple's pattern
    families: Tuple[PathFamily, ...]
    immersion: Optional[Immersion]  # strong immersion of S_{|rays|,k} in the triple's host

    @property
    def achieved(self) -> int:
        return len(self.rays)

    @property
    def shortfall(self) -> int:
        return max(0, self.requested - self.achieved)

    @property
    def complete(self) -> bool:
        return self.shortfall == 0 and self.immersion is not None


def select_far_rays(t: Triple, n: int) -> List[VertexId]:
    """Greedy: rays in id order whose images are pairwise at distance >= 8k+5 in G - center."""
    g, c = t.g, t.center
    sep = separation(t.k)
    chosen: List[VertexId] = []
    balls: List[Dict[VertexId, int]] = []
    for r in t.sys.rays:
        if len(chosen) == n:
            break
        x = t.sys.ray_image(r)
        if all(b.get(x, sep) >= sep for b in balls):
            chosen.append(r)
            balls.append(g.bfs_distances(x, avoid=[c]))
    return chosen


def extract_star(t: Triple, n: int) -> StarResult:
    if n < 1:
        raise ValueError("n must be at least 1")
    g, k = t.g, t.k
    hi = max((g.degree(v) for v in g.vertices if v != t.center), default=0)
    if hi > 2 * k + 1:
        raise PipelineError(f"a non-center vertex has degree {hi} > 2k+1")
    rays = select_far_rays(t, n)
    fams = [short_paths(t, r) for r in rays]
    used_e: set = set()
    inner: set = set()
    for f in fams:
        if used_e & f.edges():
            raise PipelineError("path families of different rays share an edge")
        used_e |= f.edges()
    for f in fams:
        mids = {v for p in f.paths for v in p.vertices[1:-1]}
        if mids & inner:
            raise PipelineError("path families of different rays share an inner vertex")
        inner |= mids
    ends = {f.source for f in fams} | {t.center}
    if inner & ends:
        raise PipelineError("a path family runs through another ray image or the center")
    if len(rays) < 2:
        return StarResult(n, tuple(rays), tuple(fams), None)
    star = make_star(StarShape(len(rays), k))
    vmap = {0: t.center}
    emap = {}
    for i, f in enumerate(fams):
        vmap[i + 1] = f.source
        for j, p in enumerate(f.paths):
            emap[i * k + j] = frozenset(p.edges)
    alpha = Immersion(star.graph, g, vmap, emap)
    rep = validate(alpha, "strong")
    if not rep.ok:
        raise PipelineError(f"assembled star is not a strong immersion: {rep.violations}")
    if not respects(alpha, t.sys):
        raise PipelineError("assembled star does not respect the k-system")
    return StarResult(n, tuple(rays), tuple(fams), alpha)


# -- driver --------------------------------------------------------------------


@dataclass
class Stage:
    name: str
    triple: Triple
    witness: ReductionWitness  # child host -> previous stage's host


@dataclass
class PipelineResult:
    stages: List[Stage]
    star: StarResult
    immersion: Optional[Immersion]  # in the original graph
    steps: List[Tuple[str, int]] = field(default_factory=list)  # (rule, measure after)

    @property
    def complete(self) -> bool:
        return self.star.complete and self.immersion is not None


def trace_record(stage: Stage) -> dict:
    t = stage.triple
    return {
        "stage": stage.name,
        "vertices": t.g.num_vertices(),
        "edges": t.g.num_edges(),
        "sigma_edges": len(t.sigma_edges()),
        "measure": t.measure(),
        "magnitude": t.sys.size,
        "rays": len(t.sys.rays),
        "witness": stage.witness.digest(),
    }


def trace_jsonl(result: PipelineResult) -> str:
    return "".join(json.dumps(trace_record(s)) + "\n" for s in result.stages)


def find_star_immersion(g: MultiGraph, sys: KSystem, n: int) -> PipelineResult:
    """Run every stage and map the extracted star back into ``g``."""
    if sys.host != g:
        raise ValueError("k-system lives in a different graph")
    rep = validate_ksystem(sys, 1)
    if not rep.ok:
        raise ValueError(f"invalid k-system: {rep.violations}")
    steps: List[Tuple[str, int]] = []

    def log(step: Step, parent: Triple) -> None:
        steps.append((step.rule, step.child.measure()))

    t0 = Triple(sys)
    stages = [Stage("input", t0, ReductionWitness(Immersion(g, g, {v: v for v in g.vertices},
                                                            {e: frozenset([e]) for e in g.edges})))]
    t1, w1 = canonicalize(t0, log)
    stages.append(Stage("canonicalize", t1, w1))
    t2, w2 = reduce_ray_degrees(t1, log)
    stages.append(Stage("reduce_ray_degrees", t2, w2))
    t3, w3, _ = build_core(t2)
    stages.append(Stage("build_core", t3, w3))
    t4, w4 = peel(t3, log)
    stages.append(Stage("peel", t4, w4))
    star = extract_star(t4, n)
    total = w1.then(w2).then(w3).then(w4)
    final = None
    if star.immersion is not None:
        final = slim(compose(total.theta, star.immersion))
        vr = validate(final, "strong")
        if not vr.ok:
            raise PipelineError(f"star mapped back into the input is not strong: {vr.violations}")
        if not respects(final, sys):
            raise PipelineError("star mapped back into the input does not respect the k-system")
    return PipelineResult(stages, star, final, steps)
