"""Ray-degree reduction, the core of a triple, and peeling high-degree vertices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from ..connectivity import EdgeCut
from ..multigraph import EdgeId, MultiGraph
from .canonical import Step, StepLog, canonicalize
from .triple import (
    PipelineError,
    ReductionWitness,
    Triple,
    check_peeled,
    identity_witness,
    make_witness,
    n_sigma,
    rebuild,
    s3_holds,
)


def reduce_ray_degrees(t: Triple, log: Optional[StepLog] = None) -> Tuple[Triple, ReductionWitness]:
    """Drop rays whose image has degree above k, then canonicalize again."""
    g, k = t.g, t.k
    drop = [r for r in t.sys.rays if g.degree(t.sys.ray_image(r)) > k]
    witness = identity_witness(g)
    cur = t
    if drop:
        if len(drop) == len(t.sys.rays):
            raise PipelineError("every ray image has degree above k")
        H = t.H.remove_vertices(drop)
        cur = rebuild(t, g, H=H)
        if log is not None:
            log(Step("drop-rays", cur, witness), t)
    cur, w2 = canonicalize(cur, log)
    witness = witness.then(w2)
    bad = [r for r in cur.sys.rays if cur.g.degree(cur.sys.ray_image(r)) != k]
    if bad:
        raise PipelineError(f"rays {bad} do not have degree k after re-canonicalizing")
    return cur, witness


@dataclass(frozen=True)
class OriginFunction:
    """Core edge -> the parent edge it stands for in cut arguments."""

    mapping: Mapping[EdgeId, EdgeId]

    def __call__(self, e: EdgeId) -> EdgeId:
        return self.mapping[e]

    def image_of_cut(self, cut: EdgeCut) -> frozenset:
        return frozenset(self.mapping[e] for e in cut.edges)


def absorb_center_edges(t: Triple) -> Triple:
    """Add every stray center-ray edge to H as a one-edge image."""
    g, c = t.g, t.center
    sig = t.sigma_edges()
    ray_of = t.ray_of_image()
    H = t.H
    emap = dict(t.sys.sigma.emap)
    for e in g.incident(c):
        if e in sig:
            continue
        x = g.other_end(e, c)
        if x not in ray_of:
            raise PipelineError(f"stray center edge {e} does not reach a ray image")
        H, new = H.add_edge(t.sys.star.center, ray_of[x])
        emap[new] = frozenset([e])
    return rebuild(t, g, H=H, emap=emap)


def build_core(t: Triple) -> Tuple[Triple, ReductionWitness, OriginFunction]:
    """Keep the center and N(sigma); each image jumps from the center to its first N-vertex."""
    g, k = t.g, t.k
    bad = [r for r in t.sys.rays if g.degree(t.sys.ray_image(r)) != k]
    if bad:
        raise PipelineError(f"core needs ray images of degree k; rays {bad} differ")
    t = absorb_center_edges(t)
    c = t.center
    N = n_sigma(t)
    if c in N:
        raise PipelineError("the center has an edge outside sigma")
    g1 = g.induced(N | {c})
    origin: Dict[EdgeId, EdgeId] = {e: e for e in g1.edges}
    emap = {}
    theta_e = {}
    for h in sorted(t.H.edges):
        path = t.sigma_path(h)
        i = next(j for j, v in enumerate(path.vertices) if j > 0 and v in N)
        tail = list(path.edges[i:])
        for e in tail:
            a, b = g.endpoints(e)
            if a not in N or b not in N:
                raise PipelineError(f"image of {h} leaves N(sigma) after first entering it")
        if i == 1:
            emap[h] = frozenset(path.edges)
            continue
        g1, f = g1.add_edge(c, path.vertices[i])
        theta_e[f] = path.edges[:i]
        origin[f] = path.edges[i - 1]
        emap[h] = frozenset([f] + tail)
    child = rebuild(t, g1, emap=emap)
    return child, make_witness(g1, g, emap=theta_e), OriginFunction(origin)


def _high_vertex(t: Triple) -> Optional[int]:
    lim = 2 * t.k + 2
    for v in sorted(t.g.vertices - {t.center}):
        if t.g.degree(v) >= lim:
            return v
    return None


def _peel_once(t: Triple, h: EdgeId, v) -> Step:
    path = t.sigma_path(h)
    if len(path.edges) != 2 or path.vertices[1] != v:
        raise PipelineError(f"image of {h} is not a two-edge path through {v}")
    f1, f2 = path.edges
    g1, f = t.g.lift(f1, f2, at=v)
    emap = dict(t.sys.sigma.emap)
    emap[h] = frozenset([f])
    child = rebuild(t, g1, emap=emap)
    if not s3_holds(g1, child.center, child.sys.ray_images(), t.k):
        raise PipelineError(f"lifting the image of {h} at {v} broke k-connectivity to a ray")
    return Step("peel", child, make_witness(g1, t.g, emap={f: (f1, f2)}))


def peel(t: Triple, log: Optional[StepLog] = None) -> Tuple[Triple, ReductionWitness]:
    """Shortcut images through vertices of degree at least 2k+2 until none remain.

    Candidate images are tried in ascending edge id and the first lift that
    keeps the triple peeled is taken.  If every lift breaks peeledness the
    first one is used and the triple is re-canonicalized and re-cored.
    """
    witness = identity_witness(t.g)
    cur = t
    while True:
        v = _high_vertex(cur)
        if v is None:
            break
        through = [h for h in sorted(cur.H.edges) if v in cur.sigma_path(h).vertices[1:-1]]
        if not through:
            raise PipelineError(f"vertex {v} has degree >= 2k+2 but no image passes through it")
        chosen = None
        for h in through:
            step = _peel_once(cur, h, v)
            if check_peeled(step.child).ok:
                chosen = step
                break
        parent = cur
        if chosen is None:
            chosen = _peel_once(cur, through[0], v)
            if log is not None:
                log(chosen, parent)
            witness = witness.then(chosen.witness)
            cur, w2 = canonicalize(chosen.child, log)
            bad = [r for r in cur.sys.rays if cur.g.degree(cur.sys.ray_image(r)) != cur.k]
            if bad:
                cur, w3 = reduce_ray_degrees(cur, log)
                w2 = w2.then(w3)
            before = cur
            cur, w4, _ = build_core(cur)
            if log is not None:
                log(Step("core", cur, w4), before)
            witness = witness.then(w2).then(w4)
            continue
        if log is not None:
            log(chosen, parent)
        witness = witness.then(chosen.witness)
        cur = chosen.child
    rep = check_peeled(cur)
    if not rep.ok:
        raise PipelineError(f"peel output is not peeled: {rep}")
    return cur, witness
