"""Repair rules that turn a triple into a well-behaved one.

Each rule either does nothing (returns None) or produces a child triple with a
strictly smaller measure and a witness immersing the child host in the
parent host.  ``canonicalize`` applies the rules in the order C1, C2, C4, C3,
C5, restarting from C1 after every change.  Where several choices exist the
lowest id wins.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from ..connectivity import lambda_
from ..multigraph import EdgeId, MultiGraph, VertexId
from ..splitting import first_splittable_pair
from .triple import (
    PipelineError,
    ReductionWitness,
    Triple,
    c4_violations,
    check_well_behaved,
    identity_witness,
    make_witness,
    nonconforming_cut,
    rebuild,
    s3_holds,
    small_cut,
)


@dataclass(frozen=True)
class Step:
    rule: str
    child: Triple
    witness: ReductionWitness


StepLog = Callable[[Step, Triple], None]


def bfs_path(g: MultiGraph, src: VertexId, dst: VertexId, allowed: Iterable[VertexId]) -> List[EdgeId]:
    """Shortest src-dst path using only vertices in ``allowed``; lowest edge ids first."""
    ok = set(allowed)
    parent: Dict[VertexId, Tuple[VertexId, EdgeId]] = {}
    seen = {src}
    queue = deque([src])
    while queue and dst not in seen:
        y = queue.popleft()
        for e in g.incident(y):
            z = g.other_end(e, y)
            if z in seen or z not in ok:
                continue
            seen.add(z)
            parent[z] = (y, e)
            queue.append(z)
    if dst not in seen:
        raise PipelineError(f"no path from {src} to {dst} inside the given vertex set")
    out = []
    z = dst
    while z != src:
        y, e = parent[z]
        out.append(e)
        z = y
    out.reverse()
    return out


def _emap(t: Triple) -> Dict[EdgeId, FrozenSet[EdgeId]]:
    return dict(t.sys.sigma.emap)


# -- C1 ------------------------------------------------------------------------


def rule_c1(t: Triple) -> Optional[Step]:
    """Cut away the far side of an edge cut of size at most two."""
    g, c = t.g, t.center
    cut = small_cut(g, c)
    if cut is None:
        return None
    C = cut.side
    D = g.vertices - C
    K = sorted(cut.edges)
    g1 = g.remove_vertices(D)
    emap = {e: frozenset(f for f in s if g1.has_edge(f)) for e, s in _emap(t).items()}
    theta_e = {}
    if len(K) == 2:
        a = [x if x in C else y for x, y in (g.endpoints(e) for e in K)]
        b = [y if x in C else x for x, y in (g.endpoints(e) for e in K)]
        g1, new = g1.add_edge(a[0], a[1])
        theta_e[new] = set(K) | set(bfs_path(g, b[0], b[1], D))
        for e, s in t.sys.sigma.emap.items():
            hits = s & cut.edges
            if len(hits) == 2:
                emap[e] = emap[e] | {new}
            elif hits:
                raise PipelineError("a sigma path crosses a 2-edge cut once")
    child = rebuild(t, g1, emap=emap)
    return Step("C1", child, make_witness(g1, g, emap=theta_e))


# -- C2 ------------------------------------------------------------------------


def rule_c2(t: Triple) -> Optional[Step]:
    """Lift a splittable pair at a vertex outside V(sigma) of degree above 3."""
    g = t.g
    used = t.sys.sigma.used_vertices()
    for v in sorted(g.vertices - used):
        if g.degree(v) <= 3:
            continue
        if any(g.is_loop(e) for e in g.incident(v)):
            continue  # C4 removes the loop first
        pair = first_splittable_pair(g, v)
        if pair is None:
            raise PipelineError(f"no splittable pair at {v} in a 3-edge-connected graph")
        g1, h = g.lift(pair[0], pair[1], at=v)
        return Step("C2", rebuild(t, g1), make_witness(g1, g, emap={h: pair}))
    return None


# -- C4 ------------------------------------------------------------------------


def rule_c4(t: Triple) -> Optional[Step]:
    """Delete the first stray edge whose removal keeps every ray k-connected to the center."""
    g = t.g
    images = sorted(t.sys.ray_images())
    for e in c4_violations(t):
        g1 = g.remove_edge(e)
        if g.is_loop(e) or s3_holds(g1, t.center, images, t.k):
            return Step("C4", rebuild(t, g1), make_witness(g1, g))
    return None


# -- C3 ------------------------------------------------------------------------


def rule_c3(t: Triple) -> Optional[Step]:
    """Contract the far side of a nonconforming k-cut onto a single new ray image."""
    g, c, k = t.g, t.center, t.k
    for r in t.sys.rays:
        cut = nonconforming_cut(t, r)
        if cut is None:
            continue
        x = t.sys.ray_image(r)
        far = g.vertices - cut.side
        kset = cut.edges
        # k edge-disjoint paths from x; each leaves the far side through one cut edge
        prefix: Dict[EdgeId, List[EdgeId]] = {}
        for p in lambda_(g, x, c).paths[:k]:
            for i, e in enumerate(p.edges):
                if e in kset:
                    prefix[e] = list(p.edges[:i])
                    break
        if set(prefix) != set(kset):
            raise PipelineError("cut edges are not matched by the path family")
        g1, w = g.contract(far)
        H = t.H
        emap = _emap(t)
        for h in t.H.edges:
            if not (emap[h] & kset):
                continue
            path = t.sigma_path(h)
            cut_at = next(i for i, e in enumerate(path.edges) if e in kset)
            emap[h] = frozenset(path.edges[: cut_at + 1])
            H = H.reattach(h, t.sys.star.center, r)
        vmap = dict(t.sys.sigma.vmap)
        vmap[r] = w
        child = rebuild(t, g1, H=H, vmap=vmap, emap=emap)
        theta_e = {e: {e} | set(prefix[e]) for e in kset}
        return Step("C3", child, make_witness(g1, g, vmap={w: x}, emap=theta_e))
    return None


# -- C5 ------------------------------------------------------------------------


def _redirect(t: Triple, g1: MultiGraph, f0: EdgeId, edges: List[EdgeId], end: VertexId) -> Triple:
    """Child where sigma(f0) becomes ``edges`` and f0 is re-attached to the ray imaged at ``end``."""
    ray = t.ray_of_image().get(end)
    if ray is None:
        raise PipelineError(f"rerouted path ends at {end}, which is not a ray image")
    H = t.H.reattach(f0, t.sys.star.center, ray)
    emap = _emap(t)
    emap[f0] = frozenset(edges)
    return rebuild(t, g1, H=H, emap=emap)


def rule_c5(t: Triple) -> Optional[Step]:
    g, k = t.g, t.k
    sig = t.sigma_edges()
    branch = set(t.sys.sigma.vmap.values())
    owner = t.owner()
    inner = sorted(t.sys.sigma.used_vertices() - branch)
    for u in inner:
        loose = [e for e in g.incident(u) if e not in sig]
        if len(loose) >= 2:
            pair = first_splittable_pair(g, u, must_include=frozenset(loose))
            if pair is None:
                raise PipelineError(f"no splittable pair with a stray edge at {u}")
            e, f = pair
            ue = g.other_end(e, u)
            g1, h = g.lift(e, f, at=u)
            theta = make_witness(g1, g, emap={h: (e, f)})
            if f not in sig:
                return Step("C5", rebuild(t, g1), theta)
            f0 = owner[f]
            path = t.sigma_path(f0)
            pos_u = path.vertices.index(u)
            w = g.other_end(f, u)
            if path.vertices.index(w) < pos_u:
                # the path now jumps from w straight to ue along the new edge
                edges = list(path.edges[: pos_u - 1]) + [h]
                return Step("C5", _redirect(t, g1, f0, edges, ue), theta)
            e2 = next(x for x in loose if x != e)
            edges = list(path.edges[:pos_u]) + [e2]
            return Step("C5", _redirect(t, g1, f0, edges, g.other_end(e2, u)), theta)
        if len(loose) == 1:
            e = loose[0]
            xu = g.other_end(e, u)
            for f0 in sorted(t.H.edges):
                path = t.sigma_path(f0)
                if u not in path.vertices:
                    continue
                pos_u = path.vertices.index(u)
                L = len(path.edges)
                if pos_u == L - 1 and g.degree(path.vertices[-1]) == k:
                    continue
                child = _redirect(t, g, f0, list(path.edges[:pos_u]) + [e], xu)
                theta = identity_witness(g)
                if pos_u < L - 1:
                    return Step("C5", child, theta)
                # same length: the freed last edge is now stray, remove it or
                # contract past the cut that protects it
                nxt = rule_c4(child) or rule_c3(child)
                if nxt is None:
                    raise PipelineError(f"rerouting at {u} left nothing to reduce")
                return Step("C5+" + nxt.rule, nxt.child, theta.then(nxt.witness))
    return None


RULES = (rule_c1, rule_c2, rule_c4, rule_c3, rule_c5)


def canonicalize(t: Triple, log: Optional[StepLog] = None) -> Tuple[Triple, ReductionWitness]:
    """Apply repair rules until the triple is well-behaved.

    ``log`` is called with every applied step and its parent.
    """
    witness = identity_witness(t.g)
    cur = t
    while True:
        for rule in RULES:
            step = rule(cur)
            if step is not None:
                break
        else:
            break
        if step.child.measure() >= cur.measure():
            raise PipelineError(f"rule {step.rule} did not decrease the measure")
        if log is not None:
            log(step, cur)
        witness = witness.then(step.witness)
        cur = step.child
    rep = check_well_behaved(cur)
    if not rep.ok:
        raise PipelineError(f"no rule applies but the triple is not well-behaved: {rep}")
    return cur, witness
