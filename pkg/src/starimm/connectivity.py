"""Local edge connectivity via unit-capacity augmenting paths.

Every undirected non-loop edge can carry one unit of flow in either
direction.  Augmenting paths are found by breadth-first search that scans
incident edges in ascending edge id, so flows, path families and cuts are
reproducible.  The second half of the module holds a small general
max-flow solver for directed networks with integer capacities, used for the
separation network built in :mod:`starimm.ksystem`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .multigraph import EdgeId, EdgePath, GraphError, MultiGraph, VertexId


@dataclass(frozen=True)
class EdgeCut:
    edges: FrozenSet[EdgeId]
    side: FrozenSet[VertexId]  # contains the source

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class LambdaResult:
    count: int
    paths: Tuple[EdgePath, ...]
    cut: EdgeCut


def _unit_flow(
    g: MultiGraph,
    s: VertexId,
    t: VertexId,
    limit: Optional[int] = None,
    forbidden: FrozenSet[VertexId] = frozenset(),
):
    """Return (value, flow_to, reachable).

    ``flow_to[e]`` is the head of edge e's unit of flow.  ``reachable`` is the
    residual-reachable set from ``s`` after the last search, which is only a
    minimum cut side when ``limit`` did not stop the loop early.
    """
    inc = g._incidence()
    ends = g._edges
    flow_to: Dict[EdgeId, VertexId] = {}
    value = 0
    while True:
        parent: Dict[VertexId, Optional[Tuple[VertexId, EdgeId]]] = {s: None}
        if limit is not None and value >= limit:
            return value, flow_to, None
        queue = deque([s])
        found = False
        while queue and not found:
            x = queue.popleft()
            for e in inc[x]:
                a, b = ends[e]
                if a == b:
                    continue
                y = b if a == x else a
                if y in parent or y in forbidden:
                    continue
                if flow_to.get(e) == y:
                    continue
                parent[y] = (x, e)
                if y == t:
                    found = True
                    break
                queue.append(y)
        if not found:
            return value, flow_to, frozenset(parent)
        y = t
        while y != s:
            x, e = parent[y]
            if flow_to.get(e) == x:
                del flow_to[e]
            else:
                flow_to[e] = y
            y = x
        value += 1


def _decompose_unit(g: MultiGraph, s: VertexId, t: VertexId, flow_to: Dict[EdgeId, VertexId], value: int) -> List[EdgePath]:
    out: Dict[VertexId, List[EdgeId]] = {}
    for e in sorted(flow_to):
        out.setdefault(g.other_end(e, flow_to[e]), []).append(e)
    for lst in out.values():
        lst.reverse()  # pop() yields the lowest id
    paths = []
    for _ in range(value):
        verts = [s]
        edges: List[EdgeId] = []
        pos = {s: 0}
        cur = s
        while cur != t:
            e = out[cur].pop()
            nxt = flow_to[e]
            if nxt in pos:
                # drop the circulation that closed here
                i = pos[nxt]
                for v in verts[i + 1:]:
                    del pos[v]
                verts = verts[: i + 1]
                edges = edges[:i]
            else:
                pos[nxt] = len(verts)
                verts.append(nxt)
                edges.append(e)
            cur = nxt
        paths.append(EdgePath(g, s, edges))
    return paths


def lambda_(g: MultiGraph, s: VertexId, t: VertexId, forbidden: Iterable[VertexId] = ()) -> LambdaResult:
    """Maximum number of pairwise edge-disjoint s-t paths, with a matching cut.

    Vertices in ``forbidden`` are treated as deleted.  The returned cut is the
    minimum cut closest to ``s``.
    """
    if s == t:
        raise GraphError("source and sink coincide")
    g._check_vertex(s)
    g._check_vertex(t)
    banned = frozenset(forbidden)
    if s in banned or t in banned:
        raise GraphError("source or sink is forbidden")
    value, flow_to, reach = _unit_flow(g, s, t, forbidden=banned)
    paths = _decompose_unit(g, s, t, flow_to, value)
    cut_edges = frozenset(
        e for e, (a, b) in g._edges.items()
        if (a in reach) != (b in reach) and a not in banned and b not in banned
    )
    return LambdaResult(value, tuple(paths), EdgeCut(cut_edges, reach))


def lambda_count(g: MultiGraph, s: VertexId, t: VertexId, limit: Optional[int] = None,
                 forbidden: Iterable[VertexId] = ()) -> int:
    """Just the number, optionally stopping once ``limit`` paths are found."""
    if s == t:
        raise GraphError("source and sink coincide")
    g._check_vertex(s)
    g._check_vertex(t)
    return _unit_flow(g, s, t, limit=limit, forbidden=frozenset(forbidden))[0]


def is_k_connected_pair(g: MultiGraph, s: VertexId, t: VertexId, k: int) -> bool:
    return lambda_count(g, s, t, limit=k) >= k


def min_cut_between(g: MultiGraph, s: VertexId, t: VertexId) -> EdgeCut:
    return lambda_(g, s, t).cut


def separates(g: MultiGraph, cut_edges: Iterable[EdgeId], s: VertexId, t: VertexId) -> bool:
    """Independent check: is ``t`` unreachable from ``s`` once the edges are gone?"""
    h = g.remove_edges(set(cut_edges))
    return t not in h.bfs_distances(s)


def is_edge_disjoint_family(g: MultiGraph, paths: Sequence[EdgePath], s: VertexId, t: VertexId) -> bool:
    seen = set()
    for p in paths:
        if p.start != s or p.end != t or not p.is_path():
            return False
        for e in p.edges:
            if e in seen or not g.has_edge(e):
                return False
            seen.add(e)
    return True


# -- capacitated directed networks --------------------------------------------

SINK = -1


@dataclass(frozen=True)
class Arc:
    tail: VertexId
    head: VertexId
    cap: int
    edge: Optional[EdgeId]  # the graph edge this arc stands for; None for sink arcs


@dataclass(frozen=True)
class CapacitatedNetwork:
    nodes: FrozenSet[VertexId]  # graph vertices plus SINK
    arcs: Tuple[Arc, ...]
    k: int
    terminals: FrozenSet[VertexId]
    sink: VertexId = SINK


@dataclass(frozen=True)
class FlowPath:
    edges: Tuple[EdgeId, ...]  # graph edges, source first
    terminal: VertexId  # last graph vertex before the sink


@dataclass(frozen=True)
class SepFlow:
    value: int
    paths: Tuple[FlowPath, ...]
    cut_arcs: FrozenSet[int]  # indices into net.arcs
    side: FrozenSet[VertexId]

    def cut_capacity(self, net: CapacitatedNetwork) -> int:
        return sum(net.arcs[i].cap for i in self.cut_arcs)


def _max_flow(net: CapacitatedNetwork, source: VertexId) -> Tuple[int, List[int], FrozenSet[VertexId]]:
    sink = net.sink
    arcs = net.arcs
    flow = [0] * len(arcs)
    # residual adjacency: (arc index, forward?) in arc order
    adj: Dict[VertexId, List[Tuple[int, bool]]] = {v: [] for v in net.nodes}
    for i, a in enumerate(arcs):
        adj[a.tail].append((i, True))
        adj[a.head].append((i, False))
    value = 0
    while True:
        parent: Dict[VertexId, Optional[Tuple[int, bool]]] = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            x = queue.popleft()
            for i, fwd in adj[x]:
                a = arcs[i]
                y = a.head if fwd else a.tail
                if y in parent:
                    continue
                residual = a.cap - flow[i] if fwd else flow[i]
                if residual <= 0:
                    continue
                parent[y] = (i, fwd)
                queue.append(y)
        if sink not in parent:
            return value, flow, frozenset(parent)
        bottleneck = None
        y = sink
        while y != source:
            i, fwd = parent[y]
            a = arcs[i]
            r = a.cap - flow[i] if fwd else flow[i]
            bottleneck = r if bottleneck is None else min(bottleneck, r)
            y = a.tail if fwd else a.head
        y = sink
        while y != source:
            i, fwd = parent[y]
            a = arcs[i]
            flow[i] += bottleneck if fwd else -bottleneck
            y = a.tail if fwd else a.head
        value += bottleneck


def sep_flow(net: CapacitatedNetwork, c: VertexId) -> SepFlow:
    """Integral maximum flow from ``c`` to the sink, its unit-path decomposition and a minimum cut."""
    if c not in net.nodes or c == net.sink:
        raise GraphError(f"source {c} is not a network node")
    value, flow, reach = _max_flow(net, c)
    arcs = net.arcs
    # opposed unit arcs of one graph edge that both carry flow cancel out
    by_edge: Dict[EdgeId, List[int]] = {}
    for i, a in enumerate(arcs):
        if a.edge is not None:
            by_edge.setdefault(a.edge, []).append(i)
    for idx in by_edge.values():
        if len(idx) == 2 and flow[idx[0]] > 0 and flow[idx[1]] > 0:
            m = min(flow[idx[0]], flow[idx[1]])
            flow[idx[0]] -= m
            flow[idx[1]] -= m
    out: Dict[VertexId, List[int]] = {}
    for i, a in enumerate(arcs):
        if flow[i] > 0:
            out.setdefault(a.tail, []).append(i)
    remaining = list(flow)
    paths = []
    for _ in range(value):
        verts = [c]
        used: List[int] = []
        pos = {c: 0}
        cur = c
        while cur != net.sink:
            i = next(j for j in out[cur] if remaining[j] > 0)
            remaining[i] -= 1
            nxt = arcs[i].head
            if nxt in pos:
                p = pos[nxt]
                for v in verts[p + 1:]:
                    del pos[v]
                verts = verts[: p + 1]
                used = used[:p]
            else:
                pos[nxt] = len(verts)
                verts.append(nxt)
                used.append(i)
            cur = nxt
        paths.append(FlowPath(tuple(arcs[i].edge for i in used[:-1]), verts[-2]))
    cut = frozenset(i for i, a in enumerate(arcs) if a.tail in reach and a.head not in reach)
    return SepFlow(value, tuple(paths), cut, reach)
