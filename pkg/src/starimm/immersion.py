"""Immersions of a pattern multigraph in a host multigraph.

An immersion maps pattern vertices injectively to host vertices (branch
vertices) and pattern edges to pairwise edge-disjoint connected host
subgraphs, given here as sets of host edge ids.  ``validate`` checks the
weak conditions, the strong condition (no image passes through a branch
vertex the edge is not incident with) and slimness (images are paths, or
cycles for loops).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from .multigraph import EdgeId, EdgePath, GraphError, MultiGraph, VertexId, order_path

MODES = ("weak", "strong", "slim")


@dataclass(frozen=True)
class Immersion:
    pattern: MultiGraph
    host: MultiGraph
    vmap: Mapping[VertexId, VertexId]
    emap: Mapping[EdgeId, FrozenSet[EdgeId]]

    def __post_init__(self):
        object.__setattr__(self, "vmap", dict(sorted(self.vmap.items())))
        object.__setattr__(self, "emap", {e: frozenset(s) for e, s in sorted(self.emap.items())})

    def branch_vertices(self) -> FrozenSet[VertexId]:
        return frozenset(self.vmap.values())

    def image_vertices(self, e: EdgeId) -> FrozenSet[VertexId]:
        out = set(self.host.edge_subgraph_vertices(self.emap[e]))
        out.update(self.vmap[v] for v in self.pattern.endpoints(e))
        return frozenset(out)

    def used_edges(self) -> FrozenSet[EdgeId]:
        """E(theta)."""
        out: Set[EdgeId] = set()
        for s in self.emap.values():
            out |= s
        return frozenset(out)

    def used_vertices(self) -> FrozenSet[VertexId]:
        """V(theta), including branch vertices of isolated pattern vertices."""
        out = set(self.vmap.values())
        for s in self.emap.values():
            out |= self.host.edge_subgraph_vertices(s)
        return frozenset(out)

    def path(self, e: EdgeId, start: Optional[VertexId] = None) -> EdgePath:
        """Image of e in walk order, starting at the image of ``start`` (default: first endpoint)."""
        a, b = self.pattern.endpoints(e)
        src = self.vmap[a if start is None else start]
        return order_path(self.host, self.emap[e], src)


@dataclass
class ValidationReport:
    mode: str
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def identity(g: MultiGraph) -> Immersion:
    return Immersion(g, g, {v: v for v in g.vertices}, {e: frozenset([e]) for e in g.edges})


def _connected_within(host: MultiGraph, edges: FrozenSet[EdgeId], required: Iterable[VertexId]) -> bool:
    verts = set(host.edge_subgraph_vertices(edges)) | set(required)
    if not verts:
        return True
    adj: Dict[VertexId, List[VertexId]] = {v: [] for v in verts}
    for e in edges:
        a, b = host.endpoints(e)
        adj[a].append(b)
        adj[b].append(a)
    root = next(iter(verts))
    seen = {root}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen == verts


def cycle_through(host: MultiGraph, edges: FrozenSet[EdgeId], v: VertexId) -> Optional[List[EdgeId]]:
    """A cycle through ``v`` using only ``edges``, as an edge list, or None."""
    for e in sorted(edges):
        a, b = host.endpoints(e)
        if a == b == v:
            return [e]
    for e in sorted(edges):
        a, b = host.endpoints(e)
        if v not in (a, b) or a == b:
            continue
        x = b if a == v else a
        # search x -> v avoiding e
        parent: Dict[VertexId, Tuple[VertexId, EdgeId]] = {}
        seen = {x}
        queue = deque([x])
        while queue:
            y = queue.popleft()
            if y == v:
                break
            for f in host.incident(y):
                if f == e or f not in edges or host.is_loop(f):
                    continue
                z = host.other_end(f, y)
                if z in seen:
                    continue
                seen.add(z)
                parent[z] = (y, f)
                if z == v:
                    queue.clear()
                    break
                queue.append(z)
        if v in parent:
            path = []
            z = v
            while z != x:
                y, f = parent[z]
                path.append(f)
                z = y
            return [e] + path[::-1]
    return None


def validate(im: Immersion, mode: str = "weak") -> ValidationReport:
    """Check ``im`` in the given mode.

    ``weak`` checks the immersion conditions; ``strong`` adds the branch
    avoidance condition; ``slim`` checks everything ``strong`` does and
    additionally that each image is a path (a cycle for loops).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    rep = ValidationReport(mode)
    bad = rep.violations
    H, G = im.pattern, im.host
    if set(im.vmap) != set(H.vertices):
        bad.append("vmap does not cover exactly the pattern vertices")
        return rep
    if set(im.emap) != set(H.edges):
        bad.append("emap does not cover exactly the pattern edges")
        return rep
    images = list(im.vmap.values())
    for v, x in im.vmap.items():
        if not G.has_vertex(x):
            bad.append(f"vertex {v} maps to unknown host vertex {x}")
    if len(set(images)) != len(images):
        bad.append("vmap is not injective")
    owner: Dict[EdgeId, EdgeId] = {}
    for e, s in im.emap.items():
        for f in s:
            if not G.has_edge(f):
                bad.append(f"edge {e} uses unknown host edge {f}")
            elif f in owner:
                bad.append(f"edges {owner[f]} and {e} share host edge {f}")
            else:
                owner[f] = e
    if bad:
        return rep
    for e, s in im.emap.items():
        a, b = H.endpoints(e)
        ends = {im.vmap[a], im.vmap[b]}
        if not s:
            bad.append(f"edge {e} has an empty image")
            continue
        if not _connected_within(G, s, ends):
            bad.append(f"image of edge {e} is not connected or misses an endpoint image")
            continue
        if a == b and cycle_through(G, s, im.vmap[a]) is None:
            bad.append(f"image of loop {e} has no cycle through {im.vmap[a]}")
    if mode in ("strong", "slim"):
        inv = {x: v for v, x in im.vmap.items()}
        for e, s in im.emap.items():
            a, b = H.endpoints(e)
            touched = G.edge_subgraph_vertices(s)
            for x in sorted(touched):
                if x in inv and inv[x] not in (a, b):
                    bad.append(f"image of edge {e} contains branch vertex {x} of pattern vertex {inv[x]}")
    if mode == "slim":
        for e in im.emap:
            a, b = H.endpoints(e)
            try:
                p = im.path(e)
            except GraphError:
                bad.append(f"image of edge {e} is not a path or cycle")
                continue
            if a == b:
                if not p.is_cycle():
                    bad.append(f"image of loop {e} is not a cycle")
            elif not (p.is_path() and p.end == im.vmap[b]):
                bad.append(f"image of edge {e} is not a path between its end images")
    return rep


def compose(outer: Immersion, inner: Immersion) -> Immersion:
    """``outer`` immerses H in G, ``inner`` immerses H1 in H; result immerses H1 in G."""
    if inner.host != outer.pattern:
        raise GraphError("inner host differs from outer pattern")
    vmap = {v: outer.vmap[x] for v, x in inner.vmap.items()}
    emap = {}
    for e, s in inner.emap.items():
        acc: Set[EdgeId] = set()
        for f in s:
            acc |= outer.emap[f]
        emap[e] = frozenset(acc)
    return Immersion(inner.pattern, outer.host, vmap, emap)


def slim(im: Immersion) -> Immersion:
    """Shrink each image to a shortest path (or a cycle for loops) inside it.

    Disjointness and the strong condition survive because images only shrink.
    """
    G = im.host
    emap = {}
    for e, s in im.emap.items():
        a, b = im.pattern.endpoints(e)
        if a == b:
            cyc = cycle_through(G, s, im.vmap[a])
            emap[e] = frozenset(cyc if cyc is not None else s)
            continue
        src, dst = im.vmap[a], im.vmap[b]
        parent: Dict[VertexId, Tuple[VertexId, EdgeId]] = {}
        seen = {src}
        queue = deque([src])
        while queue and dst not in seen:
            y = queue.popleft()
            for f in G.incident(y):
                if f not in s or G.is_loop(f):
                    continue
                z = G.other_end(f, y)
                if z not in seen:
                    seen.add(z)
                    parent[z] = (y, f)
                    queue.append(z)
        if dst not in seen:
            emap[e] = s
            continue
        path = []
        z = dst
        while z != src:
            y, f = parent[z]
            path.append(f)
            z = y
        emap[e] = frozenset(path)
    return Immersion(im.pattern, im.host, im.vmap, emap)


# -- stars --------------------------------------------------------------------


@dataclass(frozen=True)
class StarShape:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("star shape needs n >= 1 and k >= 1")


@dataclass(frozen=True)
class Multistar:
    """Star-shaped multigraph: loopless, connected, every edge at the center.

    A single-ray star is accepted here because flow constructions can produce
    one; :func:`make_star` only builds stars with at least two rays.
    """

    graph: MultiGraph
    center: VertexId

    def __post_init__(self):
        g, c = self.graph, self.center
        if not g.has_vertex(c):
            raise GraphError("center is not a vertex of the star")
        if g.num_vertices() < 2:
            raise GraphError("a star needs at least one ray")
        for e, (a, b) in g.edges.items():
            if a == b:
                raise GraphError(f"star has a loop {e}")
            if c not in (a, b):
                raise GraphError(f"star edge {e} misses the center")
        for v in g.vertices:
            if v != c and g.degree(v) == 0:
                raise GraphError(f"ray {v} is isolated")

    @property
    def rays(self) -> Tuple[VertexId, ...]:
        return tuple(sorted(self.graph.vertices - {self.center}))

    def ray_of(self, e: EdgeId) -> VertexId:
        return self.graph.other_end(e, self.center)

    def is_multistar(self) -> bool:
        return self.graph.num_vertices() >= 3


def star_graph(shape: StarShape) -> MultiGraph:
    """Center 0, rays 1..n, edge ``(i-1)*k + j`` is the j-th edge to ray i."""
    pairs = [(0, i) for i in range(1, shape.n + 1) for _ in range(shape.k)]
    return MultiGraph.from_edges(shape.n + 1, pairs)


def make_star(shape: StarShape) -> Multistar:
    """S_{n,k} as a multistar; shapes with fewer than two rays are rejected."""
    if shape.n + 1 < 3:
        raise ValueError("a multistar needs at least three vertices (n >= 2)")
    return Multistar(star_graph(shape), 0)


def embed_in_star(f: MultiGraph, shape: StarShape) -> Immersion:
    """Strong immersion of ``f`` in S_{n,k}; vertex i of f (in id order) goes to ray i+1."""
    if f.num_vertices() > shape.n:
        raise ValueError(f"graph has {f.num_vertices()} vertices, star has {shape.n} rays")
    if f.max_degree() > shape.k:
        raise ValueError(f"graph has maximum degree {f.max_degree()} > {shape.k}")
    S = star_graph(shape)
    ray = {v: i + 1 for i, v in enumerate(sorted(f.vertices))}
    free = {r: list(S.incident(r)) for r in range(1, shape.n + 1)}
    for lst in free.values():
        lst.reverse()
    emap = {}
    for e, (a, b) in f.edges.items():
        if a == b:
            emap[e] = frozenset([free[ray[a]].pop(), free[ray[a]].pop()])
        else:
            emap[e] = frozenset([free[ray[a]].pop(), free[ray[b]].pop()])
    return Immersion(f, S, ray, emap)


# -- exhaustive oracle --------------------------------------------------------

ORACLE_MAX_PATTERN_EDGES = 8
ORACLE_MAX_HOST_EDGES = 24


def brute_force_find(pattern: MultiGraph, host: MultiGraph, mode: str = "strong") -> Optional[Immersion]:
    """Exhaustive search for a slim immersion; None proves there is none.

    Pattern vertices are placed lazily while routing pattern edges, and
    parallel pattern edges are routed with increasing first host edge to cut
    symmetric branches.
    """
    if mode not in ("weak", "strong"):
        raise ValueError("oracle mode must be weak or strong")
    if pattern.num_edges() > ORACLE_MAX_PATTERN_EDGES or host.num_edges() > ORACLE_MAX_HOST_EDGES:
        raise ValueError("instance exceeds the oracle size guard")
    if pattern.num_vertices() > host.num_vertices():
        return None
    strong = mode == "strong"
    pdeg = {v: pattern.degree(v) for v in pattern.vertices}
    rank = {v: i for i, v in enumerate(sorted(pattern.vertices, key=lambda v: (-pdeg[v], v)))}

    def key(e):
        a, b = pattern.endpoints(e)
        ra, rb = sorted((rank[a], rank[b]))
        return (ra, rb, e)

    order = sorted(pattern.edges, key=key)
    oriented = []
    for e in order:
        a, b = pattern.endpoints(e)
        if rank[b] < rank[a]:
            a, b = b, a
        oriented.append((e, a, b))
    host_vertices = sorted(host.vertices)
    hdeg = {v: host.degree(v) for v in host_vertices}

    vmap: Dict[VertexId, VertexId] = {}
    branch: Dict[VertexId, VertexId] = {}  # host vertex -> pattern vertex
    interior: Dict[VertexId, int] = {}  # host vertex -> number of images passing through
    used: Set[EdgeId] = set()
    emap: Dict[EdgeId, FrozenSet[EdgeId]] = {}
    demand = dict(pdeg)  # unrouted degree per pattern vertex

    def free_at(x):
        n = 0
        for f in host.incident(x):
            if f not in used:
                a, b = host.endpoints(f)
                n += 2 if a == b else 1
        return n

    def can_branch(x, v):
        if x in branch:
            return False
        if strong and interior.get(x):
            return False
        return hdeg[x] >= pdeg[v] and free_at(x) >= demand[v]

    def paths_from(src, target, v_new, start_min):
        """Yield (edge list, end) for simple paths from src.

        target: fixed host end, or None when the end is chosen here for v_new.
        """
        stack_edges: List[EdgeId] = []
        on_path = {src}

        def rec(cur):
            for f in host.incident(cur):
                if f in used or (not stack_edges and f <= start_min):
                    continue
                a, b = host.endpoints(f)
                if a == b:
                    continue
                y = b if a == cur else a
                if y in on_path:
                    continue
                stack_edges.append(f)
                if target is not None:
                    if y == target:
                        yield list(stack_edges), y
                    elif not (strong and y in branch):
                        on_path.add(y)
                        yield from rec(y)
                        on_path.discard(y)
                else:
                    if can_branch(y, v_new):
                        yield list(stack_edges), y
                    if not (strong and y in branch):
                        on_path.add(y)
                        yield from rec(y)
                        on_path.discard(y)
                stack_edges.pop()

        yield from rec(src)

    def cycles_at(x, start_min):
        for f in host.incident(x):
            if f in used or f <= start_min:
                continue
            a, b = host.endpoints(f)
            if a == b:
                yield [f]
                continue
            y = b if a == x else a
            if strong and y in branch:
                continue
            used.add(f)
            for rest, _ in paths_from(y, x, None, -1):
                if rest[-1] > f:
                    yield [f] + rest
                    used.add(f)  # the caller's undo released it
            used.discard(f)

    def enter(edges, skip=()):
        for f in edges:
            used.add(f)
        for f in edges:
            for y in host.endpoints(f):
                if y not in skip:
                    interior[y] = interior.get(y, 0) + 1

    def leave(edges, skip=()):
        for f in edges:
            used.discard(f)
            for y in host.endpoints(f):
                if y not in skip:
                    interior[y] -= 1

    def feasible():
        for v, x in vmap.items():
            if free_at(x) < demand[v]:
                return False
        return len(host.edges) - len(used) >= sum(1 for e, _, _ in oriented if e not in emap)

    def place(v, x):
        vmap[v] = x
        branch[x] = v

    def unplace(v):
        x = vmap.pop(v)
        del branch[x]

    def first_edge_floor(i):
        if i == 0:
            return -1
        e, a, b = oriented[i]
        pe, pa, pb = oriented[i - 1]
        if (pa, pb) == (a, b) and pe in emap:
            return prev_first[pe]
        return -1

    prev_first: Dict[EdgeId, EdgeId] = {}

    def route(i):
        if i == len(oriented):
            return place_isolated(sorted(v for v in pattern.vertices if v not in vmap))
        e, a, b = oriented[i]
        floor = first_edge_floor(i)
        if a not in vmap:
            for x in host_vertices:
                if can_branch(x, a):
                    place(a, x)
                    if route(i):
                        return True
                    unplace(a)
            return False
        src = vmap[a]
        if a == b:
            for cyc in cycles_at(src, floor):
                enter(cyc, skip={src})
                emap[e] = frozenset(cyc)
                prev_first[e] = cyc[0]
                demand[a] -= 2
                if feasible() and route(i + 1):
                    return True
                demand[a] += 2
                del emap[e]
                leave(cyc, skip={src})
            return False
        if b in vmap:
            candidates = paths_from(src, vmap[b], None, floor)
        else:
            candidates = paths_from(src, None, b, floor)
        for path, end in candidates:
            fresh = b not in vmap
            if fresh:
                place(b, end)
            enter(path, skip={src, end})
            emap[e] = frozenset(path)
            prev_first[e] = path[0]
            demand[a] -= 1
            demand[b] -= 1
            if feasible() and route(i + 1):
                return True
            demand[a] += 1
            demand[b] += 1
            del emap[e]
            leave(path, skip={src, end})
            if fresh:
                unplace(b)
        return False

    def place_isolated(rest):
        if not rest:
            return True
        v = rest[0]
        for x in host_vertices:
            if can_branch(x, v):
                place(v, x)
                if place_isolated(rest[1:]):
                    return True
                unplace(v)
        return False

    if not route(0):
        return None
    return Immersion(pattern, host, dict(vmap), dict(emap))


# -- JSON ---------------------------------------------------------------------


def immersion_to_dict(im: Immersion) -> dict:
    return {
        "vmap": {str(v): str(x) for v, x in im.vmap.items()},
        "emap": {str(e): [str(f) for f in sorted(s)] for e, s in im.emap.items()},
    }


def immersion_to_json(im: Immersion, **extra) -> str:
    d = immersion_to_dict(im)
    d.update(extra)
    return json.dumps(d)


def immersion_from_dict(d: dict, pattern: MultiGraph, host: MultiGraph) -> Immersion:
    """Build and structurally check an immersion; semantic checks are left to ``validate``."""
    try:
        vmap = {int(v): int(x) for v, x in d["vmap"].items()}
        emap = {int(e): frozenset(int(f) for f in fs) for e, fs in d["emap"].items()}
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ValueError(f"malformed immersion JSON: {exc}") from None
    for v, x in vmap.items():
        if not pattern.has_vertex(v):
            raise ValueError(f"unknown pattern vertex {v}")
        if not host.has_vertex(x):
            raise ValueError(f"unknown host vertex {x}")
    for e, fs in emap.items():
        if not pattern.has_edge(e):
            raise ValueError(f"unknown pattern edge {e}")
        for f in fs:
            if not host.has_edge(f):
                raise ValueError(f"unknown host edge {f}")
    return Immersion(pattern, host, vmap, emap)


def immersion_from_json(text: str, pattern: MultiGraph, host: MultiGraph) -> Immersion:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed immersion JSON: {exc}") from None
    return immersion_from_dict(d, pattern, host)
