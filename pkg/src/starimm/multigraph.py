"""Multigraph value type with stable edge identities.

Parallel edges and loops are first-class.  A loop contributes 2 to the
degree of its vertex.  Graphs are values: every mutating method returns a
new graph and leaves the receiver untouched.  Vertex and edge ids are plain
ints, allocated from per-graph counters that only ever grow, so an id is
never reused inside one lineage of derived graphs.
"""

from __future__ import annotations

from collections import deque
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

VertexId = int
EdgeId = int


class GraphError(ValueError):
    """Raised on references to unknown vertices/edges or invalid operations."""


class MultiGraph:
    __slots__ = ("_vertices", "_edges", "_next_vertex", "_next_edge", "_inc")

    def __init__(
        self,
        vertices: Iterable[VertexId] = (),
        edges: Optional[Mapping[EdgeId, Tuple[VertexId, VertexId]]] = None,
        next_vertex: Optional[int] = None,
        next_edge: Optional[int] = None,
    ):
        vs = frozenset(int(v) for v in vertices)
        es: Dict[EdgeId, Tuple[VertexId, VertexId]] = {}
        for e, (u, v) in sorted((edges or {}).items()):
            if u not in vs or v not in vs:
                raise GraphError(f"edge {e} has an endpoint outside the vertex set")
            es[int(e)] = (int(u), int(v))
        self._vertices = vs
        self._edges = es
        nv = max(vs) + 1 if vs else 0
        ne = max(es) + 1 if es else 0
        self._next_vertex = max(nv, next_vertex or 0)
        self._next_edge = max(ne, next_edge or 0)
        self._inc: Optional[Dict[VertexId, Tuple[EdgeId, ...]]] = None

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_edges(cls, n: int, pairs: Sequence[Tuple[int, int]]) -> "MultiGraph":
        """Vertices ``0..n-1``, edges numbered ``0..len(pairs)-1`` in order."""
        return cls(range(n), {i: (u, v) for i, (u, v) in enumerate(pairs)})

    def _derive(self, vertices, edges, next_vertex=None, next_edge=None) -> "MultiGraph":
        g = MultiGraph.__new__(MultiGraph)
        g._vertices = frozenset(vertices)
        # callers hand over fresh dicts that are already in ascending id order
        g._edges = edges if isinstance(edges, dict) else dict(edges)
        g._next_vertex = max(self._next_vertex, next_vertex or 0)
        g._next_edge = max(self._next_edge, next_edge or 0)
        g._inc = None
        return g

    # -- queries ----------------------------------------------------------

    @property
    def vertices(self) -> FrozenSet[VertexId]:
        return self._vertices

    @property
    def edges(self) -> Mapping[EdgeId, Tuple[VertexId, VertexId]]:
        return MappingProxyType(self._edges)

    @property
    def next_vertex_id(self) -> int:
        return self._next_vertex

    @property
    def next_edge_id(self) -> int:
        return self._next_edge

    def num_vertices(self) -> int:
        return len(self._vertices)

    def num_edges(self) -> int:
        return len(self._edges)

    def has_vertex(self, v: VertexId) -> bool:
        return v in self._vertices

    def has_edge(self, e: EdgeId) -> bool:
        return e in self._edges

    def endpoints(self, e: EdgeId) -> Tuple[VertexId, VertexId]:
        try:
            return self._edges[e]
        except KeyError:
            raise GraphError(f"unknown edge {e}") from None

    def other_end(self, e: EdgeId, v: VertexId) -> VertexId:
        a, b = self.endpoints(e)
        if a == v:
            return b
        if b == v:
            return a
        raise GraphError(f"edge {e} is not incident with vertex {v}")

    def is_loop(self, e: EdgeId) -> bool:
        a, b = self.endpoints(e)
        return a == b

    def _incidence(self) -> Dict[VertexId, Tuple[EdgeId, ...]]:
        if self._inc is None:
            inc: Dict[VertexId, List[EdgeId]] = {v: [] for v in self._vertices}
            for e, (a, b) in self._edges.items():
                inc[a].append(e)
                if b != a:
                    inc[b].append(e)
            self._inc = {v: tuple(sorted(es)) for v, es in inc.items()}
        return self._inc

    def incident(self, v: VertexId) -> Tuple[EdgeId, ...]:
        """Edges incident with ``v`` in ascending id order (a loop appears once)."""
        self._check_vertex(v)
        return self._incidence()[v]

    def neighbors(self, v: VertexId) -> List[VertexId]:
        return sorted({self.other_end(e, v) for e in self.incident(v)} - {v})

    def degree(self, v: VertexId) -> int:
        self._check_vertex(v)
        d = 0
        for e in self._incidence()[v]:
            a, b = self._edges[e]
            d += 2 if a == b else 1
        return d

    def max_degree(self) -> int:
        return max((self.degree(v) for v in self._vertices), default=0)

    def edges_between(self, u: VertexId, v: VertexId) -> List[EdgeId]:
        return [e for e in self.incident(u) if self.other_end(e, u) == v]

    def boundary(self, side: Iterable[VertexId]) -> List[EdgeId]:
        """Non-loop edges with exactly one endpoint in ``side``."""
        s = set(side)
        return [e for e, (a, b) in self._edges.items() if (a in s) != (b in s)]

    def _check_vertex(self, v: VertexId) -> None:
        if v not in self._vertices:
            raise GraphError(f"unknown vertex {v}")

    # -- mutations (all return new graphs) --------------------------------

    def add_vertex(self) -> Tuple["MultiGraph", VertexId]:
        v = self._next_vertex
        return self._derive(self._vertices | {v}, dict(self._edges), next_vertex=v + 1), v

    def add_edge(self, u: VertexId, v: VertexId) -> Tuple["MultiGraph", EdgeId]:
        self._check_vertex(u)
        self._check_vertex(v)
        e = self._next_edge
        edges = dict(self._edges)
        edges[e] = (u, v)
        return self._derive(self._vertices, edges, next_edge=e + 1), e

    def remove_edges(self, es: Iterable[EdgeId]) -> "MultiGraph":
        edges = dict(self._edges)
        for e in es:
            if e not in edges:
                raise GraphError(f"unknown edge {e}")
            del edges[e]
        return self._derive(self._vertices, edges)

    def remove_edge(self, e: EdgeId) -> "MultiGraph":
        return self.remove_edges([e])

    def remove_vertices(self, vs: Iterable[VertexId]) -> "MultiGraph":
        drop = set(vs)
        for v in drop:
            self._check_vertex(v)
        edges = {e: ab for e, ab in self._edges.items() if ab[0] not in drop and ab[1] not in drop}
        return self._derive(self._vertices - drop, edges)

    def remove_vertex(self, v: VertexId) -> "MultiGraph":
        return self.remove_vertices([v])

    def reattach(self, e: EdgeId, u: VertexId, v: VertexId) -> "MultiGraph":
        """Same edge id, new endpoints."""
        self.endpoints(e)
        self._check_vertex(u)
        self._check_vertex(v)
        edges = dict(self._edges)
        edges[e] = (u, v)
        return self._derive(self._vertices, edges)

    def lift(self, e: EdgeId, f: EdgeId, at: Optional[VertexId] = None) -> Tuple["MultiGraph", EdgeId]:
        """Replace ``xu`` and ``xv`` by a new edge ``uv`` (a loop when u == v).

        ``at`` names x; it is only needed when e and f are parallel, since
        then both endpoints are shared.
        """
        if e == f:
            raise GraphError("cannot lift an edge with itself")
        ea, eb = self.endpoints(e)
        fa, fb = self.endpoints(f)
        if ea == eb or fa == fb:
            raise GraphError("cannot lift a loop")
        common = {ea, eb} & {fa, fb}
        if not common:
            raise GraphError(f"edges {e} and {f} do not share a vertex")
        if at is None:
            if len(common) != 1:
                raise GraphError(f"edges {e} and {f} are parallel; say which end to lift at")
            (x,) = common
        elif at in common:
            x = at
        else:
            raise GraphError(f"edges {e} and {f} do not both meet vertex {at}")
        u = eb if ea == x else ea
        v = fb if fa == x else fa
        h = self._next_edge
        edges = dict(self._edges)
        del edges[e], edges[f]
        edges[h] = (u, v)
        return self._derive(self._vertices, edges, next_edge=h + 1), h

    def contract(self, part: Iterable[VertexId]) -> Tuple["MultiGraph", VertexId]:
        """Replace the vertex set ``part`` by one fresh vertex.

        Edges with one end in ``part`` keep their ids and are re-pointed at the
        new vertex; edges inside ``part`` disappear.
        """
        s = set(part)
        for v in s:
            self._check_vertex(v)
        w = self._next_vertex
        edges = {}
        for e, (a, b) in self._edges.items():
            ina, inb = a in s, b in s
            if ina and inb:
                continue
            edges[e] = (w if ina else a, w if inb else b)
        return self._derive((self._vertices - s) | {w}, edges, next_vertex=w + 1), w

    def induced(self, s: Iterable[VertexId]) -> "MultiGraph":
        keep = set(s)
        for v in keep:
            self._check_vertex(v)
        edges = {e: ab for e, ab in self._edges.items() if ab[0] in keep and ab[1] in keep}
        return self._derive(keep, edges)

    def edge_subgraph_vertices(self, es: Iterable[EdgeId]) -> FrozenSet[VertexId]:
        out = set()
        for e in es:
            out.update(self.endpoints(e))
        return frozenset(out)

    # -- structure --------------------------------------------------------

    def components(self) -> List[FrozenSet[VertexId]]:
        """Connected components, each listed once, ordered by smallest vertex."""
        inc = self._incidence()
        seen = set()
        out = []
        for root in sorted(self._vertices):
            if root in seen:
                continue
            comp = {root}
            queue = deque([root])
            while queue:
                x = queue.popleft()
                for e in inc[x]:
                    y = self.other_end(e, x)
                    if y not in comp:
                        comp.add(y)
                        queue.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def bfs_distances(self, source: VertexId, avoid: Iterable[VertexId] = ()) -> Dict[VertexId, int]:
        """Hop distances from ``source`` in the graph minus ``avoid``."""
        banned = set(avoid)
        inc = self._incidence()
        dist = {source: 0}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for e in inc[x]:
                y = self.other_end(e, x)
                if y in banned or y in dist:
                    continue
                dist[y] = dist[x] + 1
                queue.append(y)
        return dist

    # -- dunder -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, tuple(self._edges.items())))

    def __repr__(self) -> str:
        return f"MultiGraph(|V|={len(self._vertices)}, |E|={len(self._edges)})"


def degree(g: MultiGraph, v: VertexId) -> int:
    return g.degree(v)


def lift(g: MultiGraph, e: EdgeId, f: EdgeId, at: Optional[VertexId] = None) -> Tuple[MultiGraph, EdgeId]:
    return g.lift(e, f, at)


def components(g: MultiGraph) -> List[FrozenSet[VertexId]]:
    return g.components()


def induced(g: MultiGraph, s: Iterable[VertexId]) -> MultiGraph:
    return g.induced(s)


# -- edge-list text format ----------------------------------------------------


def parse_edgelist(text: str) -> MultiGraph:
    """Parse ``vertices <n>`` followed by ``edge <id> <u> <v>`` lines."""
    n: Optional[int] = None
    edges: Dict[EdgeId, Tuple[VertexId, VertexId]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "vertices" and len(parts) == 2:
                if n is not None:
                    raise GraphError("duplicate 'vertices' line")
                n = int(parts[1])
                if n < 0:
                    raise GraphError("negative vertex count")
            elif parts[0] == "edge" and len(parts) == 4:
                if n is None:
                    raise GraphError("'edge' before 'vertices'")
                e, u, v = (int(p) for p in parts[1:])
                if e < 0:
                    raise GraphError("negative edge id")
                if e in edges:
                    raise GraphError(f"duplicate edge id {e}")
                if not (0 <= u < n and 0 <= v < n):
                    raise GraphError(f"vertex out of range in edge {e}")
                edges[e] = (u, v)
            else:
                raise GraphError(f"unrecognised line {raw!r}")
        except ValueError as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
    if n is None:
        raise GraphError("missing 'vertices' line")
    return MultiGraph(range(n), edges)


def format_edgelist(g: MultiGraph) -> str:
    n = g.num_vertices()
    if g.vertices != frozenset(range(n)):
        raise GraphError("edge-list format needs vertices 0..n-1")
    lines = [f"vertices {n}"]
    lines += [f"edge {e} {u} {v}" for e, (u, v) in g.edges.items()]
    return "\n".join(lines) + "\n"


def read_edgelist(path) -> MultiGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edgelist(fh.read())


def write_edgelist(g: MultiGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edgelist(g))


# -- walks ---------------------------------------------------------------------


class EdgePath:
    """A walk given by its first vertex and an ordered edge sequence."""

    __slots__ = ("start", "edges", "vertices")

    def __init__(self, g: MultiGraph, start: VertexId, edges: Sequence[EdgeId]):
        g._check_vertex(start)
        verts = [start]
        for e in edges:
            verts.append(g.other_end(e, verts[-1]))
        self.start = start
        self.edges: Tuple[EdgeId, ...] = tuple(edges)
        self.vertices: Tuple[VertexId, ...] = tuple(verts)

    @property
    def end(self) -> VertexId:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.edges)

    def is_path(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)

    def is_cycle(self) -> bool:
        inner = self.vertices[1:-1]
        return (
            len(self.edges) >= 1
            and self.vertices[0] == self.vertices[-1]
            and self.start not in inner
            and len(set(inner)) == len(inner)
            and len(set(self.edges)) == len(self.edges)
        )

    def __eq__(self, other):
        if not isinstance(other, EdgePath):
            return NotImplemented
        return self.start == other.start and self.edges == other.edges

    def __hash__(self):
        return hash((self.start, self.edges))

    def __repr__(self) -> str:
        return f"EdgePath({self.start}: {list(self.edges)})"


def order_path(g: MultiGraph, edges: Iterable[EdgeId], start: VertexId) -> EdgePath:
    """Arrange an edge set forming a path (or cycle) starting at ``start`` into walk order.

    Raises GraphError if the set is not a path/cycle through ``start``.
    """
    remaining = set(edges)
    out: List[EdgeId] = []
    cur = start
    while remaining:
        nxt = [e for e in g.incident(cur) if e in remaining]
        if not nxt:
            raise GraphError("edge set is not a walk from the given vertex")
        # prefer the edge that does not close a cycle early
        choice = nxt[0]
        if len(nxt) > 1 and len(remaining) > 1:
            for e in nxt:
                if g.other_end(e, cur) != start:
                    choice = e
                    break
        remaining.discard(choice)
        out.append(choice)
        cur = g.other_end(choice, cur)
    return EdgePath(g, start, out)
