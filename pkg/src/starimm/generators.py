"""Random graphs and planted k-system fixtures for tests and demos."""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from .immersion import Immersion, Multistar
from .ksystem import KSystem
from .multigraph import EdgeId, MultiGraph, VertexId


def random_multigraph(rng: random.Random, n: int, m: int, loops: bool = True, connected: bool = False) -> MultiGraph:
    pairs: List[Tuple[int, int]] = []
    if connected:
        for v in range(1, n):
            pairs.append((rng.randrange(v), v))
    while len(pairs) < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v and not loops:
            continue
        pairs.append((u, v))
    return MultiGraph.from_edges(n, pairs)


class Builder:
    """Mutable helper that grows a graph and remembers the star images."""

    def __init__(self):
        self.g = MultiGraph([], {})
        self.images: Dict[VertexId, List[List[EdgeId]]] = {}  # ray image -> paths from center

    def vertex(self) -> VertexId:
        self.g, v = self.g.add_vertex()
        return v

    def edge(self, u: VertexId, v: VertexId) -> EdgeId:
        self.g, e = self.g.add_edge(u, v)
        return e

    def path(self, u: VertexId, v: VertexId, inner: int) -> Tuple[List[EdgeId], List[VertexId]]:
        verts = [u] + [self.vertex() for _ in range(inner)] + [v]
        edges = [self.edge(a, b) for a, b in zip(verts, verts[1:])]
        return edges, verts[1:-1]

    def system(self, center: VertexId, k: int) -> KSystem:
        pairs, emap = [], {}
        vmap = {0: center}
        for i, x in enumerate(sorted(self.images)):
            vmap[i + 1] = x
            for p in self.images[x]:
                emap[len(pairs)] = frozenset(p)
                pairs.append((0, i + 1))
        H = MultiGraph.from_edges(len(vmap), pairs)
        return KSystem(k, Multistar(H, 0), Immersion(H, self.g, vmap, emap))


def subdivided_star(n: int, k: int, subdiv=0) -> Tuple[MultiGraph, KSystem]:
    """S_{n,k} with each edge subdivided; ``subdiv`` is an int or a per-edge sequence."""
    b = Builder()
    c = b.vertex()
    rays = [b.vertex() for _ in range(n)]
    i = 0
    for x in rays:
        b.images[x] = []
        for _ in range(k):
            s = subdiv if isinstance(subdiv, int) else subdiv[i]
            i += 1
            edges, _ = b.path(c, x, s)
            b.images[x].append(edges)
    return b.g, b.system(c, k)


def planted_star(
    n: int,
    k: int,
    rng: random.Random,
    max_subdiv: int = 2,
    pendants: int = 2,
    blobs: int = 1,
    chords: int = 1,
) -> Tuple[MultiGraph, KSystem]:
    """A subdivided S_{n,k} with noise that never joins two ray clusters.

    Noise kinds: pendant trees or cycles behind one or two edges, dense blobs
    hooked to one ray cluster by at least three edges, and chords between
    subdivision vertices of the same ray.
    """
    b = Builder()
    c = b.vertex()
    clusters: Dict[VertexId, List[VertexId]] = {}
    for _ in range(n):
        x = b.vertex()
        b.images[x] = []
        clusters[x] = [x]
        for _ in range(k):
            edges, inner = b.path(c, x, rng.randint(0, max_subdiv))
            b.images[x].append(edges)
            clusters[x] += inner
    everything = [c] + [v for vs in clusters.values() for v in vs]
    for _ in range(pendants):
        anchor = rng.choice(everything)
        size = rng.randint(1, 4)
        blob = [b.vertex() for _ in range(size)]
        for v in blob[1:]:
            b.edge(rng.choice(blob[: blob.index(v)]), v)
        for _ in range(rng.randint(0, 3)):
            b.edge(rng.choice(blob), rng.choice(blob))
        b.edge(anchor, blob[0])
        if rng.random() < 0.5:
            b.edge(rng.choice(everything), rng.choice(blob))
    rays = sorted(clusters)
    for _ in range(blobs):
        x = rng.choice(rays)
        size = rng.randint(2, 4)
        blob = [b.vertex() for _ in range(size)]
        for u in blob:
            for v in blob:
                if u < v:
                    b.edge(u, v)
        for _ in range(3):
            b.edge(rng.choice(blob), rng.choice(clusters[x][1:] or [x]))
    for _ in range(chords):
        x = rng.choice(rays)
        inner = clusters[x][1:]
        if len(inner) >= 2:
            u, v = rng.sample(inner, 2)
            b.edge(u, v)
    return b.g, b.system(c, k)


def hidden_ray(k: int = 3, others: int = 1) -> Tuple[MultiGraph, KSystem]:
    """One ray image sits behind a k-cut that is not its own edge set.

    The image x is reached through a_1..a_k: image i runs center, a_i,
    a_{i+1}, x (indices mod k).  The center edges form the nonconforming
    cut and every edge lies on an image, so no other rule can fire first.
    """
    b = Builder()
    c = b.vertex()
    x = b.vertex()
    a = [b.vertex() for _ in range(k)]
    b.images[x] = []
    for i in range(k):
        nxt = a[(i + 1) % k]
        b.images[x].append([b.edge(c, a[i]), b.edge(a[i], nxt), b.edge(nxt, x)])
    for _ in range(others):
        y = b.vertex()
        b.images[y] = [[b.edge(c, y)] for _ in range(k)]
    return b.g, b.system(c, k)


def heavy_ray(k: int = 3, rays: Optional[int] = None) -> Tuple[MultiGraph, KSystem]:
    """k^2 rays of degree k plus one ray whose image has an extra loop-free edge (degree k+1)."""
    rays = k * k if rays is None else rays
    b = Builder()
    c = b.vertex()
    first = None
    for i in range(rays + 1):
        y = b.vertex()
        b.images[y] = []
        for _ in range(k):
            edges, inner = b.path(c, y, 1)
            b.images[y].append(edges)
            if first is None:
                first = inner[0]
        if i == 0:
            b.edge(y, first)
    return b.g, b.system(c, k)


def peel_fixture(k: int = 3) -> Tuple[MultiGraph, KSystem]:
    """A peeled triple with a vertex v of degree at least 2k+2 next to the center.

    v has k+1 parallel edges to the center, one onward edge to each of k+1
    rays, and a stray edge to one more ray.  Every ray also has direct
    center edges so that its image has degree exactly k.
    """
    b = Builder()
    c = b.vertex()
    v = b.vertex()
    for _ in range(k + 1):
        y = b.vertex()
        e1 = b.edge(c, v)
        e2 = b.edge(v, y)
        b.images[y] = [[e1, e2]] + [[b.edge(c, y)] for _ in range(k - 1)]
    z = b.vertex()
    b.images[z] = [[b.edge(c, z)] for _ in range(k - 1)]
    b.edge(v, z)
    return b.g, b.system(c, k)


def ray_cycle(length: int, k: int = 3) -> Tuple[MultiGraph, KSystem]:
    """Peeled triple whose ray images form a cycle of stray edges.

    Each image has k-2 direct center edges and two stray edges to its cycle
    neighbours, so walking around the cycle gives very long center paths.
    """
    b = Builder()
    c = b.vertex()
    ys = [b.vertex() for _ in range(length)]
    for y in ys:
        b.images[y] = [[b.edge(c, y)] for _ in range(k - 2)]
    for i in range(length):
        b.edge(ys[i], ys[(i + 1) % length])
    return b.g, b.system(c, k)


def k_connected_blob(rng: random.Random, n: int, k: int, extra: int = 0) -> MultiGraph:
    """A k-edge-connected multigraph: a cycle with every edge repeated ceil(k/2) times plus noise."""
    reps = (k + 1) // 2
    pairs = [(i, (i + 1) % n) for i in range(n) for _ in range(reps)]
    for _ in range(extra):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            pairs.append((u, v))
    return MultiGraph.from_edges(n, pairs)


def splitting_instance(rng: random.Random, n: int = 7, m: int = 14) -> Tuple[MultiGraph, VertexId]:
    """Random connected multigraph with a vertex of even degree >= 2 that meets no cut edge."""
    from .connectivity import lambda_count

    while True:
        g = random_multigraph(rng, n, m, loops=False, connected=True)
        for x in sorted(g.vertices):
            d = g.degree(x)
            if d < 2 or d == 3:
                continue
            if all(lambda_count(g, x, u, limit=2) >= 2 for u in g.neighbors(x)):
                return g, x
