"""Splittable pairs at a vertex, found by search and verified by brute force.

Lifting ``xu``, ``xv`` into ``uv`` never raises a local edge connectivity
between vertices other than x, so a pair is splittable exactly when no
lambda(s, t) drops.  Every candidate is checked against the full table of
lambda values.  A vertex of degree m != 3 that meets no 1-edge cut always
has floor(m/2) disjoint splittable pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .connectivity import lambda_count
from .multigraph import EdgeId, GraphError, MultiGraph, VertexId


class SplittingError(RuntimeError):
    """Search found fewer splittable pairs than are known to exist."""


@dataclass(frozen=True)
class SplitPlan:
    x: VertexId
    pairs: Tuple[Tuple[EdgeId, EdgeId], ...]


LambdaTable = Dict[Tuple[VertexId, VertexId], int]


def lambda_table(g: MultiGraph, skip: Iterable[VertexId] = ()) -> LambdaTable:
    skipped = set(skip)
    vs = sorted(v for v in g.vertices if v not in skipped)
    return {(s, t): lambda_count(g, s, t) for s, t in combinations(vs, 2)}


def _check_liftable(g: MultiGraph, x: VertexId, e: EdgeId, f: EdgeId) -> None:
    if e == f:
        raise GraphError("a pair needs two distinct edges")
    for h in (e, f):
        a, b = g.endpoints(h)
        if x not in (a, b):
            raise GraphError(f"edge {h} is not incident with {x}")
        if a == b:
            raise GraphError(f"edge {h} is a loop")


def is_splittable(g: MultiGraph, x: VertexId, e: EdgeId, f: EdgeId, table: Optional[LambdaTable] = None) -> bool:
    _check_liftable(g, x, e, f)
    if table is None:
        table = lambda_table(g, skip=[x])
    h, _ = g.lift(e, f, at=x)
    for (s, t), lam in table.items():
        if lam and lambda_count(h, s, t, limit=lam) < lam:
            return False
    return True


def pairing_degree(g: MultiGraph, x: VertexId) -> int:
    """Degree of x counting only non-loop edges; loops are never paired."""
    return sum(1 for e in g.incident(x) if not g.is_loop(e))


def _check_preconditions(g: MultiGraph, x: VertexId) -> List[EdgeId]:
    edges = [e for e in g.incident(x) if not g.is_loop(e)]
    m = len(edges)
    if m == 3:
        raise GraphError(f"vertex {x} has degree 3")
    for u in sorted({g.other_end(e, x) for e in edges}):
        if lambda_count(g, x, u, limit=2) < 2:
            raise GraphError(f"vertex {x} is incident with a 1-edge cut towards {u}")
    return edges


def splittable_pairs_at(g: MultiGraph, x: VertexId) -> SplitPlan:
    """floor(m/2) pairwise disjoint pairs at x, each splittable in g."""
    edges = _check_preconditions(g, x)
    want = len(edges) // 2
    table = lambda_table(g, skip=[x])
    memo: Dict[Tuple[EdgeId, EdgeId], bool] = {}

    def ok(e, f):
        if (e, f) not in memo:
            memo[(e, f)] = is_splittable(g, x, e, f, table)
        return memo[(e, f)]

    chosen: List[Tuple[EdgeId, EdgeId]] = []

    def search(free: List[EdgeId]) -> bool:
        if len(chosen) == want:
            return True
        # with an odd count one edge may stay unpaired
        slack = len(free) - 2 * (want - len(chosen))
        for i, e in enumerate(free):
            if i > slack:
                break
            for f in free[i + 1:]:
                if ok(e, f):
                    chosen.append((e, f))
                    rest = [h for h in free[i + 1:] if h != f]
                    if search(rest):
                        return True
                    chosen.pop()
        return False

    if not search(list(edges)):
        raise SplittingError(f"found fewer than {want} disjoint splittable pairs at {x}")
    return SplitPlan(x, tuple(chosen))


def first_splittable_pair(
    g: MultiGraph, x: VertexId, must_include: Optional[FrozenSet[EdgeId]] = None
) -> Optional[Tuple[EdgeId, EdgeId]]:
    """Lexicographically first splittable pair at x; with ``must_include`` the first edge comes from that set."""
    edges = [e for e in g.incident(x) if not g.is_loop(e)]
    table = lambda_table(g, skip=[x])
    for e in edges:
        if must_include is not None and e not in must_include:
            continue
        for f in edges:
            if f == e or (must_include is None and f < e):
                continue
            if is_splittable(g, x, e, f, table):
                return e, f
    return None


def lift_preserving_terminal(
    g: MultiGraph, x: VertexId, center: VertexId, terminals: Iterable[VertexId], k: int
) -> Tuple[MultiGraph, Tuple[EdgeId, EdgeId], EdgeId]:
    """One splittable lift at x; afterwards every terminal still has k edge-disjoint paths to center.

    Returns the new graph, the lifted pair and the id of the new edge.
    """
    terms = set(terminals)
    if x == center or x in terms:
        raise GraphError("cannot lift at the center or at a terminal")
    m = pairing_degree(g, x)
    if m < 2 or m == 3:
        raise GraphError(f"vertex {x} has pairing degree {m}")
    pair = first_splittable_pair(g, x)
    if pair is None:
        raise SplittingError(f"no splittable pair at {x}")
    h, new = g.lift(pair[0], pair[1], at=x)
    for t in sorted(terms):
        if lambda_count(h, center, t, limit=k) < k:
            raise SplittingError(f"lift at {x} broke connectivity between {center} and {t}")
    return h, pair, new
