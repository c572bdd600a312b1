"""Independent reference computations used to check the library."""

from itertools import combinations

import networkx as nx


def nx_lambda(g, s, t):
    """Max number of edge-disjoint s-t paths via networkx max flow."""
    if s == t:
        raise ValueError("s == t")
    d = nx.DiGraph()
    d.add_nodes_from(g.vertices)
    for u, v in g.edges.values():
        if u == v:
            continue
        for a, b in ((u, v), (v, u)):
            if d.has_edge(a, b):
                d[a][b]["capacity"] += 1
            else:
                d.add_edge(a, b, capacity=1)
    return int(nx.maximum_flow_value(d, s, t))


def nx_lambda_table(g, skip=()):
    vs = sorted(v for v in g.vertices if v not in set(skip))
    return {(s, t): nx_lambda(g, s, t) for s, t in combinations(vs, 2)}


def simple_paths(g, s, t):
    """All simple s-t paths as frozensets of edge ids."""
    out = []

    def rec(v, seen, used):
        if v == t:
            out.append(frozenset(used))
            return
        for e in g.incident(v):
            if g.is_loop(e):
                continue
            w = g.other_end(e, v)
            if w in seen:
                continue
            seen.add(w)
            used.append(e)
            rec(w, seen, used)
            used.pop()
            seen.discard(w)

    rec(s, {s}, [])
    return out


def brute_lambda(g, s, t):
    """Largest packing of pairwise edge-disjoint simple s-t paths, by exhaustive search."""
    paths = simple_paths(g, s, t)
    best = 0

    def rec(i, used, count):
        nonlocal best
        best = max(best, count)
        if count + (len(paths) - i) <= best:
            return
        for j in range(i, len(paths)):
            if not (paths[j] & used):
                rec(j + 1, used | paths[j], count + 1)

    rec(0, frozenset(), 0)
    return best


def nx_sep_value(g, c, X, k):
    """Max flow of the separation network, built independently with networkx."""
    xs = set(X)
    d = nx.DiGraph()
    sink = ("sink",)
    d.add_nodes_from(list(g.vertices) + [sink])

    def add(a, b, cap):
        if d.has_edge(a, b):
            d[a][b]["capacity"] += cap
        else:
            d.add_edge(a, b, capacity=cap)

    for u, v in g.edges.values():
        if u == v:
            continue
        if u not in xs and v not in xs:
            add(u, v, 1)
            add(v, u, 1)
        elif u not in xs:
            add(u, v, 1)
        elif v not in xs:
            add(v, u, 1)
    for x in xs:
        add(x, sink, k)
    return int(nx.maximum_flow_value(d, c, sink))


def d_by_multiplication(k):
    base = 2 * k + 1
    acc = 1
    for _ in range(8 * k + 4):
        acc *= base
    return acc * k * k * (k + 1)


def _simple_path_sets(g, s, t, banned):
    """Edge sets of simple s-t paths whose inner vertices avoid ``banned``."""
    out = []

    def rec(v, seen, used):
        if v == t:
            out.append(frozenset(used))
            return
        for e in g.incident(v):
            if g.is_loop(e) or e in used:
                continue
            w = g.other_end(e, v)
            if w in seen or (w != t and w in banned):
                continue
            seen.add(w)
            used.append(e)
            rec(w, seen, used)
            used.pop()
            seen.discard(w)

    rec(s, {s}, [])
    return out


def _cycle_sets(g, u, banned):
    out = {frozenset([e]) for e in g.incident(u) if g.is_loop(e)}
    for e in g.incident(u):
        if g.is_loop(e):
            continue
        w = g.other_end(e, u)
        if w in banned:
            continue
        h = g.remove_edge(e)
        for p in _simple_path_sets(h, w, u, banned | {u}):
            out.add(p | {e})
    return list(out)


def immersion_exists(pattern, host, mode):
    """Whether pattern immerses in host ('weak' or 'strong'), by a search written separately from the library.

    Minimal edge images are simple paths (simple cycles through the branch
    vertex for loops); strong mode keeps other branch vertices off them.
    """
    from itertools import permutations

    pv = sorted(pattern.vertices)
    pe = sorted(pattern.edges)
    for image in permutations(sorted(host.vertices), len(pv)):
        vmap = dict(zip(pv, image))
        branch = set(image)
        options = []
        for e in pe:
            a, b = pattern.endpoints(e)
            u, v = vmap[a], vmap[b]
            banned = branch - {u, v} if mode == "strong" else set()
            options.append(_cycle_sets(host, u, banned) if a == b else _simple_path_sets(host, u, v, banned))

        def rec(i, used):
            if i == len(options):
                return True
            return any(not (p & used) and rec(i + 1, used | p) for p in options[i])

        if rec(0, frozenset()):
            return True
    return False
