"""Acceptance suite: eight end-to-end criteria, each reported as one PASS/FAIL line.

Run with pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import networkx as nx

sys.path.insert(0, str(Path(__file__).parent))

from oracles import d_by_multiplication, immersion_exists, nx_lambda, nx_lambda_table, nx_sep_value  # noqa: E402
from starimm.connectivity import is_k_connected_pair, lambda_  # noqa: E402
from starimm.generators import (  # noqa: E402
    heavy_ray,
    hidden_ray,
    peel_fixture,
    planted_star,
    random_multigraph,
    ray_cycle,
    splitting_instance,
    subdivided_star,
)
from starimm.immersion import StarShape, brute_force_find, make_star, validate  # noqa: E402
from starimm.ksystem import CutCertificate, KSystem, Threshold, find_cut_certificate, respects, validate_ksystem  # noqa: E402
from starimm.multigraph import GraphError  # noqa: E402
from starimm.pipeline import (  # noqa: E402
    PipelineError,
    Triple,
    build_core,
    canonicalize,
    check_reduction,
    check_well_behaved,
    extract_star,
    find_star_immersion,
    is_peeled,
    length_bound,
    peel,
    reduce_ray_degrees,
    short_paths,
)
from starimm.splitting import splittable_pairs_at  # noqa: E402

RESULTS = {}


@contextmanager
def criterion(num, title):
    """Record one PASS/FAIL line; the body appends problems to the yielded list."""
    problems = []
    start = time.perf_counter()
    try:
        yield problems
    except Exception as exc:
        problems.append(f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    status = "FAIL" if problems else "PASS"
    detail = f" ({problems[0]}{' ...' if len(problems) > 1 else ''})" if problems else ""
    line = f"criterion {num} {status}: {title} [{elapsed:.1f}s]{detail}"
    RESULTS[num] = line
    print(line)
    assert not problems, problems[:5]


# -- independent checks -----------------------------------------------------


def walk_ends(g, start, edges):
    """Follow an edge sequence from start; None if it is not a walk."""
    cur = start
    for e in edges:
        a, b = g.endpoints(e)
        if cur == a:
            cur = b
        elif cur == b:
            cur = a
        else:
            return None
    return cur


def to_nx(g, drop_edges=(), drop_vertices=()):
    h = nx.MultiGraph()
    h.add_nodes_from(v for v in g.vertices if v not in set(drop_vertices))
    for e, (a, b) in g.edges.items():
        if e not in set(drop_edges) and a in h and b in h:
            h.add_edge(a, b)
    return h


def family_and_cut_ok(g, s, t, res):
    used = set()
    for p in res.paths:
        if walk_ends(g, s, p.edges) != t or used & set(p.edges) or len(set(p.edges)) != len(p.edges):
            return False
        used |= set(p.edges)
    if len(res.cut.edges) != len(res.paths) or res.count != len(res.paths):
        return False
    return not nx.has_path(to_nx(g, drop_edges=res.cut.edges), s, t)


def component_condition(g, c, X, cert):
    h = to_nx(g, drop_edges=cert.K, drop_vertices=cert.Y)
    return c in h and not (nx.node_connected_component(h, c) & set(X))


# -- instance generators ------------------------------------------------------


def separation_instance(rng, k):
    """Random (g, c, X) where every vertex of X is k-edge-connected to c."""
    while True:
        n = rng.randint(4, 9)
        g = random_multigraph(rng, n, rng.randint(2 * n, 4 * n), connected=True)
        c = max(sorted(g.vertices), key=g.degree)
        good = [v for v in sorted(g.vertices) if v != c and nx_lambda(g, c, v) >= k]
        if good:
            X = rng.sample(good, rng.randint(1, len(good)))
            return g, c, sorted(X)


def fixture_systems():
    """One hundred k-systems: constructed families plus flow-built random ones."""
    out = []
    for k in (3, 4, 5):
        for n in (2, 3):
            for sub in (0, 1, 2):
                out.append(subdivided_star(n, k, sub)[1])
    for k in (3, 4):
        out.append(hidden_ray(k, others=2)[1])
        out.append(heavy_ray(k)[1])
        out.append(peel_fixture(k)[1])
        out.append(ray_cycle(12, k)[1])
    rng = random.Random(7)
    for _ in range(40):
        out.append(planted_star(rng.choice([2, 3, 4]), rng.choice([3, 4]), rng)[1])
    rng = random.Random(11)
    while len(out) < 100:
        k = rng.choice([3, 4])
        g, c, X = separation_instance(rng, k)
        s = find_cut_certificate(g, c, X, k, 1)
        if isinstance(s, KSystem):
            out.append(s)
    return out


def run_stages(s):
    """Each stage with its parent triple, witness, claimed magnitude and claimed shape."""
    d, k = s.size, s.k
    low = Fraction(d, k * (k + 1))
    t0 = Triple(s)
    t1, w1 = canonicalize(t0)
    t2, w2 = reduce_ray_degrees(t1)
    t3, w3, _ = build_core(t2)
    t4, w4 = peel(t3)
    return [
        ("canonicalize", t0, t1, w1, d, "well-behaved"),
        ("reduce_ray_degrees", t1, t2, w2, low, "well-behaved"),
        ("build_core", t2, t3, w3, low, "peeled"),
        ("peel", t3, t4, w4, low, "peeled"),
    ]


# -- criteria -----------------------------------------------------------------


def test_criterion_1_flow_cut_duality():
    with criterion(1, "flow/cut duality on 500 random multigraphs") as bad:
        rng = random.Random(1)
        pairs = 0
        start = time.perf_counter()
        for i in range(500):
            g = random_multigraph(rng, rng.randint(2, 12), rng.randint(0, 30))
            k = rng.choice([3, 4, 5])
            vs = sorted(g.vertices)
            for a in range(len(vs)):
                for b in range(a + 1, len(vs)):
                    s, t = vs[a], vs[b]
                    res = lambda_(g, s, t)
                    pairs += 1
                    if not family_and_cut_ok(g, s, t, res):
                        bad.append(f"graph {i} pair {s},{t}")
                    if is_k_connected_pair(g, s, t, k) != (res.count >= k):
                        bad.append(f"graph {i} pair {s},{t} k-connectivity")
        if time.perf_counter() - start >= 60:
            bad.append(f"took {time.perf_counter() - start:.1f}s over {pairs} pairs")


def test_criterion_2_splitting_pairs():
    with criterion(2, "floor(m/2) splittable pairs on 200 random graphs") as bad:
        rng = random.Random(2)
        for i in range(200):
            g, x = splitting_instance(rng, n=rng.randint(5, 8), m=rng.randint(10, 18))
            m = g.degree(x)
            try:
                plan = splittable_pairs_at(g, x)
            except (GraphError, RuntimeError) as exc:
                bad.append(f"instance {i}: sentinel {exc}")
                continue
            if len(plan.pairs) != m // 2:
                bad.append(f"instance {i}: {len(plan.pairs)} pairs for degree {m}")
            before = nx_lambda_table(g, skip=[x])
            used = set()
            for e, f in plan.pairs:
                if {e, f} & used or x not in g.endpoints(e) or x not in g.endpoints(f) or e == f:
                    bad.append(f"instance {i}: pair {e},{f} not disjoint edges at x")
                used |= {e, f}
                h, _ = g.lift(e, f, at=x)
                if nx_lambda_table(h, skip=[x]) != before:
                    bad.append(f"instance {i}: pair {e},{f} changes a local connectivity")


STAGE_CACHE = {}


def staged_fixtures():
    if not STAGE_CACHE:
        for j, s in enumerate(fixture_systems()):
            STAGE_CACHE[j] = (s, run_stages(s))
    return STAGE_CACHE


def test_criterion_3_reduction_soundness():
    with criterion(3, "stage outputs, witnesses and shapes on 100 fixture systems") as bad:
        fixtures = fixture_systems()
        if len(fixtures) != 100:
            bad.append(f"{len(fixtures)} fixtures")
        for j, s in enumerate(fixtures):
            if not validate_ksystem(s, s.size).ok:
                bad.append(f"fixture {j}: input invalid")
                continue
            try:
                stages = run_stages(s)
            except PipelineError as exc:
                bad.append(f"fixture {j}: sentinel {exc}")
                continue
            STAGE_CACHE[j] = (s, stages)
            for name, parent, child, w, magnitude, shape in stages:
                rep = validate_ksystem(child.sys, magnitude)
                if not rep.ok:
                    bad.append(f"fixture {j} {name}: {rep.violations}")
                problems = check_reduction(parent, child, w)
                if problems:
                    bad.append(f"fixture {j} {name}: {problems}")
                if not check_well_behaved(child).ok:
                    bad.append(f"fixture {j} {name}: not well-behaved")
                if shape == "peeled" and not is_peeled(child):
                    bad.append(f"fixture {j} {name}: not peeled")


def planted_instances():
    out = []
    for n in (2, 3, 4):
        for k in (3, 4):
            for sub in (0, 1):
                g, s = subdivided_star(n, k, sub)
                out.append((f"S({n},{k}) subdivided {sub}", n, k, g, s))
    rng = random.Random(4)
    for i in range(12):
        n, k = (2, 3) if i < 3 else (rng.choice([2, 3, 4]), rng.choice([3, 4]))
        small = i < 3
        g, s = planted_star(n, k, rng, max_subdiv=0 if small else 2, pendants=1 if small else 3,
                            blobs=0 if small else 1, chords=0 if small else 1)
        out.append((f"planted #{i} S({n},{k})", n, k, g, s))
    return out


def test_criterion_4_end_to_end():
    with criterion(4, "strong S_{n,k} in the original graph on planted instances") as bad:
        instances = planted_instances()
        if len(instances) < 20:
            bad.append(f"only {len(instances)} instances")
        for name, n, k, g, s in instances:
            try:
                res = find_star_immersion(g, s, n)
            except PipelineError as exc:
                bad.append(f"{name}: sentinel {exc}")
                continue
            im = res.immersion
            if not res.complete or im is None:
                bad.append(f"{name}: shortfall {res.star.shortfall}")
                continue
            if im.host != g or im.pattern != make_star(StarShape(n, k)).graph:
                bad.append(f"{name}: wrong pattern or host")
            if not validate(im, "strong").ok or not respects(im, s):
                bad.append(f"{name}: result does not validate")
        # oracle cross-check: the five smallest by pattern size, then host size
        smallest = sorted(instances, key=lambda r: (r[1] * r[2], r[3].num_edges()))[:5]
        for name, n, k, g, s in smallest:
            found = brute_force_find(make_star(StarShape(n, k)).graph, g, "strong")
            if found is None or not validate(found, "strong").ok:
                bad.append(f"{name}: oracle disagrees")


def test_criterion_5_certificates():
    with criterion(5, "certificates and k-systems at the flow value on 100 instances") as bad:
        rng = random.Random(5)
        for i in range(100):
            k = rng.choice([3, 4, 5])
            g, c, X = separation_instance(rng, k)
            flow = nx_sep_value(g, c, X, k)
            cert = find_cut_certificate(g, c, X, k, flow + 1)
            if not isinstance(cert, CutCertificate):
                bad.append(f"instance {i}: no certificate at threshold flow+1")
            else:
                if cert.cost != flow or cert.cost != k * len(cert.Y) + len(cert.K):
                    bad.append(f"instance {i}: cost {cert.cost} vs flow {flow}")
                if not set(cert.Y) <= set(X) or not component_condition(g, c, X, cert):
                    bad.append(f"instance {i}: component condition fails")
            s = find_cut_certificate(g, c, X, k, flow)
            if not isinstance(s, KSystem):
                bad.append(f"instance {i}: no k-system at threshold flow")
                continue
            if s.host != g or s.center_image != c or not s.ray_images() <= set(X):
                bad.append(f"instance {i}: k-system placed wrongly")
            if s.size != flow or not validate_ksystem(s, flow).ok:
                bad.append(f"instance {i}: k-system invalid at magnitude {flow}")


def peeled_fixtures():
    out = []
    for j, (s, stages) in sorted(staged_fixtures().items()):
        out.append((f"fixture {j}", stages[-1][2]))
    for k in (3, 4, 5):
        for length in (5, 20, 40):
            out.append((f"ray cycle {length} k={k}", Triple(ray_cycle(length, k)[1])))
    return out


def long_initial_family(t, ray):
    """Paths from a ray image of ray_cycle that walk half way round the cycle before reaching the center."""
    g, c = t.g, t.center
    x = t.sys.ray_image(ray)
    direct = [e for e in g.incident(x) if c in g.endpoints(e)]
    stray = [e for e in g.incident(x) if c not in g.endpoints(e)]
    paths = [[e] for e in direct]
    length = len(t.sys.rays)
    for e, steps in zip(stray, (length // 2, length // 2 - 1)):
        walk, prev, cur = [e], x, g.other_end(e, x)
        for _ in range(steps - 1):
            nxt = next(f for f in g.incident(cur) if c not in g.endpoints(f) and g.other_end(f, cur) != prev)
            walk.append(nxt)
            prev, cur = cur, g.other_end(nxt, cur)
        walk.append(next(f for f in g.incident(cur) if c in g.endpoints(f)))
        paths.append(walk)
    return paths


def test_criterion_6_path_length_bound():
    with criterion(6, "path families of length <= 4k+2 on peeled fixtures") as bad:
        def check(name, t, fam):
            x = t.sys.ray_image(fam.ray)
            used = set()
            for p in fam.paths:
                if walk_ends(t.g, x, p.edges) != t.center or used & set(p.edges):
                    bad.append(f"{name} ray {fam.ray}: not edge-disjoint paths to the center")
                used |= set(p.edges)
            if len(fam.paths) != t.k or fam.max_length() > length_bound(t.k):
                bad.append(f"{name} ray {fam.ray}: length {fam.max_length()}")

        families = 0
        for name, t in peeled_fixtures():
            if not is_peeled(t):
                bad.append(f"{name}: not peeled")
                continue
            try:
                for r in t.sys.rays:
                    check(name, t, short_paths(t, r))
                    families += 1
                star = extract_star(t, len(t.sys.rays))
            except PipelineError as exc:
                bad.append(f"{name}: sentinel {exc}")
                continue
            seen = set()
            for fam in star.families:
                if seen & fam.edges():
                    bad.append(f"{name}: families of chosen rays share an edge")
                seen |= fam.edges()
        for k in (3, 4):
            t = Triple(ray_cycle(40, k)[1])
            initial = long_initial_family(t, 1)
            if max(len(p) for p in initial) <= length_bound(k):
                bad.append("long initial family is not long")
            try:
                check(f"ray cycle 40 k={k} from long start", t, short_paths(t, 1, initial))
            except PipelineError as exc:
                bad.append(f"long start k={k}: sentinel {exc}")


def test_criterion_7_oracle_consistency():
    with criterion(7, "oracle output validates and strong implies weak on 50 pairs") as bad:
        rng = random.Random(77)
        for i in range(50):
            H = random_multigraph(rng, rng.randint(1, 4), rng.randint(1, 4))
            G = random_multigraph(rng, rng.randint(2, 7), rng.randint(3, 12))
            found = {}
            for mode in ("weak", "strong"):
                im = brute_force_find(H, G, mode)
                found[mode] = im
                if im is not None and not validate(im, mode).ok:
                    bad.append(f"pair {i}: {mode} output rejected by validate")
                if (im is not None) != immersion_exists(H, G, mode):
                    bad.append(f"pair {i}: {mode} existence differs from reference search")
            if found["strong"] is not None:
                if found["weak"] is None or not validate(found["strong"], "weak").ok:
                    bad.append(f"pair {i}: strong without weak")


def test_criterion_8_threshold_exact():
    with criterion(8, "d(3) = 36 * 7^28 exactly") as bad:
        value = Threshold(3, 1).value
        if not isinstance(value, int) or value != 36 * 7 ** 28 or value != d_by_multiplication(3):
            bad.append(f"got {value}")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
