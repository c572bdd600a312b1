import json
import random
from fractions import Fraction

import pytest

from oracles import d_by_multiplication, nx_lambda, nx_sep_value
from starimm.connectivity import separates
from starimm.generators import random_multigraph, subdivided_star
from starimm.immersion import Immersion, StarShape, identity, make_star, validate
from starimm.ksystem import (
    CutCertificate,
    KSystem,
    Threshold,
    ball_bound,
    build_gx,
    certificate_from_dict,
    certificate_holds,
    certificate_to_dict,
    d_of,
    find_cut_certificate,
    ksystem_from_dict,
    ksystem_to_dict,
    respects,
    validate_ksystem,
)
from starimm.multigraph import GraphError, MultiGraph


def identity_system(n, k):
    star = make_star(StarShape(n, k))
    return KSystem(k, star, identity(star.graph))


def test_threshold_exact():
    assert Threshold(3, 1).value == 36 * 7 ** 28
    assert Threshold(3, 1).value == d_by_multiplication(3)
    assert d_of(4) == d_by_multiplication(4)
    assert Threshold(3, 5).value == 5 * d_of(3)
    assert ball_bound(3) == 7 ** 28


def test_identity_system_valid():
    s = identity_system(2, 3)
    assert validate_ksystem(s, 6).ok
    rep = validate_ksystem(s, 7)
    assert not rep.ok and rep.violations[0].startswith("S1")


def test_fractional_magnitude():
    s = identity_system(2, 3)
    assert validate_ksystem(s, Fraction(11, 2)).ok
    assert not validate_ksystem(s, Fraction(13, 2)).ok


def test_weak_ray_reports_cut():
    # ray 2 reaches the center through a 2-edge bottleneck
    g = MultiGraph.from_edges(4, [(0, 1)] * 3 + [(0, 3), (0, 3), (3, 2), (3, 2), (3, 2)])
    H = MultiGraph.from_edges(3, [(0, 1), (0, 1), (0, 1), (0, 2)])
    sigma = Immersion(H, g, {0: 0, 1: 1, 2: 2}, {0: frozenset([0]), 1: frozenset([1]), 2: frozenset([2]),
                                                 3: frozenset([3, 5])})
    from starimm.immersion import Multistar
    s = KSystem(3, Multistar(H, 0), sigma)
    rep = validate_ksystem(s, 1)
    assert 2 in rep.weak_rays and len(rep.weak_rays[2]) == 2
    assert separates(g, rep.weak_rays[2].edges, 0, 2)


def test_ray_degree_above_k():
    s = identity_system(2, 4)
    s3 = KSystem(3, s.star, s.sigma)
    rep = validate_ksystem(s3, 1)
    assert any(v.startswith("S2") for v in rep.violations)


def test_k_below_three_rejected():
    s = identity_system(2, 3)
    with pytest.raises(ValueError):
        KSystem(2, s.star, s.sigma)


def test_certificate_two_parallel_edges():
    g = MultiGraph.from_edges(2, [(0, 1), (0, 1)])
    cert = find_cut_certificate(g, 0, [1], 3, 3)
    assert isinstance(cert, CutCertificate)
    assert cert.Y == frozenset() and cert.K == {0, 1} and cert.cost == 2
    assert certificate_holds(g, 0, [1], cert)


def test_ksystem_from_four_parallel_edges():
    g = MultiGraph.from_edges(2, [(0, 1)] * 4)
    s = find_cut_certificate(g, 0, [1], 3, 3)
    assert isinstance(s, KSystem)
    assert s.rays == (1,) and s.pattern.degree(1) == 3
    assert validate_ksystem(s, 3).ok


def test_threshold_must_be_positive():
    g = MultiGraph.from_edges(2, [(0, 1)])
    with pytest.raises(ValueError):
        find_cut_certificate(g, 0, [1], 3, 0)


@pytest.mark.parametrize("seed", range(30))
def test_certificate_matches_flow(seed):
    rng = random.Random(seed)
    g = random_multigraph(rng, rng.randint(3, 9), rng.randint(3, 22))
    X = rng.sample(sorted(g.vertices - {0}), rng.randint(1, g.num_vertices() - 1))
    k = rng.choice([3, 4])
    flow = nx_sep_value(g, 0, X, k)
    cert = find_cut_certificate(g, 0, X, k, flow + 1)
    assert isinstance(cert, CutCertificate) and cert.cost == flow
    assert certificate_holds(g, 0, X, cert)


def test_certificate_holds_detects_bad_certificate():
    g = MultiGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert not certificate_holds(g, 0, [2], CutCertificate(frozenset(), frozenset([1]), 3))
    assert certificate_holds(g, 0, [2], CutCertificate(frozenset([2]), frozenset(), 3))


def test_certificate_json():
    cert = CutCertificate(frozenset([4, 2]), frozenset([7]), 3)
    d = certificate_to_dict(cert)
    assert d == {"Y": [2, 4], "K": [7], "cost": "7"}
    assert certificate_from_dict(json.loads(json.dumps(d)), 3) == cert
    with pytest.raises(ValueError):
        certificate_from_dict({"Y": [2], "K": [], "cost": "4"}, 3)


def test_ksystem_json_roundtrip():
    g, s = subdivided_star(2, 3, 1)
    d = json.loads(json.dumps(ksystem_to_dict(s)))
    again = ksystem_from_dict(d, g)
    assert again == s


def test_build_gx_examples():
    K4 = MultiGraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    assert dict(build_gx(K4, [0, 3], 3).edges) == {0: (0, 3)}
    path = MultiGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    gx = build_gx(path, [0, 1, 2, 3], 1)
    assert sorted(gx.edges.values()) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert build_gx(K4, [0, 3], 4).num_edges() == 0


@pytest.mark.parametrize("seed", range(10))
def test_build_gx_against_networkx(seed):
    rng = random.Random(seed)
    g = random_multigraph(rng, 7, 16)
    X = sorted(rng.sample(range(7), 3))
    gx = build_gx(g, X, 2)
    for u in X:
        for v in X:
            if u < v:
                h = g.remove_vertices(set(X) - {u, v})
                adjacent = any(set(ab) == {u, v} for ab in gx.edges.values())
                assert adjacent == (nx_lambda(h, u, v) >= 2)


def test_respects():
    s = identity_system(3, 3)
    star = make_star(StarShape(2, 3))
    sub = Immersion(star.graph, s.host, {0: 0, 1: 1, 2: 3},
                    {e: frozenset([e if e < 3 else e + 3]) for e in star.graph.edges})
    assert validate(sub, "strong").ok
    assert respects(sub, s)
    moved = Immersion(star.graph, s.host, {0: 1, 1: 0, 2: 3}, sub.emap)
    assert not respects(moved, s)
    with pytest.raises(GraphError):
        respects(identity(star.graph), s)
