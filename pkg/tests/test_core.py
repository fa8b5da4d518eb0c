import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fracround import (CapabilityError, DynGraph, FracVector, InputError, ONE, ParameterError,
                       StructuralError, max_matching_oracle, to_weight, truncate,
                       validate_fractional, vertex_distance, weight)
from fracround.core import exhaustive_max_matching, has_augmenting_path, hopcroft_karp
from fracround.fixedpoint import bit, ceil_log2, floor_log2, to_fraction
from fracround.graph import is_matching
from oracles import brute_mu


def triangle():
    return DynGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def test_rounding_half_to_even_is_reported():
    assert to_weight("1/2") == (ONE // 2, 0)
    w, d = to_weight("0.1")
    assert d != 0 and abs(to_fraction(w) - Fraction(1, 10)) <= Fraction(1, 2 * ONE)
    # exact tie between two grid points rounds to the even numerator
    w, d = to_weight(Fraction(1, 2 * ONE))
    assert w == 0 and d == -1
    w, d = to_weight(Fraction(3, 2 * ONE))
    assert w == 2 and d == 1
    with pytest.raises(InputError):
        to_weight("1.5")


def test_bit_extraction_matches_binary_expansion():
    w = weight("0.625")  # 0.101b
    assert [bit(w, i) for i in range(5)] == [0, 1, 0, 1, 0]
    assert bit(ONE, 0) == 1


def test_log2_helpers():
    assert ceil_log2(Fraction(8)) == 3
    assert ceil_log2(Fraction(9)) == 4
    assert ceil_log2(Fraction(1, 8)) == -3
    assert floor_log2(Fraction(9)) == 3
    assert floor_log2(Fraction(1, 3)) == -2


def test_graph_rejects_self_loops_duplicates_and_same_side():
    g = DynGraph(3, side=[0, 1, 1])
    g.add_edge(0, 1)
    with pytest.raises(InputError):
        g.add_edge(1, 0)
    with pytest.raises(InputError):
        g.add_edge(2, 2)
    with pytest.raises(InputError):
        g.add_edge(1, 2)


def test_vector_caches_follow_mutations():
    rng = random.Random(1)
    g = DynGraph.from_edges(6, [(u, v) for u in range(6) for v in range(u + 1, 6)])
    x = FracVector(g)
    edges = list(g.edges())
    for _ in range(500):
        x.set(rng.choice(edges), rng.choice([0, 1, ONE // 8, ONE // 3, 12345]))
        assert x.cache_consistent()


def test_vector_rejects_unknown_edge():
    g = triangle()
    x = FracVector(g)
    with pytest.raises(StructuralError):
        x.set(99, 1)


def test_validate_fractional_examples():
    g = triangle()
    assert validate_fractional(FracVector(g), g).ok
    half = FracVector(g, {e: ONE // 2 for e in g.edges()})
    assert validate_fractional(half, g).ok
    assert half.norm_fraction() == Fraction(3, 2)
    g2 = DynGraph.from_edges(3, [(0, 1), (1, 2)])
    x = FracVector(g2, {0: ONE, 1: ONE // 4})
    rep = validate_fractional(x, g2)
    assert rep.violations == [{"vertex": 1, "excess": "1/4"}]


def test_validate_fractional_structural_error():
    g = triangle()
    x = FracVector(g, {0: ONE // 2})
    g.remove_edge(0)
    with pytest.raises(StructuralError):
        validate_fractional(x, g)


def test_truncate_keeps_single_bit_values():
    g = DynGraph.from_edges(4, [(0, 1), (2, 3)])
    x = FracVector(g, {0: ONE // 2, 1: ONE // 2})
    y, levels = truncate(x, "0.1")
    assert y == x and levels >= 1


def test_truncate_drops_tiny_entry():
    g = DynGraph.from_edges(4, [(0, 1), (2, 3)])
    eps = Fraction(1, 10)
    tiny = weight(eps / 300)
    x = FracVector(g, {0: ONE // 2, 1: tiny})
    # threshold eps/3/n^2 = 1/480 is above 1/3000
    assert to_fraction(tiny) < eps / 3 / 16
    y, _ = truncate(x, eps)
    assert 1 not in y and y.get(0) == ONE // 2
    assert y.norm_fraction() >= (1 - 2 * eps / 3) * x.norm_fraction()


def test_truncate_clears_trailing_bits():
    g = DynGraph.from_edges(2, [(0, 1)])
    x = FracVector(g, {0: ONE // 2 + 1})
    y, levels = truncate(x, "1/4")
    assert y.get(0) == ONE // 2
    drop = x.norm_fraction() - y.norm_fraction()
    assert 0 < drop <= Fraction(1, 12) * to_fraction(y.get(0))
    assert levels < 52


def test_truncate_rejects_bad_eps():
    g = triangle()
    with pytest.raises(ParameterError):
        truncate(FracVector(g), 1)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["1/20", "1/10", "1/3", "0.9"]))
def test_truncate_norm_bound_random(seed, eps):
    rng = random.Random(seed)
    n = rng.randint(2, 12)
    g = DynGraph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5])
    x = FracVector(g)
    for e in g.edges():
        x.set(e, rng.choice([0, rng.randint(1, ONE // n), rng.randint(1, 1 << 20)]))
    y, _ = truncate(x, eps)
    e3 = Fraction(eps) / 3
    assert set(y.support()) <= set(x.support())
    # dropped entries cost < e3/2 in total, cleared bits < e3/2 per unit of norm
    assert y.norm_fraction() >= (1 - e3 / 2) * x.norm_fraction() - e3 / 2
    if x.norm_fraction() >= 1:
        assert y.norm_fraction() >= (1 - 2 * e3) * x.norm_fraction()


def test_vertex_distance_examples():
    g = DynGraph.from_edges(2, [(0, 1)])
    x = FracVector(g, {0: ONE})
    assert vertex_distance(x, x, 0) == 0
    assert vertex_distance(x, FracVector(g), 0) == 2


def _random_vec(rng, g):
    return FracVector(g, {e: rng.randint(0, ONE // 2) for e in g.edges()})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_vertex_distance_monotone_and_triangle(seed):
    rng = random.Random(seed)
    g = DynGraph.from_edges(5, [(u, v) for u in range(5) for v in range(u + 1, 5)])
    x, y, z = (_random_vec(rng, g) for _ in range(3))
    a, b = Fraction(rng.randint(0, 8), 16), Fraction(rng.randint(0, 8), 16)
    hi, lo = max(a, b), min(a, b)
    assert vertex_distance(x, y, hi) <= vertex_distance(x, y, lo)
    assert vertex_distance(x, z, a + b) <= vertex_distance(x, y, a) + vertex_distance(y, z, b)


def test_oracle_examples():
    path = DynGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    assert len(max_matching_oracle(path)) == 2
    k33 = DynGraph.from_edges(6, [(u, v) for u in range(3) for v in range(3, 6)], side=[0] * 3 + [1] * 3)
    assert len(max_matching_oracle(k33)) == 3


def test_oracle_general_budget():
    g = DynGraph.from_edges(9, [(u, v) for u in range(9) for v in range(u + 1, 9)])
    with pytest.raises(CapabilityError):
        max_matching_oracle(g)
    small = DynGraph.from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])
    assert len(max_matching_oracle(small)) == 2


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000))
def test_oracle_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 10)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if (u % 2) != (v % 2)]
    rng.shuffle(pairs)
    pairs = pairs[: rng.randint(0, 12)]
    g = DynGraph.from_edges(n, pairs, side=[v % 2 for v in range(n)])
    M = max_matching_oracle(g)
    assert is_matching(g, M.edges)
    assert len(M) == brute_mu(pairs)
    assert not has_augmenting_path(g, M)
    # general-graph path on the same instance
    gg = DynGraph.from_edges(n, pairs)
    assert len(exhaustive_max_matching(gg)) == len(M)


def test_hopcroft_karp_grows_from_initial():
    rng = random.Random(5)
    n = 40
    g = DynGraph(n, [v % 2 for v in range(n)])
    for u in range(0, n, 2):
        for v in range(1, n, 2):
            if rng.random() < 0.15:
                g.add_edge(u, v)
    full = hopcroft_karp(g)
    part = list(full.edges)[:5]
    again = hopcroft_karp(g, initial=part)
    assert len(again) == len(full)
