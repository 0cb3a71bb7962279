import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bpb_market import Free, Graphic, Partition, Uniform
from bpb_market.fixtures import cycle_swap_graph, cycle_swap_instance
from bpb_market.matroids import (Matroid, axiom_violations, fundamental_circuit, is_independent,
                                 matroid_from_json, matroid_to_json, max_weight_independent, rank,
                                 span_contains)

from conftest import best_weight_oracle, independent_oracle, matroids, subsets


# ---- worked examples (ids below are 0-based: edge 1 is element 0)

def test_independence_examples():
    assert is_independent(Free(5), range(5))
    assert not is_independent(cycle_swap_graph(), {0, 1, 3})
    assert is_independent(cycle_swap_graph(), {0, 1, 2, 4})
    assert not is_independent(Uniform(3, 2), {0, 1, 2})


def test_rank_examples():
    assert rank(Free(4), {0, 1, 2, 3}) == 4
    assert rank(cycle_swap_graph(), range(5)) == 4
    assert rank(Partition(3, [[0, 1], [2]], [1, 1]), {0, 1, 2}) == 2


def test_span_examples():
    assert span_contains(Free(3), {1}, 1)
    assert span_contains(cycle_swap_graph(), {0, 1}, 3)
    assert not span_contains(Free(3), {0, 1}, 2)


def test_circuit_examples():
    assert fundamental_circuit(cycle_swap_graph(), {0, 1, 2}, 3) == {0, 1, 3}
    assert fundamental_circuit(Uniform(3, 2), {0, 1}, 2) == {0, 1, 2}


def test_max_weight_examples():
    assert max_weight_independent(Free(4), [3, 0, 1, 0]) == {0, 2}
    assert max_weight_independent(Uniform(3, 2), [5, 1, 3]) == {0, 2}
    best = max_weight_independent(cycle_swap_graph(), cycle_swap_instance().values)
    assert 3 in best and 0 not in best


def test_circuit_preconditions():
    g = cycle_swap_graph()
    with pytest.raises(AssertionError):
        g.circuit({0, 1, 3}, 2)
    with pytest.raises(AssertionError):
        g.circuit({0}, 2)


def test_constructor_validation():
    with pytest.raises(ValueError):
        Partition(3, [[0, 1]], [1])
    with pytest.raises(ValueError):
        Partition(2, [[0], [1]], [1])
    with pytest.raises(ValueError):
        Graphic(2, [(0, 2)])
    with pytest.raises(ValueError):
        Free(2).rank({5})


@pytest.mark.parametrize("m", [Free(3), Uniform(4, 2), Partition(3, [[0, 2], [1]], [1, 0]),
                               cycle_swap_graph()])
def test_json_roundtrip(m):
    assert matroid_from_json(matroid_to_json(m), m.n) == m


def test_json_tags():
    assert matroid_to_json(Partition(3, [[0, 1], [2]], [1, 1])) == \
        {"kind": "partition", "blocks": [[1, 2], [3]], "caps": [1, 1]}


# ---- properties against brute-force oracles

@given(st.integers(1, 7).flatmap(matroids))
def test_independence_matches_oracle(m):
    for S in subsets(range(m.n)):
        assert m.independent(S) == independent_oracle(m, S)


@given(st.integers(1, 6).flatmap(matroids))
def test_axioms_hold(m):
    assert axiom_violations(m) == []


def test_axioms_hold_at_eight():
    rng = random.Random(3)
    for m in [Free(8), Uniform(8, 3), Partition(8, [[0, 1, 2], [3, 4], [5, 6, 7]], [2, 1, 1]),
              Graphic(5, [(rng.randrange(5), rng.randrange(4)) for _ in range(8)])]:
        if isinstance(m, Graphic):
            m = Graphic(5, [(u, w if w < u else w + 1) for u, w in m.edges])
        assert axiom_violations(m) == []


class _NotHereditary(Matroid):
    # {0, 1} independent but {1} is not
    def independent(self, S):
        return set(S) in ({0, 1}, set(), {0})

    def rank(self, S):
        return max(len(T) for T in subsets(S) if self.independent(T))


def test_axiom_enumeration_catches_bad_oracle():
    bad = axiom_violations(_NotHereditary(2))
    assert any(msg.startswith("hereditary") for msg in bad)


@given(st.integers(1, 7).flatmap(matroids))
def test_rank_monotone_submodular(m):
    all_sets = [frozenset(S) for S in subsets(range(m.n))]
    r = {S: m.rank(S) for S in all_sets}
    for A in all_sets:
        for e in range(m.n):
            assert r[A | {e}] >= r[A]
    rng = random.Random(m.n)
    for _ in range(200):
        A, B = rng.choice(all_sets), rng.choice(all_sets)
        assert r[A | B] + r[A & B] <= r[A] + r[B]


def _dfs_cycle(edges, G, e):
    """Edges on the tree path between the endpoints of e, plus e."""
    u, w = edges[e]
    adj = {}
    for f in G:
        a, b = edges[f]
        adj.setdefault(a, []).append((b, f))
        adj.setdefault(b, []).append((a, f))
    stack, prev = [u], {u: None}
    while stack:
        x = stack.pop()
        for y, f in adj.get(x, []):
            if y not in prev:
                prev[y] = (x, f)
                stack.append(y)
    path, x = {e}, w
    while prev[x] is not None:
        x, f = prev[x]
        path.add(f)
    return path


@given(st.integers(2, 8).flatmap(lambda n: matroids(n, ("graphic",))), st.randoms())
def test_graphic_circuit_matches_dfs(m, rnd):
    order = list(range(m.n))
    rnd.shuffle(order)
    G = set()
    for e in order:
        if m.independent(G | {e}):
            G.add(e)
        elif e not in G:
            assert m.circuit(G, e) == _dfs_cycle(m.edges, G, e)


@given(st.integers(1, 7).flatmap(matroids), st.randoms())
def test_circuit_unique_and_minimal(m, rnd):
    G = set()
    for e in rnd.sample(range(m.n), m.n):
        if m.independent(G | {e}):
            G.add(e)
    for e in set(range(m.n)) - G:
        C = m.circuit(G, e)
        assert e in C and not m.independent(C)
        assert all(m.independent(C - {x}) for x in C)
        minimal = [set(S) for S in subsets(G | {e})
                   if not m.independent(S) and all(m.independent(set(S) - {x}) for x in S)]
        assert minimal == [set(C)]


@given(st.integers(1, 10).flatmap(matroids),
       st.lists(st.integers(0, 6), min_size=10, max_size=10))
def test_max_weight_matches_brute_force(m, w):
    w = [F(x) for x in w[:m.n]]
    S = max_weight_independent(m, w)
    assert m.independent(S)
    assert all(w[e] > 0 for e in S)
    assert sum((w[e] for e in S), F(0)) == best_weight_oracle(m, w)


@pytest.mark.parametrize("fam", ["free", "uniform", "partition", "graphic"])
def test_max_weight_at_twelve(fam):
    rng = random.Random(fam)
    n = 12
    if fam == "free":
        m = Free(n)
    elif fam == "uniform":
        m = Uniform(n, 5)
    elif fam == "partition":
        m = Partition(n, [list(range(0, 5)), list(range(5, 9)), list(range(9, 12))], [2, 3, 1])
    else:
        m = Graphic(7, [(u, (u + 1 + rng.randrange(6)) % 7) for u in [rng.randrange(7) for _ in range(n)]])
    for _ in range(3):
        w = [F(rng.randint(0, 20)) for _ in range(n)]
        S = max_weight_independent(m, w)
        assert sum((w[e] for e in S), F(0)) == best_weight_oracle(m, w)
