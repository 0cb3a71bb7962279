"""Shared strategies and brute-force oracles. The oracles here deliberately
avoid the package's own helpers so that they can be used to check them."""
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bpb_market import Free, Graphic, Instance, Partition, Uniform

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

F = Fraction


# ---- matroid oracles

def forest_oracle(edges, S):
    """Acyclic iff |S| = touched vertices - components, by plain DFS."""
    adj = {}
    for e in S:
        u, w = edges[e]
        if u == w:
            return False
        adj.setdefault(u, []).append(w)
        adj.setdefault(w, []).append(u)
    seen, comps = set(), 0
    for s in adj:
        if s in seen:
            continue
        comps += 1
        stack = [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return len(S) == len(adj) - comps


def independent_oracle(m, S):
    S = set(S)
    if isinstance(m, Free):
        return True
    if isinstance(m, Uniform):
        return len(S) <= m.k
    if isinstance(m, Partition):
        return all(len(S & set(b)) <= cap for b, cap in zip(m.blocks, m.caps))
    if isinstance(m, Graphic):
        return forest_oracle(m.edges, S)
    raise TypeError(m)


def subsets(ground):
    ground = list(ground)
    for r in range(len(ground) + 1):
        yield from combinations(ground, r)


def best_weight_oracle(m, weights, ground=None):
    ground = range(m.n) if ground is None else ground
    best = F(0)
    for S in subsets(ground):
        if independent_oracle(m, S):
            best = max(best, sum((F(weights[e]) for e in S), F(0)))
    return best


def best_value_within(inst, prices, budget=None):
    """max value over independent sets with price sum within budget."""
    B = inst.budget if budget is None else budget
    best = F(0)
    for S in subsets(range(inst.n)):
        if sum((prices[e] for e in S), F(0)) <= B and independent_oracle(inst.matroid, S):
            best = max(best, sum((inst.values[e] for e in S), F(0)))
    return best


# ---- strategies

@st.composite
def matroids(draw, n, families=("free", "uniform", "partition", "graphic")):
    fam = draw(st.sampled_from(families))
    if fam == "free":
        return Free(n)
    if fam == "uniform":
        return Uniform(n, draw(st.integers(0, n)))
    if fam == "partition":
        nb = draw(st.integers(1, n))
        labels = draw(st.lists(st.integers(0, nb - 1), min_size=n, max_size=n))
        blocks = [[e for e in range(n) if labels[e] == b] for b in range(nb)]
        blocks = [b for b in blocks if b]
        caps = [draw(st.integers(0, len(b))) for b in blocks]
        return Partition(n, blocks, caps)
    nv = draw(st.integers(2, max(2, n)))
    edges = []
    for _ in range(n):
        u = draw(st.integers(0, nv - 1))
        w = draw(st.integers(0, nv - 2))
        edges.append((u, w if w < u else w + 1))
    return Graphic(nv, edges)


@st.composite
def instances(draw, min_n=1, max_n=6, families=("free", "uniform", "partition", "graphic"),
              cost_den=20, max_cost=F(1, 2), values=st.integers(0, 9)):
    n = draw(st.integers(min_n, max_n))
    m = draw(matroids(n, families))
    top = int(max_cost * cost_den)
    costs = [F(draw(st.integers(0, top)), cost_den) for _ in range(n)]
    vals = [draw(values) for _ in range(n)]
    return Instance(vals, costs, 1, m)


def prices_for(inst, draw, den=20):
    """Prices in [c(i), B] on the lattice 1/den."""
    out = []
    for c in inst.costs:
        lo = -((-c * den) // 1)
        out.append(F(draw(st.integers(int(lo), den)), den))
    return tuple(out)


@pytest.fixture
def tmp_json(tmp_path):
    def write(name, data):
        p = tmp_path / name
        p.write_bytes(data if isinstance(data, bytes) else data.encode())
        return str(p)
    return write
