"""Matroid oracles for the four supported families.

Ground set is {0..n-1}. Every family answers independence and rank in closed
form; span, circuits and max-weight bases are built on top of those.
"""
from __future__ import annotations


class Matroid:
    kind = "?"

    def __init__(self, n):
        self.n = int(n)

    def _check(self, S):
        for e in S:
            if not (0 <= e < self.n):
                raise ValueError(f"element {e} outside ground set of size {self.n}")

    def independent(self, S) -> bool:
        raise NotImplementedError

    def rank(self, S) -> int:
        raise NotImplementedError

    def spans(self, S, e) -> bool:
        S = set(S)
        if e in S:
            return True
        return self.rank(S | {e}) == self.rank(S)

    def circuit(self, G, e) -> frozenset:
        """Unique circuit inside G + e, for G independent and e spanned by G."""
        G = set(G)
        if not self.independent(G):
            raise AssertionError("circuit(): G must be independent")
        if e in G or not self.spans(G, e):
            raise AssertionError("circuit(): e must be spanned by G and not in G")
        Ge = G | {e}
        return frozenset(j for j in Ge if self.independent(Ge - {j}))

    def max_weight_independent(self, weights, ground=None) -> frozenset:
        """Classic greedy on descending weight, ties to the lower index.
        Elements of weight <= 0 never enter."""
        if ground is None:
            ground = range(self.n)
        order = sorted((e for e in ground if weights[e] > 0), key=lambda e: (-weights[e], e))
        out = set()
        for e in order:
            if self.independent(out | {e}):
                out.add(e)
        return frozenset(out)

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return (self.n,)

    def __repr__(self):
        return f"{type(self).__name__}{self._key()}"


class Free(Matroid):
    kind = "free"

    def independent(self, S):
        self._check(S)
        return True

    def rank(self, S):
        self._check(S)
        return len(set(S))


class Uniform(Matroid):
    kind = "uniform"

    def __init__(self, n, k):
        super().__init__(n)
        if int(k) < 0:
            raise ValueError("uniform capacity must be >= 0")
        self.k = int(k)

    def _key(self):
        return (self.n, self.k)

    def independent(self, S):
        self._check(S)
        return len(set(S)) <= self.k

    def rank(self, S):
        self._check(S)
        return min(len(set(S)), self.k)


class Partition(Matroid):
    kind = "partition"

    def __init__(self, n, blocks, caps):
        super().__init__(n)
        blocks = [tuple(sorted(b)) for b in blocks]
        caps = [int(c) for c in caps]
        if len(blocks) != len(caps):
            raise ValueError("partition needs one capacity per block")
        if any(c < 0 for c in caps):
            raise ValueError("partition capacities must be >= 0")
        seen = [e for b in blocks for e in b]
        if sorted(seen) != list(range(self.n)):
            raise ValueError("partition blocks must be disjoint and cover the ground set")
        self.blocks = tuple(blocks)
        self.caps = tuple(caps)
        self.block_of = [0] * self.n
        for bi, b in enumerate(blocks):
            for e in b:
                self.block_of[e] = bi

    def _key(self):
        return (self.n, self.blocks, self.caps)

    def _counts(self, S):
        self._check(S)
        cnt = [0] * len(self.blocks)
        for e in set(S):
            cnt[self.block_of[e]] += 1
        return cnt

    def independent(self, S):
        return all(c <= cap for c, cap in zip(self._counts(S), self.caps))

    def rank(self, S):
        return sum(min(c, cap) for c, cap in zip(self._counts(S), self.caps))


class Graphic(Matroid):
    """Edges of a multigraph; a set is independent iff it is a forest."""
    kind = "graphic"

    def __init__(self, vertices, edges):
        super().__init__(len(edges))
        self.vertices = int(vertices)
        edges = tuple((int(u), int(w)) for u, w in edges)
        for u, w in edges:
            if not (0 <= u < self.vertices and 0 <= w < self.vertices):
                raise ValueError("graphic edge endpoint out of vertex range")
        self.edges = edges

    def _key(self):
        return (self.vertices, self.edges)

    def _merges(self, S):
        # number of edges of S that join two different components
        self._check(S)
        parent = list(range(self.vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        merges = 0
        for e in set(S):
            u, w = self.edges[e]
            ru, rw = find(u), find(w)
            if ru != rw:
                parent[ru] = rw
                merges += 1
        return merges

    def independent(self, S):
        return self._merges(S) == len(set(S))

    def rank(self, S):
        return self._merges(S)


# module-level names for the oracle operations

def is_independent(m: Matroid, S) -> bool:
    return m.independent(S)


def rank(m: Matroid, S) -> int:
    return m.rank(S)


def span_contains(m: Matroid, S, e) -> bool:
    return m.spans(S, e)


def fundamental_circuit(m: Matroid, G, e) -> frozenset:
    return m.circuit(G, e)


def max_weight_independent(m: Matroid, weights, ground=None) -> frozenset:
    return m.max_weight_independent(weights, ground)


def axiom_violations(m: Matroid, limit=8) -> list:
    """Enumerate all subsets (n <= limit) and report broken matroid axioms:
    empty set independent, hereditary, exchange, rank = largest independent
    subset, and circuit(G, e) = the unique minimal dependent subset of G + e."""
    n = m.n
    if n > limit:
        raise ValueError(f"axiom enumeration refuses n={n} > {limit}")
    subsets = [frozenset(e for e in range(n) if mask >> e & 1) for mask in range(1 << n)]
    ind = {S: m.independent(S) for S in subsets}
    out = []
    if not ind[frozenset()]:
        out.append("empty set is dependent")
    indep = [S for S in subsets if ind[S]]
    for S in indep:
        for e in S:
            if not ind[S - {e}]:
                out.append(f"hereditary: {sorted(S)} independent but {sorted(S - {e})} not")
    for A in indep:
        for B in indep:
            if len(A) < len(B) and not any(ind[A | {e}] for e in B - A):
                out.append(f"exchange: no element of {sorted(B - A)} extends {sorted(A)}")
    best = {S: 0 for S in subsets}
    for S in subsets:
        best[S] = len(S) if ind[S] else max(best[S - {e}] for e in S)
        if m.rank(S) != best[S]:
            out.append(f"rank{sorted(S)} = {m.rank(S)}, expected {best[S]}")
    for G in indep:
        for e in range(n):
            if e in G or ind[G | {e}]:
                continue
            Ge = G | {e}
            minimal = [C for C in subsets if C <= Ge and not ind[C]
                       and all(ind[C - {x}] for x in C)]
            if len(minimal) != 1 or m.circuit(G, e) != minimal[0]:
                out.append(f"circuit({sorted(G)}, {e}) is wrong")
    return out


# JSON uses 1-based module ids (and 1-based vertices for graphic matroids)

def matroid_to_json(m: Matroid) -> dict:
    if isinstance(m, Free):
        return {"kind": "free"}
    if isinstance(m, Uniform):
        return {"kind": "uniform", "k": m.k}
    if isinstance(m, Partition):
        return {"kind": "partition", "blocks": [[e + 1 for e in b] for b in m.blocks],
                "caps": list(m.caps)}
    if isinstance(m, Graphic):
        return {"kind": "graphic", "vertices": m.vertices,
                "edges": [[u + 1, w + 1] for u, w in m.edges]}
    raise TypeError(f"unknown matroid {m!r}")


def matroid_from_json(doc, n) -> Matroid:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("matroid must be an object with a 'kind' tag")
    kind = doc["kind"]
    if kind == "free":
        return Free(n)
    if kind == "uniform":
        return Uniform(n, doc["k"])
    if kind == "partition":
        blocks = [[int(e) - 1 for e in b] for b in doc["blocks"]]
        return Partition(n, blocks, doc["caps"])
    if kind == "graphic":
        edges = [(int(u) - 1, int(w) - 1) for u, w in doc["edges"]]
        if len(edges) != n:
            raise ValueError(f"graphic matroid has {len(edges)} edges, expected {n}")
        return Graphic(doc["vertices"], edges)
    raise ValueError(f"unknown matroid kind {kind!r}")
