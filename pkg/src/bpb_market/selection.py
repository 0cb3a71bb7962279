"""Buyer selection rules.

greedy_bpb     circuit-swap greedy in bang-per-buck order
greedy_knapsack  plain knapsack greedy (free matroid only)
greedy_skip    greedy that skips matroid-infeasible modules
optimal_select exhaustive optimum at the posted prices
"""
from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key

from .matroids import Free
from .model import Instance, SelectionResult, Swap, as_scalar


# ---- tie breaking

class TieBreak:
    def ranks(self, inst: Instance) -> tuple:
        """rank[i] = position of module i in the tie-break priority (0 = first)."""
        raise NotImplementedError


class ByCostRatio(TieBreak):
    """Higher v/c first (zero cost counts as infinite ratio), then lower index."""

    def ranks(self, inst):
        order = sorted(range(inst.n), key=cmp_to_key(lambda a, b: _cmp_ratio(
            inst.values[a], inst.costs[a], inst.values[b], inst.costs[b]) or (a - b)))
        r = [0] * inst.n
        for pos, i in enumerate(order):
            r[i] = pos
        return tuple(r)

    def __repr__(self):
        return "ByCostRatio()"


class ByIndex(TieBreak):
    def ranks(self, inst):
        return tuple(range(inst.n))

    def __repr__(self):
        return "ByIndex()"


class Explicit(TieBreak):
    """Priority given as a permutation of module ids, first = wins ties."""

    def __init__(self, perm):
        self.perm = tuple(perm)

    def ranks(self, inst):
        if sorted(self.perm) != list(range(inst.n)):
            raise ValueError("explicit tie-break must be a permutation of the modules")
        r = [0] * inst.n
        for pos, i in enumerate(self.perm):
            r[i] = pos
        return tuple(r)

    def __repr__(self):
        return f"Explicit({self.perm})"


BY_COST_RATIO = ByCostRatio()
BY_INDEX = ByIndex()


def _group(v, p):
    # 0: free module with value, 1: ordinary, 2: worthless
    if v == 0:
        return 2
    return 0 if p == 0 else 1


def _cmp_ratio(va, pa, vb, pb):
    """-1 if a has strictly better bang-per-buck than b, 1 if worse, 0 if tied."""
    ga, gb = _group(va, pa), _group(vb, pb)
    if ga != gb:
        return -1 if ga < gb else 1
    if ga != 1:
        return 0
    lhs, rhs = va * pb, vb * pa
    if lhs > rhs:
        return -1
    if lhs < rhs:
        return 1
    return 0


def bpb_order(inst: Instance, p, tb: TieBreak = BY_COST_RATIO, ranks=None) -> tuple:
    """Modules sorted by descending v/p using cross-multiplication; ties by tb."""
    if ranks is None:
        ranks = tb.ranks(inst)
    v = inst.values

    def cmp(a, b):
        return _cmp_ratio(v[a], p[a], v[b], p[b]) or (ranks[a] - ranks[b])

    return tuple(sorted(range(inst.n), key=cmp_to_key(cmp)))


# ---- greedy rules

def _budget(inst, budget):
    return inst.budget if budget is None else budget


def greedy_bpb(inst: Instance, p, tb: TieBreak = BY_COST_RATIO, budget=None,
               order=None) -> SelectionResult:
    """Admit modules in bang-per-buck order. A module that closes a circuit
    evicts the lowest-value circuit member (ties: the one inspected last, so
    the entering module itself loses a tie). Stop at the first set whose
    price exceeds the budget, without applying it."""
    B = _budget(inst, budget)
    m = inst.matroid
    v = inst.values
    if order is None:
        order = bpb_order(inst, p, tb)
    pos = {e: k for k, e in enumerate(order)}
    G = []
    spend = Fraction(0)
    swaps = []
    term = None
    for e in order:
        if m.independent(G + [e]):
            G2 = G + [e]
            swap = None
        else:
            C = m.circuit(G, e)
            j = min(C, key=lambda x: (v[x], -pos[x]))
            if j == e:
                continue
            G2 = [x for x in G if x != j] + [e]
            swap = Swap(j, e, tuple(sorted(C)))
        s2 = sum((p[x] for x in G2), Fraction(0))
        if s2 > B:
            term = e
            break
        G, spend = G2, s2
        if swap:
            swaps.append(swap)
    return SelectionResult(tuple(G), spend, tuple(order), tuple(swaps), term)


def greedy_knapsack(inst: Instance, p, tb: TieBreak = BY_COST_RATIO, budget=None,
                    order=None) -> SelectionResult:
    if not isinstance(inst.matroid, Free):
        raise ValueError("greedy_knapsack requires a free matroid")
    B = _budget(inst, budget)
    if order is None:
        order = bpb_order(inst, p, tb)
    G = []
    spend = Fraction(0)
    term = None
    for e in order:
        if spend + p[e] > B:
            term = e
            break
        G.append(e)
        spend += p[e]
    return SelectionResult(tuple(G), spend, tuple(order), (), term)


def greedy_skip(inst: Instance, p, tb: TieBreak = BY_COST_RATIO, budget=None,
                order=None) -> SelectionResult:
    B = _budget(inst, budget)
    m = inst.matroid
    if order is None:
        order = bpb_order(inst, p, tb)
    G = []
    spend = Fraction(0)
    term = None
    for e in order:
        if not m.independent(G + [e]):
            continue
        if spend + p[e] > B:
            term = e
            break
        G.append(e)
        spend += p[e]
    return SelectionResult(tuple(G), spend, tuple(order), (), term)


OPT_CAP = 20


def optimal_select(inst: Instance, p, tb: TieBreak = None, budget=None,
                   cap=OPT_CAP) -> SelectionResult:
    """Max-value independent set with p(S) <= B. Ties go to the
    lexicographically smallest sorted id tuple. tb is accepted for a uniform
    signature and ignored."""
    n = inst.n
    if n > cap:
        raise ValueError(f"optimal_select refuses n={n} > cap {cap}")
    B = _budget(inst, budget)
    best = _exhaustive_best(inst.matroid, inst.values, p, B)
    S = tuple(sorted(best))
    return SelectionResult(S, sum((p[i] for i in S), Fraction(0)), (), (), None)


def _exhaustive_best(m, values, weights_cost, B):
    """DFS over independent budget-feasible sets in increasing id order.
    Visiting order is lexicographic, so the first set reaching the best value
    is the lexicographically smallest one."""
    n = len(values)
    best_val = [Fraction(-1)]
    best_set = [()]
    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + values[i]

    def rec(start, S, val, cost):
        if val > best_val[0]:
            best_val[0], best_set[0] = val, tuple(S)
        elif val == best_val[0] and tuple(S) < best_set[0]:
            best_set[0] = tuple(S)
        for e in range(start, n):
            if val + suffix[e] < best_val[0]:
                return
            c2 = cost + weights_cost[e]
            if c2 > B:
                continue
            S.append(e)
            if m.independent(S):
                rec(e + 1, S, val + values[e], c2)
            S.pop()

    rec(0, [], Fraction(0), Fraction(0))
    return best_set[0]


RULES = {
    "bpb": greedy_bpb,
    "knapsack": greedy_knapsack,
    "skip": greedy_skip,
    "opt": optimal_select,
}


def get_rule(rule):
    if callable(rule):
        return rule
    try:
        return RULES[rule]
    except KeyError:
        raise ValueError(f"unknown selection rule {rule!r}; choose from {sorted(RULES)}")


def with_price(p, i, x) -> tuple:
    q = list(p)
    q[i] = x
    return tuple(q)


def critical_price(inst: Instance, p, i, grid, rule="bpb", tb: TieBreak = BY_COST_RATIO):
    """Largest grid price at which module i would be selected, others fixed
    at p. Scans the whole grid since selection need not be monotone in the
    module's own price. None if no grid price works."""
    f = get_rule(rule)
    best = None
    for b in grid:
        b = as_scalar(b)
        if i in f(inst, with_price(p, i, b), tb).selected:
            if best is None or b > best:
                best = b
    return best
