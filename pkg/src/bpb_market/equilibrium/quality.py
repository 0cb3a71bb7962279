"""OPT at true costs, approximation ratios and the equilibrium quality bounds."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import lcm

import numpy as np

from ..matroids import Free, Partition, Uniform, max_weight_independent
from ..model import Instance, as_scalar
from ..selection import BY_COST_RATIO, _exhaustive_best, get_rule

EXHAUSTIVE_CAP = 20
DP_CELLS = 60_000_000


def _scale_ints(xs):
    L = 1
    for x in xs:
        L = lcm(L, x.denominator)
    return [int(x * L) for x in xs], L


def _value_array(vals, n):
    # exact integer values; fall back to Python ints if int64 could overflow
    if max(vals, default=0) * max(n, 1) < 2 ** 62:
        return np.int64
    return object


def _knapsack_dp(weights, values, W):
    """0/1 knapsack over integer weights; returns the chosen index set."""
    n = len(weights)
    dtype = _value_array(values, n)
    dp = np.zeros(W + 1, dtype=dtype)
    take = np.zeros((n, W + 1), dtype=bool)
    for k, (w, v) in enumerate(zip(weights, values)):
        if w > W or v <= 0:
            continue
        cand = dp[:W + 1 - w] + v
        better = cand > dp[w:]
        take[k, w:] = better
        dp[w:] = np.where(better, cand, dp[w:])
    S = []
    w = W
    for k in range(n - 1, -1, -1):
        if take[k, w]:
            S.append(k)
            w -= weights[k]
    return S


def _grouped_dp(groups, W):
    """Group knapsack: pick at most one option (cost, value, items) per group."""
    allvals = [v for g in groups for (_, v, _) in g]
    dtype = _value_array(allvals, len(groups) * 4)
    dp = np.zeros(W + 1, dtype=dtype)
    choice = np.full((len(groups), W + 1), -1, dtype=np.int32)
    for gi, opts in enumerate(groups):
        new = dp.copy()
        for oi, (w, v, _) in enumerate(opts):
            if w > W or v <= 0:
                continue
            cand = dp[:W + 1 - w] + v
            better = cand > new[w:]
            new[w:] = np.where(better, cand, new[w:])
            choice[gi, w:][better] = oi
        dp = new
    S = []
    w = W
    for gi in range(len(groups) - 1, -1, -1):
        oi = choice[gi, w]
        if oi >= 0:
            cw, _, items = groups[gi][oi]
            S.extend(items)
            w -= cw
    return S


def _cardinality_dp(weights, values, W, k):
    """0/1 knapsack with at most k items: DP over (count, weight)."""
    n = len(weights)
    k = min(k, n)
    dtype = _value_array(values, n)
    NEG = -(1 << 60)
    dp = np.full((k + 1, W + 1), NEG, dtype=dtype)
    dp[0, :] = 0
    take = np.zeros((n, k + 1, W + 1), dtype=bool)
    for it, (w, v) in enumerate(zip(weights, values)):
        if w > W or v <= 0:
            continue
        for r in range(k, 0, -1):
            cand = dp[r - 1, :W + 1 - w] + v
            better = (dp[r - 1, :W + 1 - w] > NEG) & (cand > dp[r, w:])
            take[it, r, w:] = better
            dp[r, w:] = np.where(better, cand, dp[r, w:])
    r = int(np.argmax(dp[:, W]))
    S = []
    w = W
    for it in range(n - 1, -1, -1):
        if r > 0 and take[it, r, w]:
            S.append(it)
            w -= weights[it]
            r -= 1
    return S


def _partition_dp(blocks, caps, weights, values, W):
    """Knapsack with at most caps[b] items from each block: a cardinality DP
    per block seeded with the best values over the previous blocks."""
    dtype = _value_array(values, len(weights))
    NEG = -(1 << 60)
    g = np.zeros(W + 1, dtype=dtype)
    steps = []
    for b, cap in zip(blocks, caps):
        k = min(cap, len(b))
        dp = np.full((k + 1, W + 1), NEG, dtype=dtype)
        dp[0] = g
        takes = []
        for it in b:
            w, v = weights[it], values[it]
            take = np.zeros((k + 1, W + 1), dtype=bool)
            if w <= W and v > 0:
                for r in range(k, 0, -1):
                    cand = dp[r - 1, :W + 1 - w] + v
                    better = (dp[r - 1, :W + 1 - w] > NEG) & (cand > dp[r, w:])
                    take[r, w:] = better
                    dp[r, w:] = np.where(better, cand, dp[r, w:])
            takes.append(take)
        best_r = np.argmax(dp, axis=0)
        g = dp[best_r, np.arange(W + 1)]
        steps.append((b, takes, best_r))
    S = []
    w = W
    for b, takes, best_r in reversed(steps):
        r = int(best_r[w])
        for it, take in zip(reversed(b), reversed(takes)):
            if r > 0 and take[r, w]:
                S.append(it)
                w -= weights[it]
                r -= 1
    return S


def opt_with_costs(inst: Instance, method="auto") -> tuple:
    """Best value of an independent set with c(S) <= B. Returns (set, value).

    Free and partition matroids use an exact integer DP when costs scale to
    a small capacity; otherwise exhaustive search (n <= 20)."""
    n, m = inst.n, inst.matroid
    if method == "auto" and inst.cost_of(range(n)) <= inst.budget:
        # the budget never binds: matroid greedy is exact
        S = max_weight_independent(m, inst.values)
        return frozenset(S), inst.value_of(S)
    ws, L = _scale_ints(list(inst.costs) + [inst.budget])
    W = ws.pop()
    vs, _ = _scale_ints(inst.values)
    dp_ok = (W + 1) * max(n, 1) <= DP_CELLS
    if method in ("auto", "dp") and dp_ok and isinstance(m, Free):
        S = _knapsack_dp(ws, vs, W)
    elif method in ("auto", "dp") and isinstance(m, Uniform) \
            and (W + 1) * (min(m.k, n) + 1) * max(n, 1) <= DP_CELLS:
        S = _cardinality_dp(ws, vs, W, m.k)
    elif method in ("auto", "dp") and isinstance(m, Partition) \
            and (W + 1) * sum(min(c, len(b)) + 1 for b, c in zip(m.blocks, m.caps)) \
            * max(map(len, m.blocks), default=1) <= DP_CELLS:
        S = _partition_dp([list(b) for b in m.blocks], m.caps, ws, vs, W)
    elif method in ("auto", "dp") and dp_ok and isinstance(m, Partition):
        blocks, caps = m.blocks, m.caps
        groups = []
        total = 0
        for b, cap in zip(blocks, caps):
            opts = []
            for r in range(1, min(cap, len(b)) + 1):
                for T in combinations(b, r):
                    opts.append((sum(ws[i] for i in T), sum(vs[i] for i in T), T))
            total += len(opts)
            groups.append(opts)
        if total * (W + 1) > DP_CELLS or total > 200_000:
            if n > EXHAUSTIVE_CAP:
                raise ValueError("instance too large for exact OPT")
            S = _exhaustive_best(m, inst.values, inst.costs, inst.budget)
        else:
            S = _grouped_dp(groups, W)
    else:
        if method == "dp":
            raise ValueError("no DP path for this instance")
        if n > EXHAUSTIVE_CAP:
            raise ValueError(f"exhaustive OPT refuses n={n} > {EXHAUSTIVE_CAP}")
        S = _exhaustive_best(m, inst.values, inst.costs, inst.budget)
    S = frozenset(S)
    assert m.independent(S) and inst.cost_of(S) <= inst.budget
    return S, inst.value_of(S)


def approx_ratio(inst: Instance, p, rule="bpb", tb=BY_COST_RATIO, opt=None) -> Fraction:
    """v(rule(p)) / OPT, exactly; 1 when OPT = 0."""
    sel = get_rule(rule)(inst, tuple(as_scalar(x) for x in p), tb)
    if opt is None:
        opt = opt_with_costs(inst)[1]
    if opt == 0:
        return Fraction(1)
    return inst.value_of(sel.selected) / opt


# ---- bounds (all exact in the rational inputs)

def _frac(x):
    return as_scalar(x) if not isinstance(x, Fraction) else x


def additive_poa_bound(lam, eps, m):
    """OPT / v(S_p) for any eps-equilibrium with costs in [m, lam*B - eps]."""
    lam, eps, m = _frac(lam), _frac(eps), _frac(m)
    r = lam / (1 - lam)
    return (2 + eps / m + (1 + eps / m) * r) * (1 + r)


def unit_matroid_poa_bound(lam, eps, B):
    """OPT / |S_p| for unit values, skip greedy, small eps."""
    lam, eps, B = _frac(lam), _frac(eps), _frac(B)
    r = lam / (1 - lam)
    return (1 + r) * (1 + (1 / (1 - lam - eps / B)) * (lam + eps / B) / lam)


def weighted_matroid_poa_bound(lam, eps, B):
    """OPT / v(S_p) for weighted matroids, lam < 1/3."""
    lam, eps, B = _frac(lam), _frac(eps), _frac(B)
    if lam >= Fraction(1, 3):
        raise ValueError("bound needs lam < 1/3")
    return (1 + 2 * lam / (1 - 3 * lam) + (1 + eps / (lam * B)) / (1 - lam - eps / B)) \
        * (1 + lam / (1 - lam))


def at_cost_bound(lam):
    """OPT / v(S_c): greedy at true costs."""
    lam = _frac(lam)
    return 1 + lam / (1 - lam)


def simplified_additive_ratio(lam):
    lam = _frac(lam)
    return (1 - lam) ** 2 / (2 - lam)


def simplified_matroid_ratio(lam):
    lam = _frac(lam)
    return (1 - 3 * lam) ** 2 / (2 - 3 * lam)


# ---- structural properties of eps-equilibria

def equal_bpb_holds(inst: Instance, p, eps, tb=BY_COST_RATIO) -> bool:
    """v(i)/(p(i)+eps) <= v(j)/p(j) for every ordered pair of selected modules."""
    from ..selection import greedy_bpb
    eps = _frac(eps)
    S = greedy_bpb(inst, p, tb).selected
    v = inst.values
    for i in S:
        for j in S:
            if i != j and v[i] * p[j] > v[j] * (p[i] + eps):
                return False
    return True


def budget_or_bpb_tight(inst: Instance, p, eps, tb=BY_COST_RATIO) -> bool:
    """p(S_p) >= B - eps, or every selected module has v(i)/(p(i)+eps) at most
    the cost ratio of the first module after the last selected one."""
    from ..selection import greedy_bpb
    eps = _frac(eps)
    res = greedy_bpb(inst, p, tb)
    if res.spend >= inst.budget - eps:
        return True
    order = res.inspection_order
    sel = res.selected_set
    last = max((k for k, e in enumerate(order) if e in sel), default=-1)
    if last + 1 >= len(order):
        return True
    nxt = order[last + 1]
    v, c = inst.values, inst.costs
    for i in sel:
        # v(i)/(p(i)+eps) <= v(nxt)/c(nxt)
        if c[nxt] == 0:
            continue
        if v[i] * c[nxt] > v[nxt] * (p[i] + eps):
            return False
    return True


def spend_lower_bound_holds(inst: Instance, p, eps, lam=None, tb=BY_COST_RATIO) -> bool:
    """p(S_p) >= (1 - lam) B - eps, for lam >= max c / B."""
    from ..selection import greedy_bpb
    from ..model import lambda_max
    eps = _frac(eps)
    lam = lambda_max(inst) if lam is None else _frac(lam)
    return greedy_bpb(inst, p, tb).spend >= (1 - lam) * inst.budget - eps
