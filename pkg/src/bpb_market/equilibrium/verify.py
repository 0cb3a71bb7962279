"""Exact epsilon-equilibrium verification and equilibrium surgery.

For a module i with the other prices fixed, selection of i is piecewise
constant in its own price x. The pieces come from two sources: x crossing
p(j) v(i)/v(j) changes i's place in the bang-per-buck order, and inside a
fixed order every budget test that involves i reads x <= B - s for some
constant s. verify_eps_equilibrium walks the greedy rule symbolically in x,
splitting at each such threshold, so the supremum of the deviation utility
is computed exactly (including whether it is attained).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from ..matroids import Free
from ..model import Instance, as_scalar
from ..selection import (BY_COST_RATIO, TieBreak, _cmp_ratio, bpb_order, get_rule, greedy_bpb,
                         with_price)


# ---- intervals (lo, lo_closed, hi, hi_closed)

def _nonempty(iv):
    lo, lc, hi, hc = iv
    return lo < hi or (lo == hi and lc and hc)


def _below(iv, t):
    """iv intersected with (-inf, t]."""
    lo, lc, hi, hc = iv
    if t < hi:
        return (lo, lc, t, True)
    return iv


def _above(iv, t):
    """iv intersected with (t, inf)."""
    lo, lc, hi, hc = iv
    if t > lo:
        return (t, False, hi, hc)
    if t == lo:
        return (lo, False, hi, hc)
    return iv


def _walk(inst, p, i, order, iv, kind, B):
    """Run a greedy rule with module i at an unknown price x in iv.
    Returns [(sub-interval, i selected)] covering iv."""
    m, v = inst.matroid, inst.values
    free = isinstance(m, Free)
    pos = {e: k for k, e in enumerate(order)}
    out = []
    G = ()
    s = Fraction(0)  # price of G without module i
    for e in order:
        out_j = None
        if kind == "knapsack" or free or m.independent(G + (e,)):
            G2 = G + (e,)
        elif kind == "skip":
            continue
        else:
            C = m.circuit(G, e)
            out_j = min(C, key=lambda x: (v[x], -pos[x]))
            if out_j == e:
                continue
            G2 = tuple(x for x in G if x != out_j) + (e,)
        if B is None:
            G = G2
            continue
        s2 = s
        if e != i:
            s2 += p[e]
        if out_j is not None and out_j != i:
            s2 -= p[out_j]
        if i not in G2:
            if s2 > B:
                out.append((iv, i in G))
                return out
            G, s = G2, s2
            continue
        t = B - s2
        up = _above(iv, t)
        if _nonempty(up):
            out.append((up, i in G))
        iv = _below(iv, t)
        if not _nonempty(iv):
            return out
        G, s = G2, s2
    out.append((iv, i in G))
    return out


_KINDS = {"bpb": "bpb", "knapsack": "knapsack", "skip": "skip"}


def _rule_kind(rule):
    if isinstance(rule, str):
        return _KINDS.get(rule)
    from .. import selection as S
    return {S.greedy_bpb: "bpb", S.greedy_knapsack: "knapsack", S.greedy_skip: "skip"}.get(rule)


def _order_breaks(inst, p, i, lo, hi):
    vi = inst.values[i]
    pts = set()
    if vi > 0:
        for j in range(inst.n):
            if j != i and inst.values[j] > 0:
                t = p[j] * vi / inst.values[j]
                if lo < t < hi:
                    pts.add(t)
    return sorted(pts)


def _pieces(lo, hi, pts):
    """Points and open gaps partitioning [lo, hi]."""
    cuts = [lo] + [t for t in pts if lo < t < hi] + ([hi] if hi > lo else [])
    out = []
    for a, b in zip(cuts, cuts[1:]):
        out.append((a, True, a, True))
        out.append((a, False, b, False))
    out.append((cuts[-1], True, cuts[-1], True))
    return out


def selection_profile(inst: Instance, p, i, rule="bpb", tb: TieBreak = BY_COST_RATIO,
                      lo=None, hi=None, budget=None):
    """Exact map x -> [i selected at (x, p_-i)] on [lo, hi] (default
    [c(i), B]) as a list of (interval, selected)."""
    kind = _rule_kind(rule)
    if kind == "knapsack" and not isinstance(inst.matroid, Free):
        raise ValueError("greedy_knapsack requires a free matroid")
    B = inst.budget if budget is None else budget
    lo = inst.costs[i] if lo is None else lo
    hi = inst.budget if hi is None else hi
    ranks = tb.ranks(inst)
    out = []
    if lo > hi:
        return out
    if kind is None:
        # generic rule: selection only changes where a feasible set containing
        # i becomes unaffordable, i.e. at x = B - p(T) for T among the others
        f = get_rule(rule)
        others = [j for j in range(inst.n) if j != i]
        pts = set()
        if len(others) > 16:
            raise ValueError("exact profile for this rule needs n <= 17")
        for r in range(len(others) + 1):
            for T in combinations(others, r):
                t = B - sum((p[j] for j in T), Fraction(0))
                if lo < t < hi:
                    pts.add(t)
        pts |= set(_order_breaks(inst, p, i, lo, hi))
        for iv in _pieces(lo, hi, sorted(pts)):
            x = iv[0] if iv[1] else (iv[0] + iv[2]) / 2
            out.append((iv, i in f(inst, with_price(p, i, x), tb, budget=budget).selected))
        return out
    # the others keep their relative order; only i's slot moves with x
    rest = [j for j in bpb_order(inst, p, ranks=ranks) if j != i]
    v = inst.values
    for iv in _pieces(lo, hi, _order_breaks(inst, p, i, lo, hi)):
        x = iv[0] if iv[1] else (iv[0] + iv[2]) / 2
        k = 0
        while k < len(rest) and (_cmp_ratio(v[rest[k]], p[rest[k]], v[i], x)
                                 or ranks[rest[k]] - ranks[i]) < 0:
            k += 1
        order = rest[:k] + [i] + rest[k:]
        out.extend(_walk(inst, p, i, order, iv, kind, B))
    return out


@dataclass(frozen=True)
class ModuleDeviation:
    module: int
    current_utility: Fraction
    best_price: Fraction       # price achieving (or approaching) the best utility
    attained: bool             # False: best utility is a supremum approached from below
    best_utility: Fraction
    gain: Fraction
    violates: bool
    witness_price: Fraction    # a concrete price inside the best piece

    def to_json(self):
        return {"module": self.module + 1, "current_utility": str(self.current_utility),
                "best_price": str(self.best_price), "attained": self.attained,
                "best_utility": str(self.best_utility), "gain": str(self.gain),
                "violates": self.violates, "witness_price": str(self.witness_price)}


@dataclass(frozen=True)
class DeviationReport:
    eps: Fraction
    modules: tuple

    @property
    def passed(self) -> bool:
        return not any(d.violates for d in self.modules)

    def __bool__(self):
        return self.passed

    @property
    def max_gain(self) -> Fraction:
        return max((d.gain for d in self.modules), default=Fraction(0))

    def violators(self):
        return [d.module for d in self.modules if d.violates]

    def to_json(self):
        return {"eps": str(self.eps), "passed": self.passed, "max_gain": str(self.max_gain),
                "modules": [d.to_json() for d in self.modules]}


def _best_from_profile(inst, i, prof):
    c = inst.costs[i]
    best = None  # (utility, attained, price, witness)
    for (lo, lc, hi, hc), sel in prof:
        if sel:
            u = hi - c
            att = hc
            w = hi if hc else hi - (hi - lo) / 1024
            cand = (u, att, hi, w)
        else:
            x = lo if lc else (lo + hi) / 2
            cand = (Fraction(0), True, x, x)
        if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] and not best[1]):
            best = cand
    return best


def verify_eps_equilibrium(inst: Instance, p, eps=0, rule="bpb", tb: TieBreak = BY_COST_RATIO,
                           dev_grid=None, modules=None, first_violation=False) -> DeviationReport:
    """Check that no module gains more than eps by a unilateral price change
    within its strategy range [c(i), B].

    With dev_grid=None the check is exact over the continuum. A dev_grid
    (list of prices, or dict module -> list) restricts deviations to those
    candidates instead. first_violation=True stops after the first module
    that gains more than eps (the report then covers only the modules seen)."""
    eps = as_scalar(eps)
    p = tuple(as_scalar(x) for x in p)
    f = get_rule(rule)
    base = f(inst, p, tb)
    mods = range(inst.n) if modules is None else modules
    out = []
    for i in mods:
        u0 = p[i] - inst.costs[i] if i in base.selected else Fraction(0)
        if dev_grid is not None:
            cands = dev_grid[i] if isinstance(dev_grid, dict) else dev_grid
            best = None
            for x in cands:
                x = as_scalar(x)
                sel = i in f(inst, with_price(p, i, x), tb).selected
                u = x - inst.costs[i] if sel else Fraction(0)
                if best is None or u > best[0]:
                    best = (u, True, x, x)
            if best is None:
                best = (u0, True, p[i], p[i])
        else:
            prof = selection_profile(inst, p, i, rule, tb)
            best = _best_from_profile(inst, i, prof) if prof else (u0, True, p[i], p[i])
        u, att, x, w = best
        gain = u - u0
        out.append(ModuleDeviation(i, u0, x, att, u, gain, gain > eps, w))
        if first_violation and gain > eps:
            break
    return DeviationReport(eps, tuple(out))


# ---- equilibrium surgery

def canonicalize_worst_additive(inst: Instance, p, eps, i, tb: TieBreak = BY_COST_RATIO,
                                check_pre=False) -> tuple:
    """Move a rejected module i down to c(i)+eps and re-price the modules it
    displaces: p'(j) = max{c(j), (c(i)+eps)/v(i) v(j) - eps/2} for j selected
    before but not after the move. Free matroid only."""
    if not isinstance(inst.matroid, Free):
        raise ValueError("canonicalize_worst_additive requires a free matroid")
    eps = as_scalar(eps)
    p = tuple(as_scalar(x) for x in p)
    S = greedy_bpb(inst, p, tb).selected_set
    if i in S:
        raise ValueError(f"module {i + 1} is selected; expected a rejected module")
    if check_pre and not verify_eps_equilibrium(inst, p, eps, "bpb", tb):
        raise ValueError("input prices are not an eps-equilibrium")
    ci = inst.costs[i]
    if p[i] <= ci + eps:
        return p
    if inst.values[i] == 0:
        raise ValueError("rejected module has zero value")
    p1 = with_price(p, i, ci + eps)
    S1 = greedy_bpb(inst, p1, tb).selected_set
    rate = (ci + eps) / inst.values[i]
    q = list(p1)
    for j in S - S1:
        q[j] = max(inst.costs[j], rate * inst.values[j] - eps / 2)
    return tuple(q)


def lower_rejected_prefix_to_cost(inst: Instance, p, eps, tb: TieBreak = BY_COST_RATIO,
                                  verify=True) -> tuple:
    """Drop every rejected module inspected before the last selected one to
    min(p(i), c(i)+eps), one at a time until none is left. The selected value
    must not change; with verify=True the result is re-checked as an
    eps-equilibrium."""
    eps = as_scalar(eps)
    q = tuple(as_scalar(x) for x in p)
    base = greedy_bpb(inst, q, tb)
    val0 = inst.value_of(base.selected)
    for _ in range(inst.n + 1):
        res = greedy_bpb(inst, q, tb)
        order = res.inspection_order
        sel = res.selected_set
        last = max((k for k, e in enumerate(order) if e in sel), default=-1)
        todo = [e for e in order[:last] if e not in sel and q[e] > inst.costs[e] + eps]
        if not todo:
            break
        e = todo[0]
        q = with_price(q, e, inst.costs[e] + eps)
    val = inst.value_of(greedy_bpb(inst, q, tb).selected)
    if val != val0:
        raise RuntimeError(f"selected value changed from {val0} to {val}")
    if verify:
        rep = verify_eps_equilibrium(inst, q, eps, "bpb", tb)
        if not rep.passed:
            raise RuntimeError(f"lowered prices fail verification for modules "
                               f"{[m + 1 for m in rep.violators()]}")
    return q
