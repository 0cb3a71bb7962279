"""Randomized checks of the structural properties of lift-and-swap equilibria
that drive convergence of the learning dynamics.

dominance   a module of S selected at some p with p(i) < pbar(i) is still
            selected at (pbar(i), p_-i)
rejection   if every member of S bids at least its equilibrium price, the
            member i* of S' = S + {last inspected module} with the worst
            bang-per-buck below the equilibrium level is rejected (whether
            the budget is exceeded around i* is only counted)
stability   if every member of S' bids within 10 delta of equilibrium, each
            i in S is selected at pbar(i) and rejected at pbar(i) - 10 delta + sqrt(delta)
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..model import Instance
from ..selection import BY_COST_RATIO, greedy_bpb, with_price

# small enough that c > delta^(1/3) implies c > 10 sqrt(delta), which the
# stability property needs; at 1/1024 it can fail for cheap modules
DEFAULT_DELTA = Fraction(1, 2 ** 20)


def _exact_sqrt(x: Fraction) -> Fraction:
    from math import isqrt
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a != x.numerator or b * b != x.denominator:
        raise ValueError(f"delta={x} has no rational square root")
    return Fraction(a, b)


def extended_support(eq) -> tuple:
    """(S, S') where S' adds the module the constructor stopped at, if any."""
    S = frozenset(eq.selected)
    if eq.trace and eq.trace[-1].terminated:
        return S, S | {eq.trace[-1].entering}
    return S, S


def opt_bpb(inst: Instance, eq) -> Fraction | None:
    """Common bang-per-buck of the selected modules at equilibrium prices."""
    ratios = [inst.values[i] / eq.prices[i] for i in eq.selected
              if inst.values[i] > 0 and eq.prices[i] > 0]
    return min(ratios) if ratios else None


def tie_avoidance_holds(inst, eq, delta=DEFAULT_DELTA) -> bool:
    """When the equilibrium leaves budget unspent, the best independent set
    among the first k* modules of the cost order must overshoot the budget
    by more than 2 sqrt(delta) at equilibrium prices."""
    S = eq.selected
    pbar = eq.prices
    B = inst.budget
    if sum((pbar[j] for j in S), Fraction(0)) >= B:
        return True
    k = eq.k_star if eq.k_star is not None else inst.n
    best = inst.matroid.max_weight_independent(inst.values, ground=eq.pi0[:k])
    return sum((pbar[j] for j in best), Fraction(0)) > B + 2 * _exact_sqrt(delta)


def dominance_holds(inst, eq, p, i, tb=BY_COST_RATIO):
    """None if the hypothesis fails (i not in S, p(i) >= pbar(i), or i not
    selected at p); otherwise whether i is selected at (pbar(i), p_-i)."""
    pbar = eq.prices
    if i not in eq.selected or not p[i] < pbar[i]:
        return None
    if any(not inst.costs[j] <= p[j] <= inst.budget for j in range(inst.n) if j != i):
        return None
    if i not in greedy_bpb(inst, p, tb).selected:
        return None
    return i in greedy_bpb(inst, with_price(p, i, pbar[i]), tb).selected


def worst_rejected(inst, eq, p, tb=BY_COST_RATIO):
    """None if the hypothesis fails (some member of S bids below its
    equilibrium price) or no member of S' has bang-per-buck below the
    equilibrium level. Otherwise, for i* the worst such member (ties to the
    module inspected later), returns (i* rejected, p(S_p + i*) > B,
    p(best independent set among modules up to i*) > B)."""
    S, S1 = extended_support(eq)
    pbar = eq.prices
    if any(p[j] < pbar[j] for j in S):
        return None
    ob = opt_bpb(inst, eq)
    if ob is None:
        return None
    v, B = inst.values, inst.budget
    res = greedy_bpb(inst, p, tb)
    order = res.inspection_order
    pos = {e: k for k, e in enumerate(order)}
    below = [j for j in S1 if v[j] < ob * p[j]]
    if not below:
        return None
    star = below[0]
    for j in below[1:]:
        lhs, rhs = v[j] * p[star], v[star] * p[j]
        if lhs < rhs or (lhs == rhs and pos[j] > pos[star]):
            star = j
    union = res.spend + (0 if star in res.selected else p[star]) > B
    best = inst.matroid.max_weight_independent(v, ground=order[:pos[star] + 1])
    prefix = sum((p[j] for j in best), Fraction(0)) > B
    return star not in res.selected, union, prefix


def worst_rejected_holds(inst, eq, p, tb=BY_COST_RATIO):
    """Whether i* is rejected at p (None outside the hypothesis)."""
    r = worst_rejected(inst, eq, p, tb)
    return None if r is None else r[0]


def stability_holds(inst, eq, p, delta=DEFAULT_DELTA, tb=BY_COST_RATIO):
    """None if some member of S' is more than 10 delta from equilibrium;
    otherwise whether every i in S is selected at pbar(i) and rejected at
    pbar(i) - 10 delta + sqrt(delta), others fixed at p."""
    S, S1 = extended_support(eq)
    pbar = eq.prices
    if any(abs(p[j] - pbar[j]) > 10 * delta for j in S1):
        return None
    up = -10 * delta + _exact_sqrt(delta)
    for i in S:
        if i not in greedy_bpb(inst, with_price(p, i, pbar[i]), tb).selected:
            return False
        if i in greedy_bpb(inst, with_price(p, i, pbar[i] + up), tb).selected:
            return False
    return True


@dataclass
class PropertyStats:
    checked: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)   # (module or None, price vector)

    def to_json(self):
        return {"checked": self.checked, "skipped": self.skipped,
                "violations": [{"module": None if m is None else m + 1,
                                "prices": [str(x) for x in p]} for m, p in self.violations]}


@dataclass
class StructuralReport:
    dominance: PropertyStats
    rejection: PropertyStats
    stability: PropertyStats
    # how often the budget statements around i* held on checked samples
    # (informational: neither is needed for i* to be rejected)
    union_over_budget: int = 0
    prefix_over_budget: int = 0

    @property
    def ok(self) -> bool:
        return not (self.dominance.violations or self.rejection.violations
                    or self.stability.violations)

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "dominance": self.dominance.to_json(),
                "rejection": self.rejection.to_json(), "stability": self.stability.to_json(),
                "union_over_budget": self.union_over_budget,
                "prefix_over_budget": self.prefix_over_budget}


def _uniform(rng, lo, hi, den):
    """Random rational in [lo, hi] on the lattice 1/den (lo, hi included when on it)."""
    a = -((-lo * den) // 1)  # ceil
    b = (hi * den) // 1
    if a > b:
        return None
    return Fraction(rng.randint(int(a), int(b)), den)


def _record(stats, res, witness):
    if res is None:
        stats.skipped += 1
    else:
        stats.checked += 1
        if not res:
            stats.violations.append(witness)


def check_structural_lemmas(inst: Instance, eq, trials=1000, seed=0, delta=DEFAULT_DELTA,
                            tb=BY_COST_RATIO, max_attempts=None) -> StructuralReport:
    """Sample price vectors inside each property's hypothesis until `trials`
    of them are checked (or max_attempts draws), and rerun greedy_bpb to test
    the conclusion. Prices are drawn on the lattice delta/4."""
    rng = random.Random(seed)
    n, B, c = inst.n, inst.budget, inst.costs
    den = 4 * delta.denominator // delta.numerator if delta.numerator == 1 else 4096
    S, S1 = extended_support(eq)
    pbar = eq.prices
    cap = max_attempts or 20 * trials
    rep = StructuralReport(PropertyStats(), PropertyStats(), PropertyStats())

    def free_prices():
        return [_uniform(rng, c[j], B, den) for j in range(n)]

    Sl = sorted(S)
    tries = 0
    while Sl and rep.dominance.checked < trials and tries < cap:
        tries += 1
        i = rng.choice(Sl)
        p = free_prices()
        x = _uniform(rng, c[i], pbar[i] - Fraction(1, den), den)
        if x is None or any(y is None for y in p):
            rep.dominance.skipped += 1
            continue
        p[i] = x
        _record(rep.dominance, dominance_holds(inst, eq, p, i, tb), (i, tuple(p)))

    tries = 0
    while rep.rejection.checked < trials and tries < cap:
        tries += 1
        p = free_prices()
        for j in S:
            p[j] = _uniform(rng, max(pbar[j], c[j]), B, den)
        if any(y is None for y in p):
            rep.rejection.skipped += 1
            continue
        r = worst_rejected(inst, eq, p, tb)
        _record(rep.rejection, None if r is None else r[0], (None, tuple(p)))
        if r is not None:
            rep.union_over_budget += r[1]
            rep.prefix_over_budget += r[2]

    tries = 0
    while rep.stability.checked < trials and tries < cap:
        tries += 1
        p = free_prices()
        for j in S1:
            p[j] = _uniform(rng, max(pbar[j] - 10 * delta, c[j]),
                            min(pbar[j] + 10 * delta, B), den)
        if any(y is None for y in p):
            rep.stability.skipped += 1
            continue
        _record(rep.stability, stability_holds(inst, eq, p, delta, tb), (None, tuple(p)))
    return rep
