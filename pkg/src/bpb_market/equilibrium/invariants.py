"""Per-iteration invariants of the lift-and-swap constructor."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..model import Instance
from ..selection import BY_COST_RATIO, _cmp_ratio, bpb_order, greedy_bpb
from .construct import EquilibriumOutput


@dataclass(frozen=True)
class InvariantReport:
    ok: bool
    invariant: int | None = None
    iteration: int | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _fail(inv, k, msg):
    return InvariantReport(False, inv, k, f"invariant {inv} fails at iteration {k}: {msg}")


def check_alg5_invariants(inst: Instance, eq: EquilibriumOutput, tb=BY_COST_RATIO) -> InvariantReport:
    """Check the six invariants of the weighted constructor on every
    iteration k <= k*. Orders are recomputed from the recorded prices, so a
    tampered price shows up even when the stored order was left alone."""
    n, B, v, m = inst.n, inst.budget, inst.values, inst.matroid
    pi0 = list(eq.pi0) or list(bpb_order(inst, inst.costs, tb))
    rank0 = [0] * n
    for pos, i in enumerate(pi0):
        rank0[i] = pos
    k_star = eq.k_star
    prev_order = tuple(pi0)
    A_final = None
    for snap in eq.trace:
        k = snap.k
        p = snap.prices
        order = bpb_order(inst, p, ranks=rank0)
        A = snap.A
        # 2 before 1: a member of A that lost bang-per-buck also shifts the
        # prefix, and the more specific report is the useful one
        rest = order[k:]
        for a in A:
            for b in rest:
                if a != b and _cmp_ratio(v[a], p[a], v[b], p[b]) > 0:
                    return _fail(2, k, f"module {a + 1} has lower bang-per-buck than {b + 1}")
        # 1: prefix stability
        if set(prev_order[:k - 1]) != set(order[:k - 1]) or prev_order[k - 1] != order[k - 1]:
            return _fail(1, k, f"order prefix changed: {prev_order[:k]} -> {order[:k]}")
        # 3: budget
        spend = sum((p[i] for i in A), Fraction(0))
        if spend > B:
            return _fail(3, k, f"p(A) = {spend} > B = {B}")
        if k_star is not None and k < k_star:
            prefix = set(pi0[:k])
            # 4: rank
            if m.rank(A) != m.rank(prefix):
                return _fail(4, k, f"rank(A)={m.rank(A)} != rank(prefix)={m.rank(prefix)}")
            # 5: dropped modules are circuit minima
            for x in prefix - A:
                if not m.spans(A, x):
                    return _fail(5, k, f"dropped module {x + 1} not spanned by A")
                C = m.circuit(A, x)
                if any(v[y] < v[x] for y in C):
                    return _fail(5, k, f"dropped module {x + 1} is not a minimum of its circuit")
        prev_order = order
        A_final = A
    # 6: final selection is A^{k*} and a max-weight basis of the inspected prefix
    if A_final is not None:
        sel = greedy_bpb(inst, eq.prices, tb).selected_set
        if sel != A_final:
            return _fail(6, k_star, f"selection {sorted(sel)} != A = {sorted(A_final)}")
        terminated = eq.trace[-1].terminated
        pref = pi0[:k_star - 1] if terminated else pi0[:k_star]
        best = m.max_weight_independent(v, pref)
        if inst.value_of(A_final) != inst.value_of(best):
            return _fail(6, k_star, "A is not a max-weight independent set of the prefix")
    return InvariantReport(True)
