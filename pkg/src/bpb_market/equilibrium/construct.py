"""Equilibrium price constructors.

additive_equilibrium      free matroid, via the critical cost-per-value
construct_eq_unweighted   raise-and-freeze construction (sets A and T)
construct_eq_weighted     lift-and-swap construction for weighted matroids
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..matroids import Free
from ..model import Instance
from ..selection import BY_COST_RATIO, TieBreak, bpb_order, greedy_bpb


@dataclass(frozen=True)
class Snapshot:
    """State after iteration k (1-based) of a constructor."""
    k: int
    entering: int
    A: frozenset
    T: frozenset
    prices: tuple
    order: tuple
    circuit: frozenset | None = None
    evicted: int | None = None
    terminated: bool = False


def _meta_json(v):
    # module-id collections become sorted 1-based lists; fractions become strings
    if isinstance(v, (bool, int)):
        return v
    if isinstance(v, (tuple, list, set, frozenset)):
        return sorted(i + 1 for i in v)
    return str(v)


@dataclass(frozen=True)
class EquilibriumOutput:
    prices: tuple
    order: tuple
    selected: frozenset
    algo: str
    pi0: tuple = ()
    k_star: int | None = None
    trace: tuple = ()
    meta: dict = field(default_factory=dict)

    def to_json(self, with_trace=False) -> dict:
        d = {
            "algo": self.algo,
            "prices": [str(x) for x in self.prices],
            "order": [i + 1 for i in self.order],
            "selected": sorted(i + 1 for i in self.selected),
        }
        if self.k_star is not None:
            d["k_star"] = self.k_star
        if self.meta:
            d["meta"] = {k: _meta_json(v) for k, v in self.meta.items()}
        if with_trace:
            d["trace"] = [{
                "k": s.k, "entering": s.entering + 1,
                "A": sorted(i + 1 for i in s.A), "T": sorted(i + 1 for i in s.T),
                "prices": [str(x) for x in s.prices],
                "order": [i + 1 for i in s.order],
                "circuit": None if s.circuit is None else sorted(i + 1 for i in s.circuit),
                "evicted": None if s.evicted is None else s.evicted + 1,
                "terminated": s.terminated,
            } for s in self.trace]
        return d


def _require_free(inst):
    if not isinstance(inst.matroid, Free):
        raise ValueError("this operation requires a free matroid")


def _ratio_key(inst, i):
    # zero-cost modules rank above everything and are compared by value
    v, c = inst.values[i], inst.costs[i]
    return (1, v) if c == 0 else (0, v / c)


def ratios_distinct(inst: Instance) -> bool:
    keys = [_ratio_key(inst, i) for i in range(inst.n)]
    return len(set(keys)) == len(keys)


def perturb_distinct_ratios(inst: Instance, eps) -> tuple:
    """Return (instance, eps_used) with all value/cost ratios distinct.

    Module i (0-based) gets v(i) + eps'*(i+1)/n * c(i)/max(c), or
    v(i) + eps'*(i+1)/n when c(i) = 0. The offsets make every pair of ratios
    differ as affine functions of eps', so halving eps' on a collision
    terminates. Offsets are at most eps'."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if ratios_distinct(inst):
        return inst, Fraction(0)
    n = inst.n
    cmax = max(inst.costs) or Fraction(1)
    e = eps
    for _ in range(200):
        vals = []
        for i, (v, c) in enumerate(zip(inst.values, inst.costs)):
            scale = c / cmax if c > 0 else Fraction(1)
            vals.append(v + e * (i + 1) / n * scale)
        out = inst.replace(values=vals)
        if ratios_distinct(out):
            return out, e
        e /= 2
    raise RuntimeError("could not separate ratios")  # unreachable in exact arithmetic


# ---- additive (free matroid)

def _cpv_breakpoints(inst):
    pts = sorted({inst.costs[i] / inst.values[i] for i in range(inst.n) if inst.values[i] > 0})
    return pts


def cpv_star(inst: Instance) -> Fraction:
    """sup{x : sum_i v(i) x [c(i) <= v(i) x] <= B}.

    f(x) = x * V(x) with V(x) the value of modules whose cost-per-value is
    <= x. On each segment between breakpoints V is constant, so the
    supremum is either B/V on some segment or a breakpoint where f jumps
    over B."""
    _require_free(inst)
    if all(v == 0 for v in inst.values):
        raise ValueError("cpv_star undefined when every module has zero value")
    B = inst.budget
    pts = _cpv_breakpoints(inst)
    for j, b in enumerate(pts):
        V = sum((v for v, c in zip(inst.values, inst.costs) if v > 0 and c / v <= b), Fraction(0))
        x = B / V
        if x < b:
            return b
        nxt = pts[j + 1] if j + 1 < len(pts) else None
        if nxt is None or x < nxt:
            return x
    raise AssertionError("unreachable")


def cpv_feasible(inst: Instance, x) -> bool:
    """Monotone predicate behind cpv_star (used by the bisection oracle)."""
    x = Fraction(x)
    tot = sum((v * x for v, c in zip(inst.values, inst.costs) if c <= v * x), Fraction(0))
    return tot <= inst.budget


def additive_equilibrium(inst: Instance, eps, tb: TieBreak = BY_COST_RATIO) -> EquilibriumOutput:
    """p(i) = max{(CPV* - d) v(i), c(i)}.

    If CPV* sits on a breakpoint CPV_k, d is half the largest value allowed by
    d < CPV* - CPV_{k-1} and d v(i) <= eps/(2n); otherwise d = 0."""
    _require_free(inst)
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be >= 0")
    x = cpv_star(inst)
    pts = _cpv_breakpoints(inst)
    n = inst.n
    if x in pts:
        lower = [b for b in pts if b < x]
        vmax = max(inst.values)
        caps = [eps / (2 * n * vmax)]
        if lower:
            caps.append(x - lower[-1])
        d = min(caps) / 2
        case = 1
        if d <= 0:
            raise ValueError("eps must be > 0 when the critical cost-per-value is a breakpoint")
    else:
        d = Fraction(0)
        case = 2
    prices = tuple(max((x - d) * v, c) for v, c in zip(inst.values, inst.costs))
    sel = greedy_bpb(inst, prices, tb)
    return EquilibriumOutput(prices, sel.inspection_order, sel.selected_set, "additive",
                             meta={"cpv_star": x, "delta": d, "case": case})


# ---- shared helpers for the matroid constructors

def _pi0(inst, tb):
    return bpb_order(inst, inst.costs, tb)


def _ordered(inst, p, pi0_rank):
    # bang-per-buck order at p with ties broken by the initial order
    return bpb_order(inst, p, ranks=pi0_rank)


def _scale_to(inst, S, p, total):
    """Prices proportional to value on the positive-value members of S so
    that p(S) = total; zero-value members keep their price."""
    Z = [i for i in S if inst.values[i] == 0]
    P = [i for i in S if inst.values[i] > 0]
    vP = sum((inst.values[i] for i in P), Fraction(0))
    if vP == 0:
        return {}
    room = total - sum((p[i] for i in Z), Fraction(0))
    return {i: inst.values[i] * room / vP for i in P}


def _lift(inst, p, S, e):
    """Raise members of S to the bang-per-buck of e at price p(e)."""
    q = list(p)
    ve = inst.values[e]
    for j in S:
        if ve == 0:
            q[j] = None  # infinite: lifting to zero bang-per-buck
        else:
            q[j] = p[e] / ve * inst.values[j]
    return q


def _over_budget(q, S, B):
    tot = Fraction(0)
    for j in S:
        if q[j] is None:
            return True
        tot += q[j]
    return tot > B


def construct_eq_weighted(inst: Instance, tb: TieBreak = BY_COST_RATIO) -> EquilibriumOutput:
    """Lift-and-swap construction.

    For k = 1..n the current set A is lifted to the bang-per-buck of the k-th
    module e of the current order; e joins A, or swaps out the lowest-value
    member of the circuit it closes. When A would exceed the budget, e is
    dropped and the lifted prices are capped at v(i) B / v(A). If the loop
    completes, A is topped up to spend exactly B.

    The construction assumes a unique minimum-value member in every circuit
    it meets; meta["value_tie"] flags runs where that failed, in which case
    the output need not be an equilibrium."""
    n, B, v = inst.n, inst.budget, inst.values
    m = inst.matroid
    pi0 = _pi0(inst, tb)
    rank0 = [0] * n
    for pos, i in enumerate(pi0):
        rank0[i] = pos
    p = list(inst.costs)
    order = pi0
    A = frozenset()
    trace = []
    k_star = n
    value_tie = False
    for k in range(1, n + 1):
        e = order[k - 1]
        q = _lift(inst, p, A, e)
        circ = evicted = None
        if m.independent(A | {e}):
            A2 = A | {e}
        else:
            circ = m.circuit(A, e)
            pos = {x: rank0[x] for x in circ}
            evicted = min(circ, key=lambda x: (v[x], -pos[x]))
            value_tie = value_tie or sum(1 for x in circ if v[x] == v[evicted]) > 1
            A2 = (A | {e}) - {evicted}
        if _over_budget(q, A2, B):
            caps = _scale_to(inst, A, p, B)
            q = [min(caps[i], q[i]) if i in caps and q[i] is not None
                 else (caps[i] if i in caps else q[i]) for i in range(n)]
            q = [p[i] if x is None else x for i, x in enumerate(q)]
            p = q
            order = _ordered(inst, p, rank0)
            trace.append(Snapshot(k, e, A, frozenset(), tuple(p), order, circ, evicted, True))
            k_star = k
            break
        p = q
        A = A2
        order = _ordered(inst, p, rank0)
        trace.append(Snapshot(k, e, A, frozenset(), tuple(p), order, circ, evicted, False))
    else:
        top = _scale_to(inst, A, p, B)
        for i, x in top.items():
            p[i] = x
        order = _ordered(inst, p, rank0)
    prices = tuple(p)
    sel = greedy_bpb(inst, prices, tb)
    return EquilibriumOutput(prices, order, sel.selected_set, "weighted", tuple(pi0),
                             k_star, tuple(trace), {"A": tuple(sorted(A)), "value_tie": value_tie})


def construct_eq_unweighted(inst: Instance, tb: TieBreak = BY_COST_RATIO) -> EquilibriumOutput:
    """Raise-and-freeze construction with sets A (frozen) and T (rising).

    T is lifted to the bang-per-buck of the k-th module e. If e is not
    spanned by A + T it joins T; otherwise the other members of its circuit
    in A + T + e move to A and stop rising, and e is rejected. Budget
    overflow rolls back the step and caps T at v(i)(B - p(A))/v(T); a
    completed loop tops T up to spend exactly B."""
    n, B = inst.n, inst.budget
    m = inst.matroid
    pi0 = _pi0(inst, tb)
    rank0 = [0] * n
    for pos, i in enumerate(pi0):
        rank0[i] = pos
    p = list(inst.costs)
    order = pi0
    A, T = frozenset(), frozenset()
    trace = []
    k_star = n
    for k in range(1, n + 1):
        e = order[k - 1]
        q = _lift(inst, p, T, e)
        circ = None
        if not m.spans(A | T, e):
            A2, T2 = A, T | {e}
        else:
            circ = m.circuit(A | T, e)
            A2 = A | (circ - {e})
            T2 = T - A2
        if _over_budget(q, A2 | T2, B):
            pA = sum((p[i] for i in A), Fraction(0))
            caps = _scale_to(inst, T, p, B - pA)
            q = [p[i] if x is None else x for i, x in enumerate(q)]
            for i, x in caps.items():
                q[i] = min(x, q[i])
            p = q
            order = _ordered(inst, p, rank0)
            trace.append(Snapshot(k, e, A, T, tuple(p), order, circ, None, True))
            k_star = k
            break
        p = q
        A, T = A2, T2
        order = _ordered(inst, p, rank0)
        trace.append(Snapshot(k, e, A, T, tuple(p), order, circ, None, False))
    else:
        pA = sum((p[i] for i in A), Fraction(0))
        for i, x in _scale_to(inst, T, p, B - pA).items():
            p[i] = x
        order = _ordered(inst, p, rank0)
    prices = tuple(p)
    sel = greedy_bpb(inst, prices, tb)
    return EquilibriumOutput(prices, order, sel.selected_set, "unweighted", tuple(pi0),
                             k_star, tuple(trace), {"A": tuple(sorted(A)), "T": tuple(sorted(T))})
