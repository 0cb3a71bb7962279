"""Seeded random instances with exact cost and value ranges."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .equilibrium.construct import perturb_distinct_ratios, ratios_distinct
from .matroids import Free, Graphic, Partition, Uniform
from .model import Instance, InstanceError, as_scalar

FAMILIES = ("free", "uniform", "partition", "graphic")


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    lam: Fraction = Fraction(1, 5)          # costs at most lam * B
    m: Fraction = Fraction(1, 100)          # cost floor
    budget: Fraction = Fraction(1)
    vmin: Fraction = Fraction(1)
    vmax: Fraction = Fraction(10)
    family: str = "free"
    k: int | None = None                    # uniform rank; random in [1, n-1] when None
    cost_den: int = 10_000                  # costs live on the lattice 1/cost_den
    integer_values: bool = True
    perturb: bool = True
    perturb_eps: Fraction = Fraction(1, 10 ** 6)
    distinct_costs: bool = False
    cost_top: Fraction | None = None        # override the upper cost limit (default lam * B)

    def __post_init__(self):
        for name in ("lam", "m", "budget", "vmin", "vmax", "perturb_eps"):
            object.__setattr__(self, name, as_scalar(getattr(self, name), name))
        if self.cost_top is not None:
            object.__setattr__(self, "cost_top", as_scalar(self.cost_top, "cost_top"))
        if self.n < 1:
            raise InstanceError("n", "must be >= 1")
        if self.budget <= 0:
            raise InstanceError("budget", "must be > 0")
        if self.m < 0 or self.lam <= 0:
            raise InstanceError("lam", "need lam > 0 and m >= 0")
        if self.lam * self.budget < self.m:
            raise InstanceError("lam", "lam * B must be at least the cost floor m")
        if self.vmin <= 0 or self.vmax < self.vmin:
            raise InstanceError("values", "value range must be positive and non-empty")
        if self.family not in FAMILIES:
            raise InstanceError("family", f"unknown matroid family {self.family!r}")
        lo, hi = self._cost_lattice()
        if lo > hi:
            raise InstanceError("costs", "no lattice point in the cost range")
        if self.distinct_costs and hi - lo + 1 < self.n:
            raise InstanceError("costs", "cost range too narrow for distinct costs")

    @property
    def top(self) -> Fraction:
        return self.lam * self.budget if self.cost_top is None else self.cost_top

    def _cost_lattice(self):
        d = self.cost_den
        lo = -((-self.m * d) // 1)
        hi = (self.top * d) // 1
        return int(lo), int(hi)


def _matroid(spec, rng):
    n, fam = spec.n, spec.family
    if fam == "free":
        return Free(n)
    if fam == "uniform":
        k = spec.k if spec.k is not None else rng.randint(1, max(1, n - 1))
        return Uniform(n, k)
    if fam == "partition":
        nb = rng.randint(1, min(n, 4))
        ids = list(range(n))
        rng.shuffle(ids)
        blocks = [ids[b::nb] for b in range(nb)]
        caps = [rng.randint(1, len(b)) for b in blocks]
        return Partition(n, blocks, caps)
    nv = max(2, (n + 3) // 2)
    edges = []
    for _ in range(n):
        u = rng.randrange(nv)
        w = rng.randrange(nv - 1)
        edges.append((u, w if w < u else w + 1))
    return Graphic(nv, edges)


def generate_instance(spec: GeneratorSpec, seed) -> Instance:
    """Deterministic per (spec, seed). Costs are drawn on a lattice inside
    [m, top], values inside [vmin, vmax], then values get tiny offsets so
    that all value/cost ratios are distinct (offsets stay within perturb_eps)."""
    rng = random.Random(f"{seed}")
    lo, hi = spec._cost_lattice()
    d = spec.cost_den
    if spec.distinct_costs:
        cs = rng.sample(range(lo, hi + 1), spec.n)
    else:
        cs = [rng.randint(lo, hi) for _ in range(spec.n)]
    costs = [Fraction(c, d) for c in cs]
    # leave room for the upward perturbation below vmax
    vtop = spec.vmax - spec.perturb_eps if spec.perturb else spec.vmax
    if spec.integer_values:
        a, b = -((-spec.vmin) // 1), vtop // 1
        if a > b:
            raise InstanceError("values", "no admissible integer value in the range")
        values = [Fraction(rng.randint(int(a), int(b))) for _ in range(spec.n)]
    else:
        vd = 1000
        a, b = -((-spec.vmin * vd) // 1), (vtop * vd) // 1
        if a > b:
            raise InstanceError("values", "value range leaves no room for the perturbation")
        values = [Fraction(rng.randint(int(a), int(b)), vd) for _ in range(spec.n)]
    inst = Instance(values, costs, spec.budget, _matroid(spec, rng))
    if spec.perturb:
        inst, _ = perturb_distinct_ratios(inst, spec.perturb_eps / 2)
        inst = separate_values(inst, spec.perturb_eps / 2)
    return inst


def separate_values(inst: Instance, eps) -> Instance:
    """Make all values distinct with offsets eta*(i+1)/n (eta <= eps), halving
    eta until value/cost ratios that were distinct stay distinct. Equal values
    inside a circuit make the eviction tie-break decide equilibria, which the
    lift-and-swap construction does not account for."""
    if len(set(inst.values)) == inst.n:
        return inst
    was_distinct = ratios_distinct(inst)
    eta = as_scalar(eps)
    n = inst.n
    for _ in range(200):
        out = inst.replace(values=[v + eta * (i + 1) / n for i, v in enumerate(inst.values)])
        if len(set(out.values)) == n and (ratios_distinct(out) or not was_distinct):
            return out
        eta /= 2
    raise RuntimeError("could not separate values")
