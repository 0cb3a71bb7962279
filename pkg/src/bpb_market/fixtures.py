"""Small hand-built instances used by the tests, the docs and the CLI examples."""
from __future__ import annotations

from fractions import Fraction

from .matroids import Free, Graphic
from .model import Instance
from .selection import Explicit

F = Fraction


def cycle_swap_graph() -> Graphic:
    """Path a-b-c-d-e plus a chord a-c. Module order is edges 1, 2, 3, 4, 5 with
    edge 4 the chord, so edges 1, 2, 4 form the only cycle."""
    return Graphic(5, [(0, 1), (1, 2), (2, 3), (0, 2), (3, 4)])


def cycle_swap_instance() -> Instance:
    """Reconstructed example on cycle_swap_graph. The values and costs are our
    own choice, picked so that at the weighted equilibrium the greedy rule takes
    edges 1, 2, 3, then swaps edge 1 out for edge 4 and exhausts the budget,
    while edge 5 is too expensive to matter."""
    return Instance(values=(1, 2, 2, 2, 1),
                    costs=(F(1, 10), F(3, 10), F(3, 10), F(3, 10), F(19, 20)),
                    budget=1, matroid=cycle_swap_graph())


def budget_example(delta=F(1, 10)):
    """Four modules on a budget of 4.4 with no matroid constraint. Returns
    (instance, prices); modules 1 and 2 are selected at these prices. Module 3
    costs more than the budget, so the instance has max cost / budget > 1."""
    inst = Instance(values=(1, 3, 7, 1), costs=(0, F(5, 2), F(9, 2), 4),
                    budget=F(22, 5), matroid=Free(4))
    return inst, (F(1), F(3), 7 + F(delta), F(6))


def single_winner_family(n, eps=F(1, 10)):
    """n free modules, all priced 1 on a unit budget. Module 1 is worth 1+eps
    and the rest 1 each, so picking the single best module at these prices
    wastes almost everything."""
    eps = F(eps)
    inst = Instance(values=(1 + eps,) + (1,) * (n - 1), costs=(0,) * n, budget=1, matroid=Free(n))
    return inst, (F(1),) * n


def no_equilibrium_example():
    """Three unit-value modules with costs 2, 3, 4 on a budget of 10, with
    module 3 first on ties, then 1, then 2. No exact equilibrium exists.
    Returns (instance, tie-break)."""
    return Instance([1, 1, 1], [2, 3, 4], 10), Explicit((2, 0, 1))


def flat_price_example(n=3, eps=F(1, 10)):
    """n + 1 free modules: one of value 1 and n of value eps/2, budget 1. With
    every price at 1 only one module fits, which is an eps-equilibrium of
    value 1 against an optimum of 1 + n eps/2."""
    eps = F(eps)
    return Instance([1] + [eps / 2] * n, [0] * (n + 1), 1)
