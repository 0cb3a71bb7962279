"""Bid grid, Hedge learners and the two-phase distorted payment rule."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from ..model import Instance, as_scalar
from ..selection import BY_COST_RATIO, get_rule, with_price
from . import _kernel_py


@dataclass(frozen=True)
class BidGrid:
    """Prices {delta, 2 delta, ..., B}; bid index k stands for price k*delta."""
    delta: Fraction
    budget: Fraction = Fraction(1)

    def __post_init__(self):
        d, B = as_scalar(self.delta, "delta"), as_scalar(self.budget, "budget")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "budget", B)
        if d <= 0:
            raise ValueError("delta must be > 0")
        if (B / d).denominator != 1:
            raise ValueError(f"budget {B} is not a multiple of delta {d}")

    @property
    def K(self) -> int:
        return int(self.budget / self.delta)

    @property
    def bids(self) -> tuple:
        return tuple(k * self.delta for k in range(1, self.K + 1))

    def price(self, k) -> Fraction:
        return k * self.delta

    def index(self, b) -> int:
        q = as_scalar(b) / self.delta
        if q.denominator != 1 or not 1 <= q <= self.K:
            raise ValueError(f"{b} is not on the bid grid")
        return int(q)

    def kmin(self, cost) -> int:
        """First bid index at or above cost (the learner's action set starts here)."""
        k = max(1, math.ceil(as_scalar(cost) / self.delta))
        if k > self.K:
            raise ValueError(f"cost {cost} exceeds every bid on the grid")
        return k

    def assumption_violations(self, inst: Instance) -> list:
        """Discretization assumptions of the convergence regime: delta < 1/n^3
        and c(i)^3 > delta for every module."""
        out = []
        n = inst.n
        if not self.delta < Fraction(1, n ** 3):
            out.append(f"delta={self.delta} is not below 1/n^3={Fraction(1, n ** 3)}")
        for i, c in enumerate(inst.costs):
            if not c ** 3 > self.delta:
                out.append(f"module {i + 1}: cost {c} is not above delta^(1/3)")
        return out

    def check_assumptions(self, inst: Instance):
        bad = self.assumption_violations(inst)
        if bad:
            raise ValueError("; ".join(bad))


@dataclass(frozen=True)
class PaymentRule:
    """Phase 1 (t <= T0) pays a bonus delta^2 b, phase 2 pays delta^4 / b. The
    bonus is paid whether or not the bid is selected. gross=True pays the
    price b instead of the margin b - c on selection."""
    T0: int
    delta: Fraction
    gross: bool = False

    def __post_init__(self):
        if int(self.T0) < 1:
            raise ValueError("T0 must be >= 1")
        object.__setattr__(self, "delta", as_scalar(self.delta, "delta"))

    def phase1(self, t) -> bool:
        return t <= self.T0


def distorted_reward(b, selected, t, rule: PaymentRule, cost, exact=False):
    """Reward of bidding b in round t. Floats by default; exact=True keeps
    everything as Fractions."""
    if b <= 0:
        raise ValueError("bid must be > 0")
    if exact:
        b, c, d = as_scalar(b), as_scalar(cost), rule.delta
        bonus = d * d * b if rule.phase1(t) else d ** 4 / b
        if selected:
            return (b if rule.gross else b - c) + bonus
        return bonus
    b, c, d = float(b), float(cost), float(rule.delta)
    bonus = d * d * b if rule.phase1(t) else d * d * d * d / b
    if selected:
        return (b if rule.gross else b - c) + bonus
    return bonus


def grid_reward(k, selected, t, rule: PaymentRule, cost) -> float:
    """distorted_reward at bid index k, computed exactly as the round kernel does."""
    return _kernel_py.reward(k, selected, float(cost), float(rule.delta), rule.phase1(t), rule.gross)


@dataclass
class LearnerState:
    """Hedge learner over the bids kmin..K.

    sigma[k] is the cumulative reward of bid index k (index 0 unused). After
    t updates the next bid is drawn with weights exp(gamma_t sigma), where
    gamma_t = c0/sqrt(t) (uniform before the first update)."""
    module: int
    grid: BidGrid
    kmin: int = 1
    c0: float = 1.0
    t: int = 0
    sigma: np.ndarray = None
    shadow: list | None = None      # exact Fraction copy of sigma, if kept
    exact: bool = False

    def __post_init__(self):
        if self.sigma is None:
            self.sigma = np.zeros(self.grid.K + 1)
        if self.exact and self.shadow is None:
            self.shadow = [Fraction(0)] * (self.grid.K + 1)

    @property
    def gamma(self) -> float:
        return self.c0 / math.sqrt(self.t) if self.t > 0 else 0.0

    def probabilities(self) -> np.ndarray:
        """Sampling distribution over bid indices 0..K (zero outside the action set)."""
        K = self.grid.K
        s = self.sigma[self.kmin:K + 1]
        w = np.exp(self.gamma * (s - s.max()))
        out = np.zeros(K + 1)
        out[self.kmin:] = w / w.sum()
        return out

    def sample(self, u) -> int:
        return _kernel_py.sample_index(self.sigma, self.kmin, self.grid.K, self.gamma, u)


def mwu_update(state: LearnerState, rewards, exact_rewards=None) -> LearnerState:
    """sigma <- sigma + r for a reward vector over the full grid (entry k-1 is
    bid index k); returns a new state one round later."""
    r = np.asarray(rewards, dtype=float)
    K = state.grid.K
    if r.shape != (K,):
        raise ValueError(f"reward vector must have length {K}")
    sigma = state.sigma.copy()
    sigma[1:] += r
    shadow = state.shadow
    if shadow is not None:
        ex = exact_rewards if exact_rewards is not None else [Fraction(x) for x in r]
        shadow = [shadow[0]] + [a + Fraction(b) for a, b in zip(shadow[1:], ex)]
    return replace(state, sigma=sigma, shadow=shadow, t=state.t + 1)


def selection_vector(inst: Instance, p, i, grid: BidGrid, rule="bpb", tb=BY_COST_RATIO) -> list:
    """[i selected at (k delta, p_-i)] for k = 1..K, using exact prices."""
    f = get_rule(rule)
    return [i in f(inst, with_price(p, i, b), tb).selected for b in grid.bids]


def counterfactual_rewards(inst: Instance, p, i, grid: BidGrid, rule="bpb",
                           payment: PaymentRule = None, t=1, tb=BY_COST_RATIO,
                           exact=False):
    """Reward of every grid bid for module i against the others' prices p_-i.
    Returns a float array of length K (a list of Fractions with exact=True)."""
    if payment is None:
        payment = PaymentRule(T0=1, delta=grid.delta)
    sel = selection_vector(inst, p, i, grid, rule, tb)
    c = inst.costs[i]
    if exact:
        return [distorted_reward(b, s, t, payment, c, exact=True) for b, s in zip(grid.bids, sel)]
    return np.array([grid_reward(k, s, t, payment, c) for k, s in enumerate(sel, start=1)])


def critical_index(selected) -> int:
    """Largest bid index whose entry is selected (0 if none); selected[k-1] is bid k."""
    best = 0
    for k, s in enumerate(selected, start=1):
        if s:
            best = k
    return best
