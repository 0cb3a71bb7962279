"""Repeated pricing game with Hedge learners and a greedy platform."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from ..matroids import Free, Graphic, Partition, Uniform
from ..model import Instance, as_scalar
from ..selection import BY_COST_RATIO, TieBreak
from . import _backend
from .mwu import BidGrid, PaymentRule

C0_DEFAULT = 1.0
_INT_LIMIT = 2 ** 62


def market_args(inst: Instance, grid: BidGrid, tb: TieBreak = BY_COST_RATIO) -> tuple:
    """Integer encoding of (instance, grid, tie-break) for the round kernels."""
    L = 1
    for v in inst.values:
        L = lcm(L, v.denominator)
    vals = [int(v * L) for v in inst.values]
    rank = list(tb.ranks(inst))
    m = inst.matroid
    code, kcap, block, caps, eu, ev, nvert = 0, 0, [], [], [], [], 0
    if isinstance(m, Free):
        code = 0
    elif isinstance(m, Uniform):
        code, kcap = 1, m.k
    elif isinstance(m, Partition):
        code, block, caps = 2, list(m.block_of), list(m.caps)
    elif isinstance(m, Graphic):
        code, nvert = 3, m.vertices
        eu = [u for u, _ in m.edges]
        ev = [w for _, w in m.edges]
    else:
        raise ValueError(f"no kernel encoding for matroid {m!r}")
    return vals, rank, grid.K, code, kcap, block, caps, eu, ev, nvert


def module_uniforms(seed, n, T) -> np.ndarray:
    """U[t, i]: module i's uniform for round t+1, from its own Philox stream
    spawned off the master seed."""
    children = np.random.SeedSequence(seed).spawn(n)
    U = np.empty((T, n))
    for i, ss in enumerate(children):
        U[:, i] = np.random.Generator(np.random.Philox(ss)).random(T)
    return U


def desk_t0(T) -> int:
    return max(1, T // 3)


def theory_t0(n, delta) -> int:
    return math.ceil(Fraction(n * n) / as_scalar(delta) ** 22)


@dataclass
class DynamicsTrace:
    inst: Instance
    grid: BidGrid
    T0: int
    c0: float
    seed: int
    gross: bool
    backend: str
    bids: np.ndarray        # (T, n) bid indices
    selected: np.ndarray    # (T, n) bool
    rewards: np.ndarray     # (T, n) realized distorted reward
    critical: np.ndarray    # (T, n) largest selectable bid index, 0 if none
    sigma: np.ndarray       # (n, K+1) cumulative counterfactual rewards
    kmin: tuple = field(default=())

    @property
    def T(self) -> int:
        return len(self.bids)

    def prices_at(self, t) -> tuple:
        """Price vector of round t (1-based)."""
        return tuple(self.grid.price(int(k)) for k in self.bids[t - 1])

    def modal_prices(self, window=None) -> tuple:
        """Most frequent price per module over the trailing window (ties to the lower price)."""
        w = self.bids[-(window or self.T):]
        out = []
        for i in range(w.shape[1]):
            counts = np.bincount(w[:, i], minlength=self.grid.K + 1)
            out.append(self.grid.price(int(np.argmax(counts))))
        return tuple(out)

    def frequencies(self, window=None) -> list:
        w = self.bids[-(window or self.T):]
        out = []
        for i in range(w.shape[1]):
            ks, cnt = np.unique(w[:, i], return_counts=True)
            out.append({self.grid.price(int(k)): c / len(w) for k, c in zip(ks, cnt)})
        return out

    def regret(self) -> np.ndarray:
        """Per-module average external regret against the best fixed bid in the action set."""
        best = np.array([self.sigma[i, self.kmin[i]:].max() for i in range(self.sigma.shape[0])])
        return (best - self.rewards.sum(axis=0)) / max(self.T, 1)

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["round", "module", "price", "selected", "reward", "critical_price"])
        d = self.grid.delta
        for t in range(self.T):
            for i in range(self.bids.shape[1]):
                crit = int(self.critical[t, i])
                w.writerow([t + 1, i + 1, str(int(self.bids[t, i]) * d), int(self.selected[t, i]),
                            repr(float(self.rewards[t, i])), str(crit * d) if crit else ""])

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def summary(self, target=None, window=None) -> dict:
        window = min(window or max(1, self.T // 10), self.T)
        d = {
            "rounds": self.T, "delta": str(self.grid.delta), "budget": str(self.grid.budget),
            "t0": self.T0, "c0": self.c0, "seed": self.seed, "gross": self.gross,
            "window": window,
            "modal_prices": [str(x) for x in self.modal_prices(window)],
            "selection_rate": [float(x) for x in self.selected[-window:].mean(axis=0)],
            "regret": [float(x) for x in self.regret()],
        }
        if target is not None:
            d["target"] = [str(as_scalar(x)) for x in target]
            d["converged"] = check_convergence(self, target, self.grid.delta, window)
        return d


def run_dynamics(inst: Instance, delta, T, T0=None, c0=C0_DEFAULT, seed=0, *,
                 tb: TieBreak = BY_COST_RATIO, strict=False, gross=False,
                 use_theory_t0=False, backend=None) -> DynamicsTrace:
    """Simulate T rounds. Each module keeps a Hedge learner over the grid
    bids at or above its cost, the platform runs greedy_bpb, and every
    learner is credited the distorted reward of every bid against the
    others' posted bids. A pure function of its arguments."""
    grid = BidGrid(delta, inst.budget)
    if strict:
        grid.check_assumptions(inst)
    n, K = inst.n, grid.K
    if T0 is None:
        T0 = theory_t0(n, grid.delta) if use_theory_t0 else desk_t0(T)
    PaymentRule(T0, grid.delta, gross)  # validates T0
    args = market_args(inst, grid, tb)
    kern, name = _backend.get(backend)
    if name == "cython" and (max(args[0], default=0) * K >= _INT_LIMIT or n > 64):
        kern, name = _backend.get("python")
    mk = kern.Market(*args)
    kmin = [grid.kmin(c) for c in inst.costs]
    cost = [float(c) for c in inst.costs]
    U = module_uniforms(seed, n, T)
    bids = np.zeros((T, n), dtype=np.int32)
    sel = np.zeros((T, n), dtype=np.uint8)
    rew = np.zeros((T, n))
    crit = np.zeros((T, n), dtype=np.int32)
    sigma = np.zeros((n, K + 1))
    kern.simulate(mk, kmin, cost, float(grid.delta), int(min(T0, 2 ** 62)), float(c0), U,
                  bool(gross), bids, sel, rew, crit, sigma)
    return DynamicsTrace(inst, grid, T0, float(c0), seed, bool(gross), name, bids,
                         sel.astype(bool), rew, crit, sigma, tuple(kmin))


def check_convergence(trace: DynamicsTrace, target, delta, window) -> bool:
    """Every round of the trailing window has |p_t(i) - target(i)| <= sqrt(delta),
    compared exactly as (p - target)^2 <= delta."""
    delta = as_scalar(delta)
    target = [as_scalar(x) for x in target]
    if window > trace.T:
        raise ValueError("window longer than the trace")
    w = trace.bids[-window:] if window else trace.bids[:0]
    for i, tgt in enumerate(target):
        for k in np.unique(w[:, i]):
            if (int(k) * trace.grid.delta - tgt) ** 2 > delta:
                return False
    return True
