"""Pure-Python round kernel. Mirrors _kernel.pyx operation for operation so
both backends produce identical traces for the same inputs.

Prices are integer grid indices k (price k*delta), values are integers, so
bang-per-buck comparisons v(a)/k(a) vs v(b)/k(b) are exact integer
cross-products and the budget test is sum(k) <= K.
"""
import math

FREE, UNIFORM, PARTITION, GRAPHIC = 0, 1, 2, 3


class Market:
    def __init__(self, vals, rank, K, code, kcap, block, caps, eu, ev, nvert):
        self.n = len(vals)
        self.vals = [int(x) for x in vals]
        self.rank = [int(x) for x in rank]
        self.K = int(K)
        self.code = int(code)
        self.kcap = int(kcap)
        self.block = [int(x) for x in block]
        self.caps = [int(x) for x in caps]
        self.eu = [int(x) for x in eu]
        self.ev = [int(x) for x in ev]
        self.nvert = int(nvert)

    def independent(self, mask):
        code = self.code
        if code == FREE:
            return True
        if code == UNIFORM:
            return bin(mask).count("1") <= self.kcap
        if code == PARTITION:
            cnt = [0] * len(self.caps)
            for j in range(self.n):
                if mask >> j & 1:
                    b = self.block[j]
                    cnt[b] += 1
                    if cnt[b] > self.caps[b]:
                        return False
            return True
        parent = list(range(self.nvert))
        for j in range(self.n):
            if mask >> j & 1:
                x = self.eu[j]
                while parent[x] != x:
                    x = parent[x]
                y = self.ev[j]
                while parent[y] != y:
                    y = parent[y]
                if x == y:
                    return False
                parent[x] = y
        return True

    def _before(self, a, b, bids):
        lhs = self.vals[a] * bids[b]
        rhs = self.vals[b] * bids[a]
        if lhs != rhs:
            return lhs > rhs
        return self.rank[a] < self.rank[b]

    def select(self, bids):
        """Circuit-swap greedy at integer bids; returns the selected bitmask."""
        n = self.n
        order = list(range(n))
        # insertion sort, same as the compiled kernel
        for a in range(1, n):
            x = order[a]
            b = a - 1
            while b >= 0 and self._before(x, order[b], bids):
                order[b + 1] = order[b]
                b -= 1
            order[b + 1] = x
        pos = [0] * n
        G = 0
        spend = 0
        for idx in range(n):
            e = order[idx]
            pos[e] = idx
            G2 = G | (1 << e)
            out = -1
            if not self.independent(G2):
                out = e
                for j in range(n):
                    if G >> j & 1 and self.independent(G2 & ~(1 << j)):
                        if self.vals[j] < self.vals[out] or (
                                self.vals[j] == self.vals[out] and pos[j] > pos[out]):
                            out = j
                if out == e:
                    continue
                G2 &= ~(1 << out)
            s2 = spend + bids[e] - (bids[out] if out >= 0 else 0)
            if s2 > self.K:
                break
            G = G2
            spend = s2
        return G

    def table(self, bids):
        """(mask at bids, rows[i][k] = i selected at (k, bids_-i) for k in 1..K)."""
        bids = list(bids)
        rows = []
        for i in range(self.n):
            keep = bids[i]
            row = [0] * (self.K + 1)
            for k in range(1, self.K + 1):
                bids[i] = k
                row[k] = self.select(bids) >> i & 1
            bids[i] = keep
            rows.append(row)
        return self.select(bids), rows


def sample_index(sigma, kmin, K, gamma, u):
    """Hedge draw over bids kmin..K with weights exp(gamma (sigma - max))."""
    mx = sigma[kmin]
    for k in range(kmin + 1, K + 1):
        if sigma[k] > mx:
            mx = sigma[k]
    total = 0.0
    for k in range(kmin, K + 1):
        total += math.exp(gamma * (sigma[k] - mx))
    target = u * total
    acc = 0.0
    for k in range(kmin, K + 1):
        acc += math.exp(gamma * (sigma[k] - mx))
        if acc > target:
            return k
    return K


def reward(k, sel, cost, delta, phase1, gross):
    b = k * delta
    if phase1:
        bonus = delta * delta * b
    else:
        bonus = delta * delta * delta * delta / b
    if sel:
        return (b if gross else b - cost) + bonus
    return bonus


def simulate(mk, kmin, cost, delta, T0, c0, U, gross, out_bid, out_sel, out_rew, out_crit, sigma):
    """Run len(U) rounds. U[t, i] is module i's uniform for round t+1.
    sigma (n x K+1) holds cumulative rewards and is updated in place."""
    n, K = mk.n, mk.K
    T = len(U)
    bids = [0] * n
    for t in range(1, T + 1):
        gamma = c0 / math.sqrt(t - 1) if t > 1 else 0.0
        for i in range(n):
            bids[i] = sample_index(sigma[i], kmin[i], K, gamma, U[t - 1][i])
        phase1 = t <= T0
        for i in range(n):
            keep = bids[i]
            crit = 0
            row = sigma[i]
            for k in range(1, K + 1):
                bids[i] = k
                s = mk.select(bids) >> i & 1
                if s:
                    crit = k
                r = reward(k, s, cost[i], delta, phase1, gross)
                row[k] += r
                if k == keep:
                    out_sel[t - 1][i] = s
                    out_rew[t - 1][i] = r
            bids[i] = keep
            out_bid[t - 1][i] = keep
            out_crit[t - 1][i] = crit
