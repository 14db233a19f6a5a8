#!/usr/bin/env python3
"""Independent re-computation of the hand-derived golden values frozen in the
C++ tests. Run with `python3 tests/oracles/derived_values.py`."""
import math
from itertools import combinations

import numpy as np
from scipy import stats


def pstd(xs):
    return float(np.std(np.asarray(xs, dtype=float)))


# WIG: |q|=4, k=2, scores [10, 6], corpus score 5
wig = sum((s - 5) / math.sqrt(4) for s in [10, 6]) / 2

# NQC: k=3, scores [4, 2, 0], corpus score 1
nqc = pstd([4, 2, 0]) / abs(1)

# sigma_max: scores [5, 1, 1]
prefix = [pstd([5, 1, 1][:j]) for j in range(1, 4)]
sigma_max = max(prefix)

# n(sigma_50%): scores [10, 6, 4, 1], |q|=2
head = [s for s in [10, 6, 4, 1] if s >= 0.5 * 10]
n_sigma = pstd(head) / 2

# SMV: k=2, scores [4, 1], corpus score 1
mu = np.mean([4, 1])
smv = sum(s * abs(math.log(s / mu)) for s in [4, 1]) / 2 / abs(1)

# Clarity: corpus "a a b" + "c", RM from "a a b"
rm = {"a": 2 / 3, "b": 1 / 3}
coll = {"a": 2 / 4, "b": 1 / 4, "c": 1 / 4}
clarity = sum(p * math.log(p / coll[w]) for w, p in rm.items())

# nDCG@3: grades at ranks [1, 0, 2], qrels grades {2, 1}
dcg = sum(g / math.log2(i + 2) for i, g in enumerate([1, 0, 2]))
idcg = sum(g / math.log2(i + 2) for i, g in enumerate(sorted([2, 1], reverse=True)))
ndcg = dcg / idcg

# tau-b by pair enumeration: x=[1,2,2,3], y=[1,3,2,4]
x, y = [1, 2, 2, 3], [1, 3, 2, 4]
C = D = tx = ty = 0
for i, j in combinations(range(4), 2):
    dx, dy = x[i] - x[j], y[i] - y[j]
    if dx == 0:
        tx += 1
    if dy == 0:
        ty += 1
    if dx * dy > 0:
        C += 1
    elif dx * dy < 0:
        D += 1
n0 = 6
tau_b = (C - D) / math.sqrt((n0 - tx) * (n0 - ty))
assert abs(tau_b - stats.kendalltau(x, y).statistic) < 1e-12

# Pearson x=[1,2,3,4], y=[2,1,4,3]
r, p = stats.pearsonr([1, 2, 3, 4], [2, 1, 4, 3])
t = r * math.sqrt(2 / (1 - r * r))

# Kendall normal approximation with ties and continuity correction.
def kendall_normal_p(x, y):
    n = len(x)
    S = 0
    for i, j in combinations(range(n), 2):
        S += np.sign(x[i] - x[j]) * np.sign(y[i] - y[j])
    def tie_sums(v):
        _, counts = np.unique(v, return_counts=True)
        t = counts.astype(float)
        return (np.sum(t * (t - 1) * (2 * t + 5)), np.sum(t * (t - 1) * (t - 2)),
                np.sum(t * (t - 1)))
    a1, b1, c1 = tie_sums(x)
    a2, b2, c2 = tie_sums(y)
    var = ((n * (n - 1) * (2 * n + 5) - a1 - a2) / 18
           + b1 * b2 / (9 * n * (n - 1) * (n - 2))
           + c1 * c2 / (2 * n * (n - 1)))
    z = max(abs(S) - 1, 0) / math.sqrt(var)
    return math.erfc(z / math.sqrt(2))

kx = [1, 2, 2, 3, 5, 4, 7, 6]
ky = [2, 1, 3, 3, 4, 6, 5, 8]
kendall_p = kendall_normal_p(kx, ky)
kx_tau = stats.kendalltau(kx, ky).statistic

# Spearman with ties on the same data; t-test p
rho, _ = stats.spearmanr(kx, ky)
t_rho = rho * math.sqrt((len(kx) - 2) / (1 - rho * rho))
rho_p = 2 * stats.t.sf(abs(t_rho), len(kx) - 2)

# score distribution std of [0, 0.5, 1]
dist_std = pstd([0, 0.5, 1.0])

# weights with shift: scores [2, -1]
eps = 1e-9
w = np.array([2 - (-1) + eps, -1 - (-1) + eps])
w = w / w.sum()

for name, v in [("wig", wig), ("nqc", nqc), ("sigma_max", sigma_max),
                ("n_sigma_50", n_sigma), ("smv", smv), ("clarity", clarity),
                ("ndcg@3", ndcg), ("tau_b", tau_b), ("pearson_r", r),
                ("pearson_t", t), ("pearson_p", p), ("kendall8_tau", kx_tau),
                ("kendall8_normal_p", kendall_p), ("spearman8_rho", rho),
                ("spearman8_p", rho_p), ("dist_std", dist_std),
                ("shift_w0", w[0]), ("shift_w1", w[1])]:
    print(f"{name:20s} {v:.17g}")
