"""Shared fixtures: cached pipeline runs and independent oracles."""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np
from scipy.special import betaln, gammaln, logsumexp

from crvrtda.crvr import Filtration, build_flag_filtration, crvr_distance
from crvrtda.netgen import BlockSpec, generate_block_network, generate_noisy_block_network
from crvrtda.persistence import compute_persistence

# 3 vertices at 0; edge at 1; two edges at 2; filled triangle at 3
FIGURE_S1_TEXT = """\
0 0 0
0 0 1
0 0 2
1 1 0 1
2 1 0 2
2 1 1 2
3 2 0 1 2
"""


def figure_s1() -> Filtration:
    return Filtration.from_simplices([
        ((0,), 0.0), ((1,), 0.0), ((2,), 0.0),
        ((0, 1), 1.0), ((0, 2), 2.0), ((1, 2), 2.0),
        ((0, 1, 2), 3.0),
    ], max_dim=2)


@lru_cache(maxsize=None)
def strict_barcode(structure: str, seed: int):
    net = generate_block_network(BlockSpec(structure=structure, seed=seed))
    return compute_persistence(build_flag_filtration(crvr_distance(net, 0.1), 3))


@lru_cache(maxsize=None)
def noisy_barcode(p: float, q: float, seed: int):
    spec = BlockSpec(structure="assortative", weak_interval=(0.1, 1.0), p=p, q=q, floor_weight=0.1, seed=seed)
    net = generate_noisy_block_network(spec)
    return compute_persistence(build_flag_filtration(crvr_distance(net, 0.1), 3))


def log_evidence(w, K, alpha, edge_prior, weight_prior, floor=0.0) -> float:
    """log p(A) by enumerating all K^n labelings with the block parameters
    integrated out in closed form (tempered Beta-Bernoulli and
    Normal-Gamma-Normal marginals, uniform label prior)."""
    w = np.asarray(w, dtype=float)
    n = len(w)
    a0, b0 = edge_prior
    mu0, k0, g0, h0 = weight_prior
    c = 1.0 - alpha
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    terms = []
    for z in itertools.product(range(K), repeat=n):
        total = -n * math.log(K)
        for r in range(K):
            for s in range(r, K):
                members = [(i, j) for i, j in pairs if sorted((z[i], z[j])) == [r, s]]
                xs = [w[i, j] for i, j in members if w[i, j] > floor]
                n_pair, n_edge = len(members), len(xs)
                total += betaln(a0 + alpha * n_edge, b0 + alpha * (n_pair - n_edge)) - betaln(a0, b0)
                m = c * n_edge
                s1 = c * sum(xs)
                s2 = c * sum(x * x for x in xs)
                kn = k0 + m
                mn = (k0 * mu0 + s1) / kn
                gn = g0 + m / 2
                hn = h0 + 0.5 * (s2 + k0 * mu0 ** 2 - kn * mn ** 2)
                total += (-m / 2 * math.log(2 * math.pi) + gammaln(gn) - gammaln(g0)
                          + g0 * math.log(h0) - gn * math.log(hn) + 0.5 * math.log(k0 / kn))
        terms.append(total)
    return float(logsumexp(terms))


def random_sym(rng, n, lo=0.1, hi=10.0, density=1.0):
    w = rng.uniform(lo, hi, (n, n)) * (rng.random((n, n)) < density)
    w = np.triu(w, 1)
    return w + w.T
