"""Weighted Newman modularity and the two-phase Louvain method."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .netgen import make_rng
from .network import WeightedNetwork


class ModularityError(ValueError):
    """Modularity is undefined (no edge weight at all)."""


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray
    modularity: float
    seed: int | None = None
    levels: int = 0

    @property
    def n_communities(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    def to_dict(self) -> dict:
        return {
            "labels": [int(x) for x in self.labels],
            "n_communities": self.n_communities,
            "modularity": float(self.modularity),
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _relabel(labels) -> np.ndarray:
    """Map labels to 0..C-1 in order of first appearance."""
    labels = np.asarray(labels)
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=int)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[inv.ravel()]


def modularity(net: WeightedNetwork | np.ndarray, labels) -> float:
    """Q = 1/(2m) sum_ij (w_ij - s_i s_j / 2m) delta(c_i, c_j)."""
    w = net.weights if isinstance(net, WeightedNetwork) else np.asarray(net, dtype=float)
    labels = np.asarray(labels)
    if labels.shape != (w.shape[0],):
        raise ValueError(f"need one label per vertex ({w.shape[0]}), got shape {labels.shape}")
    two_m = w.sum()
    if two_m <= 0:
        raise ModularityError("modularity undefined for a network with zero total weight")
    s = w.sum(axis=1)
    _, c = np.unique(labels, return_inverse=True)
    c = c.ravel()
    n_c = c.max() + 1
    onehot = np.zeros((len(c), n_c))
    onehot[np.arange(len(c)), c] = 1.0
    internal = np.einsum("ic,ij,jc->", onehot, w, onehot)
    tot = onehot.T @ s
    return float(internal / two_m - np.sum(tot ** 2) / two_m ** 2)


def _local_moves(a: np.ndarray, rng: np.random.Generator, check: bool = False) -> tuple[np.ndarray, bool]:
    """One Louvain phase on the (possibly aggregated) matrix ``a``.

    Returns the community of each node and whether any node moved.
    """
    n = a.shape[0]
    k = a.sum(axis=1)
    two_m = k.sum()
    comm = np.arange(n)
    tot = k.copy()
    moved_any = False
    q_prev = modularity(a, comm) if check else None
    improved = True
    order = rng.permutation(n)
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            # remove i from its community
            tot[ci] -= k[i]
            links = np.bincount(comm, weights=a[i], minlength=n)
            links[ci] -= a[i, i]
            gain = links - tot * k[i] / two_m
            cand = np.unique(np.append(comm[a[i] > 0], ci))
            best = cand[np.argmax(gain[cand])]  # argmax picks the lowest index on ties
            if gain[best] > gain[ci]:
                comm[i] = best
                tot[best] += k[i]
                improved = moved_any = True
                if check:
                    q_now = modularity(a, comm)
                    if q_now < q_prev - 1e-12:
                        raise AssertionError(f"local move decreased modularity {q_prev} -> {q_now}")
                    q_prev = q_now
            else:
                tot[ci] += k[i]
    return _relabel(comm), moved_any


def louvain(net: WeightedNetwork, seed=0, check: bool = False, max_levels: int = 100) -> Partition:
    """Two-phase Louvain modularity maximisation at resolution 1.

    Node visit order is a seeded permutation; ties between equally good
    communities go to the lowest community index. ``check=True`` recomputes
    the modularity after every accepted move and raises if it drops.
    """
    w = net.weights
    if w.sum() <= 0:
        raise ModularityError("Louvain needs positive total weight")
    rng = make_rng(seed)
    labels = np.arange(net.n)
    a = w.copy()
    levels = 0
    for _ in range(max_levels):
        comm, moved = _local_moves(a, rng, check=check)
        if not moved:
            break
        levels += 1
        labels = comm[labels]
        n_c = comm.max() + 1
        h = np.zeros((a.shape[0], n_c))
        h[np.arange(a.shape[0]), comm] = 1.0
        a = h.T @ a @ h
    labels = _relabel(labels)
    return Partition(labels, modularity(w, labels), seed=seed if isinstance(seed, int) else None,
                     levels=levels)
