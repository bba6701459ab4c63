"""Seeded generators for planted block structures and weighted Erdos-Renyi graphs.

Every generator draws from a ``numpy.random.Generator`` backed by PCG64 and
seeded through ``SeedSequence``; the bit generator name is exposed as
``RNG_NAME`` so it can be written into output metadata.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .network import WeightedNetwork

STRUCTURES = ("assortative", "disassortative", "core_periphery", "ordered")
RNG_NAME = "numpy.random.PCG64"


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class BlockSpec:
    structure: str = "assortative"
    k_groups: int = 4
    group_size: int = 10
    strong_interval: tuple[float, float] = (1.0, 10.0)
    weak_interval: tuple[float, float] = (0.0, 1.0)
    p: float = 1.0
    q: float = 1.0
    floor_weight: float = 0.1
    seed: int | None = 0

    def __post_init__(self):
        if self.structure not in STRUCTURES:
            raise ValueError(f"unknown structure {self.structure!r}; expected one of {STRUCTURES}")
        if self.k_groups < 1:
            raise ValueError("k_groups must be >= 1")
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        for name in ("strong_interval", "weak_interval"):
            lo, hi = getattr(self, name)
            if not (0 <= lo <= hi):
                raise ValueError(f"{name} must satisfy 0 <= lo <= hi, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if not (0 <= self.p <= 1 and 0 <= self.q <= 1):
            raise ValueError("p and q must lie in [0, 1]")
        if self.floor_weight < 0:
            raise ValueError("floor_weight must be >= 0")

    @property
    def n(self) -> int:
        return self.k_groups * self.group_size

    def to_dict(self) -> dict:
        d = asdict(self)
        d["strong_interval"] = list(self.strong_interval)
        d["weak_interval"] = list(self.weak_interval)
        return d


def strong_block_pair(structure: str, r: int, s: int, k_groups: int) -> bool:
    """Whether block pair (r, s) carries strong weights under ``structure``.

    Block 0 is the core of a core-periphery network; the ordered structure
    is a band of width one around the diagonal.
    """
    if not (0 <= r < k_groups and 0 <= s < k_groups):
        raise ValueError(f"block indices ({r}, {s}) out of range for {k_groups} groups")
    if structure == "assortative":
        return r == s
    if structure == "disassortative":
        return r != s
    if structure == "core_periphery":
        return r == 0 or s == 0
    if structure == "ordered":
        return abs(r - s) <= 1
    raise ValueError(f"unknown structure {structure!r}; expected one of {STRUCTURES}")


def strong_mask(spec: BlockSpec) -> np.ndarray:
    """n x n boolean mask of vertex pairs whose blocks form a strong pair."""
    labels = planted_labels(spec)
    table = np.array([[strong_block_pair(spec.structure, r, s, spec.k_groups)
                       for s in range(spec.k_groups)] for r in range(spec.k_groups)])
    return table[np.ix_(labels, labels)]


def planted_labels(spec: BlockSpec) -> np.ndarray:
    return np.repeat(np.arange(spec.k_groups), spec.group_size)


def _symmetric(upper: np.ndarray) -> np.ndarray:
    w = np.triu(upper, k=1)
    return w + w.T


def _uniform(rng, interval, size):
    lo, hi = interval
    return rng.uniform(lo, hi, size=size)


def generate_block_network(spec: BlockSpec) -> WeightedNetwork:
    """Fully connected planted-block network (strict mode, ``p = q = 1``)."""
    rng = make_rng(spec.seed)
    n = spec.n
    strong = strong_mask(spec)
    w = np.where(strong, _uniform(rng, spec.strong_interval, (n, n)),
                 _uniform(rng, spec.weak_interval, (n, n)))
    return WeightedNetwork(_symmetric(w), planted_labels(spec))


def generate_noisy_block_network(spec: BlockSpec) -> WeightedNetwork:
    """Planted-block network where strong pairs are kept with probability p
    and weak pairs with probability q; dropped pairs get ``floor_weight``.
    """
    rng = make_rng(spec.seed)
    n = spec.n
    strong = strong_mask(spec)
    # same draw order as the strict generator, so p = q = 1 reproduces it
    w = np.where(strong, _uniform(rng, spec.strong_interval, (n, n)),
                 _uniform(rng, spec.weak_interval, (n, n)))
    keep = rng.random((n, n)) < np.where(strong, spec.p, spec.q)
    w = np.where(keep, w, spec.floor_weight)
    return WeightedNetwork(_symmetric(w), planted_labels(spec))


def generate_er_weighted(n: int, p: float, weight_interval=(0.1, 10.0),
                         floor_weight: float = 0.1, seed=0) -> WeightedNetwork:
    """Erdos-Renyi graph G(n, p) with uniform weights on edges.

    Non-edges are encoded as ``floor_weight`` so that the result stays fully
    connected for the cropped reciprocal filtration.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    lo, hi = weight_interval
    if not 0 <= lo <= hi:
        raise ValueError("weight_interval must satisfy 0 <= lo <= hi")
    if floor_weight < 0:
        raise ValueError("floor_weight must be >= 0")
    rng = make_rng(seed)
    keep = rng.random((n, n)) < p
    w = np.where(keep, rng.uniform(lo, hi, size=(n, n)), floor_weight)
    return WeightedNetwork(_symmetric(w))


@dataclass(frozen=True)
class ERSpec:
    n: int = 40
    p: float = 0.5
    weight_interval: tuple[float, float] = (0.1, 10.0)
    floor_weight: float = 0.1
    seed: int | None = 0
    kind: str = field(default="erdos_renyi", init=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weight_interval"] = list(self.weight_interval)
        return d
