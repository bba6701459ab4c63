"""Cropped reciprocal distances and flag (Vietoris-Rips) filtrations."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .network import WeightedNetwork

DEFAULT_ZETA = 0.1
# simplices; about 100 bytes each once boundaries are built
MAX_SIMPLICES = 20_000_000


class FiltrationError(ValueError):
    """A filtration is malformed or violates the face ordering."""


class FiltrationTooLarge(MemoryError):
    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"filtration would contain {count} simplices (limit {limit}); "
                         f"lower max_dim or raise the limit")


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    d: np.ndarray
    zeta: float

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def cap(self) -> float:
        return 1.0 / self.zeta


def crvr_distance(net: WeightedNetwork, zeta: float = DEFAULT_ZETA) -> DistanceMatrix:
    """Reciprocal weights, cropped to ``1/zeta`` wherever ``w_ij <= zeta``."""
    if not zeta > 0:
        raise ValueError(f"zeta must be > 0, got {zeta}")
    w = net.weights
    cap = 1.0 / zeta
    with np.errstate(divide="ignore"):
        d = np.where(w > zeta, 1.0 / np.where(w > zeta, w, 1.0), cap)
    np.fill_diagonal(d, 0.0)
    d.setflags(write=False)
    return DistanceMatrix(d, float(zeta))


@dataclass(frozen=True, eq=False)
class Filtration:
    """Simplices in filtration order with their values.

    ``simplices[k]`` is a sorted vertex tuple; ``values[k]`` its filtration
    value. ``max_dim`` is the dimension cap used to build it: homology is
    complete only in dimensions below the cap.
    """

    simplices: list[tuple[int, ...]]
    values: np.ndarray
    max_dim: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.simplices),):
            raise FiltrationError("one value per simplex required")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], int, float]]:
        for s, v in zip(self.simplices, self.values):
            yield s, len(s) - 1, float(v)

    @property
    def dims(self) -> np.ndarray:
        return np.fromiter((len(s) - 1 for s in self.simplices), dtype=int, count=len(self.simplices))

    @property
    def n_vertices(self) -> int:
        return sum(1 for s in self.simplices if len(s) == 1)

    def sublevel(self, t: float) -> list[tuple[int, ...]]:
        return [s for s, v in zip(self.simplices, self.values) if v <= t]

    @classmethod
    def from_simplices(cls, items: Sequence[tuple[Sequence[int], float]], max_dim: int | None = None,
                       sort: bool = True) -> "Filtration":
        """Build a filtration from ``(vertices, value)`` pairs.

        With ``sort=True`` the simplices are put in (value, dimension,
        lexicographic) order; otherwise the given order is kept as is.
        """
        rows = []
        for verts, val in items:
            t = tuple(int(v) for v in verts)
            if list(t) != sorted(set(t)) or not t:
                raise FiltrationError(f"simplex {verts!r} must list distinct vertices in ascending order")
            rows.append((t, float(val)))
        if sort:
            rows.sort(key=lambda r: (r[1], len(r[0]), r[0]))
        if max_dim is None:
            max_dim = max((len(t) - 1 for t, _ in rows), default=0)
        return cls([t for t, _ in rows], np.array([v for _, v in rows], dtype=float), max_dim)


def simplex_count(n: int, max_dim: int) -> int:
    return sum(comb(n, m + 1) for m in range(max_dim + 1))


def build_flag_filtration(dist: DistanceMatrix | np.ndarray, max_dim: int,
                          max_simplices: int = MAX_SIMPLICES) -> Filtration:
    """Enumerate every simplex of dimension <= ``max_dim`` valued by its diameter.

    Ties are broken by dimension, then lexicographic vertex order.
    """
    d = dist.d if isinstance(dist, DistanceMatrix) else np.asarray(dist, dtype=float)
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    n = d.shape[0]
    total = simplex_count(n, max_dim)
    if total > max_simplices:
        raise FiltrationTooLarge(total, max_simplices)

    verts_by_dim, vals_by_dim = [], []
    for m in range(min(max_dim, n - 1) + 1):
        combo = np.array(list(combinations(range(n), m + 1)), dtype=np.int64).reshape(-1, m + 1)
        diam = np.zeros(len(combo))
        for a, b in combinations(range(m + 1), 2):
            np.maximum(diam, d[combo[:, a], combo[:, b]], out=diam)
        verts_by_dim.append(combo)
        vals_by_dim.append(diam)

    values = np.concatenate(vals_by_dim)
    dims = np.concatenate([np.full(len(v), m) for m, v in enumerate(vals_by_dim)])
    # combinations() already yields lexicographic order within a dimension
    lex = np.concatenate([np.arange(len(v)) for v in vals_by_dim])
    order = np.lexsort((lex, dims, values))
    flat = [tuple(row) for combo in verts_by_dim for row in combo.tolist()]
    simplices = [flat[k] for k in order.tolist()]
    return Filtration(simplices, values[order], max_dim)


# ------------------------------------------------------------------ text I/O

def dumps_filtration(filt: Filtration) -> str:
    lines = [f"{v!r} {len(s) - 1} " + " ".join(map(str, s)) for s, v in
             zip(filt.simplices, filt.values.tolist())]
    return "\n".join(lines) + "\n"


def loads_filtration(text: str, max_dim: int | None = None) -> Filtration:
    """Parse ``value dim v0 v1 ...`` lines; the file order is kept."""
    items = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        try:
            val = float(toks[0])
            dim = int(toks[1])
            verts = [int(t) for t in toks[2:]]
        except (ValueError, IndexError):
            raise FiltrationError(f"line {lineno}: expected 'value dim v0 v1 ...', got {line!r}") from None
        if len(verts) != dim + 1:
            raise FiltrationError(f"line {lineno}: dimension {dim} needs {dim + 1} vertices, got {len(verts)}")
        items.append((verts, val))
    try:
        return Filtration.from_simplices(items, max_dim=max_dim, sort=False)
    except FiltrationError as exc:
        raise FiltrationError(f"{exc}") from None


def save_filtration(filt: Filtration, path) -> None:
    Path(path).write_text(dumps_filtration(filt), encoding="utf-8")


def load_filtration(path, max_dim: int | None = None) -> Filtration:
    return loads_filtration(Path(path).read_text(encoding="utf-8"), max_dim=max_dim)
