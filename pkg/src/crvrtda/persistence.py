"""Persistent homology over GF(2) by boundary-matrix column reduction.

Columns are stored as Python integers used as bitsets, so adding two
columns is a single XOR and the pivot (lowest nonzero row) is
``bit_length() - 1``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .crvr import Filtration, FiltrationError

INF = math.inf


def boundary(simplex: Sequence[int]) -> list[tuple[int, ...]]:
    """Facets of ``simplex``, dropping vertex 0 first, then vertex 1, ..."""
    s = tuple(simplex)
    if not s:
        raise ValueError("empty simplex")
    if any(a >= b for a, b in zip(s, s[1:])):
        raise ValueError(f"simplex vertices must be strictly increasing, got {s}")
    if len(s) == 1:
        return []
    return [s[:k] + s[k + 1:] for k in range(len(s))]


class Interval(NamedTuple):
    dim: int
    birth: float
    death: float

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    def alive_at(self, t: float) -> bool:
        return self.birth <= t < self.death


@dataclass(frozen=True)
class Barcode:
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = tuple(sorted(Interval(int(k), float(b), float(d)) for k, b, d in self.intervals))
        for iv in ivs:
            if not iv.birth <= iv.death:
                raise ValueError(f"interval with birth > death: {iv}")
        object.__setattr__(self, "intervals", ivs)

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def dim(self, k: int) -> list[Interval]:
        return [iv for iv in self.intervals if iv.dim == k]

    @property
    def dims(self) -> list[int]:
        return sorted({iv.dim for iv in self.intervals})

    def nonzero(self) -> "Barcode":
        """Drop zero-length intervals."""
        return Barcode(tuple(iv for iv in self.intervals if iv.birth < iv.death))

    def cap_to_infinity(self, cap: float) -> "Barcode":
        """Reclassify intervals that die exactly at ``cap`` as infinite."""
        return Barcode(tuple(Interval(iv.dim, iv.birth, INF if iv.death == cap else iv.death)
                             for iv in self.intervals))

    def betti(self, t: float, k: int) -> int:
        return sum(1 for iv in self.intervals if iv.dim == k and iv.alive_at(t))


# ---------------------------------------------------------------- reduction

def _colex_rank(verts: np.ndarray) -> np.ndarray:
    """Colexicographic rank of each row of sorted vertex indices."""
    ranks = np.zeros(len(verts), dtype=np.int64)
    for i in range(verts.shape[1]):
        v = verts[:, i]
        c = np.ones_like(v)
        for t in range(i + 1):
            c = c * (v - t) // (t + 1)  # exact: C(v, t + 1) stays integral
        ranks += c
    return ranks


def _boundary_indices(filt: Filtration) -> list[list[int]]:
    """Positions of the facets of each simplex, sorted; checks the face ordering."""
    dims = filt.dims
    values = filt.values
    cols: list[list[int]] = [[] for _ in range(len(dims))]
    if len(dims) and dims.max() > filt.max_dim:
        j = int(np.argmax(dims > filt.max_dim))
        raise FiltrationError(f"simplex {filt.simplices[j]} exceeds max_dim={filt.max_dim}")
    lookup: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for k in range(int(dims.max()) + 1 if len(dims) else 0):
        pos = np.flatnonzero(dims == k)
        if not len(pos):
            continue
        verts = np.array([filt.simplices[p] for p in pos.tolist()], dtype=np.int64).reshape(-1, k + 1)
        if len(verts) and verts.min() < 0:
            raise FiltrationError("vertex indices must be non-negative")
        ranks = _colex_rank(verts)
        uniq, first = np.unique(ranks, return_index=True)
        if len(uniq) != len(ranks):
            dup = np.setdiff1d(np.arange(len(ranks)), first)[0]
            raise FiltrationError(f"simplex {filt.simplices[pos[dup]]} listed twice")
        lookup[k] = (uniq, pos[first])
        if k == 0:
            continue
        if k - 1 not in lookup:
            raise FiltrationError(
                f"simplex {filt.simplices[pos[0]]} at position {pos[0]} appears before its faces")
        face_ranks, face_pos = lookup[k - 1]
        facet_pos = np.empty((len(pos), k + 1), dtype=np.int64)
        for drop in range(k + 1):
            facets = np.delete(verts, drop, axis=1)
            fr = _colex_rank(facets)
            idx = np.searchsorted(face_ranks, fr)
            idx = np.minimum(idx, len(face_ranks) - 1)
            found = face_ranks[idx] == fr
            fp = np.where(found, face_pos[idx], -1)
            facet_pos[:, drop] = fp
        bad = (facet_pos < 0) | (facet_pos > pos[:, None])
        if bad.any():
            r, c = np.argwhere(bad)[0]
            face = tuple(np.delete(verts[r], c).tolist())
            raise FiltrationError(
                f"simplex {filt.simplices[pos[r]]} at position {pos[r]} appears before its face {face}")
        too_low = values[facet_pos] > values[pos][:, None]
        if too_low.any():
            r, c = np.argwhere(too_low)[0]
            face = tuple(np.delete(verts[r], c).tolist())
            raise FiltrationError(f"simplex {filt.simplices[pos[r]]} has value {float(values[pos[r]])!r} "
                                  f"below its face {face} ({float(values[facet_pos[r, c]])!r})")
        facet_pos.sort(axis=1)
        for p, col in zip(pos.tolist(), facet_pos.tolist()):
            cols[p] = col
    return cols


def _reduce_standard(cols: list[list[int]]) -> dict[int, int]:
    """Plain left-to-right reduction; returns ``{birth_position: death_position}``."""
    pivot_col: dict[int, int] = {}
    pairs: dict[int, int] = {}
    for j, col in enumerate(cols):
        c = 0
        for i in col:
            c |= 1 << i
        while c:
            low = c.bit_length() - 1
            other = pivot_col.get(low)
            if other is None:
                pivot_col[low] = c
                pairs[low] = j
                break
            c ^= other
    return pairs


def _reduce_compressed(cols: list[list[int]], dims: np.ndarray) -> dict[int, int]:
    """Dimension-by-dimension reduction with two exact shortcuts.

    * Rows of negative simplices are dropped from the next dimension's
      columns: a pivot is always a positive simplex, so those rows never
      take part in a pivot comparison.
    * A column is skipped (it must reduce to zero) when every positive
      facet-dimension simplex before it is already paired.
    """
    pairs: dict[int, int] = {}
    negative = np.zeros(len(cols), dtype=bool)
    top = int(dims.max()) if len(dims) else -1
    positions_by_dim = [np.flatnonzero(dims == k) for k in range(top + 1)]
    for k in range(1, top + 1):
        rows = positions_by_dim[k - 1]
        positive_rows = rows[~negative[rows]].tolist()
        compact = {p: r for r, p in enumerate(positive_rows)}
        pivot_col: dict[int, int] = {}
        n_paired = 0
        ptr = 0  # number of positive rows preceding the current column
        for j in positions_by_dim[k].tolist():
            while ptr < len(positive_rows) and positive_rows[ptr] < j:
                ptr += 1
            if ptr == n_paired:
                continue
            c = 0
            for i in cols[j]:
                r = compact.get(i)
                if r is not None:
                    c ^= 1 << r
            while c:
                low = c.bit_length() - 1
                other = pivot_col.get(low)
                if other is None:
                    pivot_col[low] = c
                    pairs[positive_rows[low]] = j
                    negative[j] = True
                    n_paired += 1
                    break
                c ^= other
    return pairs


def compute_persistence(filt: Filtration, *, keep_zero_length: bool = False,
                        method: str = "compressed") -> Barcode:
    """Barcode of ``filt`` over GF(2).

    Unpaired simplices of dimension below ``filt.max_dim`` give infinite
    intervals. Zero-length intervals are dropped unless ``keep_zero_length``.
    ``method`` is ``"standard"`` (plain reduction) or ``"compressed"``;
    both give the same barcode.
    """
    cols = _boundary_indices(filt)
    dims = filt.dims
    if method == "standard":
        pairs = _reduce_standard(cols)
    elif method == "compressed":
        pairs = _reduce_compressed(cols, dims)
    else:
        raise ValueError(f"unknown reduction method {method!r}")
    values = filt.values
    deaths = set(pairs.values())
    out = []
    for i in range(len(cols)):
        if i in deaths:
            continue
        k = int(dims[i])
        if i in pairs:
            out.append((k, values[i], values[pairs[i]]))
        elif k < filt.max_dim:
            out.append((k, values[i], INF))
    bc = Barcode(tuple(out))
    return bc if keep_zero_length else bc.nonzero()


# -------------------------------------------------------------------- oracle

def gf2_rank(vectors: Iterable[int]) -> int:
    """Rank over GF(2) of bit-vectors given as Python ints."""
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                break
            v ^= b
    return len(basis)


def betti_oracle(filt: Filtration, t: float, k: int) -> int:
    """k-th Betti number of the sublevel complex at ``t``, from scratch.

    dim ker d_k - rank d_{k+1}, ranks by Gaussian elimination over GF(2).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    complex_ = filt.sublevel(t)
    by_dim: dict[int, list[tuple[int, ...]]] = {}
    for s in complex_:
        by_dim.setdefault(len(s) - 1, []).append(s)

    def boundary_rank(m: int) -> int:
        if m == 0 or m not in by_dim:
            return 0
        row = {s: r for r, s in enumerate(by_dim.get(m - 1, []))}
        vecs = []
        for s in by_dim[m]:
            v = 0
            for f in boundary(s):
                v ^= 1 << row[f]
            vecs.append(v)
        return gf2_rank(vecs)

    n_k = len(by_dim.get(k, []))
    return n_k - boundary_rank(k) - boundary_rank(k + 1)


def check_dominating_vertex(filt: Filtration, epsilon: float) -> bool:
    """True iff some vertex is joined to every other vertex by an edge of value <= epsilon."""
    verts = sorted(s[0] for s in filt.simplices if len(s) == 1)
    if len(verts) <= 1:
        return bool(verts)
    close: dict[int, int] = {v: 0 for v in verts}
    for s, v in zip(filt.simplices, filt.values):
        if len(s) == 2 and v <= epsilon:
            close[s[0]] += 1
            close[s[1]] += 1
    return any(c == len(verts) - 1 for c in close.values())


# ----------------------------------------------------------------------- CSV

def _fmt(x: float) -> str:
    return "inf" if x == INF else repr(float(x))


def dumps_barcode_csv(bc: Barcode, header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dim", "birth", "death"])
    for iv in bc.intervals:
        w.writerow([iv.dim, _fmt(iv.birth), _fmt(iv.death)])
    return buf.getvalue()


def loads_barcode_csv(text: str) -> Barcode:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames != ["dim", "birth", "death"]:
        raise ValueError(f"expected header dim,birth,death, got {reader.fieldnames}")
    return Barcode(tuple(Interval(int(r["dim"]), float(r["birth"]), float(r["death"])) for r in reader))


def save_barcode_csv(bc: Barcode, path, header_comment: str | None = None) -> None:
    Path(path).write_text(dumps_barcode_csv(bc, header_comment), encoding="utf-8")


def load_barcode_csv(path) -> Barcode:
    return loads_barcode_csv(Path(path).read_text(encoding="utf-8"))
