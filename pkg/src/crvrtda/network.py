"""Weighted network data model, strength / clustering metrics and file I/O."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class NetworkFormatError(ValueError):
    """Raised when a network file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NetworkValidationError(ValueError):
    """Raised when a weight matrix violates the network invariants."""


@dataclass(frozen=True, eq=False)
class WeightedNetwork:
    """Undirected simple network stored as a dense symmetric weight matrix.

    ``weights[i, j] > 0`` means an edge between ``i`` and ``j``; zero means
    no edge. ``planted_labels`` holds the generating block of each vertex
    when the network comes from a block generator.
    """

    weights: np.ndarray
    planted_labels: np.ndarray | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise NetworkValidationError(f"weights must be a non-empty square matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise NetworkValidationError("weights must be finite")
        if np.any(w < 0):
            i, j = np.argwhere(w < 0)[0]
            raise NetworkValidationError(f"negative weight at ({i}, {j})")
        if np.any(np.diag(w) != 0):
            i = int(np.flatnonzero(np.diag(w))[0])
            raise NetworkValidationError(f"self-loop at vertex {i}: diagonal must be 0")
        if not np.array_equal(w, w.T):
            i, j = np.argwhere(w != w.T)[0]
            raise NetworkValidationError(
                f"weights not symmetric: w[{i}][{j}]={w[i, j]!r} but w[{j}][{i}]={w[j, i]!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.planted_labels is not None:
            labels = np.array(self.planted_labels, dtype=int)
            if labels.shape != (w.shape[0],):
                raise NetworkValidationError("planted_labels must have one entry per vertex")
            labels.setflags(write=False)
            object.__setattr__(self, "planted_labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        return (self.weights > 0).astype(int)

    def _check_vertex(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"vertex {i} out of range for network with {self.n} vertices")


def strength(net: WeightedNetwork, i: int) -> float:
    """Sum of the weights of edges incident to vertex ``i``."""
    net._check_vertex(i)
    return float(net.weights[i].sum())


def degree(net: WeightedNetwork, i: int) -> int:
    net._check_vertex(i)
    return int(np.count_nonzero(net.weights[i]))


def weighted_clustering(net: WeightedNetwork, i: int) -> float:
    """Weighted clustering coefficient of vertex ``i``.

    C_i = 1 / (s_i (k_i - 1)) * sum_{j,h} (w_ij + w_jh) / 2 * a_ij a_ih a_jh

    The sum runs over ordered pairs of distinct neighbours (j, h) of ``i``.
    Vertices with degree <= 1 get 0.
    """
    net._check_vertex(i)
    w = net.weights
    a = w > 0
    k = int(a[i].sum())
    if k <= 1:
        return 0.0
    s = float(w[i].sum())
    nbrs = np.flatnonzero(a[i])
    sub_a = a[np.ix_(nbrs, nbrs)]
    # (w_ij + w_jh)/2 with j indexing rows and h columns
    terms = (w[i, nbrs][:, None] + w[np.ix_(nbrs, nbrs)]) / 2.0
    total = float((terms * sub_a).sum())
    return total / (s * (k - 1))


# --------------------------------------------------------------------- I/O

FORMATS = ("edgelist", "dense")


def _fmt(x: float) -> str:
    # repr of a Python float is the shortest string that round-trips exactly
    return repr(float(x))


def dumps_network(net: WeightedNetwork, fmt: str = "edgelist") -> str:
    if fmt == "edgelist":
        lines = [f"# n {net.n}"]
        iu, ju = np.triu_indices(net.n, k=1)
        for i, j in zip(iu, ju):
            w = net.weights[i, j]
            if w > 0:
                lines.append(f"{i} {j} {_fmt(w)}")
        return "\n".join(lines) + "\n"
    if fmt == "dense":
        lines = [str(net.n)]
        lines += [" ".join(_fmt(x) for x in row) for row in net.weights]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown network format {fmt!r}; expected one of {FORMATS}")


def _parse_float(tok: str, lineno: int) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise NetworkFormatError(f"cannot parse number {tok!r}", lineno) from None
    if not np.isfinite(x):
        raise NetworkFormatError(f"non-finite weight {tok!r}", lineno)
    return x


def _parse_edgelist(text: str) -> WeightedNetwork:
    n_declared = None
    entries: dict[tuple[int, int], tuple[float, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "n":
                try:
                    n_declared = int(parts[1])
                except ValueError:
                    raise NetworkFormatError(f"bad vertex count {parts[1]!r}", lineno) from None
            continue
        parts = line.split()
        if len(parts) != 3:
            raise NetworkFormatError(f"expected 'i j w', got {len(parts)} fields", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise NetworkFormatError(f"vertex indices must be integers: {line!r}", lineno) from None
        if i < 0 or j < 0:
            raise NetworkFormatError("vertex indices must be non-negative", lineno)
        w = _parse_float(parts[2], lineno)
        if i == j:
            raise NetworkValidationError(f"line {lineno}: self-loop ({i}, {i}); diagonal must be 0")
        key = (min(i, j), max(i, j))
        if key in entries and entries[key][0] != w:
            raise NetworkValidationError(
                f"line {lineno}: weight {w!r} for {key} conflicts with {entries[key][0]!r} "
                f"on line {entries[key][1]} (asymmetric input)")
        entries[key] = (w, lineno)
    n = max((j for _, j in entries), default=-1) + 1
    if n_declared is not None:
        if n_declared < n:
            raise NetworkFormatError(f"declared n={n_declared} but index {n - 1} present")
        n = n_declared
    if n < 1:
        raise NetworkFormatError("empty network")
    w = np.zeros((n, n))
    for (i, j), (x, _) in entries.items():
        w[i, j] = w[j, i] = x
    return WeightedNetwork(w)


def _parse_dense(text: str) -> WeightedNetwork:
    rows = [(k, ln.strip()) for k, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not rows:
        raise NetworkFormatError("empty file", 1)
    lineno, first = rows[0]
    try:
        n = int(first)
    except ValueError:
        raise NetworkFormatError(f"first line must be the vertex count, got {first!r}", lineno) from None
    if n < 1:
        raise NetworkFormatError("vertex count must be >= 1", lineno)
    if len(rows) - 1 != n:
        raise NetworkFormatError(f"expected {n} matrix rows, found {len(rows) - 1}",
                                 rows[-1][0] if len(rows) > 1 else lineno)
    w = np.zeros((n, n))
    for r, (lineno, line) in enumerate(rows[1:]):
        toks = line.split()
        if len(toks) != n:
            raise NetworkFormatError(f"expected {n} values, found {len(toks)}", lineno)
        w[r] = [_parse_float(t, lineno) for t in toks]
    return WeightedNetwork(w)


def loads_network(text: str, fmt: str = "edgelist") -> WeightedNetwork:
    if fmt == "edgelist":
        return _parse_edgelist(text)
    if fmt == "dense":
        return _parse_dense(text)
    raise ValueError(f"unknown network format {fmt!r}; expected one of {FORMATS}")


def guess_format(path) -> str:
    suffix = Path(path).suffix.lower()
    return "dense" if suffix in (".mat", ".dense") else "edgelist"


def load_network(path, fmt: str | None = None) -> WeightedNetwork:
    """Read a network from ``path`` (format guessed from the suffix if omitted)."""
    fmt = fmt or guess_format(path)
    return loads_network(Path(path).read_text(encoding="utf-8"), fmt)


def save_network(net: WeightedNetwork, path, fmt: str | None = None) -> None:
    fmt = fmt or guess_format(path)
    Path(path).write_text(dumps_network(net, fmt), encoding="utf-8")
