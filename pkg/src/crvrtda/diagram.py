"""Persistence diagram features, a rule-based block-structure classifier and
CSV / SVG output.

The classifier is a heuristic. Its thresholds were calibrated on strict
generator output (4 groups of 10, strong weights U[1,10), weak U[0,1),
zeta = 0.1, tau = 1) and are listed in ``CLASSIFIER_THRESHOLDS``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping

from .persistence import INF, Barcode, dumps_barcode_csv

CLASSIFIER_VERSION = "1"
CLASSIFIER_THRESHOLDS = {
    # H1+H2 bars born at or after tau needed to call a network assortative
    "assortative_min_late_loops": 20,
    # H2:H1 bar-count ratio separating disassortative (above) from core-periphery
    "disassortative_min_h2_h1_ratio": 1.6,
}
FEATURE_DIMS = (0, 1, 2)


@dataclass(frozen=True)
class DimFeatures:
    total: int = 0
    born_before: int = 0
    born_after: int = 0
    dying_after: int = 0
    dying_at_cap: int = 0
    infinite: int = 0
    max_finite_persistence: float = 0.0
    birth_min: float = 0.0
    birth_max: float = 0.0


@dataclass(frozen=True)
class DiagramFeatures:
    """Per-dimension counts at reference threshold ``tau``.

    ``born_before`` counts births < tau and ``born_after`` births >= tau, so
    the two partition the bars of each dimension. ``dying_after`` counts
    finite deaths > tau (cap deaths included).
    """

    tau: float
    cap: float
    dims: Mapping[int, DimFeatures] = field(default_factory=dict)

    def __getitem__(self, k: int) -> DimFeatures:
        return self.dims.get(k, DimFeatures())

    def to_dict(self) -> dict:
        return {"tau": self.tau, "cap": self.cap,
                "dims": {str(k): asdict(self[k]) for k in sorted(set(FEATURE_DIMS) | set(self.dims))}}


def extract_features(barcode: Barcode, tau: float = 1.0, cap: float = 10.0) -> DiagramFeatures:
    if not tau > 0:
        raise ValueError("tau must be > 0")
    dims = {}
    for k in sorted(set(FEATURE_DIMS) | set(barcode.dims)):
        ivs = [iv for iv in barcode.dim(k) if iv.birth < iv.death]
        births = [iv.birth for iv in ivs]
        finite = [iv for iv in ivs if iv.death != INF]
        dims[k] = DimFeatures(
            total=len(ivs),
            born_before=sum(b < tau for b in births),
            born_after=sum(b >= tau for b in births),
            dying_after=sum(iv.death > tau for iv in finite),
            dying_at_cap=sum(iv.death == cap for iv in finite),
            infinite=len(ivs) - len(finite),
            max_finite_persistence=max((iv.death - iv.birth for iv in finite), default=0.0),
            birth_min=min(births, default=0.0),
            birth_max=max(births, default=0.0),
        )
    return DiagramFeatures(float(tau), float(cap), dims)


@dataclass(frozen=True)
class Classification:
    label: str
    score: float
    rule: str
    version: str = CLASSIFIER_VERSION

    def to_dict(self) -> dict:
        return asdict(self)


def _saturate(x: float, scale: float) -> float:
    return 1.0 - math.exp(-max(x, 0.0) / scale)


def classify_structure(features: DiagramFeatures, k_groups: int = 4) -> Classification:
    """Guess the planted block structure from diagram features.

    Rules, in order:

    a. at least ``k_groups - 1`` H0 deaths after tau and many H1/H2 births
       after tau: the groups only merge across weak links -> assortative;
    b. every H1/H2 bar born before tau: the network is tied together by
       strong links; many more H2 than H1 bars -> disassortative, otherwise
       core-periphery;
    c. anything else (a handful of late H1/H2 bars) -> ordered.
    """
    th = CLASSIFIER_THRESHOLDS
    late_h0 = features[0].dying_after
    late_loops = features[1].born_after + features[2].born_after
    early_loops = features[1].born_before + features[2].born_before
    need_h0 = max(k_groups - 1, 1)
    min_late = th["assortative_min_late_loops"]

    if late_h0 >= need_h0 and late_loops >= min_late:
        score = min(_saturate(late_h0, need_h0 / 2), _saturate(late_loops - min_late + 1, min_late / 2))
        return Classification("assortative", round(score, 6), "a")
    if late_loops == 0 and early_loops > 0:
        ratio = features[2].total / max(features[1].total, 1)
        cut = th["disassortative_min_h2_h1_ratio"]
        score = _saturate(abs(math.log(max(ratio, 1e-9) / cut)), 0.3)
        label = "disassortative" if ratio >= cut else "core_periphery"
        return Classification(label, round(score, 6), "b")
    # few late loops; no H1/H2 bars at all leaves nothing to go on
    score = _saturate(late_loops, 1.0) * max(0.0, 1.0 - late_loops / min_late)
    return Classification("ordered", round(score, 6), "c")


# ---------------------------------------------------------------- emission

def emit_diagram_csv(barcode: Barcode, zeta: float | None = None, tau: float | None = None,
                     seed=None) -> str:
    return dumps_barcode_csv(barcode, header_comment=f"zeta={zeta}, tau={tau}, seed={seed}")


COLORS = {0: "#1f77b4", 1: "#ff7f0e", 2: "#2ca02c"}


def emit_diagram_svg(barcode: Barcode, tau: float | None = 1.0, size: int = 400,
                     title: str | None = None, max_value: float | None = None) -> str:
    """Birth/death scatter with a dashed diagonal and a vertical line at ``tau``.

    Infinite deaths are drawn on a rail above the plot area.
    """
    finite = [x for iv in barcode for x in (iv.birth, iv.death) if x != INF]
    hi = max_value if max_value is not None else max(finite + ([tau] if tau else []) + [1.0])
    hi *= 1.05
    pad, rail = 40, 20
    plot = size - 2 * pad
    sx = lambda v: pad + plot * v / hi
    sy = lambda v: size - pad - plot * v / hi
    inf_y = pad - rail / 2
    f = lambda v: f"{v:.3f}"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1">',
        f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad}" y2="{size - pad}"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{pad}" y2="{pad}"/>',
        "</g>",
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-size="12">birth</text>',
        f'<text x="12" y="{size / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 12 {size / 2})">death</text>',
        f'<text x="{pad - 4}" y="{size - pad + 14}" text-anchor="end" font-size="10">0</text>',
        f'<text x="{size - pad}" y="{size - pad + 14}" text-anchor="middle" font-size="10">{hi / 1.05:.3g}</text>',
        f'<line id="diagonal" x1="{f(sx(0))}" y1="{f(sy(0))}" x2="{f(sx(hi))}" y2="{f(sy(hi))}" '
        f'stroke="gray" stroke-dasharray="4,4"/>',
        f'<line id="inf-rail" x1="{pad}" y1="{f(inf_y)}" x2="{size - pad}" y2="{f(inf_y)}" '
        f'stroke="lightgray"/>',
        f'<text x="{pad - 4}" y="{f(inf_y + 4)}" text-anchor="end" font-size="10">inf</text>',
    ]
    if title:
        out.append(f'<text x="{size / 2}" y="14" text-anchor="middle" font-size="12">{title}</text>')
    if tau is not None:
        out.append(f'<line id="tau" x1="{f(sx(tau))}" y1="{size - pad}" x2="{f(sx(tau))}" y2="{pad}" '
                   f'stroke="red"/>')
    for k in barcode.dims:
        color = COLORS.get(k, "#7f7f7f")
        out.append(f'<g id="H{k}" fill="{color}" fill-opacity="0.6">')
        for iv in barcode.dim(k):
            y = inf_y if iv.death == INF else sy(iv.death)
            out.append(f'<circle cx="{f(sx(iv.birth))}" cy="{f(y)}" r="3"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def features_json(features: DiagramFeatures, classification: Classification | None = None) -> str:
    d = features.to_dict()
    if classification is not None:
        d["classification"] = classification.to_dict()
    return json.dumps(d, indent=2, sort_keys=True)
