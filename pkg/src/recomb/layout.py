"""Bounding-box mathematics: IoU, centroid distance, the arrangement-similarity
metric, the layout variator, and arrangement selection from segmentation output.

All functions are pure; RNG state is local to each call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import Arrangement, BBox, new_id, validate_bbox

# Normalized centroid distances closer than this are treated as a degenerate
# (all-equal) pair set.
_DEGENERATE_SPAN = 1e-12


class NoArrangementError(ValueError):
    """Raised when no segments are available to build an arrangement from."""


@dataclass(frozen=True)
class ScoredSegment:
    """A segmentation-derived box with a non-negative prominence score."""

    bbox: BBox
    score: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.score) or self.score < 0:
            raise ValueError(f"segment score must be finite and >= 0, got {self.score}")


@dataclass(frozen=True)
class VariatorParams:
    """Knobs for the layout variator.

    jitter_px is the half-width of the uniform integer pixel jitter applied to
    every box component; top_k candidates are kept after similarity ranking.
    """

    jitter_px: int = 50
    canvas_px: int = 512
    n_candidates: int = 100
    top_k: int = 5
    rng_seed: int | None = None

    def __post_init__(self) -> None:
        if self.jitter_px < 0:
            raise ValueError("jitter_px must be >= 0")
        if self.canvas_px <= 0:
            raise ValueError("canvas_px must be positive")
        if not self.n_candidates >= self.top_k >= 1:
            raise ValueError("need n_candidates >= top_k >= 1")


def _edge_area(box: BBox) -> float:
    # Same arithmetic as the intersection below, so iou(a, a) is exactly 1.
    return ((box.x + box.w) - box.x) * ((box.y + box.h) - box.y)


def iou(a: BBox, b: BBox) -> float:
    """Intersection area over union area; 0 when the boxes are disjoint."""
    ix = max(a.x, b.x)
    iy = max(a.y, b.y)
    ix2 = min(a.x + a.w, b.x + b.w)
    iy2 = min(a.y + a.h, b.y + b.h)
    inter = max(0.0, ix2 - ix) * max(0.0, iy2 - iy)
    if inter == 0.0:
        return 0.0
    union = _edge_area(a) + _edge_area(b) - inter
    return inter / union


def centroid_distance(a: BBox, b: BBox) -> float:
    """Euclidean distance between box centers, in fractional units."""
    (ax, ay), (bx, by) = a.center, b.center
    return math.hypot(ax - bx, ay - by)


def layout_similarity(candidate: Sequence[BBox], original: Sequence[BBox]) -> float:
    """Similarity of a candidate layout to an original one; higher = more similar.

    Each candidate box pairs with its nearest original box by centroid distance
    (greedy, with replacement). Over the resulting pairs the centroid distances
    are min-max normalized (all zero when max == min) and the score is
    sum(IoU) + sum(1 - normalized distance), so the range is [0, 2*len(candidate)].
    """
    if not candidate or not original:
        raise ValueError("layout_similarity requires non-empty box lists")
    pair_ious = np.empty(len(candidate))
    pair_dists = np.empty(len(candidate))
    for i, box in enumerate(candidate):
        dists = [centroid_distance(box, o) for o in original]
        j = int(np.argmin(dists))
        pair_ious[i] = iou(box, original[j])
        pair_dists[i] = dists[j]
    span = pair_dists.max() - pair_dists.min()
    if span < _DEGENERATE_SPAN:
        normalized = np.zeros_like(pair_dists)
    else:
        normalized = (pair_dists - pair_dists.min()) / span
    return float(pair_ious.sum() + (1.0 - normalized).sum())


def clamp_shifted(x: float, y: float, w: float, h: float, min_size: float) -> BBox:
    # Sizes first into (0,1], then positions shifted into the remaining room;
    # this order guarantees a valid box.
    w = min(max(w, min_size), 1.0)
    h = min(max(h, min_size), 1.0)
    x = min(max(x, 0.0), 1.0 - w)
    y = min(max(y, 0.0), 1.0 - h)
    return BBox(x, y, w, h)


def _jitter_box(box: BBox, rng: np.random.Generator, params: VariatorParams) -> BBox:
    if params.jitter_px == 0:
        return box
    j = params.jitter_px
    deltas = rng.integers(-j, j + 1, size=4) / params.canvas_px
    return clamp_shifted(
        box.x + deltas[0],
        box.y + deltas[1],
        box.w + deltas[2],
        box.h + deltas[3],
        1.0 / params.canvas_px,
    )


def vary_arrangement(
    original: Arrangement,
    n_objects: int,
    params: VariatorParams = VariatorParams(),
) -> list[list[BBox]]:
    """Generate jittered variations of an arrangement and rank them by similarity.

    Each of ``params.n_candidates`` candidates jitters every original box by an
    integer pixel offset in [-jitter_px, +jitter_px] per component, clamps back
    to validity, then samples ``n_objects`` boxes (without replacement when
    possible, otherwise with replacement plus a secondary jitter pass so repeats
    do not coincide). Returns the ``top_k`` candidates, most similar first.
    Deterministic for a fixed ``params.rng_seed``.
    """
    if n_objects < 1:
        raise ValueError("n_objects must be >= 1")
    if not original.boxes:
        raise ValueError("original arrangement has no boxes")
    rng = np.random.default_rng(params.rng_seed)
    n_boxes = len(original.boxes)

    candidates: list[list[BBox]] = []
    for _ in range(params.n_candidates):
        jittered = [_jitter_box(b, rng, params) for b in original.boxes]
        if n_objects <= n_boxes:
            idxs = rng.choice(n_boxes, size=n_objects, replace=False)
        else:
            idxs = rng.choice(n_boxes, size=n_objects, replace=True)
        picked: list[BBox] = []
        used: set[int] = set()
        for i in idxs:
            box = jittered[int(i)]
            if int(i) in used:
                box = _jitter_box(box, rng, params)
            used.add(int(i))
            picked.append(box)
        candidates.append(picked)

    scored = [(layout_similarity(c, list(original.boxes)), c) for c in candidates]
    scored.sort(key=lambda sc: -sc[0])  # stable: earlier candidates win ties
    return [c for _, c in scored[: params.top_k]]


def select_arrangement(
    segments: Sequence[ScoredSegment],
    source_image: str = "",
    arrangement_id: str | None = None,
    canvas_px: int = 512,
    max_boxes: int = 10,
) -> Arrangement:
    """Keep the most prominent segments (up to ``max_boxes``) as an arrangement.

    Sorted by score descending; ties break toward larger area, then input order.
    """
    if not segments:
        raise NoArrangementError("no segments to build an arrangement from")
    order = sorted(
        range(len(segments)),
        key=lambda i: (-segments[i].score, -segments[i].bbox.area, i),
    )
    boxes = tuple(segments[i].bbox for i in order[:max_boxes])
    return Arrangement(
        id=arrangement_id or new_id(),
        source_image=source_image,
        boxes=boxes,
        canvas_px=canvas_px,
    )
