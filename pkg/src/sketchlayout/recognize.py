"""Heuristic sketch-to-layout baseline.

Recovers a layout from a raw sketch in three pure steps: strokes are grouped
by single-linkage clustering on bounding-box gap distance, each group is
classified as text-like (mostly horizontal ink) or image-like (a crossed-out
box: substantial ink along the group's diagonals), and the given assets are
assigned to groups by maximum-weight matching on kind compatibility and size
similarity. Sizes only: group positions are the evidence being recovered, so
asset box positions are never consulted.

This is plumbing for end-to-end testing, not a model: every input asset
appears in the output exactly once, with unmatched assets stacked below the
recognized content and flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .ink import Sketch, Stroke, stroke_bbox, strokes_bbox
from .layout import Asset, BBox, Canvas, Kind, Layout
from .metrics import max_matching

TEXT_LIKE = "text_like"
IMAGE_LIKE = "image_like"


@dataclass(frozen=True)
class RecognizerParams:
    """Clustering and classification thresholds, tuned on synthetic sketches."""

    cluster_gap: float = 0.06       # linkage threshold, fraction of canvas diagonal
    diag_ink_min: float = 0.3       # min diagonal-ink fraction for image-like
    horiz_ink_min: float = 0.7      # min horizontal-ink fraction for text-like
    angle_tolerance_deg: float = 15.0
    border_band: float = 0.2        # rectangle-likeness band around the group box
    border_ink_min: float = 0.3
    kind_mismatch_weight: float = 0.25


@dataclass(frozen=True)
class StrokeGroup:
    indices: tuple[int, ...]
    bbox: BBox
    classification: str
    score: float

    def __post_init__(self) -> None:
        if not self.indices:
            raise ValueError("stroke group cannot be empty")


@dataclass(frozen=True)
class RecognizedLayout:
    layout: Layout
    fallback_names: tuple[str, ...]
    groups: tuple[StrokeGroup, ...]


# --------------------------------------------------------------------------
# Clustering
# --------------------------------------------------------------------------

def _bbox_gap(a: BBox, b: BBox) -> float:
    gap_x = max(a.xmin - b.xmax, b.xmin - a.xmax, 0.0)
    gap_y = max(a.ymin - b.ymax, b.ymin - a.ymax, 0.0)
    return math.hypot(gap_x, gap_y)


def cluster_strokes(sketch: Sketch,
                    params: RecognizerParams | None = None) -> list[StrokeGroup]:
    """Partition strokes by single-linkage on bbox gap distance.

    Two strokes join the same group when some chain of strokes connects them
    with pairwise gaps below cluster_gap * canvas diagonal. Groups are
    returned classified, ordered by reading position of their boxes.
    """
    params = params or RecognizerParams()
    n = len(sketch.strokes)
    if n == 0:
        return []
    threshold = params.cluster_gap * sketch.canvas.diagonal
    boxes = [stroke_bbox(s) for s in sketch.strokes]

    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if _bbox_gap(boxes[i], boxes[j]) <= threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)

    groups = []
    for indices in members.values():
        indices = sorted(indices)
        bbox = strokes_bbox(sketch.strokes[i] for i in indices)
        assert bbox is not None
        classification, score = classify_group(
            [sketch.strokes[i] for i in indices], params)
        groups.append(StrokeGroup(tuple(indices), bbox, classification, score))
    groups.sort(key=lambda g: (g.bbox.center[1], g.bbox.center[0], g.indices))
    return groups


# --------------------------------------------------------------------------
# Classification
# --------------------------------------------------------------------------

def _ink_profile(strokes: Sequence[Stroke], bbox: BBox,
                 params: RecognizerParams) -> tuple[float, float, float]:
    """(horizontal, diagonal, border) ink-length fractions in the group frame.

    Segments are measured after normalizing the group box to the unit square,
    which keeps text lines horizontal and crossed-box diagonals near 45
    degrees regardless of the box's aspect ratio. Nearly flat or nearly
    thin boxes (a single drawn line) are normalized isotropically instead,
    so stroke wobble is not amplified into steep angles.
    """
    sx = 1.0 / bbox.width if bbox.width > 1e-9 else 0.0
    sy = 1.0 / bbox.height if bbox.height > 1e-9 else 0.0
    if bbox.height < 0.02 * bbox.width:
        sy = sx
    elif bbox.width < 0.02 * bbox.height:
        sx = sy
    tolerance = math.radians(params.angle_tolerance_deg)
    total = horizontal = diagonal = border = 0.0
    for stroke in strokes:
        for p0, p1 in zip(stroke.points, stroke.points[1:]):
            x0 = (p0.x - bbox.xmin) * sx
            y0 = (p0.y - bbox.ymin) * sy
            x1 = (p1.x - bbox.xmin) * sx
            y1 = (p1.y - bbox.ymin) * sy
            dx, dy = x1 - x0, y1 - y0
            length = math.hypot(dx, dy)
            if length <= 0:
                continue
            total += length
            angle = math.atan2(abs(dy), abs(dx))  # folded to [0, pi/2]
            if sy == 0.0 or angle <= tolerance:
                horizontal += length
            if sx != 0.0 and sy != 0.0 and \
                    abs(angle - math.pi / 4) <= tolerance:
                diagonal += length
            mx, my = (x0 + x1) / 2.0, (y0 + y1) / 2.0
            edge_gap = min(mx, 1.0 - mx, my, 1.0 - my)
            if edge_gap <= params.border_band:
                border += length
    if total <= 0:
        return 0.0, 0.0, 0.0
    return horizontal / total, diagonal / total, border / total


def classify_group(strokes: Sequence[Stroke],
                   params: RecognizerParams | None = None) -> tuple[str, float]:
    """Classify a stroke group; the score is the winning rule's margin in [0, 1].

    Image-like requires diagonal ink above diag_ink_min plus a rectangle-like
    border; text-like requires horiz_ink_min of the ink near horizontal. When
    neither rule fires cleanly the larger fraction wins with a zero margin.
    """
    params = params or RecognizerParams()
    if not strokes:
        raise ValueError("cannot classify an empty group")
    bbox = strokes_bbox(strokes)
    assert bbox is not None
    horizontal, diagonal, border = _ink_profile(strokes, bbox, params)
    if diagonal > params.diag_ink_min and border >= params.border_ink_min:
        margin = (diagonal - params.diag_ink_min) / (1.0 - params.diag_ink_min)
        return IMAGE_LIKE, min(1.0, margin)
    if horizontal >= params.horiz_ink_min:
        margin = (horizontal - params.horiz_ink_min) / (1.0 - params.horiz_ink_min)
        return TEXT_LIKE, min(1.0, margin)
    if diagonal >= horizontal:
        return IMAGE_LIKE, 0.0
    return TEXT_LIKE, 0.0


# --------------------------------------------------------------------------
# Assignment
# --------------------------------------------------------------------------

def _clamp_to_canvas(bbox: BBox, canvas: Canvas) -> BBox:
    x0 = min(max(bbox.xmin, 0.0), canvas.width)
    y0 = min(max(bbox.ymin, 0.0), canvas.height)
    x1 = min(max(bbox.xmax, 0.0), canvas.width)
    y1 = min(max(bbox.ymax, 0.0), canvas.height)
    return BBox(x0, y0, x1 - x0, y1 - y0)


def _size_similarity(asset: Asset, group: StrokeGroup, canvas: Canvas) -> float:
    aw = asset.bbox.width / canvas.width
    ah = asset.bbox.height / canvas.height
    gw = group.bbox.width / canvas.width
    gh = group.bbox.height / canvas.height
    eps = 1e-6
    ratio_w = (min(aw, gw) + eps) / (max(aw, gw) + eps)
    ratio_h = (min(ah, gh) + eps) / (max(ah, gh) + eps)
    return ratio_w * ratio_h


def _kind_compat(asset: Asset, group: StrokeGroup,
                 params: RecognizerParams) -> float:
    matches = (asset.kind is Kind.TEXT) == (group.classification == TEXT_LIKE)
    return 1.0 if matches else params.kind_mismatch_weight


def assign_assets(groups: Sequence[StrokeGroup], assets: Sequence[Asset],
                  canvas: Canvas,
                  params: RecognizerParams | None = None) -> RecognizedLayout:
    """Place every asset: matched assets take their group's box, the rest
    are stacked in reading order below the recognized content and flagged.

    The matching weight is kind compatibility times size similarity; asset
    box positions are deliberately ignored.
    """
    params = params or RecognizerParams()
    placed: dict[str, BBox] = {}
    if groups and assets:
        weights = [
            [_kind_compat(asset, group, params)
             * _size_similarity(asset, group, canvas)
             for group in groups]
            for asset in assets
        ]
        for ai, gi in max_matching(weights):
            placed[assets[ai].name] = _clamp_to_canvas(groups[gi].bbox, canvas)

    floor = max((b.ymax for b in placed.values()), default=0.0)
    leftover = [a for a in assets if a.name not in placed]
    leftover.sort(key=lambda a: (a.bbox.center[1], a.bbox.center[0], a.name))
    fallback_names = []
    cursor = floor
    for asset in leftover:
        fallback_names.append(asset.name)
        h = min(asset.bbox.height, canvas.height)
        w = min(asset.bbox.width, canvas.width)
        box = BBox(0.0, cursor, w, h)
        placed[asset.name] = _clamp_to_canvas(box, canvas)
        cursor = min(cursor + h, canvas.height)

    out_assets = tuple(
        replace(asset, bbox=placed[asset.name]) for asset in assets
    )
    return RecognizedLayout(
        layout=Layout(canvas=canvas, assets=out_assets),
        fallback_names=tuple(fallback_names),
        groups=tuple(groups),
    )


def parse_sketch(sketch: Sketch, assets: Sequence[Asset],
                 params: RecognizerParams | None = None) -> RecognizedLayout:
    """Full pipeline: cluster, classify, assign. Deterministic for fixed params."""
    params = params or RecognizerParams()
    groups = cluster_strokes(sketch, params)
    return assign_assets(groups, assets, sketch.canvas, params)
