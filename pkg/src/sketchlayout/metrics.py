"""Layout evaluation metrics and corpus reports.

Implemented measures:

* ``iou_named``  — mean IoU over reference assets matched by name.
* ``miou``       — best achievable mean IoU over all one-to-one pairings of
  generated and reference boxes (position only), via maximum-weight bipartite
  matching.
* ``cos_score``  — Content Ordering Score: 1 minus the normalized edit
  distance between the two layouts' reading-order name sequences.
* ``alignment``  — mean, over assets, of the distance to the nearest shared
  alignment line (left/center/right x top/middle/bottom) of any other asset.
* ``overlap``    — mean, over assets, of the summed intersection mass with
  every other asset relative to the asset's own area.

Coordinates are normalized by each layout's declared canvas before any
comparison, so layouts expressed at different resolutions compare cleanly.
All functions are pure.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .layout import Asset, BBox, Layout

METRIC_DEFS_VERSION = 1

METRIC_NAMES = ("iou", "miou", "cos", "alignment", "overlap")


class MetricsError(ValueError):
    pass


# --------------------------------------------------------------------------
# Box-level pieces
# --------------------------------------------------------------------------

def intersection_area(a: BBox, b: BBox) -> float:
    w = min(a.xmax, b.xmax) - max(a.xmin, b.xmin)
    h = min(a.ymax, b.ymax) - max(a.ymin, b.ymin)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def _extent_area(b: BBox) -> float:
    # Same arithmetic as intersection_area, so identical boxes score an IoU
    # of exactly 1 even after canvas normalization.
    return max(0.0, b.xmax - b.xmin) * max(0.0, b.ymax - b.ymin)


def iou_boxes(a: BBox, b: BBox) -> float:
    """Intersection over union; 0 when the union has no area."""
    inter = intersection_area(a, b)
    union = _extent_area(a) + _extent_area(b) - inter
    if union <= 0:
        return 0.0
    return inter / union


def _normalized_boxes(layout: Layout) -> dict[str, BBox]:
    sx = 1.0 / layout.canvas.width
    sy = 1.0 / layout.canvas.height
    return {a.name: a.bbox.scaled(sx, sy) for a in layout.assets}


def iou_named(pred: Layout, ref: Layout) -> float:
    """Mean IoU over reference assets against the same-named prediction.

    Missing names contribute 0. An empty reference scores 1 against an empty
    prediction and 0 otherwise.
    """
    ref_boxes = _normalized_boxes(ref)
    if not ref_boxes:
        return 1.0 if len(pred) == 0 else 0.0
    pred_boxes = _normalized_boxes(pred)
    total = 0.0
    for name, box in ref_boxes.items():
        if name in pred_boxes:
            total += iou_boxes(pred_boxes[name], box)
    return total / len(ref_boxes)


# --------------------------------------------------------------------------
# Maximum-weight bipartite matching (Hungarian algorithm)
# --------------------------------------------------------------------------

def max_matching(scores: Sequence[Sequence[float]]) -> list[tuple[int, int]]:
    """Optimal one-to-one assignment maximizing the total score.

    Returns min(n, m) (row, column) pairs, sorted by row. The optimum is
    found with the O(s^3) shortest-augmenting-path Hungarian method on the
    zero-padded square matrix; among equally scoring assignments, pairwise
    exchanges then normalize toward lexicographically smaller index pairs,
    so equal inputs always produce the same assignment.
    """
    n = len(scores)
    m = len(scores[0]) if n else 0
    if n == 0 or m == 0:
        return []
    size = max(n, m)
    ceiling = max(1.0, max(max(row) for row in scores))
    # Minimize cost = ceiling - score over the padded square matrix
    # (padding cells carry score 0).
    cost = [[ceiling - (scores[i][j] if i < n and j < m else 0.0)
             for j in range(size)] for i in range(size)]
    col_of_row = _hungarian_square(cost)
    pairs = [(i, j) for i, j in enumerate(col_of_row) if i < n and j < m]
    pairs.sort()
    return _lexicographic_polish(scores, pairs)


def _hungarian_square(cost: list[list[float]]) -> list[int]:
    """Min-cost perfect assignment on a square matrix; returns column per row."""
    size = len(cost)
    inf = math.inf
    u = [0.0] * (size + 1)
    v = [0.0] * (size + 1)
    match_row = [0] * (size + 1)  # row matched to each 1-based column
    way = [0] * (size + 1)
    for i in range(1, size + 1):
        match_row[0] = i
        j0 = 0
        minv = [inf] * (size + 1)
        used = [False] * (size + 1)
        while True:
            used[j0] = True
            i0 = match_row[j0]
            delta = inf
            j1 = 0
            for j in range(1, size + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(size + 1):
                if used[j]:
                    u[match_row[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_row[j0] = match_row[j1]
            j0 = j1
    col_of_row = [0] * size
    for j in range(1, size + 1):
        if match_row[j]:
            col_of_row[match_row[j] - 1] = j - 1
    return col_of_row


def _lexicographic_polish(scores: Sequence[Sequence[float]],
                          pairs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    # Swap column assignments between row pairs whenever doing so keeps the
    # total identical and moves the earlier row to a smaller column.
    changed = True
    while changed:
        changed = False
        for a in range(len(pairs)):
            ia, ja = pairs[a]
            for b in range(a + 1, len(pairs)):
                ib, jb = pairs[b]
                if jb < ja and (scores[ia][ja] + scores[ib][jb]
                                == scores[ia][jb] + scores[ib][ja]):
                    pairs[a] = (ia, jb)
                    pairs[b] = (ib, ja)
                    ja = jb
                    changed = True
    return pairs


def matching_total(scores: Sequence[Sequence[float]],
                   pairs: Iterable[tuple[int, int]]) -> float:
    return sum(scores[i][j] for i, j in pairs)


def miou(pred: Layout, ref: Layout, kind_constrained: bool = False) -> float:
    """Maximum mean IoU over all one-to-one box pairings.

    Pairing considers positions only; ``kind_constrained`` additionally zeroes
    cross-kind pairs for comparability with literature that matches per kind.
    Unmatched assets on the larger side contribute 0; two empty layouts score 1.
    """
    if len(pred) == 0 and len(ref) == 0:
        return 1.0
    if len(pred) == 0 or len(ref) == 0:
        return 0.0
    pred_boxes = _normalized_boxes(pred)
    ref_boxes = _normalized_boxes(ref)
    scores = [
        [
            0.0 if kind_constrained and pa.kind is not ra.kind
            else iou_boxes(pred_boxes[pa.name], ref_boxes[ra.name])
            for ra in ref.assets
        ]
        for pa in pred.assets
    ]
    pairs = max_matching(scores)
    return matching_total(scores, pairs) / max(len(pred), len(ref))


# --------------------------------------------------------------------------
# Reading order and the Content Ordering Score
# --------------------------------------------------------------------------

def reading_order(layout: Layout) -> list[str]:
    """Asset names sorted by box center: top-to-bottom, then left-to-right."""
    def key(asset: Asset) -> tuple[float, float, str]:
        cx, cy = asset.bbox.center
        return (cy, cx, asset.name)

    return [a.name for a in sorted(layout.assets, key=key)]


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Edit distance with unit-cost insert/delete/substitute."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, sym_a in enumerate(a, start=1):
        current = [i]
        for j, sym_b in enumerate(b, start=1):
            cost = 0 if sym_a == sym_b else 1
            current.append(min(previous[j] + 1,        # delete
                               current[j - 1] + 1,     # insert
                               previous[j - 1] + cost))  # substitute
        previous = current
    return previous[-1]


def cos_score(pred: Layout, ref: Layout) -> float:
    """1 - lev(pred_order, ref_order) / max(|pred|, |ref|), in [0, 1].

    Sequences are the layouts' reading-order name sequences; every distinct
    name is its own symbol, so assets present in only one layout still count
    against the normalizing length. Two empty layouts score 1.
    """
    seq_pred = reading_order(pred)
    seq_ref = reading_order(ref)
    longest = max(len(seq_pred), len(seq_ref))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(seq_pred, seq_ref) / longest


# --------------------------------------------------------------------------
# Geometric quality on a single layout
# --------------------------------------------------------------------------

def _alignment_lines(box: BBox) -> tuple[float, ...]:
    cx, cy = box.center
    return (box.xmin, cx, box.xmax, box.ymin, cy, box.ymax)


def alignment(layout: Layout) -> float:
    """Mean distance from each asset to its nearest shared alignment line.

    For every asset, the minimum over the six line types (left, x-center,
    right, top, y-center, bottom) of the nearest other asset's matching line
    coordinate, in canvas-normalized units. Perfectly aligned layouts score 0;
    fewer than two assets score 0.
    """
    if len(layout) < 2:
        return 0.0
    boxes = list(_normalized_boxes(layout).values())
    lines = [_alignment_lines(b) for b in boxes]
    total = 0.0
    for i in range(len(boxes)):
        best = math.inf
        for j in range(len(boxes)):
            if j == i:
                continue
            for line_type in range(6):
                gap = abs(lines[i][line_type] - lines[j][line_type])
                if gap < best:
                    best = gap
        total += best
    return total / len(boxes)


def overlap(layout: Layout, include_background: bool = False) -> float:
    """Mean pairwise intersection mass relative to each asset's own area.

    Zero-area boxes are skipped; assets whose category is "background" are
    excluded unless requested, since a full-bleed backdrop overlaps everything
    by construction.
    """
    assets = [
        a for a in layout.assets
        if (include_background or a.category != "background")
    ]
    sx = 1.0 / layout.canvas.width
    sy = 1.0 / layout.canvas.height
    boxes = [a.bbox.scaled(sx, sy) for a in assets]
    boxes = [b for b in boxes if _extent_area(b) > 0]
    if not boxes:
        return 0.0
    total = 0.0
    for i, box in enumerate(boxes):
        covered = 0.0
        for j, other in enumerate(boxes):
            if i != j:
                covered += intersection_area(box, other)
        total += covered / _extent_area(box)
    return total / len(boxes)


# --------------------------------------------------------------------------
# Corpus evaluation and reports
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleScores:
    sample_id: str
    iou: float
    miou: float
    cos: float
    alignment: float
    overlap: float
    missing: bool = False

    def as_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "iou": self.iou,
            "miou": self.miou,
            "cos": self.cos,
            "alignment": self.alignment,
            "overlap": self.overlap,
            "missing": self.missing,
        }


@dataclass
class MetricsReport:
    samples: list[SampleScores] = field(default_factory=list)
    metric_defs_version: int = METRIC_DEFS_VERSION

    @property
    def count(self) -> int:
        return len(self.samples)

    def aggregates(self) -> dict[str, dict[str, float]]:
        """Mean and population stddev per metric; empty when no samples."""
        if not self.samples:
            return {}
        out: dict[str, dict[str, float]] = {}
        n = len(self.samples)
        for metric in METRIC_NAMES:
            values = [getattr(s, metric) for s in self.samples]
            mean = sum(values) / n
            var = sum((v - mean) ** 2 for v in values) / n
            out[metric] = {"mean": mean, "stddev": math.sqrt(var), "count": n}
        return out


def evaluate_pair(sample_id: str, pred: Layout | None, ref: Layout) -> SampleScores:
    """Score one prediction; a missing prediction yields a flagged zero record.

    Alignment and overlap describe the predicted layout itself.
    """
    if pred is None:
        return SampleScores(sample_id, 0.0, 0.0, 0.0, 0.0, 0.0, missing=True)
    return SampleScores(
        sample_id=sample_id,
        iou=iou_named(pred, ref),
        miou=miou(pred, ref),
        cos=cos_score(pred, ref),
        alignment=alignment(pred),
        overlap=overlap(pred),
    )


def evaluate_corpus(pairs: Iterable[tuple[str, Layout | None, Layout]]
                    ) -> MetricsReport:
    report = MetricsReport()
    seen: set[str] = set()
    for sample_id, pred, ref in pairs:
        if sample_id in seen:
            raise MetricsError(f"duplicate sample id {sample_id!r}")
        seen.add(sample_id)
        report.samples.append(evaluate_pair(sample_id, pred, ref))
    return report


def write_report(report: MetricsReport, path: str | Path) -> None:
    """Line records per sample plus a trailing aggregate record."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for sample in report.samples:
            fh.write(json.dumps(sample.as_dict()) + "\n")
        fh.write(json.dumps({
            "aggregate": report.aggregates(),
            "count": report.count,
            "metric_defs_version": report.metric_defs_version,
        }) + "\n")


def read_report(path: str | Path) -> tuple[MetricsReport, Mapping]:
    samples = []
    trailer: Mapping = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            if "aggregate" in record:
                trailer = record
            else:
                samples.append(SampleScores(
                    sample_id=record["sample_id"],
                    iou=record["iou"], miou=record["miou"], cos=record["cos"],
                    alignment=record["alignment"], overlap=record["overlap"],
                    missing=record.get("missing", False)))
    return MetricsReport(samples=samples), trailer


def report_to_csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample_id", *METRIC_NAMES, "missing"])
    for s in report.samples:
        writer.writerow([s.sample_id, s.iou, s.miou, s.cos,
                         s.alignment, s.overlap, s.missing])
    return buf.getvalue()
