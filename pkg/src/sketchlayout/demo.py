"""Seeded generators for a small demo corpus.

Produces plausible stand-ins for collected data: text primitives are one or
more roughly horizontal lines spread over the unit square (more lines for
taller source boxes), image primitives are a jittered rectangle outline with
both diagonals drawn. Demo layouts place non-overlapping boxes on a loose
grid with generous gutters. Everything is deterministic for a given seed;
the bundled toy corpus under data/toy/ is produced by these generators.
"""

from __future__ import annotations

import random

from .ink import InkPoint, Primitive, Stroke
from .layout import Asset, BBox, Canvas, Kind, Layout

DEMO_CANVAS = Canvas(1000.0, 1000.0)

# Keep demo boxes clusterable at default recognizer thresholds: gutters wider
# than the linkage threshold, text boxes short enough that line spacing stays
# below it.
_CELL_INSET = 0.065
_MAX_TEXT_HEIGHT = 0.26


def _wavy_line(rng: random.Random, y: float, x0: float, x1: float,
               t0: float) -> Stroke:
    steps = rng.randint(6, 10)
    points = []
    t = t0
    for i in range(steps + 1):
        frac = i / steps
        x = x0 + (x1 - x0) * frac
        wobble = rng.uniform(-0.008, 0.008)
        points.append(InkPoint(round(x, 6), round(y + wobble, 6), round(t, 6)))
        t += rng.uniform(8.0, 25.0)
    return Stroke(tuple(points))


def make_text_primitive(rng: random.Random, primitive_id: str,
                        split: str = "train") -> Primitive:
    source_h = rng.uniform(30.0, 380.0)
    source_w = rng.uniform(120.0, 800.0)
    lines = max(1, min(8, round(source_h / 45.0)))
    font = max(8.0, source_h / lines * rng.uniform(0.45, 0.7))
    strokes = []
    t = 0.0
    for i in range(lines):
        if lines == 1:
            y = 0.5 + rng.uniform(-0.05, 0.05)
        else:
            y = 0.12 + 0.76 * i / (lines - 1) + rng.uniform(-0.02, 0.02)
        x0 = rng.uniform(0.01, 0.06)
        # the last line of a block often stops short
        x1 = rng.uniform(0.5, 0.95) if i == lines - 1 and lines > 1 \
            else rng.uniform(0.9, 0.99)
        strokes.append(_wavy_line(rng, y, x0, x1, t))
        t = strokes[-1].points[-1].t + rng.uniform(40.0, 120.0)
    return Primitive(
        id=primitive_id, kind=Kind.TEXT, strokes=tuple(strokes),
        source_width=round(source_w, 6), source_height=round(source_h, 6),
        source_aspect=round(source_w / source_h, 6),
        source_font_size=round(font, 6), split=split)


def _jitter(rng: random.Random, v: float, amount: float = 0.015) -> float:
    return round(min(1.05, max(-0.05, v + rng.uniform(-amount, amount))), 6)


def make_image_primitive(rng: random.Random, primitive_id: str,
                         split: str = "train") -> Primitive:
    source_w = rng.uniform(100.0, 900.0)
    source_h = rng.uniform(80.0, 700.0)
    j = lambda v: _jitter(rng, v)  # noqa: E731
    corners = [(j(0.02), j(0.02)), (j(0.98), j(0.02)),
               (j(0.98), j(0.98)), (j(0.02), j(0.98))]

    def polyline(waypoints, t0):
        points = []
        t = t0
        for (x0, y0), (x1, y1) in zip(waypoints, waypoints[1:]):
            steps = rng.randint(4, 7)
            start = 0 if not points else 1
            for i in range(start, steps + 1):
                frac = i / steps
                points.append(InkPoint(round(x0 + (x1 - x0) * frac, 6),
                                       round(y0 + (y1 - y0) * frac, 6),
                                       round(t, 6)))
                t += rng.uniform(8.0, 20.0)
        return Stroke(tuple(points))

    strokes = [polyline([*corners, corners[0]], 0.0)]
    t = strokes[-1].points[-1].t + rng.uniform(50.0, 120.0)
    strokes.append(polyline([corners[0], corners[2]], t))
    t = strokes[-1].points[-1].t + rng.uniform(50.0, 120.0)
    strokes.append(polyline([corners[1], corners[3]], t))
    return Primitive(
        id=primitive_id, kind=Kind.IMAGE, strokes=tuple(strokes),
        source_width=round(source_w, 6), source_height=round(source_h, 6),
        source_aspect=round(source_w / source_h, 6), split=split)


def make_demo_pool(seed: int = 7, text_count: int = 48,
                   image_count: int = 28) -> list[Primitive]:
    rng = random.Random(seed)
    pool = []
    for i in range(text_count):
        split = "train" if i % 2 == 0 else "validation"
        pool.append(make_text_primitive(rng, f"text_prim_{i:03d}", split))
    for i in range(image_count):
        split = "train" if i % 2 == 0 else "validation"
        pool.append(make_image_primitive(rng, f"image_prim_{i:03d}", split))
    return pool


def make_demo_layout(rng: random.Random, canvas: Canvas = DEMO_CANVAS) -> Layout:
    """Random grid layout of 2-10 separated text/image boxes."""
    rows = rng.randint(2, 4)
    cols = rng.randint(1, 3)
    inset_x = _CELL_INSET * canvas.width
    inset_y = _CELL_INSET * canvas.height
    cell_w = canvas.width / cols
    cell_h = canvas.height / rows
    counters: dict[str, int] = {}
    assets = []
    for r in range(rows):
        for c in range(cols):
            if assets and rng.random() < 0.2:
                continue
            usable_w = cell_w - 2 * inset_x
            usable_h = cell_h - 2 * inset_y
            if usable_w <= 20 or usable_h <= 20:
                continue
            tall = usable_h > _MAX_TEXT_HEIGHT * canvas.height
            is_image = rng.random() < (0.75 if tall else 0.4)
            if is_image:
                w = usable_w * rng.uniform(0.6, 1.0)
                h = usable_h * rng.uniform(0.6, 1.0)
                label = rng.choice(("figure", "picture"))
            else:
                w = usable_w * rng.uniform(0.6, 1.0)
                h = min(usable_h * rng.uniform(0.5, 1.0),
                        _MAX_TEXT_HEIGHT * canvas.height)
                label = rng.choice(("text", "text", "title"))
            x = c * cell_w + inset_x + rng.uniform(0.0, usable_w - w)
            y = r * cell_h + inset_y + rng.uniform(0.0, usable_h - h)
            index = counters.get(label, 0)
            counters[label] = index + 1
            kind = Kind.IMAGE if is_image else Kind.TEXT
            if kind is Kind.TEXT:
                # font tracks the per-line height, like the primitive pool
                line_count = max(1, min(8, round(h / 45.0)))
                font = round(max(8.0, h / line_count * 0.55), 2)
            else:
                font = None
            assets.append(Asset(
                name=f"{label}{index}", kind=kind, label=label,
                bbox=BBox(round(x, 2), round(y, 2), round(w, 2), round(h, 2)),
                font_size=font,
            ))
    if not assets:
        assets.append(Asset(name="text0", kind=Kind.TEXT, label="text",
                            bbox=BBox(100.0, 100.0, 400.0, 120.0),
                            font_size=24.0))
    return Layout(canvas=canvas, assets=tuple(assets))


def make_demo_corpus(seed: int = 11, count: int = 20,
                     canvas: Canvas = DEMO_CANVAS) -> list[tuple[str, Layout]]:
    rng = random.Random(seed)
    return [(f"toy_{i:03d}", make_demo_layout(rng, canvas)) for i in range(count)]
