"""Ink stroke data model, sketch rendering and rasterization.

Strokes are timed polylines. A primitive is a small set of strokes drawn for
one asset, stored normalized to the asset's box ([0,1] on both axes, with a
10% overdraw tolerance). A sketch is a composition of strokes over a canvas,
optionally grouped per source asset.

On-disk formats are JSON line records; the rasterizer emits binary PGM (P5)
so golden tests can compare bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .layout import BBox, Canvas, Kind, LayoutValidationError, bbox_from_extremes


class InkValidationError(ValueError):
    pass


NORMALIZED_TOLERANCE = 0.1  # overdraw allowance around the unit square

SPLITS = ("train", "validation")


@dataclass(frozen=True)
class InkPoint:
    x: float
    y: float
    t: float = 0.0  # ms since stroke start

    def __post_init__(self) -> None:
        for field_name in ("x", "y", "t"):
            value = float(getattr(self, field_name))
            if not math.isfinite(value):
                raise InkValidationError(f"point {field_name} must be finite")
            object.__setattr__(self, field_name, value)
        if self.t < 0:
            raise InkValidationError(f"point t must be >= 0, got {self.t}")


@dataclass(frozen=True)
class Stroke:
    points: tuple[InkPoint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise InkValidationError("stroke needs at least 2 points")
        last_t = self.points[0].t
        for p in self.points[1:]:
            if p.t < last_t:
                raise InkValidationError("stroke timestamps must be non-decreasing")
            last_t = p.t

    @property
    def duration_ms(self) -> float:
        return self.points[-1].t - self.points[0].t


def stroke_bbox(stroke: Stroke) -> BBox:
    """Tight axis-aligned bounds containing every point of the stroke."""
    xs = [p.x for p in stroke.points]
    ys = [p.y for p in stroke.points]
    return bbox_from_extremes(min(xs), min(ys), max(xs), max(ys))


def strokes_bbox(strokes: Iterable[Stroke]) -> BBox | None:
    box: BBox | None = None
    for stroke in strokes:
        b = stroke_bbox(stroke)
        box = b if box is None else box.union(b)
    return box


@dataclass(frozen=True)
class Primitive:
    """Hand-drawn fragment for one asset, in box-normalized coordinates."""

    id: str
    kind: Kind
    strokes: tuple[Stroke, ...]
    source_width: float
    source_height: float
    source_aspect: float
    source_font_size: float | None = None
    split: str = "train"

    def __post_init__(self) -> None:
        object.__setattr__(self, "strokes", tuple(self.strokes))
        if not self.id:
            raise InkValidationError("primitive id must be non-empty")
        if not self.strokes:
            raise InkValidationError(f"primitive {self.id!r} has no strokes")
        if self.split not in SPLITS:
            raise InkValidationError(
                f"primitive {self.id!r} split must be one of {SPLITS}")
        if self.kind is Kind.TEXT:
            if self.source_font_size is None or not self.source_font_size > 0:
                raise InkValidationError(
                    f"text primitive {self.id!r} needs a positive source_font_size")
        elif self.source_font_size is not None:
            raise InkValidationError(
                f"image primitive {self.id!r} cannot carry source_font_size")
        lo, hi = -NORMALIZED_TOLERANCE, 1.0 + NORMALIZED_TOLERANCE
        for stroke in self.strokes:
            for p in stroke.points:
                if not (lo <= p.x <= hi and lo <= p.y <= hi):
                    raise InkValidationError(
                        f"primitive {self.id!r} point ({p.x}, {p.y}) outside "
                        f"normalized frame [{lo}, {hi}]")


@dataclass(frozen=True)
class Sketch:
    """Strokes in canvas coordinates, optionally grouped per asset name."""

    canvas: Canvas
    strokes: tuple[Stroke, ...] = ()
    groups: Mapping[str, tuple[int, ...]] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "strokes", tuple(self.strokes))
        if self.groups is not None:
            groups = {name: tuple(idx) for name, idx in self.groups.items()}
            seen: set[int] = set()
            for name, indices in groups.items():
                for i in indices:
                    if not 0 <= i < len(self.strokes):
                        raise InkValidationError(
                            f"group {name!r} references stroke {i} "
                            f"of {len(self.strokes)}")
                    if i in seen:
                        raise InkValidationError(
                            f"stroke {i} appears in more than one group")
                    seen.add(i)
            object.__setattr__(self, "groups", groups)


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------

def _fmt(value: float) -> str:
    f = float(value)
    if f.is_integer() and abs(f) < 2**53:
        return str(int(f))
    return repr(f)


def render_sketch_svg(sketch: Sketch, stroke_width: float = 3.0) -> bytes:
    """One polyline per stroke, in stroke order. Deterministic bytes."""
    w = _fmt(sketch.canvas.width)
    h = _fmt(sketch.canvas.height)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    for stroke in sketch.strokes:
        pts = " ".join(f"{_fmt(p.x)},{_fmt(p.y)}" for p in stroke.points)
        lines.append(
            f'  <polyline points="{pts}" fill="none" stroke="black" '
            f'stroke-width="{_fmt(stroke_width)}" stroke-linecap="round" '
            f'stroke-linejoin="round"/>')
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


@dataclass(frozen=True)
class Raster:
    """8-bit grayscale bitmap; 0 is ink, 255 is paper."""

    width: int
    height: int
    pixels: bytes  # row-major, len == width * height

    def __post_init__(self) -> None:
        if len(self.pixels) != self.width * self.height:
            raise InkValidationError("pixel buffer size mismatch")

    def at(self, x: int, y: int) -> int:
        return self.pixels[y * self.width + x]

    def dark_pixels(self) -> int:
        return sum(1 for v in self.pixels if v < 128)

    def to_pgm(self) -> bytes:
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + self.pixels


def rasterize_sketch(sketch: Sketch, out_width: int,
                     stroke_width: int = 3) -> Raster:
    """Rasterize with Bresenham segments thickened by a round cap.

    No anti-aliasing; identical inputs produce identical bitmaps. The output
    height preserves the canvas aspect ratio.
    """
    if out_width <= 0:
        raise InkValidationError("out_width must be > 0")
    if stroke_width < 1:
        raise InkValidationError("stroke_width must be >= 1")
    scale = out_width / sketch.canvas.width
    out_height = max(1, round(sketch.canvas.height * scale))
    buf = bytearray(b"\xff" * (out_width * out_height))

    radius = stroke_width / 2.0
    offsets = [
        (dx, dy)
        for dy in range(-stroke_width, stroke_width + 1)
        for dx in range(-stroke_width, stroke_width + 1)
        if dx * dx + dy * dy <= radius * radius
    ]

    def stamp(cx: int, cy: int) -> None:
        for dx, dy in offsets:
            x, y = cx + dx, cy + dy
            if 0 <= x < out_width and 0 <= y < out_height:
                buf[y * out_width + x] = 0

    def to_px(p: InkPoint) -> tuple[int, int]:
        x = min(out_width - 1, max(0, round(p.x * scale)))
        y = min(out_height - 1, max(0, round(p.y * scale)))
        return x, y

    for stroke in sketch.strokes:
        pixel_points = [to_px(p) for p in stroke.points]
        for (x0, y0), (x1, y1) in zip(pixel_points, pixel_points[1:]):
            for x, y in _bresenham(x0, y0, x1, y1):
                stamp(x, y)
    return Raster(out_width, out_height, bytes(buf))


def _bresenham(x0: int, y0: int, x1: int, y1: int) -> Iterator[tuple[int, int]]:
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        yield x0, y0
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


# --------------------------------------------------------------------------
# Line-record formats (JSONL)
# --------------------------------------------------------------------------

def _round6(value: float) -> float:
    return round(float(value), 6)


def _strokes_to_lists(strokes: Iterable[Stroke]) -> list[list[list[float]]]:
    return [
        [[_round6(p.x), _round6(p.y), _round6(p.t)] for p in stroke.points]
        for stroke in strokes
    ]


def _strokes_from_lists(data: Iterable) -> tuple[Stroke, ...]:
    return tuple(
        Stroke(tuple(InkPoint(p[0], p[1], p[2] if len(p) > 2 else 0.0)
                     for p in pts))
        for pts in data
    )


def primitive_to_record(primitive: Primitive) -> dict:
    record: dict = {
        "id": primitive.id,
        "kind": primitive.kind.value,
        "strokes": _strokes_to_lists(primitive.strokes),
        "source_width": _round6(primitive.source_width),
        "source_height": _round6(primitive.source_height),
        "source_aspect": _round6(primitive.source_aspect),
        "split": primitive.split,
    }
    if primitive.source_font_size is not None:
        record["source_font_size"] = _round6(primitive.source_font_size)
    return record


def primitive_from_record(record: Mapping) -> Primitive:
    font = record.get("source_font_size")
    return Primitive(
        id=record["id"],
        kind=Kind(record["kind"]),
        strokes=_strokes_from_lists(record["strokes"]),
        source_width=float(record["source_width"]),
        source_height=float(record["source_height"]),
        source_aspect=float(record["source_aspect"]),
        source_font_size=float(font) if font is not None else None,
        split=record.get("split", "train"),
    )


def sketch_to_record(sketch: Sketch) -> dict:
    record: dict = {
        "canvas": {"width": _round6(sketch.canvas.width),
                   "height": _round6(sketch.canvas.height)},
        "strokes": _strokes_to_lists(sketch.strokes),
    }
    if sketch.groups is not None:
        record["groups"] = {name: list(idx) for name, idx in sketch.groups.items()}
    return record


def sketch_from_record(record: Mapping) -> Sketch:
    canvas = Canvas(float(record["canvas"]["width"]),
                    float(record["canvas"]["height"]))
    groups = record.get("groups")
    return Sketch(
        canvas=canvas,
        strokes=_strokes_from_lists(record["strokes"]),
        groups={name: tuple(idx) for name, idx in groups.items()}
        if groups is not None else None,
    )


def write_jsonl(path: str | Path, records: Iterable[Mapping]) -> int:
    count = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, separators=(", ", ": ")) + "\n")
            count += 1
    return count


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def write_primitives(path: str | Path, primitives: Iterable[Primitive]) -> int:
    return write_jsonl(path, (primitive_to_record(p) for p in primitives))


def read_primitives(path: str | Path) -> list[Primitive]:
    return [primitive_from_record(r) for r in read_jsonl(path)]


def write_sketch(path: str | Path, sketch: Sketch) -> None:
    write_jsonl(path, [sketch_to_record(sketch)])


def read_sketch(path: str | Path) -> Sketch:
    records = list(read_jsonl(path))
    if len(records) != 1:
        raise InkValidationError(
            f"{path}: expected a single sketch record, found {len(records)}")
    return sketch_from_record(records[0])


__all__ = [
    "InkPoint", "Stroke", "Primitive", "Sketch", "Raster",
    "InkValidationError", "LayoutValidationError",
    "stroke_bbox", "strokes_bbox", "render_sketch_svg", "rasterize_sketch",
    "primitive_to_record", "primitive_from_record",
    "sketch_to_record", "sketch_from_record",
    "write_jsonl", "read_jsonl", "write_primitives", "read_primitives",
    "write_sketch", "read_sketch",
]
