"""Sketch-to-layout recovery: clustering, classification, assignment."""

from __future__ import annotations

import random

import pytest

from sketchlayout.demo import make_demo_layout
from sketchlayout.ink import InkPoint, Sketch, Stroke
from sketchlayout.layout import Asset, BBox, Canvas, Kind, Layout
from sketchlayout.metrics import miou
from sketchlayout.recognize import (
    IMAGE_LIKE, TEXT_LIKE, RecognizerParams, assign_assets, classify_group,
    cluster_strokes, parse_sketch,
)
from sketchlayout.synth import SynthParams, compose_sketch


def line(points):
    return Stroke(tuple(InkPoint(x, y, t) for x, y, t in points))


def crossed_box(x0, y0, w, h, t0=0.0):
    """Rectangle outline plus both diagonals, like an image primitive."""
    return [
        line([(x0, y0, t0), (x0 + w, y0, t0 + 1), (x0 + w, y0 + h, t0 + 2),
              (x0, y0 + h, t0 + 3), (x0, y0, t0 + 4)]),
        line([(x0, y0, t0 + 5), (x0 + w, y0 + h, t0 + 6)]),
        line([(x0 + w, y0, t0 + 7), (x0, y0 + h, t0 + 8)]),
    ]


def text_lines(x0, y0, w, h, lines_count=3, t0=0.0):
    strokes = []
    for i in range(lines_count):
        y = y0 if lines_count == 1 else y0 + h * i / (lines_count - 1)
        strokes.append(line([(x0, y, t0 + i), (x0 + w, y, t0 + i + 0.5)]))
    return strokes


class TestCluster:
    def test_empty_sketch(self):
        assert cluster_strokes(Sketch(canvas=Canvas(100, 100))) == []

    def test_single_stroke_single_group(self):
        sketch = Sketch(Canvas(100, 100), (line([(10, 10, 0), (20, 10, 1)]),))
        groups = cluster_strokes(sketch)
        assert len(groups) == 1
        assert groups[0].indices == (0,)

    def test_far_strokes_split(self):
        params = RecognizerParams(cluster_gap=0.05)
        sketch = Sketch(Canvas(100, 100), (
            line([(0, 0, 0), (10, 0, 1)]),
            line([(0, 50, 0), (10, 50, 1)]),
        ))
        groups = cluster_strokes(sketch, params)
        assert len(groups) == 2

    def test_near_strokes_merge(self):
        params = RecognizerParams(cluster_gap=0.05)
        # canvas diagonal ~141, threshold ~7.07; gap of 5 merges
        sketch = Sketch(Canvas(100, 100), (
            line([(0, 0, 0), (10, 0, 1)]),
            line([(0, 5, 0), (10, 5, 1)]),
        ))
        assert len(cluster_strokes(sketch, params)) == 1

    def test_every_stroke_in_exactly_one_group(self, demo_store, demo_corpus):
        for _, layout in demo_corpus[:5]:
            sketch = compose_sketch(layout, demo_store, SynthParams(seed=2))
            groups = cluster_strokes(sketch)
            seen = sorted(i for g in groups for i in g.indices)
            assert seen == list(range(len(sketch.strokes)))

    def test_recovers_composition_partition(self, demo_store):
        # calibrated on the demo corpus: splits are rare, merges absent
        rng = random.Random(2024)
        layouts = [make_demo_layout(rng) for _ in range(100)]
        exact = merges = 0
        for layout in layouts:
            sketch = compose_sketch(layout, demo_store,
                                    SynthParams(seed=42, coverage=1.0))
            want = {frozenset(v) for v in sketch.groups.values()}
            got = {frozenset(g.indices) for g in cluster_strokes(sketch)}
            exact += (want == got)
            merges += (len(got) < len(want))
        assert exact >= 85
        assert merges == 0


class TestClassify:
    def test_horizontal_line_is_text(self):
        cls, score = classify_group([line([(0, 10, 0), (50, 10, 1)])])
        assert cls == TEXT_LIKE
        assert score > 0.5

    def test_crossed_box_is_image(self):
        cls, score = classify_group(crossed_box(0, 0, 60, 40))
        assert cls == IMAGE_LIKE
        assert score > 0.0

    def test_flat_crossed_box_is_image(self):
        # extreme aspect: normalization keeps the diagonals at 45 degrees
        cls, _ = classify_group(crossed_box(0, 0, 200, 20))
        assert cls == IMAGE_LIKE

    def test_multiline_text(self):
        cls, _ = classify_group(text_lines(0, 0, 80, 30, lines_count=4))
        assert cls == TEXT_LIKE

    def test_pool_accuracy(self, demo_pool):
        correct = 0
        for primitive in demo_pool:
            want = TEXT_LIKE if primitive.kind is Kind.TEXT else IMAGE_LIKE
            got, _ = classify_group(primitive.strokes)
            correct += (got == want)
        assert correct / len(demo_pool) >= 0.95

    def test_empty_group_rejected(self):
        with pytest.raises(ValueError):
            classify_group([])


class TestAssign:
    def _asset(self, name, kind, box):
        return Asset(name=name, kind=kind, bbox=BBox(*box),
                     font_size=12.0 if kind is Kind.TEXT else None)

    def test_perfect_evidence_recovers_boxes(self):
        canvas = Canvas(200, 200)
        text_box = (10, 10, 100, 20)
        image_box = (10, 100, 80, 60)
        strokes = [*text_lines(*text_box, lines_count=3),
                   *crossed_box(*image_box)]
        sketch = Sketch(canvas, tuple(strokes))
        assets = [self._asset("text0", Kind.TEXT, text_box),
                  self._asset("figure0", Kind.IMAGE, image_box)]
        result = parse_sketch(sketch, assets)
        assert result.fallback_names == ()
        recovered = {a.name: a.bbox for a in result.layout.assets}
        assert miou(result.layout,
                    Layout(canvas, tuple(assets))) > 0.9
        assert recovered["figure0"].xmin == pytest.approx(10, abs=1)

    def test_zero_groups_all_fallback(self):
        canvas = Canvas(100, 100)
        assets = [self._asset("a", Kind.TEXT, (0, 0, 30, 10)),
                  self._asset("b", Kind.TEXT, (0, 20, 30, 10))]
        result = assign_assets([], assets, canvas)
        assert set(result.fallback_names) == {"a", "b"}
        assert len(result.layout) == 2

    def test_fallback_stacks_in_reading_order(self):
        canvas = Canvas(100, 100)
        assets = [self._asset("low", Kind.TEXT, (0, 50, 30, 10)),
                  self._asset("high", Kind.TEXT, (0, 5, 30, 10))]
        result = assign_assets([], assets, canvas)
        boxes = {a.name: a.bbox for a in result.layout.assets}
        assert result.fallback_names == ("high", "low")
        assert boxes["high"].ymin < boxes["low"].ymin

    def test_all_assets_preserved_exactly_once(self, demo_store, demo_corpus):
        for _, layout in demo_corpus[:6]:
            sketch = compose_sketch(layout, demo_store, SynthParams(seed=8))
            result = parse_sketch(sketch, layout.assets)
            assert sorted(result.layout.names()) == sorted(layout.names())

    def test_boxes_clamped_to_canvas(self, demo_store, demo_corpus):
        for _, layout in demo_corpus[:6]:
            sketch = compose_sketch(layout, demo_store, SynthParams(seed=8))
            result = parse_sketch(sketch, layout.assets)
            assert result.layout.out_of_canvas() == ()

    def test_content_fields_survive(self):
        canvas = Canvas(100, 100)
        asset = Asset(name="text0", kind=Kind.TEXT, bbox=BBox(0, 0, 50, 10),
                      text_content="hello", font_size=9.0)
        result = assign_assets([], [asset], canvas)
        out = result.layout.assets[0]
        assert out.text_content == "hello"
        assert out.font_size == 9.0


class TestRoundTrip:
    def test_determinism(self, demo_store, demo_corpus):
        _, layout = demo_corpus[0]
        sketch = compose_sketch(layout, demo_store, SynthParams(seed=21))
        a = parse_sketch(sketch, layout.assets)
        b = parse_sketch(sketch, layout.assets)
        assert a.layout == b.layout
        assert a.fallback_names == b.fallback_names

    def test_compose_then_parse_quality(self, demo_store):
        rng = random.Random(2024)
        layouts = [make_demo_layout(rng) for _ in range(100)]
        params = SynthParams(seed=42, k=10, coverage=1.0)
        good = 0
        for layout in layouts:
            sketch = compose_sketch(layout, demo_store, params)
            result = parse_sketch(sketch, layout.assets)
            if miou(result.layout, layout) >= 0.5:
                good += 1
        assert good >= 80
