"""Layout model, document formats and SVG rendering."""

from __future__ import annotations

import random

import pytest

from sketchlayout.layout import (
    Asset, BBox, Canvas, Kind, Layout, LayoutParseError, LayoutValidationError,
    infer_kind, parse_layout_document, parse_layout_textproto,
    render_layout_svg, serialize_layout, serialize_layout_textproto,
)

from conftest import random_layout, random_textproto_layout

# Slide-style document with a full-bleed background and indexed elements,
# normalized to a 1000x1000 frame.
SLIDE_DOC = """
{
  "canvas": {"width": 1000, "height": 1000},
  "elements": [
    {"name": "background", "bbox": {"width": 1000, "height": 1000}},
    {"name": "image_0", "bbox": {"xmin": 18, "ymin": 891, "width": 86, "height": 91}},
    {"name": "page_text_0", "bbox": {"xmin": 282, "ymin": 92, "width": 233, "height": 237}},
    {"name": "page_text_4", "bbox": {"xmin": 471, "ymin": 504, "width": 286, "height": 245}},
    {"name": "page_text_3", "bbox": {"xmin": 51, "ymin": 512, "width": 387, "height": 258}},
    {"name": "page_text_1", "bbox": {"xmin": 535, "ymin": 94, "width": 393, "height": 278}},
    {"name": "other_text_2", "bbox": {"xmin": 732, "ymin": 893, "width": 242, "height": 71}}
  ]
}
"""


class TestTypes:
    def test_canvas_requires_positive_dims(self):
        with pytest.raises(LayoutValidationError):
            Canvas(0, 100)
        with pytest.raises(LayoutValidationError):
            Canvas(100, float("inf"))

    def test_bbox_rejects_negative_dims(self):
        with pytest.raises(LayoutValidationError):
            BBox(0, 0, -1, 5)

    def test_bbox_accessors(self):
        b = BBox(10, 20, 100, 50)
        assert (b.xmax, b.ymax) == (110, 70)
        assert b.center == (60, 45)
        assert b.area == 5000

    def test_text_asset_rejects_image_fields(self):
        with pytest.raises(LayoutValidationError):
            Asset(name="a", kind=Kind.TEXT, bbox=BBox(0, 0, 1, 1),
                  image_ref="x.png")

    def test_image_asset_rejects_text_fields(self):
        with pytest.raises(LayoutValidationError):
            Asset(name="a", kind=Kind.IMAGE, bbox=BBox(0, 0, 1, 1),
                  font_size=12.0)

    def test_layout_rejects_duplicate_names(self):
        a = Asset(name="text0", kind=Kind.TEXT, bbox=BBox(0, 0, 1, 1))
        with pytest.raises(LayoutValidationError, match="text0"):
            Layout(canvas=Canvas(10, 10), assets=(a, a))

    def test_out_of_canvas_flagging(self):
        layout = Layout(Canvas(100, 100), (
            Asset(name="in", kind=Kind.TEXT, bbox=BBox(10, 10, 20, 20)),
            Asset(name="out", kind=Kind.TEXT, bbox=BBox(90, 90, 20, 20)),
        ))
        assert layout.out_of_canvas() == ("out",)

    def test_infer_kind(self):
        assert infer_kind("background") is Kind.IMAGE
        assert infer_kind("image_0") is Kind.IMAGE
        assert infer_kind("figure3") is Kind.IMAGE
        assert infer_kind("page_text_0") is Kind.TEXT
        assert infer_kind("title4") is Kind.TEXT


class TestCanonicalDocument:
    def test_background_element_defaults_origin(self):
        doc = ('{"canvas": {"width": 1000, "height": 1000}, "elements": '
               '[{"name": "background", "bbox": {"width": 1000, "height": 1000}}]}')
        layout = parse_layout_document(doc)
        assert len(layout) == 1
        assert layout.assets[0].bbox == BBox(0, 0, 1000, 1000)
        assert layout.assets[0].kind is Kind.IMAGE

    def test_empty_elements(self):
        layout = parse_layout_document(
            '{"canvas": {"width": 10, "height": 10}, "elements": []}')
        assert len(layout) == 0

    def test_duplicate_names_rejected(self):
        doc = ('{"canvas": {"width": 10, "height": 10}, "elements": ['
               '{"name": "text0", "bbox": {"width": 1, "height": 1}},'
               '{"name": "text0", "bbox": {"width": 2, "height": 2}}]}')
        with pytest.raises(LayoutValidationError, match="text0"):
            parse_layout_document(doc)

    def test_malformed_json_reports_offset(self):
        with pytest.raises(LayoutParseError) as err:
            parse_layout_document('{"canvas": {"width": 10,,}}')
        assert err.value.offset > 0

    def test_unknown_element_field_rejected(self):
        doc = ('{"canvas": {"width": 10, "height": 10}, "elements": ['
               '{"name": "a", "bbox": {"width": 1, "height": 1}, "wat": 1}]}')
        with pytest.raises(LayoutValidationError, match="wat"):
            parse_layout_document(doc)

    def test_optional_fields_absent_not_defaulted(self):
        doc = ('{"canvas": {"width": 10, "height": 10}, "elements": ['
               '{"name": "text0", "kind": "text", '
               '"bbox": {"width": 1, "height": 1}}]}')
        asset = parse_layout_document(doc).assets[0]
        assert asset.text_content is None
        assert asset.font_size is None
        assert asset.label is None

    def test_slide_document_roundtrip_preserves_elements(self):
        layout = parse_layout_document(SLIDE_DOC)
        assert layout.names() == (
            "background", "image_0", "page_text_0", "page_text_4",
            "page_text_3", "page_text_1", "other_text_2")
        again = parse_layout_document(serialize_layout(layout))
        assert again == layout

    def test_element_count_always_preserved(self):
        rng = random.Random(5)
        for _ in range(50):
            layout = random_layout(rng)
            again = parse_layout_document(serialize_layout(layout))
            assert len(again) == len(layout)

    def test_roundtrip_identity_random_layouts(self):
        rng = random.Random(6)
        for _ in range(200):
            layout = random_layout(rng)
            assert parse_layout_document(serialize_layout(layout)) == layout


class TestTextProto:
    def test_minimal_record(self):
        layout = parse_layout_textproto(
            'elements { name: "a" bbox { xmin: 0 ymin: 0 width: 10 height: 10 } }')
        assert len(layout) == 1
        assert layout.assets[0].name == "a"
        assert layout.assets[0].bbox == BBox(0, 0, 10, 10)

    def test_whitespace_insensitive(self):
        one_line = 'elements{name:"a" bbox{xmin:1 ymin:2 width:3 height:4}}'
        multi = 'elements {\n  name: "a"\n  bbox {\n    xmin: 1 ymin: 2\n    width: 3 height: 4\n  }\n}\n'
        assert parse_layout_textproto(one_line) == parse_layout_textproto(multi)

    def test_unknown_field_rejected(self):
        with pytest.raises(LayoutParseError, match="color"):
            parse_layout_textproto(
                'elements { name: "a" color: 3 bbox { width: 1 height: 1 } }')

    def test_missing_bbox_rejected(self):
        with pytest.raises(LayoutValidationError, match="bbox"):
            parse_layout_textproto('elements { name: "a" }')

    def test_negative_width_rejected(self):
        with pytest.raises(LayoutValidationError):
            parse_layout_textproto(
                'elements { name: "a" bbox { xmin: 0 ymin: 0 width: -1 height: 1 } }')

    def test_roundtrip_identity_random_layouts(self):
        rng = random.Random(7)
        for _ in range(200):
            layout = random_textproto_layout(rng)
            data = serialize_layout_textproto(layout)
            assert parse_layout_textproto(data, canvas=layout.canvas) == layout

    def test_quoted_name_escapes(self):
        layout = Layout(Canvas(10, 10), (
            Asset(name='we"ird\\name', kind=Kind.TEXT, bbox=BBox(0, 0, 1, 1)),))
        again = parse_layout_textproto(serialize_layout_textproto(layout),
                                       canvas=layout.canvas)
        assert again.assets[0].name == 'we"ird\\name'


class TestSvgRender:
    def test_empty_layout_has_no_shapes(self):
        svg = render_layout_svg(Layout(Canvas(640, 480))).decode()
        assert 'viewBox="0 0 640 480"' in svg
        assert "<rect" not in svg

    def test_single_asset_rect_position(self):
        layout = Layout(Canvas(100, 100), (
            Asset(name="text0", kind=Kind.TEXT, bbox=BBox(5, 7, 30, 10)),))
        svg = render_layout_svg(layout).decode()
        assert svg.count("<rect") == 1
        assert 'x="5" y="7" width="30" height="10"' in svg
        assert 'data-name="text0"' in svg

    def test_deterministic_bytes(self):
        rng = random.Random(8)
        layout = random_layout(rng, min_assets=3)
        assert render_layout_svg(layout) == render_layout_svg(layout)

    def test_one_shape_per_asset(self):
        rng = random.Random(9)
        for _ in range(25):
            layout = random_layout(rng)
            svg = render_layout_svg(layout).decode()
            assert svg.count("<rect") == len(layout)
