"""Layout data model, document formats and SVG rendering.

A layout is a canvas plus an ordered list of named assets (text blocks and
images), each with a bounding box in top-left-origin pixel coordinates.
Two interchange formats are supported:

* the canonical JSON document (``{"canvas": ..., "elements": [...]}``), and
* a line-oriented textual record format (``elements { name: ... bbox { ... } }``)
  as emitted by structured-output layout generators.

All types are immutable after construction; parsers, serializers and the
renderer are pure functions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Sequence


class LayoutParseError(ValueError):
    """Malformed document. ``offset`` is the byte position of the failure."""

    def __init__(self, message: str, offset: int = 0) -> None:
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class LayoutValidationError(ValueError):
    """Structurally well-formed input that violates a layout invariant."""


class Kind(str, Enum):
    TEXT = "text"
    IMAGE = "image"


# Base labels treated as image-like when a document does not declare a kind.
_IMAGE_LABELS = frozenset(
    {"image", "img", "figure", "fig", "picture", "photo", "background",
     "table", "chart", "logo", "formula"}
)


def strip_index(name: str) -> str:
    """Base label of an indexed asset name: ``page_text_0`` -> ``page_text``."""
    base = name.rstrip("0123456789")
    return base.rstrip("_ ").lower()


def infer_kind(name: str, label: str | None = None) -> Kind:
    """Guess an asset kind from its label (or name) for documents that omit it."""
    base = strip_index(label if label is not None else name)
    for token in _IMAGE_LABELS:
        if base == token or base.endswith("_" + token) or base.endswith(" " + token):
            return Kind.IMAGE
    return Kind.TEXT


def _require_finite(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise LayoutValidationError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Canvas:
    width: float
    height: float

    def __post_init__(self) -> None:
        for dim, val in (("width", self.width), ("height", self.height)):
            val = _require_finite(val, f"canvas {dim}")
            if val <= 0:
                raise LayoutValidationError(f"canvas {dim} must be > 0, got {val}")
            object.__setattr__(self, dim, val)

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box; y grows downward from the top-left origin."""

    xmin: float
    ymin: float
    width: float
    height: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "xmin", _require_finite(self.xmin, "bbox xmin"))
        object.__setattr__(self, "ymin", _require_finite(self.ymin, "bbox ymin"))
        for dim, val in (("width", self.width), ("height", self.height)):
            val = _require_finite(val, f"bbox {dim}")
            if val < 0:
                raise LayoutValidationError(f"bbox {dim} must be >= 0, got {val}")
            object.__setattr__(self, dim, val)

    @property
    def xmax(self) -> float:
        return self.xmin + self.width

    @property
    def ymax(self) -> float:
        return self.ymin + self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.xmin + self.width / 2.0, self.ymin + self.height / 2.0)

    @property
    def area(self) -> float:
        return self.width * self.height

    def scaled(self, sx: float, sy: float) -> "BBox":
        return BBox(self.xmin * sx, self.ymin * sy, self.width * sx, self.height * sy)

    def inflated(self, fraction: float) -> "BBox":
        """Box grown by ``fraction`` of its own width/height on every side."""
        dx = self.width * fraction
        dy = self.height * fraction
        return BBox(self.xmin - dx, self.ymin - dy,
                    self.width + 2 * dx, self.height + 2 * dy)

    def contains_point(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def union(self, other: "BBox") -> "BBox":
        return bbox_from_extremes(
            min(self.xmin, other.xmin), min(self.ymin, other.ymin),
            max(self.xmax, other.xmax), max(self.ymax, other.ymax))


def _covering_span(lo: float, hi: float) -> float:
    # hi - lo can round down so that lo + span < hi; nudge the span up until
    # the reconstructed upper edge truly covers hi.
    span = hi - lo
    while lo + span < hi:
        span = math.nextafter(span, math.inf)
    return span


def bbox_from_extremes(x0: float, y0: float, x1: float, y1: float) -> "BBox":
    """Box from corner extremes whose xmax/ymax are guaranteed >= x1/y1."""
    return BBox(x0, y0, _covering_span(x0, x1), _covering_span(y0, y1))


@dataclass(frozen=True)
class Asset:
    """One layout element. Content fields are optional and kind-specific."""

    name: str
    kind: Kind
    bbox: BBox
    label: str | None = None
    text_content: str | None = None
    image_ref: str | None = None
    font_size: float | None = None
    intrinsic_size: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise LayoutValidationError("asset name must be non-empty")
        if self.kind is Kind.TEXT:
            if self.image_ref is not None or self.intrinsic_size is not None:
                raise LayoutValidationError(
                    f"text asset {self.name!r} cannot carry image fields")
            if self.font_size is not None and not self.font_size > 0:
                raise LayoutValidationError(
                    f"font_size of {self.name!r} must be > 0, got {self.font_size}")
        else:
            if self.text_content is not None or self.font_size is not None:
                raise LayoutValidationError(
                    f"image asset {self.name!r} cannot carry text fields")
        if self.intrinsic_size is not None:
            w, h = self.intrinsic_size
            object.__setattr__(self, "intrinsic_size",
                               (_require_finite(w, "intrinsic width"),
                                _require_finite(h, "intrinsic height")))

    @property
    def category(self) -> str:
        """Effective category label: explicit label, else derived from the name."""
        return self.label if self.label is not None else strip_index(self.name)


@dataclass(frozen=True)
class Layout:
    canvas: Canvas
    assets: tuple[Asset, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "assets", tuple(self.assets))
        seen: set[str] = set()
        for asset in self.assets:
            if asset.name in seen:
                raise LayoutValidationError(f"duplicate asset name {asset.name!r}")
            seen.add(asset.name)

    def __len__(self) -> int:
        return len(self.assets)

    def __iter__(self) -> Iterator[Asset]:
        return iter(self.assets)

    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.assets)

    def get(self, name: str) -> Asset | None:
        for asset in self.assets:
            if asset.name == name:
                return asset
        return None

    def out_of_canvas(self) -> tuple[str, ...]:
        """Names of assets whose boxes poke outside the canvas (legal, flagged)."""
        flagged = []
        for a in self.assets:
            b = a.bbox
            if b.xmin < 0 or b.ymin < 0 or b.xmax > self.canvas.width \
                    or b.ymax > self.canvas.height:
                flagged.append(a.name)
        return tuple(flagged)


# --------------------------------------------------------------------------
# Canonical JSON document
# --------------------------------------------------------------------------

def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def _parse_bbox(obj: Mapping, where: str) -> BBox:
    if not isinstance(obj, Mapping):
        raise LayoutValidationError(f"{where}: bbox must be an object")
    known = {"xmin", "ymin", "width", "height"}
    unknown = set(obj) - known
    if unknown:
        raise LayoutValidationError(f"{where}: unknown bbox fields {sorted(unknown)}")
    for dim in ("width", "height"):
        if dim not in obj:
            raise LayoutValidationError(f"{where}: bbox missing {dim!r}")
    # xmin/ymin default to 0 (full-bleed elements omit them).
    return BBox(float(obj.get("xmin", 0)), float(obj.get("ymin", 0)),
                float(obj["width"]), float(obj["height"]))


_ELEMENT_FIELDS = {
    "name", "kind", "label", "bbox", "text_content", "image_ref",
    "font_size", "intrinsic_width", "intrinsic_height",
}


def _parse_element(obj: Mapping, index: int) -> Asset:
    where = f"elements[{index}]"
    if not isinstance(obj, Mapping):
        raise LayoutValidationError(f"{where}: element must be an object")
    unknown = set(obj) - _ELEMENT_FIELDS
    if unknown:
        raise LayoutValidationError(f"{where}: unknown fields {sorted(unknown)}")
    if "name" not in obj or not isinstance(obj["name"], str):
        raise LayoutValidationError(f"{where}: missing or non-string 'name'")
    if "bbox" not in obj:
        raise LayoutValidationError(f"{where}: missing 'bbox'")
    name = obj["name"]
    label = obj.get("label")
    if "kind" in obj:
        try:
            kind = Kind(obj["kind"])
        except ValueError:
            raise LayoutValidationError(
                f"{where}: kind must be 'text' or 'image', got {obj['kind']!r}")
    else:
        kind = infer_kind(name, label)
    intrinsic = None
    if "intrinsic_width" in obj or "intrinsic_height" in obj:
        if "intrinsic_width" not in obj or "intrinsic_height" not in obj:
            raise LayoutValidationError(
                f"{where}: intrinsic_width and intrinsic_height come together")
        intrinsic = (float(obj["intrinsic_width"]), float(obj["intrinsic_height"]))
    font = obj.get("font_size")
    return Asset(
        name=name,
        kind=kind,
        bbox=_parse_bbox(obj["bbox"], where),
        label=label,
        text_content=obj.get("text_content"),
        image_ref=obj.get("image_ref"),
        font_size=float(font) if font is not None else None,
        intrinsic_size=intrinsic,
    )


def parse_layout_document(data: bytes | str) -> Layout:
    """Parse the canonical JSON layout document.

    Raises LayoutParseError (with byte offset) on malformed JSON and
    LayoutValidationError on schema or invariant violations.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LayoutParseError(exc.msg, _byte_offset(text, exc.pos)) from exc
    if not isinstance(doc, Mapping):
        raise LayoutValidationError("top-level document must be an object")
    unknown = set(doc) - {"canvas", "elements"}
    if unknown:
        raise LayoutValidationError(f"unknown top-level fields {sorted(unknown)}")
    canvas_obj = doc.get("canvas")
    if not isinstance(canvas_obj, Mapping) or \
            "width" not in canvas_obj or "height" not in canvas_obj:
        raise LayoutValidationError("document must declare canvas {width, height}")
    canvas = Canvas(float(canvas_obj["width"]), float(canvas_obj["height"]))
    elements = doc.get("elements", [])
    if not isinstance(elements, Sequence) or isinstance(elements, (str, bytes)):
        raise LayoutValidationError("'elements' must be a list")
    assets = [_parse_element(el, i) for i, el in enumerate(elements)]
    return Layout(canvas=canvas, assets=tuple(assets))


def _num(value: float) -> float | int:
    # Integral values serialize without a fraction; both parse back to the
    # same float, keeping round-trips exact.
    f = float(value)
    if f.is_integer() and abs(f) < 2**53:
        return int(f)
    return f


def _asset_to_obj(asset: Asset) -> dict:
    obj: dict = {"name": asset.name, "kind": asset.kind.value}
    if asset.label is not None:
        obj["label"] = asset.label
    bbox = {"xmin": _num(asset.bbox.xmin), "ymin": _num(asset.bbox.ymin),
            "width": _num(asset.bbox.width), "height": _num(asset.bbox.height)}
    obj["bbox"] = bbox
    if asset.text_content is not None:
        obj["text_content"] = asset.text_content
    if asset.image_ref is not None:
        obj["image_ref"] = asset.image_ref
    if asset.font_size is not None:
        obj["font_size"] = _num(asset.font_size)
    if asset.intrinsic_size is not None:
        obj["intrinsic_width"] = _num(asset.intrinsic_size[0])
        obj["intrinsic_height"] = _num(asset.intrinsic_size[1])
    return obj


def serialize_layout(layout: Layout, fmt: str = "canonical") -> bytes:
    """Serialize deterministically; output re-parses to an identical Layout.

    ``fmt`` is "canonical" (JSON document) or "textproto" (textual records;
    carries only names and boxes).
    """
    if fmt == "canonical":
        doc = {
            "canvas": {"width": _num(layout.canvas.width),
                       "height": _num(layout.canvas.height)},
            "elements": [_asset_to_obj(a) for a in layout.assets],
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if fmt == "textproto":
        return serialize_layout_textproto(layout)
    raise ValueError(f"unknown format {fmt!r}")


# --------------------------------------------------------------------------
# Textual record format ("elements { name: ... bbox { ... } }")
# --------------------------------------------------------------------------

def _fmt_number(value: float) -> str:
    f = float(value)
    if f.is_integer() and abs(f) < 2**53:
        return str(int(f))
    return repr(f)


def serialize_layout_textproto(layout: Layout) -> bytes:
    lines = []
    for asset in layout.assets:
        b = asset.bbox
        lines.append("elements {")
        lines.append(f'  name: "{_escape_string(asset.name)}"')
        lines.append(
            "  bbox { xmin: %s ymin: %s width: %s height: %s }"
            % (_fmt_number(b.xmin), _fmt_number(b.ymin),
               _fmt_number(b.width), _fmt_number(b.height)))
        lines.append("}")
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def _escape_string(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


class _Token:
    __slots__ = ("kind", "value", "offset")

    def __init__(self, kind: str, value: str, offset: int) -> None:
        self.kind = kind
        self.value = value
        self.offset = offset


def _tokenize_textproto(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if ch in "{}:":
            kinds = {"{": "lbrace", "}": "rbrace", ":": "colon"}
            tokens.append(_Token(kinds[ch], ch, start))
            i += 1
        elif ch == '"':
            i += 1
            out = []
            while i < n and text[i] != '"':
                if text[i] == "\\":
                    i += 1
                    if i >= n:
                        raise LayoutParseError("unterminated escape",
                                               _byte_offset(text, i))
                    esc = text[i]
                    out.append({"n": "\n", "t": "\t"}.get(esc, esc))
                else:
                    out.append(text[i])
                i += 1
            if i >= n:
                raise LayoutParseError("unterminated string",
                                       _byte_offset(text, start))
            i += 1
            tokens.append(_Token("string", "".join(out), start))
        elif ch.isalpha() or ch == "_":
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(_Token("ident", text[start:i], start))
        elif ch.isdigit() or ch in "+-.":
            while i < n and (text[i].isdigit() or text[i] in "+-.eE"):
                i += 1
            tokens.append(_Token("number", text[start:i], start))
        else:
            raise LayoutParseError(f"unexpected character {ch!r}",
                                   _byte_offset(text, start))
    return tokens


class _TextProtoParser:
    """Recursive-descent parser for the element-record grammar."""

    _BBOX_FIELDS = ("xmin", "ymin", "width", "height")

    def __init__(self, text: str) -> None:
        self._text = text
        self._tokens = _tokenize_textproto(text)
        self._pos = 0

    def _error(self, message: str, token: _Token | None = None) -> LayoutParseError:
        offset = len(self._text.encode("utf-8")) if token is None \
            else _byte_offset(self._text, token.offset)
        return LayoutParseError(message, offset)

    def _peek(self) -> _Token | None:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def _next(self, kind: str, what: str) -> _Token:
        tok = self._peek()
        if tok is None:
            raise self._error(f"expected {what}, found end of input")
        if tok.kind != kind:
            raise self._error(f"expected {what}, found {tok.value!r}", tok)
        self._pos += 1
        return tok

    def parse(self) -> list[tuple[str, BBox]]:
        records = []
        while self._peek() is not None:
            tok = self._next("ident", "'elements'")
            if tok.value != "elements":
                raise self._error(f"unknown field {tok.value!r}", tok)
            records.append(self._parse_element(tok))
        return records

    def _parse_element(self, opener: _Token) -> tuple[str, BBox]:
        self._next("lbrace", "'{'")
        name: str | None = None
        bbox: BBox | None = None
        while True:
            tok = self._peek()
            if tok is None:
                raise self._error("unterminated element record")
            if tok.kind == "rbrace":
                self._pos += 1
                break
            field_tok = self._next("ident", "field name")
            if field_tok.value == "name":
                if name is not None:
                    raise self._error("duplicate 'name' field", field_tok)
                self._next("colon", "':'")
                name = self._next("string", "quoted string").value
            elif field_tok.value == "bbox":
                if bbox is not None:
                    raise self._error("duplicate 'bbox' field", field_tok)
                bbox = self._parse_bbox()
            else:
                raise self._error(f"unknown field {field_tok.value!r}", field_tok)
        if name is None:
            raise LayoutValidationError("element record missing name")
        if bbox is None:
            raise LayoutValidationError(f"element {name!r} missing bbox")
        return name, bbox

    def _parse_bbox(self) -> BBox:
        self._next("lbrace", "'{'")
        values: dict[str, float] = {}
        while True:
            tok = self._peek()
            if tok is None:
                raise self._error("unterminated bbox record")
            if tok.kind == "rbrace":
                self._pos += 1
                break
            field_tok = self._next("ident", "bbox field")
            if field_tok.value not in self._BBOX_FIELDS:
                raise self._error(f"unknown field {field_tok.value!r}", field_tok)
            if field_tok.value in values:
                raise self._error(f"duplicate {field_tok.value!r}", field_tok)
            self._next("colon", "':'")
            num_tok = self._next("number", "number")
            try:
                values[field_tok.value] = float(num_tok.value)
            except ValueError:
                raise self._error(f"bad number {num_tok.value!r}", num_tok)
        for dim in ("width", "height"):
            if dim not in values:
                raise LayoutValidationError(f"bbox missing {dim!r}")
        return BBox(values.get("xmin", 0.0), values.get("ymin", 0.0),
                    values["width"], values["height"])


DEFAULT_TEXTPROTO_CANVAS = Canvas(1000.0, 1000.0)


def parse_layout_textproto(data: bytes | str, canvas: Canvas | None = None) -> Layout:
    """Parse the textual record format.

    The format carries no canvas; callers that know the target canvas pass it,
    otherwise the conventional 1000x1000 frame is assumed. Asset kinds are
    inferred from names.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    records = _TextProtoParser(text).parse()
    assets = tuple(
        Asset(name=name, kind=infer_kind(name), bbox=bbox)
        for name, bbox in records
    )
    return Layout(canvas=canvas if canvas is not None else DEFAULT_TEXTPROTO_CANVAS,
                  assets=assets)


# --------------------------------------------------------------------------
# SVG rendering
# --------------------------------------------------------------------------

_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)


@dataclass(frozen=True)
class RenderStyle:
    """Colors for layout rendering. Label colors win over kind colors."""

    label_colors: Mapping[str, str] = field(default_factory=dict)
    kind_colors: Mapping[str, str] = field(
        default_factory=lambda: {"text": "#9ecae9", "image": "#ffbe7d"})
    fill_opacity: float = 0.55
    stroke: str = "#333333"

    def color_for(self, asset: Asset) -> str:
        if asset.category in self.label_colors:
            return self.label_colors[asset.category]
        return self.kind_colors.get(asset.kind.value, "#cccccc")


def auto_style(layout: Layout) -> RenderStyle:
    """Style assigning each distinct category a stable palette color."""
    labels = sorted({a.category for a in layout.assets})
    return RenderStyle(label_colors={
        label: _PALETTE[i % len(_PALETTE)] for i, label in enumerate(labels)
    })


def render_layout_svg(layout: Layout, style: RenderStyle | None = None) -> bytes:
    """Render one rectangle per asset. Equal inputs yield identical bytes."""
    style = style if style is not None else RenderStyle()
    w = _fmt_number(layout.canvas.width)
    h = _fmt_number(layout.canvas.height)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    for asset in layout.assets:
        b = asset.bbox
        lines.append(
            '  <rect data-name="%s" x="%s" y="%s" width="%s" height="%s" '
            'fill="%s" fill-opacity="%s" stroke="%s"/>'
            % (_escape_xml(asset.name), _fmt_number(b.xmin), _fmt_number(b.ymin),
               _fmt_number(b.width), _fmt_number(b.height),
               style.color_for(asset), _fmt_number(style.fill_opacity),
               style.stroke))
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _escape_xml(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))
