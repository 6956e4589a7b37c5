"""Dataset adapters: COCO-style page annotations and per-slide records.

Both adapters emit (id, Layout) pairs in a deterministic order with bbox
geometry copied verbatim from the source annotations. Asset names follow the
"<label><running index>" convention (text0, text1, figure0, ...). Text
content and font sizes are never computed here; they are merged from sidecar
records when provided.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .ink import read_jsonl
from .layout import (Asset, BBox, Canvas, Kind, Layout, LayoutValidationError,
                     parse_layout_document)

log = logging.getLogger(__name__)


class IngestError(ValueError):
    pass


# Category name -> (kind, label). Text-like classes take line primitives,
# picture-like classes (figures, tables, formulas) take crossed-box primitives.
PUBLAYNET_CATEGORIES: dict[str, tuple[Kind, str]] = {
    "text": (Kind.TEXT, "text"),
    "title": (Kind.TEXT, "title"),
    "list": (Kind.TEXT, "list"),
    "table": (Kind.IMAGE, "table"),
    "figure": (Kind.IMAGE, "figure"),
}

DOCLAYNET_CATEGORIES: dict[str, tuple[Kind, str]] = {
    "caption": (Kind.TEXT, "caption"),
    "footnote": (Kind.TEXT, "footnote"),
    "formula": (Kind.IMAGE, "formula"),
    "list-item": (Kind.TEXT, "list-item"),
    "page-footer": (Kind.TEXT, "page-footer"),
    "page-header": (Kind.TEXT, "page-header"),
    "picture": (Kind.IMAGE, "picture"),
    "section-header": (Kind.TEXT, "section-header"),
    "table": (Kind.IMAGE, "table"),
    "text": (Kind.TEXT, "text"),
    "title": (Kind.TEXT, "title"),
}

CATEGORY_MAPS = {
    "publaynet": PUBLAYNET_CATEGORIES,
    "doclaynet": DOCLAYNET_CATEGORIES,
}


@dataclass(frozen=True)
class DatasetManifest:
    dataset: str
    split: str
    ids: tuple[str, ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        if len(set(self.ids)) != len(self.ids):
            raise IngestError("manifest ids must be unique")

    @property
    def count(self) -> int:
        return len(self.ids)


@dataclass
class ContentRecord:
    text_content: str | None = None
    font_size: float | None = None


def load_content_sidecar(path: str | Path) -> dict[tuple[str, str], ContentRecord]:
    """Sidecar line records: {"id": ..., "asset": ..., text_content?, font_size?}."""
    sidecar: dict[tuple[str, str], ContentRecord] = {}
    for record in read_jsonl(path):
        key = (str(record["id"]), str(record["asset"]))
        sidecar[key] = ContentRecord(
            text_content=record.get("text_content"),
            font_size=record.get("font_size"),
        )
    return sidecar


def _asset_name(label: str, counters: dict[str, int]) -> str:
    index = counters.get(label, 0)
    counters[label] = index + 1
    return f"{label}{index}"


def load_coco(annotation_path: str | Path,
              category_map: Mapping[str, tuple[Kind, str]],
              content_sidecar: Mapping[tuple[str, str], ContentRecord] | None = None,
              ) -> Iterator[tuple[str, Layout]]:
    """One Layout per page image, ordered by image id.

    Unknown category ids fail the whole load; annotations pointing at a
    missing image record are skipped with a warning.
    """
    with Path(annotation_path).open("r", encoding="utf-8") as fh:
        doc = json.load(fh)
    categories: dict[int, tuple[Kind, str]] = {}
    for cat in doc.get("categories", []):
        name = str(cat["name"]).lower()
        if name not in category_map:
            raise IngestError(f"category {cat['name']!r} missing from category map")
        categories[int(cat["id"])] = category_map[name]

    images: dict[int, Mapping] = {int(im["id"]): im for im in doc.get("images", [])}
    by_image: dict[int, list[Mapping]] = {}
    unknown_categories: set[int] = set()
    for ann in doc.get("annotations", []):
        image_id = int(ann["image_id"])
        if int(ann["category_id"]) not in categories:
            unknown_categories.add(int(ann["category_id"]))
            continue
        if image_id not in images:
            log.warning("annotation %s references missing image %d; skipped",
                        ann.get("id"), image_id)
            continue
        by_image.setdefault(image_id, []).append(ann)
    if unknown_categories:
        raise IngestError(
            f"unknown category ids in annotations: {sorted(unknown_categories)}")

    for image_id in sorted(images):
        image = images[image_id]
        layout_id = Path(str(image.get("file_name", image_id))).stem
        canvas = Canvas(float(image["width"]), float(image["height"]))
        counters: dict[str, int] = {}
        assets = []
        annotations = sorted(by_image.get(image_id, ()),
                             key=lambda a: int(a.get("id", 0)))
        for ann in annotations:
            kind, label = categories[int(ann["category_id"])]
            x, y, w, h = (float(v) for v in ann["bbox"])
            name = _asset_name(label, counters)
            content = ContentRecord()
            if content_sidecar is not None:
                content = content_sidecar.get((layout_id, name), content)
            assets.append(Asset(
                name=name, kind=kind, bbox=BBox(x, y, w, h), label=label,
                text_content=content.text_content if kind is Kind.TEXT else None,
                font_size=content.font_size if kind is Kind.TEXT else None,
            ))
        yield layout_id, Layout(canvas=canvas, assets=tuple(assets))


def load_slides(annotation_dir: str | Path,
                errors: list[tuple[str, str]] | None = None,
                ) -> Iterator[tuple[str, Layout]]:
    """One Layout per slide record, background asset first.

    Slides are canonical layout documents, one *.json per slide; a full-canvas
    background image asset is prepended when the record lacks one. Malformed
    records are skipped with a warning (and collected into ``errors`` when a
    list is passed).
    """
    directory = Path(annotation_dir)
    for path in sorted(directory.glob("*.json")):
        try:
            layout = parse_layout_document(path.read_bytes())
        except (ValueError, LayoutValidationError) as exc:
            log.warning("skipping malformed slide record %s: %s", path.name, exc)
            if errors is not None:
                errors.append((path.stem, str(exc)))
            continue
        if layout.get("background") is None:
            background = Asset(
                name="background", kind=Kind.IMAGE, label="background",
                bbox=BBox(0.0, 0.0, layout.canvas.width, layout.canvas.height))
            layout = Layout(canvas=layout.canvas,
                            assets=(background, *layout.assets))
        else:
            assets = sorted(layout.assets,
                            key=lambda a: 0 if a.name == "background" else 1)
            layout = Layout(canvas=layout.canvas, assets=tuple(assets))
        yield path.stem, layout


def subsample_ids(ids: Sequence[str], n: int, seed: int) -> list[str]:
    """Deterministic seeded sample of n ids (all of them when fewer exist)."""
    ordered = sorted(ids)
    if len(ordered) <= n:
        return ordered
    rng = random.Random(seed)
    return sorted(rng.sample(ordered, n))


def write_manifest(path: str | Path, manifest: DatasetManifest) -> None:
    """Header line then one id per line; identical runs write identical bytes."""
    with Path(path).open("w", encoding="utf-8") as fh:
        header = {"dataset": manifest.dataset, "split": manifest.split,
                  "count": manifest.count}
        if manifest.seed is not None:
            header["seed"] = manifest.seed
        fh.write(json.dumps(header) + "\n")
        for layout_id in manifest.ids:
            fh.write(layout_id + "\n")


def read_manifest(path: str | Path) -> DatasetManifest:
    with Path(path).open("r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        ids = tuple(line.strip() for line in fh if line.strip())
    manifest = DatasetManifest(dataset=header["dataset"], split=header["split"],
                               ids=ids, seed=header.get("seed"))
    if manifest.count != int(header["count"]):
        raise IngestError(
            f"manifest count {header['count']} does not match {manifest.count} ids")
    return manifest


def collect_layouts(pairs: Iterable[tuple[str, Layout]], out_dir: str | Path,
                    ) -> list[str]:
    """Write canonical documents for every pair; returns the ids in order."""
    from .layout import serialize_layout

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ids = []
    for layout_id, layout in pairs:
        (out / f"{layout_id}.json").write_bytes(serialize_layout(layout))
        ids.append(layout_id)
    return ids
