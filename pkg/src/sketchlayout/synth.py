"""Synthetic sketch composition: one primitive per asset, rescaled into place.

For each asset of a layout (optionally subsampled by a per-asset coverage
draw), a primitive of the matching kind is picked among the k nearest in
feature space and its strokes are mapped affinely from the normalized frame
into the asset's box. All randomness is derived from (seed, asset name), so
one layout edit never reshuffles the other assets' choices, and a fixed seed
reproduces byte-identical sketch files.
"""

from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .ink import Primitive, Sketch, Stroke, sketch_to_record, write_jsonl
from .layout import Asset, BBox, Layout
from .primitives import PrimitiveStore, select_primitive

log = logging.getLogger(__name__)


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthParams:
    k: int = 10
    coverage: float = 1.0
    seed: int = 0
    include_groups: bool = True

    def __post_init__(self) -> None:
        if self.k < 1:
            raise SynthError(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.coverage <= 1.0:
            raise SynthError(f"coverage must be in [0, 1], got {self.coverage}")


def rescale_primitive(primitive: Primitive, target: BBox) -> list[Stroke]:
    """Map normalized strokes into the target box; timestamps are untouched."""
    if target.area <= 0:
        raise SynthError(f"target box must have positive area, got {target}")
    out = []
    for stroke in primitive.strokes:
        out.append(Stroke(tuple(
            type(p)(target.xmin + p.x * target.width,
                    target.ymin + p.y * target.height,
                    p.t)
            for p in stroke.points)))
    return out


def _derived_uniform(seed: int, asset_name: str, purpose: str) -> float:
    """Stable per-asset uniform in [0, 1), identical across platforms."""
    digest = hashlib.blake2b(
        f"{seed}:{purpose}:{asset_name}".encode("utf-8"),
        digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2.0**64


def _derived_seed(seed: int, asset_name: str, purpose: str) -> int:
    digest = hashlib.blake2b(
        f"{seed}:{purpose}:{asset_name}".encode("utf-8"),
        digest_size=8).digest()
    return int.from_bytes(digest, "big")


def sample_coverage_mask(assets: Sequence[Asset], coverage: float,
                         seed: int) -> set[str]:
    """Independent Bernoulli(coverage) inclusion per asset, keyed by name."""
    if not 0.0 <= coverage <= 1.0:
        raise SynthError(f"coverage must be in [0, 1], got {coverage}")
    return {
        asset.name for asset in assets
        if _derived_uniform(seed, asset.name, "coverage") < coverage
    }


def compose_sketch(layout: Layout, store: PrimitiveStore,
                   params: SynthParams) -> Sketch:
    """Compose a whole-layout sketch; fully determined by (layout, store, params)."""
    mask = sample_coverage_mask(layout.assets, params.coverage, params.seed)
    strokes: list[Stroke] = []
    groups: dict[str, tuple[int, ...]] = {}
    for asset in layout.assets:
        if asset.bbox.area <= 0:
            log.warning("skipping zero-area asset %r", asset.name)
            continue
        if asset.name not in mask:
            continue
        rng = random.Random(_derived_seed(params.seed, asset.name, "select"))
        primitive = select_primitive(store, asset, params.k, rng)
        start = len(strokes)
        strokes.extend(rescale_primitive(primitive, asset.bbox))
        groups[asset.name] = tuple(range(start, len(strokes)))
    return Sketch(
        canvas=layout.canvas,
        strokes=tuple(strokes),
        groups=groups if params.include_groups else None,
    )


@dataclass
class SynthSummary:
    written: int = 0
    skipped: int = 0
    failed: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "written": self.written,
            "skipped": self.skipped,
            "failed": self.failed,
            "failures": [{"id": i, "error": e} for i, e in self.failures],
        }


def synth_dataset(layouts: Iterable[tuple[str, Layout]], store: PrimitiveStore,
                  params: SynthParams, out_dir: str | Path,
                  jobs: int = 1) -> SynthSummary:
    """Write one sketch file per layout (<id>.jsonl) under out_dir.

    Existing outputs are skipped, so an interrupted run can resume. Per-layout
    failures are recorded in the summary and never abort the batch.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = SynthSummary()

    def run_one(layout_id: str, layout: Layout) -> str:
        path = out / f"{layout_id}.jsonl"
        if path.exists():
            return "skipped"
        sketch = compose_sketch(layout, store, params)
        write_jsonl(path, [sketch_to_record(sketch)])
        return "written"

    work = list(layouts)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = pool.map(
                lambda item: _safe_run(run_one, item), work)
    else:
        outcomes = (_safe_run(run_one, item) for item in work)

    for (layout_id, _), outcome in zip(work, outcomes):
        if outcome == "written":
            summary.written += 1
        elif outcome == "skipped":
            summary.skipped += 1
        else:
            summary.failed += 1
            summary.failures.append((layout_id, outcome[len("error:"):]))
            log.warning("synthesis failed for %r: %s", layout_id, outcome)
    return summary


def _safe_run(fn, item: tuple[str, Layout]) -> str:
    try:
        return fn(*item)
    except Exception as exc:  # per-layout isolation; the batch must survive
        return f"error:{exc}"
