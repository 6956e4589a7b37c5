"""Primitive pool: feature extraction, standardization and candidate retrieval.

Every primitive is embedded in a per-kind feature space (images: width and
aspect ratio; texts: box width, box height and font size), standardized by
the pool's own statistics, and indexed in an exact k-d tree. Queries featurize
a layout asset the same way and return the nearest primitives by euclidean
distance, with ties broken by primitive id so results are reproducible.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .ink import Primitive
from .kdtree import KDTree
from .layout import Asset, Kind

log = logging.getLogger(__name__)


class StoreError(ValueError):
    pass


FEATURE_NAMES: dict[Kind, tuple[str, ...]] = {
    Kind.IMAGE: ("width", "aspect"),
    Kind.TEXT: ("width", "height", "font_size"),
}


@dataclass(frozen=True)
class StandardizationStats:
    """Per-dimension mean and standard deviation of one kind's pool."""

    mean: tuple[float, ...]
    stddev: tuple[float, ...]

    def standardize(self, raw: Sequence[float]) -> tuple[float, ...]:
        return tuple((v - m) / s
                     for v, m, s in zip(raw, self.mean, self.stddev))


def primitive_features(primitive: Primitive) -> tuple[float, ...]:
    """Raw (unstandardized) features of a pool primitive."""
    if primitive.kind is Kind.IMAGE:
        return (primitive.source_width, primitive.source_aspect)
    return (primitive.source_width, primitive.source_height,
            primitive.source_font_size or 0.0)


def asset_features(asset: Asset) -> tuple[float, ...]:
    """Raw features of a layout asset, matching primitive_features per kind.

    Text assets without a declared font size fall back to the box height,
    the closest always-available proxy.
    """
    b = asset.bbox
    if asset.kind is Kind.IMAGE:
        if b.height <= 0:
            raise StoreError(
                f"cannot featurize image asset {asset.name!r} with zero height")
        raw: tuple[float, ...] = (b.width, b.width / b.height)
    else:
        font = asset.font_size if asset.font_size is not None else b.height
        raw = (b.width, b.height, font)
    for v in raw:
        if not math.isfinite(v):
            raise StoreError(f"non-finite feature for asset {asset.name!r}")
    return raw


def compute_stats(features: Sequence[Sequence[float]]) -> StandardizationStats:
    """Population mean/stddev; zero-spread dimensions fall back to stddev 1."""
    n = len(features)
    dims = len(features[0])
    mean = tuple(sum(f[d] for f in features) / n for d in range(dims))
    stddev = []
    for d in range(dims):
        var = sum((f[d] - mean[d]) ** 2 for f in features) / n
        sd = math.sqrt(var)
        stddev.append(sd if sd > 0 else 1.0)
    return StandardizationStats(mean=mean, stddev=tuple(stddev))


def featurize_asset(asset: Asset, stats: StandardizationStats) -> tuple[float, ...]:
    """Standardized query point for an asset: (raw - mean) / stddev."""
    return stats.standardize(asset_features(asset))


class PrimitiveStore:
    """Immutable pool of primitives with per-kind stats and k-d trees."""

    def __init__(self, primitives: Mapping[str, Primitive],
                 stats: Mapping[Kind, StandardizationStats],
                 trees: Mapping[Kind, KDTree]) -> None:
        self._primitives = dict(primitives)
        self._stats = dict(stats)
        self._trees = dict(trees)

    def __len__(self) -> int:
        return len(self._primitives)

    def __contains__(self, primitive_id: str) -> bool:
        return primitive_id in self._primitives

    def get(self, primitive_id: str) -> Primitive:
        return self._primitives[primitive_id]

    def stats_for(self, kind: Kind) -> StandardizationStats:
        return self._stats[kind]

    def count(self, kind: Kind) -> int:
        return len(self._trees[kind]) if kind in self._trees else 0

    def ids(self, kind: Kind | None = None) -> tuple[str, ...]:
        if kind is None:
            return tuple(sorted(self._primitives))
        return tuple(sorted(pid for pid, p in self._primitives.items()
                            if p.kind is kind))

    def tree_for(self, kind: Kind) -> KDTree:
        return self._trees[kind]


def build_store(primitives: Iterable[Primitive],
                required_kinds: Sequence[Kind] = (Kind.TEXT, Kind.IMAGE),
                ) -> PrimitiveStore:
    """Index a primitive pool. Query results are independent of input order."""
    by_id: dict[str, Primitive] = {}
    for p in primitives:
        if p.id in by_id:
            raise StoreError(f"duplicate primitive id {p.id!r}")
        by_id[p.id] = p
    by_kind: dict[Kind, list[Primitive]] = {}
    for p in by_id.values():
        by_kind.setdefault(p.kind, []).append(p)
    for kind in required_kinds:
        if not by_kind.get(kind):
            raise StoreError(f"primitive pool has no {kind.value!r} primitives")

    stats: dict[Kind, StandardizationStats] = {}
    trees: dict[Kind, KDTree] = {}
    for kind, pool in by_kind.items():
        pool = sorted(pool, key=lambda p: p.id)
        kind_stats = compute_stats([primitive_features(p) for p in pool])
        points = [kind_stats.standardize(primitive_features(p)) for p in pool]
        stats[kind] = kind_stats
        trees[kind] = KDTree(points, [p.id for p in pool])
    return PrimitiveStore(by_id, stats, trees)


def query_candidates(store: PrimitiveStore, asset: Asset, k: int) -> list[str]:
    """Ids of the k nearest primitives of the asset's kind, closest first.

    A pool smaller than k returns every primitive of the kind (with a
    warning) rather than failing.
    """
    if k < 1:
        raise StoreError("k must be >= 1")
    available = store.count(asset.kind)
    if available == 0:
        raise StoreError(f"store has no {asset.kind.value!r} primitives")
    if available < k:
        log.warning("only %d %s primitives available for k=%d (%s)",
                    available, asset.kind.value, k, asset.name)
        k = available
    query = featurize_asset(asset, store.stats_for(asset.kind))
    return [pid for _, pid in store.tree_for(asset.kind).query(query, k)]


def select_primitive(store: PrimitiveStore, asset: Asset, k: int,
                     rng: random.Random) -> Primitive:
    """Uniform draw over the k nearest candidates; deterministic per rng state."""
    candidates = query_candidates(store, asset, k)
    return store.get(candidates[rng.randrange(len(candidates))])
