"""Shared fixtures and randomized-input helpers for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from sketchlayout.demo import make_demo_corpus, make_demo_pool
from sketchlayout.layout import Asset, BBox, Canvas, Kind, Layout
from sketchlayout.primitives import PrimitiveStore, build_store

REPO_ROOT = Path(__file__).resolve().parent.parent
TOY_DATA = REPO_ROOT / "data" / "toy"


@pytest.fixture(scope="session")
def demo_pool():
    return make_demo_pool(seed=7)


@pytest.fixture(scope="session")
def demo_store(demo_pool) -> PrimitiveStore:
    return build_store(demo_pool)


@pytest.fixture(scope="session")
def demo_corpus():
    return make_demo_corpus(seed=11, count=20)


@pytest.fixture(scope="session")
def toy_data_dir() -> Path:
    assert TOY_DATA.is_dir(), "bundled toy corpus missing; run scripts/gen_toy_data.py"
    return TOY_DATA


# --------------------------------------------------------------------------
# Random model generators (full variety, for round-trip and property tests)
# --------------------------------------------------------------------------

_LABELS = ("text", "title", "list", "figure", "picture", "table")


def random_bbox(rng: random.Random, canvas: Canvas,
                allow_overflow: bool = True) -> BBox:
    scale = 1.2 if allow_overflow else 1.0
    w = rng.uniform(0, canvas.width * 0.6)
    h = rng.uniform(0, canvas.height * 0.6)
    x = rng.uniform(-0.1 * canvas.width if allow_overflow else 0,
                    canvas.width * scale - w)
    y = rng.uniform(-0.1 * canvas.height if allow_overflow else 0,
                    canvas.height * scale - h)
    return BBox(round(x, 4), round(y, 4), round(w, 4), round(h, 4))


def random_asset(rng: random.Random, name: str, canvas: Canvas) -> Asset:
    label = rng.choice(_LABELS)
    kind = Kind.IMAGE if label in ("figure", "picture", "table") else Kind.TEXT
    bbox = random_bbox(rng, canvas)
    text_content = image_ref = None
    font_size = intrinsic = None
    if kind is Kind.TEXT:
        if rng.random() < 0.5:
            text_content = f"content {rng.randrange(1000)}"
        if rng.random() < 0.5:
            font_size = round(rng.uniform(6, 48), 2)
    else:
        if rng.random() < 0.5:
            image_ref = f"assets/img_{rng.randrange(1000)}.png"
        if rng.random() < 0.5:
            intrinsic = (float(rng.randrange(100, 2000)),
                         float(rng.randrange(100, 2000)))
    return Asset(name=name, kind=kind, bbox=bbox, label=label,
                 text_content=text_content, image_ref=image_ref,
                 font_size=font_size, intrinsic_size=intrinsic)


def random_layout(rng: random.Random, max_assets: int = 12,
                  min_assets: int = 0) -> Layout:
    canvas = Canvas(float(rng.randrange(200, 3000)),
                    float(rng.randrange(200, 3000)))
    count = rng.randint(min_assets, max_assets)
    assets = tuple(random_asset(rng, f"asset{i}", canvas) for i in range(count))
    return Layout(canvas=canvas, assets=assets)


def random_textproto_layout(rng: random.Random, max_assets: int = 10) -> Layout:
    """Layouts expressible in the textual record format: names and boxes only,
    with names whose inferred kind matches, so round-trips are exact."""
    canvas = Canvas(1000.0, 1000.0)
    assets = []
    for i in range(rng.randint(0, max_assets)):
        if rng.random() < 0.5:
            name, kind = f"text{i}", Kind.TEXT
        else:
            name, kind = f"figure{i}", Kind.IMAGE
        assets.append(Asset(name=name, kind=kind,
                            bbox=random_bbox(rng, canvas)))
    return Layout(canvas=canvas, assets=tuple(assets))


def random_named_pair(rng: random.Random, max_assets: int = 8
                      ) -> tuple[Layout, Layout]:
    """Two layouts over the same asset names (for dominance-style properties)."""
    canvas = Canvas(float(rng.randrange(500, 2000)),
                    float(rng.randrange(500, 2000)))
    count = rng.randint(1, max_assets)
    names = [f"asset{i}" for i in range(count)]
    def build() -> Layout:
        return Layout(canvas=canvas, assets=tuple(
            Asset(name=n, kind=Kind.TEXT, bbox=random_bbox(rng, canvas))
            for n in names))
    return build(), build()
