#!/usr/bin/env python3
"""Regenerate the bundled toy corpus under data/toy/.

Deterministic: running this script twice produces identical bytes. The
committed corpus feeds the CLI smoke tests and the acceptance suite, so
regenerate only when the demo generators change, and commit the result.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from sketchlayout.demo import make_demo_corpus, make_demo_pool  # noqa: E402
from sketchlayout.ink import write_primitives  # noqa: E402
from sketchlayout.layout import Kind, serialize_layout  # noqa: E402


def main() -> int:
    out = REPO / "data" / "toy"
    layouts_dir = out / "layouts"
    layouts_dir.mkdir(parents=True, exist_ok=True)

    pool = make_demo_pool(seed=7)
    write_primitives(out / "primitives.jsonl", pool)
    print(f"wrote {len(pool)} primitives")

    corpus = make_demo_corpus(seed=11, count=20)
    for layout_id, layout in corpus:
        (layouts_dir / f"{layout_id}.json").write_bytes(serialize_layout(layout))
    print(f"wrote {len(corpus)} layouts")

    tasks = []
    for i, primitive in enumerate(pool[:6]):
        target = {
            "kind": primitive.kind.value,
            "source_width": primitive.source_width,
            "source_height": primitive.source_height,
        }
        if primitive.kind is Kind.TEXT:
            target["source_font_size"] = primitive.source_font_size
        tasks.append({"id": f"prim_task_{i:03d}", "mode": "primitive",
                      "target": target})
    for layout_id, _ in corpus[:4]:
        tasks.append({"id": f"sketch_task_{layout_id}", "mode": "full_sketch",
                      "target": {"layout_id": layout_id}})
    with (out / "tasks.jsonl").open("w", encoding="utf-8") as fh:
        for task in tasks:
            fh.write(json.dumps(task) + "\n")
    print(f"wrote {len(tasks)} tasks")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
