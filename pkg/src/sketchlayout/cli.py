"""Command-line entry point.

Subcommands cover the whole pipeline: ``ingest`` (datasets to canonical
layouts), ``synth`` (layouts + primitives to sketches), ``render`` (layouts
or sketches to SVG/PGM), ``parse`` (sketches back to layouts), ``eval``
(prediction scoring) and ``serve`` (the annotation service).

Exit codes: 0 success, 1 runtime failure (one machine-readable error line on
stderr), 2 usage errors. All randomness is controlled by --seed; results go
to files, logs to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import ingest as ingest_mod
from . import service as service_mod
from .ink import rasterize_sketch, read_sketch, render_sketch_svg
from .layout import parse_layout_document, render_layout_svg, serialize_layout
from .metrics import evaluate_corpus, report_to_csv, write_report
from .primitives import build_store
from .recognize import RecognizerParams, parse_sketch
from .synth import SynthParams, synth_dataset
from . import ink as ink_mod

log = logging.getLogger(__name__)


def _effective_jobs(flag_value: int | None) -> int:
    # S2L_JOBS wins over the flag, which wins over available parallelism
    env = os.environ.get("S2L_JOBS")
    if env:
        return max(1, int(env))
    if flag_value is not None:
        return max(1, flag_value)
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketchlayout",
        description="Layout/sketch toolkit: synthesize, render, parse, evaluate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="convert a dataset to canonical layouts")
    p_ingest.add_argument("--dataset", required=True,
                          choices=["publaynet", "doclaynet", "slides"])
    p_ingest.add_argument("--annotations", required=True,
                          help="COCO json file, or a directory of slide records")
    p_ingest.add_argument("--out", required=True)
    p_ingest.add_argument("--split", default="train")
    p_ingest.add_argument("--content-sidecar", default=None)
    p_ingest.add_argument("--val-size", type=int, default=None,
                          help="subsample the split to N layouts (seeded)")
    p_ingest.add_argument("--seed", type=int, default=0)

    p_synth = sub.add_parser("synth", help="compose synthetic sketches")
    p_synth.add_argument("--layouts", required=True,
                         help="directory of canonical layout documents")
    p_synth.add_argument("--primitives", required=True,
                         help="primitive pool JSONL")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--k", type=int, default=10)
    p_synth.add_argument("--coverage", type=float, default=1.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--no-groups", action="store_true")
    p_synth.add_argument("--jobs", type=int, default=None)

    p_render = sub.add_parser("render", help="render a layout or sketch file")
    p_render.add_argument("--input", required=True,
                          help="canonical layout .json or sketch .jsonl")
    p_render.add_argument("--out", required=True)
    p_render.add_argument("--format", choices=["svg", "pgm"], default="svg")
    p_render.add_argument("--stroke-width", type=float, default=3.0)
    p_render.add_argument("--width", type=int, default=512,
                          help="output width for pgm rasterization")

    p_parse = sub.add_parser("parse", help="recover layouts from sketches")
    p_parse.add_argument("--sketches", required=True,
                         help="directory of sketch .jsonl files")
    p_parse.add_argument("--assets", required=True,
                         help="directory of canonical documents naming the assets")
    p_parse.add_argument("--out", required=True)
    p_parse.add_argument("--cluster-gap", type=float,
                         default=RecognizerParams().cluster_gap)

    p_eval = sub.add_parser("eval", help="score predictions against references")
    p_eval.add_argument("--pred", required=True)
    p_eval.add_argument("--ref", required=True)
    p_eval.add_argument("--out", required=True, help="report JSONL path")
    p_eval.add_argument("--csv", default=None)

    p_serve = sub.add_parser("serve", help="run the annotation service")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--data-dir", required=True)
    p_serve.add_argument("--tasks", default=None, help="tasks JSONL")
    p_serve.add_argument("--ui-dir", default=None,
                         help="directory with the built annotation UI")

    return parser


def cmd_ingest(args: argparse.Namespace) -> int:
    out = Path(args.out)
    sidecar = (ingest_mod.load_content_sidecar(args.content_sidecar)
               if args.content_sidecar else None)
    if args.dataset == "slides":
        pairs = ingest_mod.load_slides(args.annotations)
    else:
        category_map = ingest_mod.CATEGORY_MAPS[args.dataset]
        pairs = ingest_mod.load_coco(args.annotations, category_map, sidecar)
    ids = ingest_mod.collect_layouts(pairs, out / "layouts")
    seed = None
    if args.val_size is not None:
        ids = ingest_mod.subsample_ids(ids, args.val_size, args.seed)
        seed = args.seed
    manifest = ingest_mod.DatasetManifest(
        dataset=args.dataset, split=args.split, ids=tuple(ids), seed=seed)
    ingest_mod.write_manifest(out / f"manifest-{args.split}.txt", manifest)
    log.info("ingested %d layouts into %s", manifest.count, out)
    return 0


def _load_layout_dir(directory: str | Path) -> list[tuple[str, "object"]]:
    pairs = []
    for path in sorted(Path(directory).glob("*.json")):
        pairs.append((path.stem, parse_layout_document(path.read_bytes())))
    return pairs


def cmd_synth(args: argparse.Namespace) -> int:
    store = build_store(ink_mod.read_primitives(args.primitives))
    params = SynthParams(k=args.k, coverage=args.coverage, seed=args.seed,
                         include_groups=not args.no_groups)
    layouts = _load_layout_dir(args.layouts)
    summary = synth_dataset(layouts, store, params, args.out,
                            jobs=_effective_jobs(args.jobs))
    summary_path = Path(args.out) / "summary.json"
    summary_path.write_text(json.dumps(summary.as_dict(), indent=2) + "\n",
                            encoding="utf-8")
    log.info("synth: %d written, %d skipped, %d failed",
             summary.written, summary.skipped, summary.failed)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    source = Path(args.input)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if source.suffix == ".jsonl":
        sketch = read_sketch(source)
        if args.format == "svg":
            out.write_bytes(render_sketch_svg(sketch, args.stroke_width))
        else:
            raster = rasterize_sketch(sketch, args.width,
                                      max(1, round(args.stroke_width)))
            out.write_bytes(raster.to_pgm())
    else:
        layout = parse_layout_document(source.read_bytes())
        if args.format != "svg":
            raise ValueError("pgm rendering applies to sketches only")
        out.write_bytes(render_layout_svg(layout))
    return 0


def cmd_parse(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params = RecognizerParams(cluster_gap=args.cluster_gap)
    count = 0
    for sketch_path in sorted(Path(args.sketches).glob("*.jsonl")):
        if sketch_path.name == "summary.json":
            continue
        asset_doc = Path(args.assets) / f"{sketch_path.stem}.json"
        if not asset_doc.exists():
            log.warning("no asset document for %s; skipped", sketch_path.stem)
            continue
        sketch = read_sketch(sketch_path)
        reference = parse_layout_document(asset_doc.read_bytes())
        result = parse_sketch(sketch, reference.assets, params)
        (out / f"{sketch_path.stem}.json").write_bytes(
            serialize_layout(result.layout))
        count += 1
    log.info("parsed %d sketches into %s", count, out)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    ref_dir = Path(args.ref)
    pred_dir = Path(args.pred)
    pairs = []
    for ref_path in sorted(ref_dir.glob("*.json")):
        ref = parse_layout_document(ref_path.read_bytes())
        pred_path = pred_dir / ref_path.name
        pred = (parse_layout_document(pred_path.read_bytes())
                if pred_path.exists() else None)
        pairs.append((ref_path.stem, pred, ref))
    report = evaluate_corpus(pairs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_report(report, out)
    if args.csv:
        Path(args.csv).write_text(report_to_csv(report), encoding="utf-8")
    log.info("evaluated %d samples", report.count)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    service_mod.serve_forever(args.data_dir, args.tasks, args.port, args.ui_dir)
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "synth": cmd_synth,
    "render": cmd_render,
    "parse": cmd_parse,
    "eval": cmd_eval,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:
        print(json.dumps({"error": str(exc), "command": args.command}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
