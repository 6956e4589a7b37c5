"""sketchlayout: wireframe-sketch/layout toolkit.

Composes synthetic whole-layout sketches from a small pool of hand-drawn
stroke primitives, parses and renders structured layout documents, scores
generated layouts against references (IoU, maximum-matching mIoU, content
ordering, alignment, overlap), recovers layouts from sketches with a
heuristic baseline, and runs the stroke-annotation collection service.
"""

from .layout import (Asset, BBox, Canvas, Kind, Layout, RenderStyle,
                     parse_layout_document, parse_layout_textproto,
                     render_layout_svg, serialize_layout)
from .ink import (InkPoint, Primitive, Raster, Sketch, Stroke,
                  rasterize_sketch, render_sketch_svg, stroke_bbox)
from .primitives import (PrimitiveStore, StandardizationStats, build_store,
                         featurize_asset, query_candidates, select_primitive)
from .synth import (SynthParams, compose_sketch, rescale_primitive,
                    sample_coverage_mask, synth_dataset)
from .metrics import (MetricsReport, alignment, cos_score, evaluate_corpus,
                      evaluate_pair, iou_boxes, iou_named, levenshtein,
                      max_matching, miou, overlap, reading_order)
from .recognize import (RecognizerParams, StrokeGroup, assign_assets,
                        classify_group, cluster_strokes, parse_sketch)

__version__ = "0.1.0"

__all__ = [
    "Asset", "BBox", "Canvas", "Kind", "Layout", "RenderStyle",
    "parse_layout_document", "parse_layout_textproto", "render_layout_svg",
    "serialize_layout",
    "InkPoint", "Primitive", "Raster", "Sketch", "Stroke",
    "rasterize_sketch", "render_sketch_svg", "stroke_bbox",
    "PrimitiveStore", "StandardizationStats", "build_store",
    "featurize_asset", "query_candidates", "select_primitive",
    "SynthParams", "compose_sketch", "rescale_primitive",
    "sample_coverage_mask", "synth_dataset",
    "MetricsReport", "alignment", "cos_score", "evaluate_corpus",
    "evaluate_pair", "iou_boxes", "iou_named", "levenshtein", "max_matching",
    "miou", "overlap", "reading_order",
    "RecognizerParams", "StrokeGroup", "assign_assets", "classify_group",
    "cluster_strokes", "parse_sketch",
    "__version__",
]
