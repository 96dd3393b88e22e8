"""Command line entry points: serve the board API, run pipelines offline,
inspect the layout variator, and run the evaluation harness. Everything
emits JSON.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .evalharness import (
    DEFAULT_MATCH_THRESHOLD,
    EvalReport,
    description_diversity,
    keyword_extraction_eval,
    load_manifest,
    recommendation_banding,
    render_report,
    report_metadata,
    write_report,
)
from .layout import VariatorParams, vary_arrangement
from .model import Arrangement, BBox, new_id
from .pipeline import (
    MemoryBlobs,
    PipelineConfig,
    extract_keywords_pipeline,
    merge_pipeline,
)
from .prompts import KeywordSet
from .providers import bundle_from_env, stub_bundle
from .service import BoardStore, ServiceConfig, create_app


def _make_bundle(name: str, seed: int):
    if name == "stub":
        return stub_bundle(seed=seed)
    if name == "env":
        return bundle_from_env()
    raise click.BadParameter(f"unknown bundle {name!r} (use 'stub' or 'env')")


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _boxes_from_json(raw) -> list[BBox]:
    boxes = []
    for entry in raw:
        if isinstance(entry, dict):
            boxes.append(BBox.from_dict(entry))
        else:
            boxes.append(BBox(*[float(v) for v in entry]))
    return boxes


@click.group()
def main() -> None:
    """Reference-recombination engine."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config: storage_dir, bundle, seed, host, port, max_upload_bytes.")
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
def serve(config_path, host, port) -> None:
    """Run the board service."""
    import uvicorn

    cfg = {}
    if config_path:
        cfg = json.loads(Path(config_path).read_text(encoding="utf-8"))
    store = BoardStore(cfg.get("storage_dir", "./recomb-data"))
    bundle = _make_bundle(cfg.get("bundle", "stub"), int(cfg.get("seed", 0)))
    service_config = ServiceConfig(
        max_upload_bytes=int(cfg.get("max_upload_bytes", 10 * 1024 * 1024)),
        pipeline=PipelineConfig(seed=int(cfg.get("seed", 0))),
    )
    app = create_app(store, bundle, service_config)
    uvicorn.run(app, host=host or cfg.get("host", "127.0.0.1"),
                port=port or int(cfg.get("port", 8000)))


@main.command()
@click.argument("image", type=click.Path(exists=True))
@click.option("--bundle", "bundle_name", default="stub", show_default=True)
@click.option("--seed", default=0, show_default=True)
def extract(image, bundle_name, seed) -> None:
    """Extract categorized keywords and an arrangement from a reference image."""
    bundle = _make_bundle(bundle_name, seed)
    result = extract_keywords_pipeline(
        bundle, Path(image).read_bytes(), PipelineConfig(seed=seed)
    )
    _echo_json(
        {
            "keywords": result.keywords.to_dict(),
            "arrangement": None if result.arrangement is None else result.arrangement.to_dict(),
            "degraded": result.degraded,
            "caption_failures": result.caption_failures,
        }
    )


@main.command()
@click.option("--keywords-file", type=click.Path(exists=True), required=True,
              help="JSON with subject_matter/action_pose/theme_mood lists and an optional arrangement.")
@click.option("--bundle", "bundle_name", default="stub", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", type=click.Path(), default=None,
              help="Write sketch PNGs here (defaults to no files, shas only).")
def merge(keywords_file, bundle_name, seed, out_dir) -> None:
    """Merge selected keywords into three recombination drafts."""
    bundle = _make_bundle(bundle_name, seed)
    spec = json.loads(Path(keywords_file).read_text(encoding="utf-8"))
    selected = KeywordSet.from_dict(spec)
    arrangement = None
    if spec.get("arrangement"):
        arr = dict(spec["arrangement"])
        arr.setdefault("id", new_id())
        arr.setdefault("source_image", "")
        arrangement = Arrangement.from_dict(arr)
    sink = MemoryBlobs()
    result = merge_pipeline(bundle, selected, arrangement, sink, PipelineConfig(seed=seed))
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for draft in result.drafts:
            for sha in draft.sketches:
                (out / f"{sha}.png").write_bytes(sink[sha])
    _echo_json(
        {
            "drafts": [d.to_dict() for d in result.drafts],
            "degraded": result.degraded,
            "dropped": result.dropped,
        }
    )


@main.group()
def layout() -> None:
    """Layout-engine debug tools."""


@layout.command()
@click.option("--boxes", required=True,
              help="JSON list of boxes, each [x, y, w, h] or {x, y, w, h} in fractions.")
@click.option("--n-objects", default=None, type=int)
@click.option("--seed", default=0, show_default=True)
@click.option("--jitter-px", default=50, show_default=True)
@click.option("--top-k", default=5, show_default=True)
@click.option("--json", "compact", is_flag=True, help="Compact single-line JSON.")
def vary(boxes, n_objects, seed, jitter_px, top_k, compact) -> None:
    """Emit ranked candidate layouts for an arrangement."""
    try:
        parsed = _boxes_from_json(json.loads(boxes))
        arrangement = Arrangement(id=new_id(), source_image="", boxes=tuple(parsed))
    except (ValueError, TypeError) as exc:
        raise click.BadParameter(str(exc)) from exc
    params = VariatorParams(jitter_px=jitter_px, top_k=top_k, rng_seed=seed)
    ranked = vary_arrangement(arrangement, n_objects or len(parsed), params)
    payload = {"layouts": [[b.to_dict() for b in cand] for cand in ranked]}
    if compact:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        _echo_json(payload)


@main.group(name="eval")
def eval_group() -> None:
    """Evaluation harness over an annotated manifest."""


_eval_options = [
    click.option("--manifest", type=click.Path(exists=True), required=True),
    click.option("--bundle", "bundle_name", default="stub", show_default=True),
    click.option("--seed", default=0, show_default=True),
    click.option("--out", type=click.Path(), default=None),
]


def _with_eval_options(fn):
    for opt in reversed(_eval_options):
        fn = opt(fn)
    return fn


def _finish_report(report: EvalReport, out) -> None:
    if out:
        write_report(report, out)
    click.echo(render_report(report), nl=False)


@eval_group.command()
@_with_eval_options
@click.option("--threshold", default=DEFAULT_MATCH_THRESHOLD, show_default=True)
def keywords(manifest, bundle_name, seed, out, threshold) -> None:
    """Precision/recall of keyword extraction plus theme-mood similarity."""
    bundle = _make_bundle(bundle_name, seed)
    records = load_manifest(manifest)
    result = keyword_extraction_eval(
        records, bundle, threshold, PipelineConfig(seed=seed),
        base_dir=Path(manifest).parent,
    )
    report = EvalReport(
        metadata=report_metadata(bundle, seed, threshold, None, len(records)),
        keyword_extraction=result,
    )
    _finish_report(report, out)


@eval_group.command()
@_with_eval_options
@click.option("--n-sets", default=100, show_default=True)
def recommend(manifest, bundle_name, seed, out, n_sets) -> None:
    """Similarity banding of recommended keywords vs controls."""
    bundle = _make_bundle(bundle_name, seed)
    records = load_manifest(manifest)
    result = recommendation_banding(records, bundle, n_sets=n_sets, seed=seed,
                                    config=PipelineConfig(seed=seed))
    report = EvalReport(
        metadata=report_metadata(bundle, seed, DEFAULT_MATCH_THRESHOLD, n_sets, len(records)),
        banding=result,
    )
    _finish_report(report, out)


@eval_group.command()
@_with_eval_options
@click.option("--n-sets", default=100, show_default=True)
def diversity(manifest, bundle_name, seed, out, n_sets) -> None:
    """Diversity of generated description triples vs controls."""
    bundle = _make_bundle(bundle_name, seed)
    records = load_manifest(manifest)
    result = description_diversity(records, bundle, n_sets=n_sets, seed=seed,
                                   config=PipelineConfig(seed=seed))
    report = EvalReport(
        metadata=report_metadata(bundle, seed, DEFAULT_MATCH_THRESHOLD, n_sets, len(records)),
        diversity=result,
    )
    _finish_report(report, out)


if __name__ == "__main__":
    main()
