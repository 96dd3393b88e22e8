"""Pipeline orchestration: keyword extraction, keyword recommendation, merge
into drafts, and the more-sketches flow.

Pipelines are independent per call, fan caption calls out concurrently (cap
10), and degrade instead of crashing when a provider partially fails.
"""
from __future__ import annotations

import hashlib
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, MutableMapping, Sequence

import numpy as np
from PIL import Image

from .layout import NoArrangementError, VariatorParams, select_arrangement, vary_arrangement
from .layout import clamp_shifted
from .model import Arrangement, BBox, Keyword, KeywordCategory, Recombination, new_id
from .prompts import (
    KeywordSet,
    ParseError,
    build_extraction_request,
    build_layout_gen_request,
    build_layout_match_request,
    build_recombination_request,
    build_recommendation_request,
    parse_keyword_response,
    parse_layout_response,
    parse_recombination_response,
    plan_grid_crops,
)
from .providers.base import ProviderBundle, ProviderError, UndecodableImageError


class PipelineError(Exception):
    """A pipeline could not produce any usable result."""


class InvalidStateError(PipelineError):
    """The operation needs state the draft does not carry (e.g. stored ranks)."""


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    canvas_px: int = 512
    caption_concurrency: int = 10
    temperature_low: float = 0.2
    temperature_high: float = 0.9
    chat_model: str = "default"
    jitter_px: int = 50
    n_candidates: int = 100
    top_k: int = 5
    more_sketch_count: int = 5

    def variator_params(self, rng_seed: int) -> VariatorParams:
        return VariatorParams(
            jitter_px=self.jitter_px,
            canvas_px=self.canvas_px,
            n_candidates=self.n_candidates,
            top_k=self.top_k,
            rng_seed=rng_seed,
        )


def _derive_seed(base: int, *parts: int) -> int:
    return int(np.random.SeedSequence([base, *parts]).generate_state(1)[0])


class MemoryBlobs:
    """Minimal in-memory blob sink: content-addressed by sha256."""

    def __init__(self) -> None:
        self.blobs: dict[str, bytes] = {}

    def save(self, data: bytes) -> str:
        sha = hashlib.sha256(data).hexdigest()
        self.blobs[sha] = data
        return sha

    def __getitem__(self, sha: str) -> bytes:
        return self.blobs[sha]


def keywords_to_set(keywords: Iterable[Keyword]) -> KeywordSet:
    """Collect the textual categories of a keyword collection into a KeywordSet."""
    sm, ap, tm = [], [], []
    for kw in keywords:
        if kw.category is KeywordCategory.SUBJECT_MATTER:
            sm.append(kw.text)
        elif kw.category is KeywordCategory.ACTION_POSE:
            ap.append(kw.text)
        elif kw.category is KeywordCategory.THEME_MOOD:
            tm.append(kw.text)
    return KeywordSet(subject_matter=tuple(sm), action_pose=tuple(ap), theme_mood=tuple(tm))


# ---------------------------------------------------------------------------
# extraction


@dataclass(frozen=True)
class ExtractionResult:
    keywords: KeywordSet
    arrangement: Arrangement | None
    degraded: bool
    caption_failures: int = 0
    captions: tuple[str, ...] = ()


def _crop_regions(image: bytes, regions) -> list[bytes]:
    try:
        img = Image.open(io.BytesIO(image))
        img.load()
    except Exception as exc:
        raise UndecodableImageError(f"cannot decode image: {exc}") from exc
    crops = []
    for x, y, w, h in regions:
        buf = io.BytesIO()
        img.crop((x, y, x + w, y + h)).save(buf, format="PNG")
        crops.append(buf.getvalue())
    return crops


def extract_keywords_pipeline(
    bundle: ProviderBundle,
    image: bytes,
    config: PipelineConfig = PipelineConfig(),
    source_image: str = "",
) -> ExtractionResult:
    """Caption a 3x3 grid plus the full frame, extract keywords via chat, and
    pick the arrangement from segmentation — captions fan out concurrently.

    Up to all-but-one caption calls may fail (degraded result); a chat failure
    is fatal for the call. A clean empty segmentation just omits the
    arrangement; a segmenter fault omits it and flags degradation.
    """
    try:
        with Image.open(io.BytesIO(image)) as probe:
            width, height = probe.size
    except Exception as exc:
        raise UndecodableImageError(f"cannot decode image: {exc}") from exc
    plan = plan_grid_crops(width, height)
    crops = _crop_regions(image, plan.regions)

    captions: list[str | None] = [None] * len(crops)
    failures = 0
    with ThreadPoolExecutor(max_workers=config.caption_concurrency) as pool:
        futures = [pool.submit(bundle.captioner.caption, crop) for crop in crops]
        # Segmentation runs on this thread while captions are in flight.
        arrangement: Arrangement | None = None
        segment_fault = False
        try:
            segments = bundle.segmenter.segment(image)
            arrangement = select_arrangement(
                segments,
                source_image=source_image,
                arrangement_id="arr-" + hashlib.sha256(image).hexdigest()[:16],
                canvas_px=config.canvas_px,
            )
        except NoArrangementError:
            arrangement = None
        except ProviderError:
            segment_fault = True
        last_error: ProviderError | None = None
        for i, fut in enumerate(futures):
            try:
                captions[i] = fut.result()
            except ProviderError as exc:
                failures += 1
                last_error = exc
    usable = [c for c in captions if c]
    if not usable:
        raise last_error if last_error else PipelineError("no captions produced")

    request = build_extraction_request(
        usable, temperature=config.temperature_low, model=config.chat_model
    )
    keywords = parse_keyword_response(bundle.chat.chat(request))
    return ExtractionResult(
        keywords=keywords,
        arrangement=arrangement,
        degraded=failures > 0 or segment_fault,
        caption_failures=failures,
        captions=tuple(usable),
    )


# ---------------------------------------------------------------------------
# recommendation


def recommend_pipeline(
    bundle: ProviderBundle,
    selected: KeywordSet,
    config: PipelineConfig = PipelineConfig(),
) -> KeywordSet:
    """Expand the selected keywords; echoes of the input are deduplicated away."""
    request = build_recommendation_request(
        selected, temperature=config.temperature_high, model=config.chat_model
    )
    recommended = parse_keyword_response(bundle.chat.chat(request))
    return recommended.minus(selected)


# ---------------------------------------------------------------------------
# merge


@dataclass(frozen=True)
class MergeResult:
    drafts: tuple[Recombination, ...]
    degraded: bool
    dropped: int = 0


def _pseudo_arrangement(boxes: Sequence[BBox], canvas_px: int) -> Arrangement:
    # The generated layout stands in for a reference arrangement so the
    # variator can still produce ranked alternatives for more-sketches.
    safe = [clamp_shifted(b.x, b.y, b.w, b.h, 1 / canvas_px) for b in boxes[:10]]
    return Arrangement(id=new_id(), source_image="", boxes=tuple(safe), canvas_px=canvas_px)


def _match_layout(
    bundle: ProviderBundle,
    caption: str,
    names: list[str],
    boxes: Sequence[BBox],
    config: PipelineConfig,
) -> tuple[tuple[str, BBox], ...]:
    request = build_layout_match_request(
        caption, names, list(boxes), temperature=config.temperature_low, model=config.chat_model
    )
    parsed = parse_layout_response(bundle.chat.chat(request))
    if sorted(n for n, _ in parsed.entries) != sorted(names):
        raise ParseError("layout names do not cover the object list")
    return parsed.entries


def _generate_layout(
    bundle: ProviderBundle, caption: str, names: list[str], config: PipelineConfig
) -> tuple[tuple[str, BBox], ...]:
    request = build_layout_gen_request(
        caption, names, temperature=config.temperature_low, model=config.chat_model
    )
    parsed = parse_layout_response(bundle.chat.chat(request))
    if sorted(n for n, _ in parsed.entries) != sorted(names):
        raise ParseError("layout names do not cover the object list")
    return parsed.entries


def _render_sketch(
    bundle: ProviderBundle,
    caption: str,
    layout: Sequence[tuple[str, BBox]],
    config: PipelineConfig,
    sink,
) -> str:
    image = bundle.layout_image_generator.generate_image(caption, layout, config.canvas_px)
    sketch = bundle.sketch_stylizer.stylize_sketch(image)
    return sink.save(sketch)


def merge_pipeline(
    bundle: ProviderBundle,
    selected: KeywordSet,
    arrangement: Arrangement | None,
    sink,
    config: PipelineConfig = PipelineConfig(),
    id_salt: str = "",
) -> MergeResult:
    """Generate three drafts, resolve a layout for each, and render one sketch.

    With an arrangement the variator's rank-0 layout is matched to the objects;
    without one (or when matching fails) the layout-generation path runs once.
    A draft whose both paths fail is dropped and the result flagged degraded.

    Draft ids derive from seed, salt, and content so equal runs reproduce
    byte-identically; callers storing drafts should salt with something unique
    per merge (the board service uses the current draft count).
    """
    request = build_recombination_request(
        selected, temperature=config.temperature_high, model=config.chat_model
    )
    parse = parse_recombination_response(bundle.chat.chat(request))

    drafts: list[Recombination] = []
    dropped = 0
    for index, draft in enumerate(parse.drafts):
        draft = replace(
            draft,
            id=hashlib.sha256(
                f"{config.seed}|{id_salt}|{index}|{draft.caption}".encode("utf-8")
            ).hexdigest()[:32],
        )
        names = [o.name for o in draft.objects]
        rng_seed = _derive_seed(config.seed, index)
        params = config.variator_params(rng_seed)
        layout: tuple[tuple[str, BBox], ...] | None = None
        candidates: list[list[BBox]] = []
        source = ""

        if arrangement is not None:
            candidates = vary_arrangement(arrangement, len(names), params)
            try:
                layout = _match_layout(bundle, draft.caption, names, candidates[0], config)
                source = "matched"
            except (ParseError, ProviderError):
                layout = None
        if layout is None:
            try:
                layout = _generate_layout(bundle, draft.caption, names, config)
                source = "generated" if arrangement is None else "fallback"
            except (ParseError, ProviderError):
                dropped += 1
                continue
            if arrangement is None:
                pseudo = _pseudo_arrangement([b for _, b in layout], config.canvas_px)
                candidates = vary_arrangement(pseudo, len(names), params)

        sha = _render_sketch(bundle, draft.caption, layout, config, sink)
        drafts.append(
            replace(
                draft,
                layout=layout,
                sketches=(sha,),
                layout_rank_used=0,
                layout_candidates=tuple(tuple(c) for c in candidates),
                next_rank=1,
                layout_source=source,
            )
        )

    if not drafts:
        raise PipelineError("no draft survived layout resolution")
    return MergeResult(
        drafts=tuple(drafts),
        degraded=parse.degraded or dropped > 0,
        dropped=dropped,
    )


# ---------------------------------------------------------------------------
# more sketches


def more_sketches(
    bundle: ProviderBundle,
    draft: Recombination,
    sink,
    config: PipelineConfig = PipelineConfig(),
    count: int | None = None,
) -> tuple[Recombination, tuple[str, ...]]:
    """Render ``count`` further sketches by walking the stored layout ranks.

    Ranks continue from the draft's cursor and cycle through the stored top-k
    list; objects re-match per rank (falling back to order pairing if the
    match chat misbehaves). The caption never changes.
    """
    if not draft.layout_candidates:
        raise InvalidStateError("draft has no stored layout ranks")
    n = config.more_sketch_count if count is None else count
    if n < 1:
        raise ValueError("count must be >= 1")
    names = [o.name for o in draft.objects]
    shas: list[str] = []
    for step in range(n):
        rank = draft.next_rank + step
        boxes = draft.layout_candidates[rank % len(draft.layout_candidates)]
        try:
            layout = _match_layout(bundle, draft.caption, names, boxes, config)
        except (ParseError, ProviderError):
            layout = tuple(zip(names, boxes))
        shas.append(_render_sketch(bundle, draft.caption, layout, config, sink))
    updated = replace(
        draft, sketches=draft.sketches + tuple(shas), next_rank=draft.next_rank + n
    )
    return updated, tuple(shas)
