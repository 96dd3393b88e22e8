"""Deterministic in-process provider stubs.

The stub bundle makes the whole pipeline runnable offline: captions and
segments derive from blob hashes, the chat stub replays the template few-shots
and otherwise synthesizes a template-appropriate response from the live user
turn (recorded as synthetic), images render as labeled rectangles, and
embeddings are seeded hash projections.
"""
from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from PIL import Image, ImageDraw, ImageFilter

from ..layout import ScoredSegment, clamp_shifted
from ..model import BBox, frac_to_px
from ..prompts import (
    ChatRequest,
    KeywordSet,
    format_box,
    format_names,
    load_template,
    parse_keyword_response,
)
from ..prompts.templates import TEMPLATE_IDS
from .base import (
    EmptyResponseError,
    ProviderBundle,
    UndecodableImageError,
)


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _seed_from(*parts: str) -> int:
    digest = hashlib.sha256("|".join(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _decode(image: bytes) -> Image.Image:
    try:
        img = Image.open(io.BytesIO(image))
        img.load()
        return img
    except Exception as exc:
        raise UndecodableImageError(f"cannot decode image: {exc}") from exc


def _png_bytes(img: Image.Image) -> bytes:
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


class StubCaptioner:
    provider_id = "stub-captioner"

    def caption(self, image: bytes) -> str:
        _decode(image)
        return f"stub caption {_sha(image)[:12]}"


class StubSegmenter:
    """Four deterministic boxes per blob hash, with descending-ish scores."""

    provider_id = "stub-segmenter"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def segment(self, image: bytes) -> list[ScoredSegment]:
        _decode(image)
        rng = np.random.default_rng(_seed_from("segment", str(self.seed), _sha(image)))
        segments = []
        for i in range(4):
            w = float(rng.uniform(0.18, 0.42))
            h = float(rng.uniform(0.18, 0.42))
            x = float(rng.uniform(0.0, 0.55))
            y = float(rng.uniform(0.0, 0.55))
            box = clamp_shifted(x, y, w, h, min_size=1 / 512)
            score = float(rng.uniform(0.2, 1.0)) + (4 - i) * 0.5
            segments.append(ScoredSegment(bbox=box, score=score))
        return segments


_SUBJECT_BANK = (
    "lighthouse", "fox", "sailboat", "meadow", "lantern", "bridge",
    "kite", "cabin", "river", "telescope", "market", "garden",
)
_ACTION_BANK = (
    "waving hello", "climbing a hill", "reading a map", "flying a kite",
    "rowing a boat", "lighting a lantern", "sketching outdoors",
)
_THEME_BANK = (
    "serene", "adventurous", "nostalgic", "playful", "dreamlike",
    "festive", "quiet", "windswept",
)
_PROP_BANK = ("lantern", "basket", "flag", "stool", "umbrella")


def _pick(rng: np.random.Generator, bank: tuple[str, ...], k: int) -> list[str]:
    idx = rng.choice(len(bank), size=min(k, len(bank)), replace=False)
    return [bank[int(i)] for i in sorted(idx)]


@dataclass
class StubChat:
    """Replays the template few-shot answers; unknown turns get a synthesized,
    deterministic response appropriate for the template (flagged synthetic).
    """

    seed: int = 0
    provider_id: str = "stub-chat"
    calls: list[tuple[str, str]] = field(default_factory=list)
    synthetic_turns: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._replay: dict[tuple[str, str], str] = {}
        for tid in TEMPLATE_IDS:
            tpl = load_template(tid)
            for user, assistant in tpl.shots:
                self._replay[(tid, _sha(user.encode("utf-8")))] = assistant

    def chat(self, request: ChatRequest) -> str:
        turn = request.user_turn
        self.calls.append((request.template_id, turn))
        key = (request.template_id, _sha(turn.encode("utf-8")))
        if key in self._replay:
            return self._replay[key]
        self.synthetic_turns.append(key)
        return self._synthesize(request.template_id, turn)

    # -- synthesized fallbacks -------------------------------------------

    def _synthesize(self, template_id: str, turn: str) -> str:
        rng = np.random.default_rng(_seed_from("chat", str(self.seed), template_id, turn))
        if template_id == "extract":
            return self._keyword_lines(_pick(rng, _SUBJECT_BANK, 4),
                                       _pick(rng, _ACTION_BANK, 2),
                                       _pick(rng, _THEME_BANK, 2))
        if template_id == "recommend":
            return self._keyword_lines(_pick(rng, _SUBJECT_BANK, 4),
                                       _pick(rng, _ACTION_BANK, 3),
                                       _pick(rng, _THEME_BANK, 3))
        if template_id == "recombine":
            return self._recombine(rng, turn)
        if template_id == "match_layout":
            return self._match_layout(turn)
        if template_id == "gen_layout":
            return self._gen_layout(turn)
        if template_id == "paraphrase":
            return "\n".join(f"another take on {line}" for line in turn.split("\n"))
        raise EmptyResponseError(f"no synthesis for template {template_id!r}")

    @staticmethod
    def _keyword_lines(sm: list[str], ap: list[str], tm: list[str]) -> str:
        return "\n".join([
            f"Subject matter: {', '.join(sm)}",
            f"Action & pose: {', '.join(ap)}",
            f"Theme & mood: {', '.join(tm)}",
        ])

    @staticmethod
    def _recombine(rng: np.random.Generator, turn: str) -> str:
        try:
            selected = parse_keyword_response(turn)
        except Exception:
            selected = KeywordSet()
        subjects = list(selected.subject_matter) or ["shape"]
        action = selected.action_pose[0] if selected.action_pose else "arranged together"
        theme = selected.theme_mood[0] if selected.theme_mood else "calm"
        prop = _PROP_BANK[int(rng.integers(len(_PROP_BANK)))]

        def objects_line(names: list[str]) -> str:
            return "Objects: [" + ", ".join(f"({n}, a {theme} {n})" for n in names) + "]"

        first = subjects[:3]
        second = subjects[-2:] if len(subjects) >= 2 else subjects[:1]
        third = [subjects[0], prop]
        blocks = [
            ("1.", f"Caption: A {theme} scene of {' and '.join(first)}, {action}.", objects_line(first)),
            ("2.", f"Caption: {second[0].capitalize()} in a {theme} setting.", objects_line(second)),
            ("3.", f"Caption: {subjects[0].capitalize()} beside a {prop}.", objects_line(third)),
        ]
        return "\n".join("\n".join(b) for b in blocks)

    @staticmethod
    def _match_layout(turn: str) -> str:
        lines = turn.split("\n")
        if len(lines) < 3:
            raise EmptyResponseError("match_layout turn needs caption, names, boxes")
        names = [n.strip() for n in lines[1].strip().strip("[]").split(",") if n.strip()]
        box_groups = []
        for grp in lines[2].split("],"):
            nums = [p.strip() for p in grp.strip().strip("[]").split(",") if p.strip()]
            if len(nums) == 4:
                box_groups.append([float(n) for n in nums])
        pairs = []
        for i, name in enumerate(names):
            nums = box_groups[i % len(box_groups)] if box_groups else [0.1, 0.1, 0.3, 0.3]
            box = BBox(*nums)
            pairs.append(f"('{name}', {format_box(box)})")
        return "[" + ", ".join(pairs) + "]"

    @staticmethod
    def _gen_layout(turn: str) -> str:
        lines = turn.split("\n")
        if len(lines) < 2:
            raise EmptyResponseError("gen_layout turn needs caption and names")
        names = [n.strip() for n in lines[1].strip().strip("[]").split(",") if n.strip()]
        n = max(len(names), 1)
        gap = 0.2 / (n + 1)
        w = 0.8 / n
        pairs = []
        for i, name in enumerate(names):
            box = BBox(x=gap * (i + 1) + w * i, y=0.3, w=w, h=0.4)
            pairs.append(f"('{name}', {format_box(box)})")
        return "[" + ", ".join(pairs) + "]"


_PALETTE = ((31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40),
            (148, 103, 189), (140, 86, 75), (227, 119, 194), (127, 127, 127))


class StubLayoutImageGenerator:
    """Renders each layout box as a labeled outlined rectangle on a blank canvas."""

    provider_id = "stub-imagegen"

    def generate_image(
        self, caption: str, layout: Sequence[tuple[str, BBox]], canvas_px: int = 512
    ) -> bytes:
        if not layout:
            raise ValueError("layout must contain at least one box")
        img = Image.new("RGB", (canvas_px, canvas_px), "white")
        draw = ImageDraw.Draw(img)
        for i, (name, box) in enumerate(layout):
            x, y, w, h = frac_to_px(box, canvas_px)
            color = _PALETTE[i % len(_PALETTE)]
            draw.rectangle([x, y, x + max(w, 1), y + max(h, 1)], outline=color, width=3)
            draw.text((x + 5, y + 5), name, fill=color)
        draw.text((6, canvas_px - 14), caption[:80], fill=(0, 0, 0))
        return _png_bytes(img)


class StubSketchStylizer:
    """Edge-detect and threshold to a 1-bit monochrome sketch, same dimensions."""

    provider_id = "stub-sketch"

    def stylize_sketch(self, image: bytes) -> bytes:
        img = _decode(image).convert("L")
        edges = img.filter(ImageFilter.FIND_EDGES)
        sketch = edges.point(lambda p: 0 if p > 32 else 255).convert("1")
        return _png_bytes(sketch)


class StubEmbedder:
    """Seeded hash projection to a fixed dimension, L2-normalized."""

    provider_id = "stub-embedder"

    def __init__(self, dim: int = 32, seed: int = 0):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = dim
        self.seed = seed

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            raise ValueError("embed requires at least one text")
        vectors = np.empty((len(texts), self.dim))
        for i, text in enumerate(texts):
            rng = np.random.default_rng(_seed_from("embed", str(self.seed), text))
            v = rng.standard_normal(self.dim)
            vectors[i] = v / np.linalg.norm(v)
        return vectors


def stub_bundle(seed: int = 0) -> ProviderBundle:
    return ProviderBundle(
        captioner=StubCaptioner(),
        segmenter=StubSegmenter(seed=seed),
        chat=StubChat(seed=seed),
        layout_image_generator=StubLayoutImageGenerator(),
        sketch_stylizer=StubSketchStylizer(),
        embedder=StubEmbedder(seed=seed),
    )
