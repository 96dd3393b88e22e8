"""Domain types shared across the engine: categorized keywords, fractional
bounding boxes, arrangements, recombination drafts, and boards.

All types are immutable values; board mutation is owned by the service layer.
Every type serializes to JSON with stable snake_case field names.
"""
from __future__ import annotations

import hashlib
import json
import re
import uuid
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable

# Tolerance for float representation noise on the canvas boundary
# (e.g. 0.613 + 0.387 may exceed 1.0 by ~1e-16).
_EDGE_EPS = 1e-9

_WS = re.compile(r"\s+")


class KeywordCategory(Enum):
    """The four element categories designers extract from references."""

    SUBJECT_MATTER = "subject matter"
    ACTION_POSE = "action & pose"
    THEME_MOOD = "theme & mood"
    ARRANGEMENT = "arrangement"

    @classmethod
    def from_str(cls, value: str) -> "KeywordCategory":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"unknown keyword category: {value!r}")

    @property
    def textual(self) -> bool:
        return self is not KeywordCategory.ARRANGEMENT


class KeywordSource(Enum):
    EXTRACTED = "extracted"
    RECOMMENDED = "recommended"
    MANUAL = "manual"


def normalize_keyword_text(text: str) -> str:
    """Trim and collapse internal whitespace; casing is preserved."""
    return _WS.sub(" ", text.strip())


def new_id() -> str:
    return uuid.uuid4().hex


@dataclass(frozen=True)
class Keyword:
    """A categorized element attached to a board.

    Textual categories carry non-empty ``text``; arrangement keywords carry
    ``source_image`` + ``arrangement_id`` instead.
    """

    id: str
    category: KeywordCategory
    text: str = ""
    source: KeywordSource = KeywordSource.MANUAL
    source_image: str | None = None
    arrangement_id: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", normalize_keyword_text(self.text))
        if self.category.textual:
            if not self.text:
                raise ValueError(f"{self.category.value} keyword requires non-empty text")
        elif not self.arrangement_id:
            raise ValueError("arrangement keyword requires an arrangement_id")

    def dedup_key(self) -> tuple:
        if self.category.textual:
            return (self.category.value, self.text.casefold())
        return (self.category.value, self.arrangement_id)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "category": self.category.value,
            "text": self.text,
            "source": self.source.value,
            "source_image": self.source_image,
            "arrangement_id": self.arrangement_id,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Keyword":
        return cls(
            id=d["id"],
            category=KeywordCategory.from_str(d["category"]),
            text=d.get("text", ""),
            source=KeywordSource(d.get("source", "manual")),
            source_image=d.get("source_image"),
            arrangement_id=d.get("arrangement_id"),
        )


def dedup_keywords(keywords: Iterable[Keyword]) -> tuple[Keyword, ...]:
    """Drop later duplicates by (category, case-folded text) — first one wins."""
    seen: set[tuple] = set()
    out: list[Keyword] = []
    for kw in keywords:
        key = kw.dedup_key()
        if key not in seen:
            seen.add(key)
            out.append(kw)
    return tuple(out)


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in unitless fractions of the canvas side, top-left origin.

    Values are plain data; use :func:`validate_bbox` to check the invariants
    (0 ≤ x,y; x+w ≤ 1; y+h ≤ 1; w,h > 0).
    """

    x: float
    y: float
    w: float
    h: float

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2, self.y + self.h / 2)

    def to_dict(self) -> dict[str, float]:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BBox":
        return cls(float(d["x"]), float(d["y"]), float(d["w"]), float(d["h"]))


def validate_bbox(b: BBox) -> str | None:
    """Return None when all box invariants hold, else the failed predicate."""
    if b.x < 0:
        return "x<0"
    if b.y < 0:
        return "y<0"
    if b.w <= 0:
        return "w<=0"
    if b.h <= 0:
        return "h<=0"
    if b.x + b.w > 1 + _EDGE_EPS:
        return "x+w>1"
    if b.y + b.h > 1 + _EDGE_EPS:
        return "y+h>1"
    return None


def fit_fractions(
    x: float, y: float, w: float, h: float
) -> tuple[tuple[float, float, float, float], bool]:
    """Clamp fractional components toward validity, reporting whether anything moved.

    Positions clamp into [0,1] and sizes into (0,1]; a size then shrinks to the
    room its position leaves (w ≤ 1−x, h ≤ 1−y) but only when room remains —
    a fully out-of-range position (x ≥ 1) keeps its size, so the result can
    still fail validate_bbox and callers must treat the flag as a warning.
    """
    nx = min(max(x, 0.0), 1.0)
    ny = min(max(y, 0.0), 1.0)
    nw = min(max(w, 0.0), 1.0)
    nh = min(max(h, 0.0), 1.0)
    if nx < 1.0 and nx + nw > 1.0 + _EDGE_EPS:
        nw = 1.0 - nx
    if ny < 1.0 and ny + nh > 1.0 + _EDGE_EPS:
        nh = 1.0 - ny
    clamped = (nx, ny, nw, nh) != (x, y, w, h)
    return (nx, ny, nw, nh), clamped


def px_to_frac(box_px: tuple[float, float, float, float], canvas_px: int) -> BBox:
    """Convert a pixel-space (x, y, w, h) box to canvas fractions, clamped to fit."""
    if canvas_px <= 0:
        raise ValueError("canvas_px must be positive")
    comps, _ = fit_fractions(*(c / canvas_px for c in box_px))
    return BBox(*comps)


def frac_to_px(b: BBox, canvas_px: int) -> tuple[int, int, int, int]:
    """Convert a fractional box to integer pixel coordinates (nearest pixel)."""
    if canvas_px <= 0:
        raise ValueError("canvas_px must be positive")
    return (
        round(b.x * canvas_px),
        round(b.y * canvas_px),
        round(b.w * canvas_px),
        round(b.h * canvas_px),
    )


DEFAULT_CANVAS_PX = 512


@dataclass(frozen=True)
class Arrangement:
    """The compositional structure of one reference image: up to ten boxes."""

    id: str
    source_image: str
    boxes: tuple[BBox, ...]
    canvas_px: int = DEFAULT_CANVAS_PX

    def __post_init__(self) -> None:
        object.__setattr__(self, "boxes", tuple(self.boxes))
        if not 1 <= len(self.boxes) <= 10:
            raise ValueError(f"arrangement needs 1..10 boxes, got {len(self.boxes)}")
        for b in self.boxes:
            violation = validate_bbox(b)
            if violation is not None:
                raise ValueError(f"invalid arrangement box: {violation}")
        if self.canvas_px <= 0:
            raise ValueError("canvas_px must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "source_image": self.source_image,
            "canvas_px": self.canvas_px,
            "boxes": [b.to_dict() for b in self.boxes],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Arrangement":
        return cls(
            id=d["id"],
            source_image=d["source_image"],
            boxes=tuple(BBox.from_dict(b) for b in d["boxes"]),
            canvas_px=int(d.get("canvas_px", DEFAULT_CANVAS_PX)),
        )


@dataclass(frozen=True)
class DraftObject:
    """One object in a recombination draft: a name plus a short visual detail."""

    name: str
    detail: str

    def to_dict(self) -> dict[str, str]:
        return {"name": self.name, "detail": self.detail}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DraftObject":
        return cls(name=d["name"], detail=d["detail"])


@dataclass(frozen=True)
class Recombination:
    """One generated draft: caption, object list, layout, and sketch blob refs.

    ``layout`` is None before layout resolution. ``layout_candidates`` holds the
    ranked top-k layouts kept for the more-sketches flow; ``next_rank`` is the
    absolute rank counter the next more-sketches call starts from.
    """

    id: str
    caption: str
    objects: tuple[DraftObject, ...]
    layout: tuple[tuple[str, BBox], ...] | None = None
    sketches: tuple[str, ...] = ()
    layout_rank_used: int = 0
    layout_candidates: tuple[tuple[BBox, ...], ...] = ()
    next_rank: int = 1
    layout_source: str = ""

    def __post_init__(self) -> None:
        if not self.objects:
            raise ValueError("a recombination draft needs at least one object")
        if self.layout_rank_used < 0:
            raise ValueError("layout_rank_used must be >= 0")

    def layout_matches_objects(self) -> bool:
        """Multiset equality between layout names and object names."""
        if self.layout is None:
            return False
        return sorted(n for n, _ in self.layout) == sorted(o.name for o in self.objects)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "caption": self.caption,
            "objects": [o.to_dict() for o in self.objects],
            "layout": None
            if self.layout is None
            else [{"name": n, "box": b.to_dict()} for n, b in self.layout],
            "sketches": list(self.sketches),
            "layout_rank_used": self.layout_rank_used,
            "layout_candidates": [
                [b.to_dict() for b in cand] for cand in self.layout_candidates
            ],
            "next_rank": self.next_rank,
            "layout_source": self.layout_source,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Recombination":
        layout = d.get("layout")
        return cls(
            id=d["id"],
            caption=d["caption"],
            objects=tuple(DraftObject.from_dict(o) for o in d["objects"]),
            layout=None
            if layout is None
            else tuple((e["name"], BBox.from_dict(e["box"])) for e in layout),
            sketches=tuple(d.get("sketches", ())),
            layout_rank_used=int(d.get("layout_rank_used", 0)),
            layout_candidates=tuple(
                tuple(BBox.from_dict(b) for b in cand)
                for cand in d.get("layout_candidates", ())
            ),
            next_rank=int(d.get("next_rank", 1)),
            layout_source=d.get("layout_source", ""),
        )


class ActionKind(Enum):
    ADD_REFERENCE = "add_reference"
    ADD_KEYWORD = "add_keyword"
    SELECT_KEYWORD = "select_keyword"
    RECOMMEND = "recommend"
    MERGE = "merge"
    MORE_SKETCHES = "more_sketches"
    COMPLETE_SKETCH = "complete_sketch"


@dataclass(frozen=True)
class ActionRecord:
    ts_ms: int
    kind: ActionKind
    digest: str

    def to_dict(self) -> dict[str, Any]:
        return {"ts_ms": self.ts_ms, "kind": self.kind.value, "digest": self.digest}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ActionRecord":
        return cls(ts_ms=int(d["ts_ms"]), kind=ActionKind(d["kind"]), digest=d["digest"])


def payload_digest(payload: Any) -> str:
    """Short stable digest of a JSON-serializable action payload."""
    blob = json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class Reference:
    """One uploaded reference image with its extracted keywords and arrangement."""

    id: str
    blob_sha: str
    keywords: tuple[Keyword, ...] = ()
    arrangement: Arrangement | None = None
    position: tuple[float, float] | None = None
    degraded: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "blob_sha": self.blob_sha,
            "keywords": [k.to_dict() for k in self.keywords],
            "arrangement": None if self.arrangement is None else self.arrangement.to_dict(),
            "position": None if self.position is None else list(self.position),
            "degraded": self.degraded,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Reference":
        pos = d.get("position")
        arr = d.get("arrangement")
        return cls(
            id=d["id"],
            blob_sha=d["blob_sha"],
            keywords=tuple(Keyword.from_dict(k) for k in d.get("keywords", ())),
            arrangement=None if arr is None else Arrangement.from_dict(arr),
            position=None if pos is None else (float(pos[0]), float(pos[1])),
            degraded=bool(d.get("degraded", False)),
        )


@dataclass(frozen=True)
class Board:
    """A mood board: references, keywords, selection, drafts, and the action log.

    The log is append-only with non-decreasing timestamps; all evolution
    helpers return a new Board value.
    """

    id: str
    references: tuple[Reference, ...] = ()
    keywords: tuple[Keyword, ...] = ()
    selected_keywords: tuple[Keyword, ...] = ()
    drafts: tuple[Recombination, ...] = ()
    action_log: tuple[ActionRecord, ...] = ()

    # -- lookup -----------------------------------------------------------

    def all_keywords(self) -> tuple[Keyword, ...]:
        """Reference-extracted keywords plus board-level free keywords."""
        out: list[Keyword] = []
        for ref in self.references:
            out.extend(ref.keywords)
        out.extend(self.keywords)
        return tuple(out)

    def find_keyword(self, keyword_id: str) -> Keyword | None:
        for kw in self.all_keywords():
            if kw.id == keyword_id:
                return kw
        return None

    def find_arrangement(self, arrangement_id: str) -> Arrangement | None:
        for ref in self.references:
            if ref.arrangement is not None and ref.arrangement.id == arrangement_id:
                return ref.arrangement
        return None

    def find_draft(self, draft_id: str) -> Recombination | None:
        for d in self.drafts:
            if d.id == draft_id:
                return d
        return None

    # -- evolution (pure) -------------------------------------------------

    def with_reference(self, ref: Reference) -> "Board":
        return replace(self, references=self.references + (ref,))

    def with_free_keywords(self, keywords: Iterable[Keyword]) -> "Board":
        """Add board-level keywords; duplicates of existing board keywords are dropped."""
        existing = {kw.dedup_key() for kw in self.all_keywords()}
        fresh = [kw for kw in dedup_keywords(keywords) if kw.dedup_key() not in existing]
        return replace(self, keywords=self.keywords + tuple(fresh))

    def with_selection(self, selected: Iterable[Keyword]) -> "Board":
        return replace(self, selected_keywords=dedup_keywords(selected))

    def with_draft(self, draft: Recombination) -> "Board":
        return replace(self, drafts=self.drafts + (draft,))

    def with_draft_replaced(self, draft: Recombination) -> "Board":
        drafts = tuple(draft if d.id == draft.id else d for d in self.drafts)
        return replace(self, drafts=drafts)

    def with_log(self, record: ActionRecord) -> "Board":
        if self.action_log and record.ts_ms < self.action_log[-1].ts_ms:
            raise ValueError("action log timestamps must be non-decreasing")
        return replace(self, action_log=self.action_log + (record,))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "references": [r.to_dict() for r in self.references],
            "keywords": [k.to_dict() for k in self.keywords],
            "selected_keywords": [k.to_dict() for k in self.selected_keywords],
            "drafts": [d.to_dict() for d in self.drafts],
            "action_log": [a.to_dict() for a in self.action_log],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Board":
        return cls(
            id=d["id"],
            references=tuple(Reference.from_dict(r) for r in d.get("references", ())),
            keywords=tuple(Keyword.from_dict(k) for k in d.get("keywords", ())),
            selected_keywords=tuple(
                Keyword.from_dict(k) for k in d.get("selected_keywords", ())
            ),
            drafts=tuple(Recombination.from_dict(r) for r in d.get("drafts", ())),
            action_log=tuple(ActionRecord.from_dict(a) for a in d.get("action_log", ())),
        )
