"""Builders that assemble live chat requests on top of the loaded templates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..model import BBox
from .keywordset import KeywordSet
from .templates import ChatMessage, ChatRequest, PromptTemplate, load_template

MAX_CAPTIONS = 10

LABEL_SUBJECT = "Subject matter"
LABEL_ACTION = "Action & pose"
LABEL_THEME = "Theme & mood"


class NoSubjectMatterError(ValueError):
    """Recombination needs at least one subject-matter keyword to ground objects on."""


def format_component(value: float) -> str:
    """Box components render bare when integral ("0", "1"), else with 3 decimals."""
    if abs(value - round(value)) < 1e-9:
        return str(int(round(value)))
    return f"{value:.3f}"


def format_box(box: BBox) -> str:
    return "[" + ", ".join(format_component(c) for c in (box.x, box.y, box.w, box.h)) + "]"


def format_names(names: Sequence[str]) -> str:
    return "[" + ", ".join(names) + "]"


def _category_lines(ks: KeywordSet, include_empty: bool) -> list[str]:
    lines = []
    for label, entries in (
        (LABEL_SUBJECT, ks.subject_matter),
        (LABEL_ACTION, ks.action_pose),
        (LABEL_THEME, ks.theme_mood),
    ):
        if entries or include_empty:
            lines.append(f"{label}: {', '.join(entries)}")
    return lines


def build_extraction_request(
    captions: Sequence[str], temperature: float = 0.2, model: str = "default"
) -> ChatRequest:
    """Keyword extraction: the user turn is the captions joined by newlines."""
    if not 1 <= len(captions) <= MAX_CAPTIONS:
        raise ValueError(f"need 1..{MAX_CAPTIONS} captions, got {len(captions)}")
    for c in captions:
        if not c.strip():
            raise ValueError("captions must be non-empty")
        if "\n" in c:
            raise ValueError("captions must be single-line")
    return load_template("extract").request("\n".join(captions), temperature, model)


def build_recommendation_request(
    selected: KeywordSet, temperature: float = 0.9, model: str = "default"
) -> ChatRequest:
    """Keyword expansion: only non-empty category lines appear in the user turn."""
    if selected.is_empty():
        raise ValueError("need at least one keyword to recommend from")
    turn = "\n".join(_category_lines(selected, include_empty=False))
    return load_template("recommend").request(turn, temperature, model)


def build_recombination_request(
    selected: KeywordSet, temperature: float = 0.9, model: str = "default"
) -> ChatRequest:
    """Draft generation: all three category lines appear, empty ones included."""
    if not selected.subject_matter:
        raise NoSubjectMatterError(
            "select at least one subject-matter keyword; drafts need objects to draw"
        )
    turn = "\n".join(_category_lines(selected, include_empty=True))
    return load_template("recombine").request(turn, temperature, model)


def build_layout_match_request(
    caption: str,
    object_names: Sequence[str],
    boxes: Sequence[BBox],
    temperature: float = 0.2,
    model: str = "default",
) -> ChatRequest:
    """Box-to-object matching: caption line, names line, boxes line."""
    if not object_names or len(object_names) != len(boxes):
        raise ValueError("need equally many object names and boxes (at least one)")
    turn = "\n".join(
        [caption, format_names(object_names), ", ".join(format_box(b) for b in boxes)]
    )
    return load_template("match_layout").request(turn, temperature, model)


def build_layout_gen_request(
    caption: str,
    object_names: Sequence[str],
    temperature: float = 0.2,
    model: str = "default",
) -> ChatRequest:
    """Layout generation from scratch: caption line plus bracketed name list.

    Duplicate names are permitted; the generator may emit several boxes per name.
    """
    if not object_names:
        raise ValueError("need at least one object name")
    turn = "\n".join([caption, format_names(object_names)])
    return load_template("gen_layout").request(turn, temperature, model)


_PARAPHRASE_SYSTEM = (
    "You paraphrase short design keywords. For every input line, answer with "
    "exactly one line giving a close paraphrase of that keyword. Keep the "
    "paraphrases short and do not add or drop lines."
)


def build_paraphrase_request(
    texts: Sequence[str], temperature: float = 0.9, model: str = "default"
) -> ChatRequest:
    """Auxiliary request used by the eval harness's synonym control group."""
    if not texts:
        raise ValueError("need at least one text to paraphrase")
    for t in texts:
        if "\n" in t:
            raise ValueError("paraphrase inputs must be single-line")
    return ChatRequest(
        template_id="paraphrase",
        messages=(
            ChatMessage("system", _PARAPHRASE_SYSTEM),
            ChatMessage("user", "\n".join(texts)),
        ),
        temperature=temperature,
        model=model,
    )
