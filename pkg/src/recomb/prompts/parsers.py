"""Parsers turning raw chat responses into typed values.

All parsers are line-oriented and tolerate prose before and after the
structured payload; they either return a value or raise ParseError, never
anything else, regardless of input.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..model import BBox, DraftObject, Recombination, fit_fractions, new_id
from .keywordset import KeywordSet

PIXEL_CANVAS = 512  # pixel-mode layout responses are divided by this side length


class ParseError(ValueError):
    """A response could not be parsed; carries the raw text for UI display."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


_LABELS = {
    "subject matter": "subject_matter",
    "action & pose": "action_pose",
    "theme & mood": "theme_mood",
}
_LABEL_RE = re.compile(
    r"^\s*(subject matter|action & pose|theme & mood)\s*:\s*(.*)$", re.IGNORECASE
)


def _split_entries(payload: str) -> list[str]:
    entries = []
    for part in payload.split(","):
        text = part.strip().rstrip(".").strip()
        if text:
            entries.append(text)
    return entries


def parse_keyword_response(text: str) -> KeywordSet:
    """Read the three labeled category lines; entries are comma-separated.

    Labels match case-insensitively; trailing periods and empty entries drop.
    """
    found: dict[str, list[str]] = {"subject_matter": [], "action_pose": [], "theme_mood": []}
    any_label = False
    for line in text.split("\n"):
        m = _LABEL_RE.match(line)
        if not m:
            continue
        any_label = True
        found[_LABELS[m.group(1).lower()]].extend(_split_entries(m.group(2)))
    if not any_label:
        raise ParseError("no keyword category line found", raw=text)
    return KeywordSet(
        subject_matter=tuple(found["subject_matter"]),
        action_pose=tuple(found["action_pose"]),
        theme_mood=tuple(found["theme_mood"]),
    )


@dataclass(frozen=True)
class RecombinationParse:
    """Drafts recovered from a recombination response, plus degradation info."""

    drafts: tuple[Recombination, ...]
    degraded: bool
    rejected: tuple[str, ...] = ()  # reasons for dropped blocks


_BLOCK_HEADER = re.compile(r"^\s*\d+\s*[.)]\s*(.*)$")
_CAPTION_RE = re.compile(r"^\s*(?:caption|scene)\s*:\s*(.*)$", re.IGNORECASE)
_OBJECTS_RE = re.compile(r"^\s*objects\s*:\s*(.*)$", re.IGNORECASE)


def _scan_tuples(payload: str) -> list[tuple[str, str]]:
    """Scan "(name, detail)" tuples inside a bracketed list, paren-depth aware.

    Details may contain commas and nested parentheses; the name is everything
    up to the first top-level comma.
    """
    start = payload.find("[")
    if start < 0:
        return []
    out: list[tuple[str, str]] = []
    depth = 0
    current: list[str] = []
    for ch in payload[start:]:
        if ch == "(":
            depth += 1
            if depth == 1:
                current = []
                continue
        elif ch == ")":
            depth -= 1
            if depth == 0:
                body = "".join(current)
                name, _, detail = body.partition(",")
                name = name.strip().strip("'\"")
                detail = detail.strip().strip("'\"")
                if name:
                    out.append((name, detail))
                continue
        elif ch == "]" and depth == 0:
            break
        if depth >= 1:
            current.append(ch)
    return out


def parse_recombination_response(text: str) -> RecombinationParse:
    """Split numbered blocks, reading a Caption/Scene line and an Objects list each.

    Blocks missing a caption or with an empty object list are rejected; fewer
    than three surviving blocks flags the result degraded, zero raises.
    """
    blocks: list[list[str]] = []
    for line in text.split("\n"):
        m = _BLOCK_HEADER.match(line)
        if m:
            blocks.append([m.group(1)] if m.group(1) else [])
        elif blocks:
            blocks[-1].append(line)
    drafts: list[Recombination] = []
    rejected: list[str] = []
    for i, block_lines in enumerate(blocks, start=1):
        caption = None
        objects: list[DraftObject] = []
        for line in block_lines:
            cm = _CAPTION_RE.match(line)
            if cm and caption is None:
                caption = cm.group(1).strip()
                continue
            om = _OBJECTS_RE.match(line)
            if om:
                objects = [DraftObject(n, d) for n, d in _scan_tuples(om.group(1))]
        if not caption:
            rejected.append(f"block {i}: no caption")
            continue
        if not objects:
            rejected.append(f"block {i}: empty object list")
            continue
        drafts.append(Recombination(id=new_id(), caption=caption, objects=tuple(objects)))
    if not drafts:
        raise ParseError("no parseable description block", raw=text)
    return RecombinationParse(
        drafts=tuple(drafts),
        degraded=len(drafts) < 3 or bool(rejected),
        rejected=tuple(rejected),
    )


@dataclass(frozen=True)
class LayoutParse:
    """Name/box assignments from a layout response; ``clamped`` marks adjusted boxes."""

    entries: tuple[tuple[str, BBox], ...]
    clamped: bool = False


_LAYOUT_TUPLE = re.compile(
    r"""\(\s*['"](?P<name>[^'"]*)['"]\s*,\s*\[(?P<nums>[^\][]*)\]\s*\)"""
)


def parse_layout_response(text: str) -> LayoutParse:
    """Parse the quoted-name + four-number tuple list.

    Numbers are fractions when every component of a box is <= 1, otherwise the
    box is in 512-pixel coordinates and every component divides by 512. Boxes
    clamp toward validity and the result carries a flag when any was adjusted.
    """
    entries: list[tuple[str, BBox]] = []
    clamped_any = False
    for m in _LAYOUT_TUPLE.finditer(text):
        raw_nums = [p.strip() for p in m.group("nums").split(",") if p.strip()]
        if len(raw_nums) != 4:
            raise ParseError(
                f"box for {m.group('name')!r} needs 4 components, got {len(raw_nums)}",
                raw=text,
            )
        try:
            nums = [float(p) for p in raw_nums]
        except ValueError:
            raise ParseError(f"non-numeric box component in {raw_nums}", raw=text)
        scale = PIXEL_CANVAS if any(n > 1.0 for n in nums) else 1.0
        comps, clamped = fit_fractions(*(n / scale for n in nums))
        clamped_any = clamped_any or clamped
        entries.append((m.group("name"), BBox(*comps)))
    if not entries:
        raise ParseError("no layout tuples found", raw=text)
    return LayoutParse(entries=tuple(entries), clamped=clamped_any)
