"""The three textual keyword lists exchanged with the chat prompts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from ..model import normalize_keyword_text


def _clean(entries: Iterable[str]) -> tuple[str, ...]:
    """Normalize, drop empties, and dedup case-insensitively (first casing wins)."""
    seen: set[str] = set()
    out: list[str] = []
    for raw in entries:
        text = normalize_keyword_text(raw)
        if not text:
            continue
        fold = text.casefold()
        if fold not in seen:
            seen.add(fold)
            out.append(text)
    return tuple(out)


@dataclass(frozen=True)
class KeywordSet:
    subject_matter: tuple[str, ...] = ()
    action_pose: tuple[str, ...] = ()
    theme_mood: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "subject_matter", _clean(self.subject_matter))
        object.__setattr__(self, "action_pose", _clean(self.action_pose))
        object.__setattr__(self, "theme_mood", _clean(self.theme_mood))

    def is_empty(self) -> bool:
        return not (self.subject_matter or self.action_pose or self.theme_mood)

    def all_texts(self) -> tuple[str, ...]:
        return self.subject_matter + self.action_pose + self.theme_mood

    def minus(self, other: "KeywordSet") -> "KeywordSet":
        """Remove entries already present in ``other`` (case-folded, per category)."""

        def drop(mine: tuple[str, ...], theirs: tuple[str, ...]) -> tuple[str, ...]:
            folded = {t.casefold() for t in theirs}
            return tuple(t for t in mine if t.casefold() not in folded)

        return KeywordSet(
            subject_matter=drop(self.subject_matter, other.subject_matter),
            action_pose=drop(self.action_pose, other.action_pose),
            theme_mood=drop(self.theme_mood, other.theme_mood),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_matter": list(self.subject_matter),
            "action_pose": list(self.action_pose),
            "theme_mood": list(self.theme_mood),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "KeywordSet":
        return cls(
            subject_matter=tuple(d.get("subject_matter", ())),
            action_pose=tuple(d.get("action_pose", ())),
            theme_mood=tuple(d.get("theme_mood", ())),
        )
