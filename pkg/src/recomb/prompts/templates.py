"""Prompt template assets and the chat request type.

Templates live as external text files (one per template id) so tests can check
byte fidelity. Each file contains the system prompt and the few-shot turns
delimited by sentinel lines.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

# The five canonical templates; "paraphrase" is an auxiliary id used only by
# the eval harness (no asset file, no golden fidelity requirement).
TEMPLATE_IDS = ("extract", "recommend", "recombine", "match_layout", "gen_layout")
AUX_TEMPLATE_IDS = ("paraphrase",)

_SENTINEL = re.compile(r"^=== (system|user|assistant) ===$")


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user" | "assistant"
    text: str


@dataclass(frozen=True)
class ChatRequest:
    """A fully assembled chat call: system prompt, few-shot turns, live user turn."""

    template_id: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.2
    model: str = "default"

    def __post_init__(self) -> None:
        if self.template_id not in TEMPLATE_IDS + AUX_TEMPLATE_IDS:
            raise ValueError(f"unknown template id: {self.template_id!r}")
        if not self.messages or self.messages[0].role != "system":
            raise ValueError("first message must be the system prompt")
        for i, msg in enumerate(self.messages[1:], start=1):
            expected = "user" if i % 2 == 1 else "assistant"
            if msg.role != expected:
                raise ValueError(f"message {i} must be {expected!r}, got {msg.role!r}")
        if self.messages[-1].role != "user":
            raise ValueError("last message must be the live user turn")

    @property
    def user_turn(self) -> str:
        return self.messages[-1].text

    def to_dict(self) -> dict:
        return {
            "template_id": self.template_id,
            "messages": [{"role": m.role, "text": m.text} for m in self.messages],
            "temperature": self.temperature,
            "model": self.model,
        }


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    system: str
    shots: tuple[tuple[str, str], ...]  # (user, assistant) pairs

    def render(self) -> str:
        """Serialize back to the asset file format (used by the fidelity test)."""
        parts = ["=== system ===", self.system]
        for user, assistant in self.shots:
            parts += ["=== user ===", user, "=== assistant ===", assistant]
        return "\n".join(parts) + "\n"

    def request(
        self, user_turn: str, temperature: float = 0.2, model: str = "default"
    ) -> ChatRequest:
        messages = [ChatMessage("system", self.system)]
        for user, assistant in self.shots:
            messages.append(ChatMessage("user", user))
            messages.append(ChatMessage("assistant", assistant))
        messages.append(ChatMessage("user", user_turn))
        return ChatRequest(
            template_id=self.template_id,
            messages=tuple(messages),
            temperature=temperature,
            model=model,
        )


def _parse_asset(template_id: str, raw: str) -> PromptTemplate:
    sections: list[tuple[str, list[str]]] = []
    for line in raw.split("\n"):
        m = _SENTINEL.match(line)
        if m:
            sections.append((m.group(1), []))
        else:
            if not sections:
                raise ValueError(f"{template_id}: content before first sentinel")
            sections[-1][1].append(line)

    def text(lines: list[str]) -> str:
        # The render format puts exactly one newline before the next sentinel
        # and the file ends with one; strip that single trailing empty line.
        if lines and lines[-1] == "":
            lines = lines[:-1]
        return "\n".join(lines)

    if not sections or sections[0][0] != "system":
        raise ValueError(f"{template_id}: asset must start with the system section")
    system = text(sections[0][1])
    rest = sections[1:]
    if len(rest) % 2 != 0:
        raise ValueError(f"{template_id}: unpaired few-shot section")
    shots = []
    for i in range(0, len(rest), 2):
        if rest[i][0] != "user" or rest[i + 1][0] != "assistant":
            raise ValueError(f"{template_id}: few-shot sections must alternate user/assistant")
        shots.append((text(rest[i][1]), text(rest[i + 1][1])))
    return PromptTemplate(template_id=template_id, system=system, shots=tuple(shots))


def asset_text(template_id: str) -> str:
    if template_id not in TEMPLATE_IDS:
        raise ValueError(f"no asset for template id: {template_id!r}")
    return (
        resources.files("recomb.prompts")
        .joinpath("assets", f"{template_id}.txt")
        .read_text(encoding="utf-8")
    )


@lru_cache(maxsize=None)
def load_template(template_id: str) -> PromptTemplate:
    return _parse_asset(template_id, asset_text(template_id))
