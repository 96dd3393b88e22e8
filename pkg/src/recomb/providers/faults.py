"""Fault-injecting provider wrappers for degradation and resilience tests."""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

from ..prompts import ChatRequest
from .base import Captioner, ChatModel, ProviderTimeout


@dataclass
class FlakyCaptioner:
    """Delegates to ``inner`` but times out on the given 0-based call indices."""

    inner: Captioner
    fail_calls: frozenset[int] = frozenset()
    calls: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def caption(self, image: bytes) -> str:
        with self._lock:
            index = self.calls
            self.calls += 1
        if index in self.fail_calls:
            raise ProviderTimeout(f"injected caption timeout (call {index})")
        return self.inner.caption(image)


@dataclass
class ScriptedChat:
    """Returns scripted texts for chosen template ids, else delegates.

    Each scripted entry is consumed once (front of the list first); use it to
    feed malformed output into a single pipeline step.
    """

    inner: ChatModel
    scripts: dict[str, list[str]] = field(default_factory=dict)

    def chat(self, request: ChatRequest) -> str:
        queue = self.scripts.get(request.template_id)
        if queue:
            return queue.pop(0)
        return self.inner.chat(request)


@dataclass
class FailingChat:
    """Times out on every call for the given template ids, else delegates."""

    inner: ChatModel
    fail_templates: frozenset[str] = frozenset()

    def chat(self, request: ChatRequest) -> str:
        if request.template_id in self.fail_templates:
            raise ProviderTimeout(f"injected chat timeout ({request.template_id})")
        return self.inner.chat(request)
