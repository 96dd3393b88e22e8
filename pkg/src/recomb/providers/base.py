"""Provider interfaces for the six external model capabilities, plus the
error taxonomy and per-provider configuration.

Every call is idempotent from the caller's perspective, so retrying is safe.
Implementations must tolerate concurrent in-flight calls.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from ..layout import ScoredSegment
from ..model import BBox
from ..prompts import ChatRequest

PROVIDER_NAMES = ("captioner", "segmenter", "chat", "imagegen", "sketch", "embedder")


class ProviderError(Exception):
    """Base class; ``retryable`` tells the retry loop whether to try again."""

    retryable = False


class ProviderTimeout(ProviderError):
    retryable = True


class RemoteProviderError(ProviderError):
    def __init__(self, message: str, status: int | None = None, retryable: bool = False):
        super().__init__(message)
        self.status = status
        self.retryable = retryable


class UndecodableImageError(ProviderError):
    retryable = False


class EmptyResponseError(ProviderError):
    retryable = True


@dataclass(frozen=True)
class ProviderConfig:
    url: str
    token_env: str = ""
    timeout_ms: int = 30_000
    max_retries: int = 2
    backoff_s: float = 0.2

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    def token(self) -> str | None:
        return os.environ.get(self.token_env) if self.token_env else None

    @classmethod
    def from_env(cls, provider: str) -> "ProviderConfig":
        """Read RECOMB_<PROVIDER>_URL / _TOKEN / _TIMEOUT_MS."""
        prefix = f"RECOMB_{provider.upper()}"
        url = os.environ.get(f"{prefix}_URL")
        if not url:
            raise ValueError(f"{prefix}_URL is not set")
        return cls(
            url=url,
            token_env=f"{prefix}_TOKEN",
            timeout_ms=int(os.environ.get(f"{prefix}_TIMEOUT_MS", "30000")),
        )


@runtime_checkable
class Captioner(Protocol):
    def caption(self, image: bytes) -> str: ...


@runtime_checkable
class Segmenter(Protocol):
    def segment(self, image: bytes) -> list[ScoredSegment]: ...


@runtime_checkable
class ChatModel(Protocol):
    def chat(self, request: ChatRequest) -> str: ...


@runtime_checkable
class LayoutImageGenerator(Protocol):
    def generate_image(
        self, caption: str, layout: Sequence[tuple[str, BBox]], canvas_px: int = 512
    ) -> bytes: ...


@runtime_checkable
class SketchStylizer(Protocol):
    def stylize_sketch(self, image: bytes) -> bytes: ...


@runtime_checkable
class Embedder(Protocol):
    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


@dataclass(frozen=True)
class ProviderBundle:
    """The six model endpoints; each field is any implementation of its protocol."""

    captioner: Captioner
    segmenter: Segmenter
    chat: ChatModel
    layout_image_generator: LayoutImageGenerator
    sketch_stylizer: SketchStylizer
    embedder: Embedder

    def provider_ids(self) -> dict[str, str]:
        """Human-readable implementation ids for report metadata."""

        def pid(obj) -> str:
            return getattr(obj, "provider_id", type(obj).__name__)

        return {
            "captioner": pid(self.captioner),
            "segmenter": pid(self.segmenter),
            "chat": pid(self.chat),
            "imagegen": pid(self.layout_image_generator),
            "sketch": pid(self.sketch_stylizer),
            "embedder": pid(self.embedder),
        }
