"""Provider interfaces, deterministic stubs, fault injectors, and HTTP clients."""
from .base import (
    Captioner,
    ChatModel,
    Embedder,
    EmptyResponseError,
    LayoutImageGenerator,
    ProviderBundle,
    ProviderConfig,
    ProviderError,
    ProviderTimeout,
    RemoteProviderError,
    Segmenter,
    SketchStylizer,
    UndecodableImageError,
)
from .faults import FailingChat, FlakyCaptioner, ScriptedChat
from .http import (
    HttpCaptioner,
    HttpChat,
    HttpEmbedder,
    HttpLayoutImageGenerator,
    HttpSegmenter,
    HttpSketchStylizer,
    bundle_from_env,
)
from .stub import (
    StubCaptioner,
    StubChat,
    StubEmbedder,
    StubLayoutImageGenerator,
    StubSegmenter,
    StubSketchStylizer,
    stub_bundle,
)

__all__ = [
    "Captioner",
    "ChatModel",
    "Embedder",
    "EmptyResponseError",
    "FailingChat",
    "FlakyCaptioner",
    "HttpCaptioner",
    "HttpChat",
    "HttpEmbedder",
    "HttpLayoutImageGenerator",
    "HttpSegmenter",
    "HttpSketchStylizer",
    "LayoutImageGenerator",
    "ProviderBundle",
    "ProviderConfig",
    "ProviderError",
    "ProviderTimeout",
    "RemoteProviderError",
    "ScriptedChat",
    "Segmenter",
    "SketchStylizer",
    "StubCaptioner",
    "StubChat",
    "StubEmbedder",
    "StubLayoutImageGenerator",
    "StubSegmenter",
    "StubSketchStylizer",
    "UndecodableImageError",
    "bundle_from_env",
    "stub_bundle",
]
