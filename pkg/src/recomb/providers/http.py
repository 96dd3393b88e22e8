"""JSON-over-HTTP provider clients.

Each provider is a single POST endpoint with a small JSON schema; images move
as base64 strings. Retries apply to retryable failures only (timeouts, 5xx,
429) with exponential backoff.
"""
from __future__ import annotations

import base64
import time
from typing import Any, Sequence

import httpx
import numpy as np

from ..layout import ScoredSegment
from ..model import BBox, fit_fractions, validate_bbox
from ..prompts import ChatRequest
from .base import (
    EmptyResponseError,
    ProviderBundle,
    ProviderConfig,
    ProviderTimeout,
    RemoteProviderError,
)

_RETRYABLE_STATUS = {429, 500, 502, 503, 504}


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def _unb64(text: str) -> bytes:
    try:
        return base64.b64decode(text, validate=True)
    except Exception as exc:
        raise RemoteProviderError(f"invalid base64 image payload: {exc}") from exc


class HttpProviderClient:
    """Shared POST-with-retries plumbing; subclasses define the endpoint schema."""

    def __init__(self, config: ProviderConfig, client: httpx.Client | None = None):
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout_ms / 1000.0)

    def _post(self, payload: dict[str, Any]) -> dict[str, Any]:
        headers = {}
        token = self.config.token()
        if token:
            headers["Authorization"] = f"Bearer {token}"
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt > 0 and self.config.backoff_s > 0:
                time.sleep(self.config.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._client.post(self.config.url, json=payload, headers=headers)
            except httpx.TimeoutException as exc:
                last_error = ProviderTimeout(f"{self.config.url}: {exc}")
                continue
            except httpx.HTTPError as exc:
                raise RemoteProviderError(f"{self.config.url}: {exc}") from exc
            if resp.status_code in _RETRYABLE_STATUS:
                last_error = RemoteProviderError(
                    f"{self.config.url}: HTTP {resp.status_code}",
                    status=resp.status_code,
                    retryable=True,
                )
                continue
            if resp.status_code >= 400:
                raise RemoteProviderError(
                    f"{self.config.url}: HTTP {resp.status_code}", status=resp.status_code
                )
            try:
                return resp.json()
            except ValueError as exc:
                raise RemoteProviderError(f"{self.config.url}: non-JSON body") from exc
        assert last_error is not None
        raise last_error


class HttpCaptioner(HttpProviderClient):
    provider_id = "http-captioner"

    def caption(self, image: bytes) -> str:
        body = self._post({"image_b64": _b64(image)})
        text = str(body.get("caption", "")).strip()
        if not text:
            raise EmptyResponseError("captioner returned an empty caption")
        return text.split("\n", 1)[0]


class HttpSegmenter(HttpProviderClient):
    provider_id = "http-segmenter"

    def segment(self, image: bytes) -> list[ScoredSegment]:
        body = self._post({"image_b64": _b64(image)})
        segments = []
        for entry in body.get("segments", []):
            box_d = entry.get("box", {})
            score = float(entry.get("score", 0.0))
            if score < 0:
                raise RemoteProviderError("segmenter returned a negative score")
            comps, _ = fit_fractions(
                float(box_d.get("x", 0)),
                float(box_d.get("y", 0)),
                float(box_d.get("w", 0)),
                float(box_d.get("h", 0)),
            )
            box = BBox(*comps)
            if validate_bbox(box) is not None:
                raise RemoteProviderError(f"segmenter box invalid: {validate_bbox(box)}")
            segments.append(ScoredSegment(bbox=box, score=score))
        return segments


class HttpChat(HttpProviderClient):
    provider_id = "http-chat"

    def chat(self, request: ChatRequest) -> str:
        body = self._post(request.to_dict())
        text = str(body.get("text", ""))
        if not text.strip():
            raise EmptyResponseError("chat returned an empty response")
        return text


class HttpLayoutImageGenerator(HttpProviderClient):
    provider_id = "http-imagegen"

    def generate_image(
        self, caption: str, layout: Sequence[tuple[str, BBox]], canvas_px: int = 512
    ) -> bytes:
        if not layout:
            raise ValueError("layout must contain at least one box")
        body = self._post(
            {
                "caption": caption,
                "canvas_px": canvas_px,
                "layout": [{"name": n, "box": b.to_dict()} for n, b in layout],
            }
        )
        return _unb64(str(body.get("image_b64", "")))


class HttpSketchStylizer(HttpProviderClient):
    provider_id = "http-sketch"

    def stylize_sketch(self, image: bytes) -> bytes:
        body = self._post({"image_b64": _b64(image)})
        return _unb64(str(body.get("image_b64", "")))


class HttpEmbedder(HttpProviderClient):
    provider_id = "http-embedder"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            raise ValueError("embed requires at least one text")
        body = self._post({"texts": list(texts)})
        vectors = np.asarray(body.get("vectors", []), dtype=float)
        if vectors.ndim != 2 or vectors.shape[0] != len(texts):
            raise RemoteProviderError("embedder returned a malformed vector list")
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(norms == 0):
            raise RemoteProviderError("embedder returned a zero vector")
        return vectors / norms[:, None]  # renormalize boundary noise


def bundle_from_env(client: httpx.Client | None = None) -> ProviderBundle:
    """Build an all-HTTP bundle from RECOMB_<PROVIDER>_* environment variables."""
    return ProviderBundle(
        captioner=HttpCaptioner(ProviderConfig.from_env("captioner"), client),
        segmenter=HttpSegmenter(ProviderConfig.from_env("segmenter"), client),
        chat=HttpChat(ProviderConfig.from_env("chat"), client),
        layout_image_generator=HttpLayoutImageGenerator(
            ProviderConfig.from_env("imagegen"), client
        ),
        sketch_stylizer=HttpSketchStylizer(ProviderConfig.from_env("sketch"), client),
        embedder=HttpEmbedder(ProviderConfig.from_env("embedder"), client),
    )
