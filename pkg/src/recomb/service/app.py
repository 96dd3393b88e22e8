"""REST service exposing boards, references, keywords, recommendations, merges,
and sketches under /v1, with problem-details error bodies.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

from fastapi import FastAPI, Request, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from ..model import (
    ActionKind,
    Keyword,
    KeywordCategory,
    KeywordSource,
    Reference,
    dedup_keywords,
    new_id,
)
from ..pipeline import (
    InvalidStateError,
    PipelineConfig,
    PipelineError,
    extract_keywords_pipeline,
    keywords_to_set,
    merge_pipeline,
    more_sketches,
    recommend_pipeline,
)
from ..prompts import NoSubjectMatterError, ParseError
from ..providers.base import ProviderBundle, ProviderError, UndecodableImageError
from .store import BoardStore, UnknownBlobError, UnknownBoardError

DEFAULT_MAX_UPLOAD = 10 * 1024 * 1024  # PNG/JPEG references up to 10 MB


@dataclass(frozen=True)
class ServiceConfig:
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)


def problem(status: int, title: str, detail: str, **extra: Any) -> JSONResponse:
    body = {"type": "about:blank", "title": title, "detail": detail, "status": status}
    body.update(extra)
    return JSONResponse(body, status_code=status, media_type="application/problem+json")


def _category(raw: str) -> KeywordCategory:
    return KeywordCategory.from_str(raw)


def _manual_keyword(entry: dict[str, Any], source: KeywordSource) -> Keyword:
    return Keyword(
        id=new_id(),
        category=_category(entry["category"]),
        text=entry.get("text", ""),
        source=source,
        source_image=entry.get("source_image"),
        arrangement_id=entry.get("arrangement_id"),
    )


def create_app(
    store: BoardStore,
    bundle: ProviderBundle,
    config: ServiceConfig = ServiceConfig(),
) -> FastAPI:
    app = FastAPI(title="recomb board service", version="1")

    class _StoreSink:
        def save(self, data: bytes) -> str:
            return store.blobs.save(data)

    sink = _StoreSink()

    @app.exception_handler(UnknownBoardError)
    async def _unknown_board(_req: Request, exc: UnknownBoardError):
        return problem(404, "unknown board", f"no board {exc.args[0]!r}")

    @app.exception_handler(ProviderError)
    async def _provider_error(_req: Request, exc: ProviderError):
        return problem(502, "provider failure", str(exc))

    @app.exception_handler(ParseError)
    async def _parse_error(_req: Request, exc: ParseError):
        # Raw model text rides along so the UI can display what failed.
        return problem(502, "unparseable model output", str(exc), raw=exc.raw)

    @app.exception_handler(PipelineError)
    async def _pipeline_error(_req: Request, exc: PipelineError):
        return problem(502, "pipeline failure", str(exc))

    # -- boards -------------------------------------------------------------

    @app.post("/v1/boards", status_code=201)
    def create_board() -> dict:
        return store.create_board().to_dict()

    @app.get("/v1/boards/{board_id}")
    def get_board(board_id: str) -> dict:
        return store.get(board_id).to_dict()

    # -- references ----------------------------------------------------------

    @app.post("/v1/boards/{board_id}/references", status_code=201)
    async def add_reference(board_id: str, image: UploadFile):
        store.get(board_id)  # 404 before reading the body
        data = await image.read()
        if len(data) > config.max_upload_bytes:
            return problem(
                413, "image too large", f"limit is {config.max_upload_bytes} bytes"
            )
        try:
            blob_sha = store.blobs.save(data)
            ref_id = new_id()
            result = extract_keywords_pipeline(
                bundle, data, config.pipeline, source_image=ref_id
            )
        except UndecodableImageError as exc:
            return problem(422, "undecodable image", str(exc))

        keywords = [
            Keyword(id=new_id(), category=cat, text=text,
                    source=KeywordSource.EXTRACTED, source_image=ref_id)
            for cat, texts in (
                (KeywordCategory.SUBJECT_MATTER, result.keywords.subject_matter),
                (KeywordCategory.ACTION_POSE, result.keywords.action_pose),
                (KeywordCategory.THEME_MOOD, result.keywords.theme_mood),
            )
            for text in texts
        ]
        if result.arrangement is not None:
            keywords.append(
                Keyword(
                    id=new_id(),
                    category=KeywordCategory.ARRANGEMENT,
                    source=KeywordSource.EXTRACTED,
                    source_image=ref_id,
                    arrangement_id=result.arrangement.id,
                )
            )
        ref = Reference(
            id=ref_id,
            blob_sha=blob_sha,
            keywords=tuple(dedup_keywords(keywords)),
            arrangement=result.arrangement,
            degraded=result.degraded,
        )
        payload = {"reference": ref_id, "blob": blob_sha}
        store.mutate(board_id, ActionKind.ADD_REFERENCE, payload,
                     lambda b: b.with_reference(ref))
        return {"reference": ref.to_dict(), "degraded": result.degraded}

    @app.put("/v1/boards/{board_id}/references/{ref_id}/position")
    def set_position(board_id: str, ref_id: str, body: dict):
        # View-only state for the mood-board canvas; intentionally unlogged.
        if all(r.id != ref_id for r in store.get(board_id).references):
            return problem(404, "unknown reference", f"no reference {ref_id!r}")
        x, y = float(body["x"]), float(body["y"])

        def fn(board):
            refs = tuple(
                replace(r, position=(x, y)) if r.id == ref_id else r
                for r in board.references
            )
            return replace(board, references=refs)

        return store.update_view_state(board_id, fn).to_dict()

    # -- keywords ------------------------------------------------------------

    @app.post("/v1/boards/{board_id}/keywords", status_code=201)
    def add_keywords(board_id: str, body: dict):
        entries = body.get("keywords", [])
        if not entries:
            return problem(400, "empty request", "provide at least one keyword")
        try:
            fresh = [_manual_keyword(e, KeywordSource.MANUAL) for e in entries]
        except (KeyError, ValueError) as exc:
            return problem(400, "invalid keyword", str(exc))
        board = store.mutate(
            board_id,
            ActionKind.ADD_KEYWORD,
            {"texts": [k.text for k in fresh]},
            lambda b: b.with_free_keywords(fresh),
        )
        return {"keywords": [k.to_dict() for k in board.keywords]}

    @app.post("/v1/boards/{board_id}/keywords:select")
    def select_keywords(board_id: str, body: dict):
        board = store.get(board_id)
        keyword_ids = body.get("keyword_ids", [])
        manual_entries = body.get("manual", [])
        deselect_ids = set(body.get("deselect_ids", []))

        picked: list[Keyword] = []
        for kid in keyword_ids:
            kw = board.find_keyword(kid)
            if kw is None:
                return problem(404, "unknown keyword", f"no keyword {kid!r}")
            picked.append(kw)
        try:
            manual = [_manual_keyword(e, KeywordSource.MANUAL) for e in manual_entries]
        except (KeyError, ValueError) as exc:
            return problem(400, "invalid keyword", str(exc))

        def fn(b):
            b = b.with_free_keywords(manual)
            selection = [
                kw for kw in b.selected_keywords if kw.id not in deselect_ids
            ] + picked + manual
            return b.with_selection(selection)

        payload = {"select": keyword_ids, "manual": [k.text for k in manual],
                   "deselect": sorted(deselect_ids)}
        board = store.mutate(board_id, ActionKind.SELECT_KEYWORD, payload, fn)
        return {"selected_keywords": [k.to_dict() for k in board.selected_keywords]}

    # -- recommendations -------------------------------------------------------

    @app.post("/v1/boards/{board_id}/recommendations")
    def recommend(board_id: str, body: dict | None = None):
        board = store.get(board_id)
        scope = (body or {}).get("scope", "auto")
        if scope not in ("auto", "selected", "board"):
            return problem(400, "invalid scope", "scope must be auto|selected|board")
        if scope == "selected" or (scope == "auto" and board.selected_keywords):
            basis = board.selected_keywords
        else:
            basis = board.all_keywords()
        selected_set = keywords_to_set(basis)
        if selected_set.is_empty():
            return problem(409, "no keywords", "add or select keywords before asking for recommendations")

        recommended = recommend_pipeline(bundle, selected_set, config.pipeline)
        fresh = [
            Keyword(id=new_id(), category=cat, text=text, source=KeywordSource.RECOMMENDED)
            for cat, texts in (
                (KeywordCategory.SUBJECT_MATTER, recommended.subject_matter),
                (KeywordCategory.ACTION_POSE, recommended.action_pose),
                (KeywordCategory.THEME_MOOD, recommended.theme_mood),
            )
            for text in texts
        ]

        added: list[Keyword] = []

        def fn(b):
            existing = {kw.dedup_key() for kw in b.all_keywords()}
            added.extend(k for k in fresh if k.dedup_key() not in existing)
            return b.with_free_keywords(added)

        store.mutate(board_id, ActionKind.RECOMMEND, {"scope": scope}, fn)
        return {"keywords": [k.to_dict() for k in added]}

    # -- merge and sketches -----------------------------------------------------

    @app.post("/v1/boards/{board_id}/merges", status_code=201)
    def merge(board_id: str, body: dict | None = None):
        board = store.get(board_id)
        keyword_ids = (body or {}).get("keyword_ids")
        if keyword_ids:
            selection = []
            for kid in keyword_ids:
                kw = board.find_keyword(kid)
                if kw is None:
                    return problem(404, "unknown keyword", f"no keyword {kid!r}")
                selection.append(kw)
        else:
            selection = list(board.selected_keywords)
        selected_set = keywords_to_set(selection)
        arrangement = None
        for kw in selection:
            if kw.category is KeywordCategory.ARRANGEMENT and kw.arrangement_id:
                arrangement = board.find_arrangement(kw.arrangement_id)
                break
        try:
            result = merge_pipeline(
                bundle, selected_set, arrangement, sink, config.pipeline,
                id_salt=str(len(board.drafts)),
            )
        except NoSubjectMatterError as exc:
            return problem(422, "no subject matter selected", str(exc))

        def fn(b):
            for draft in result.drafts:
                b = b.with_draft(draft)
            return b

        payload = {"keywords": sorted(k.text or k.arrangement_id or "" for k in selection)}
        store.mutate(board_id, ActionKind.MERGE, payload, fn)
        return {
            "drafts": [d.to_dict() for d in result.drafts],
            "degraded": result.degraded,
            "dropped": result.dropped,
        }

    @app.post("/v1/boards/{board_id}/drafts/{draft_id}/sketches", status_code=201)
    def request_more_sketches(board_id: str, draft_id: str):
        board = store.get(board_id)
        draft = board.find_draft(draft_id)
        if draft is None:
            return problem(404, "unknown draft", f"no draft {draft_id!r}")
        try:
            updated, shas = more_sketches(bundle, draft, sink, config.pipeline)
        except InvalidStateError as exc:
            return problem(409, "draft has no stored layouts", str(exc))
        store.mutate(
            board_id,
            ActionKind.MORE_SKETCHES,
            {"draft": draft_id, "count": len(shas)},
            lambda b: b.with_draft_replaced(updated),
        )
        return {"draft": updated.to_dict(), "sketches": list(shas)}

    @app.post("/v1/boards/{board_id}/drafts/{draft_id}/complete")
    def complete_sketch(board_id: str, draft_id: str, body: dict | None = None):
        board = store.get(board_id)
        if board.find_draft(draft_id) is None:
            return problem(404, "unknown draft", f"no draft {draft_id!r}")
        payload = {"draft": draft_id, "rating": (body or {}).get("rating")}
        store.mutate(board_id, ActionKind.COMPLETE_SKETCH, payload, lambda b: b)
        return {"ok": True}

    # -- log and blobs -----------------------------------------------------------

    @app.get("/v1/boards/{board_id}/log")
    def export_log(board_id: str):
        board = store.get(board_id)
        lines = "".join(
            json.dumps(rec.to_dict(), sort_keys=True) + "\n" for rec in board.action_log
        )
        return PlainTextResponse(lines, media_type="application/x-ndjson")

    @app.get("/v1/blobs/{sha}")
    def get_blob(sha: str):
        try:
            data = store.blobs.load(sha)
        except UnknownBlobError:
            return problem(404, "unknown blob", f"no blob {sha!r}")
        if data[:8] == b"\x89PNG\r\n\x1a\n":
            media = "image/png"
        elif data[:2] == b"\xff\xd8":
            media = "image/jpeg"
        else:
            media = "application/octet-stream"
        return Response(content=data, media_type=media)

    return app
