"""File-backed board persistence: one directory per board, JSON documents plus
content-addressed image blobs, write-ahead logging of mutations.

A single writer mutates a given board at a time (per-board mutual exclusion);
reads see the last committed snapshot because snapshots replace atomically.
"""
from __future__ import annotations

import hashlib
import json
import threading
import time
from pathlib import Path
from typing import Any, Callable

from ..model import ActionKind, ActionRecord, Board, new_id, payload_digest


class UnknownBoardError(KeyError):
    pass


class UnknownBlobError(KeyError):
    pass


def _now_ms() -> int:
    return int(time.time() * 1000)


class BlobStore:
    """Content-addressed blob files under one directory."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)

    def save(self, data: bytes) -> str:
        sha = hashlib.sha256(data).hexdigest()
        path = self.root / sha
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            tmp.replace(path)
        return sha

    def load(self, sha: str) -> bytes:
        path = self.root / sha
        if not path.exists():
            raise UnknownBlobError(sha)
        return path.read_bytes()


class BoardStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.boards_dir = self.root / "boards"
        self.boards_dir.mkdir(parents=True, exist_ok=True)
        self.blobs = BlobStore(self.root / "blobs")
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- internals ---------------------------------------------------------

    def _lock_for(self, board_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(board_id, threading.Lock())

    def _board_dir(self, board_id: str) -> Path:
        return self.boards_dir / board_id

    def _snapshot_path(self, board_id: str) -> Path:
        return self._board_dir(board_id) / "board.json"

    def _wal_path(self, board_id: str) -> Path:
        return self._board_dir(board_id) / "wal.jsonl"

    def _write_snapshot(self, board: Board) -> None:
        path = self._snapshot_path(board.id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps(board.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        tmp.replace(path)

    def _append_wal(self, board_id: str, record: ActionRecord, payload: Any) -> None:
        line = json.dumps(
            {**record.to_dict(), "payload": payload}, sort_keys=True, default=str
        )
        with self._wal_path(board_id).open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()

    # -- public API ---------------------------------------------------------

    def create_board(self) -> Board:
        board = Board(id=new_id())
        self._board_dir(board.id).mkdir(parents=True, exist_ok=True)
        self._write_snapshot(board)
        return board

    def get(self, board_id: str) -> Board:
        path = self._snapshot_path(board_id)
        if not path.exists():
            raise UnknownBoardError(board_id)
        return Board.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_board_ids(self) -> list[str]:
        return sorted(p.name for p in self.boards_dir.iterdir() if p.is_dir())

    def mutate(
        self,
        board_id: str,
        kind: ActionKind,
        payload: Any,
        fn: Callable[[Board], Board],
    ) -> Board:
        """Apply ``fn`` under the board lock, WAL first, then commit the snapshot.

        Exactly one action record is appended per successful mutation; its
        timestamp is strictly greater than the previous record's.
        """
        with self._lock_for(board_id):
            board = self.get(board_id)
            updated = fn(board)
            last_ts = board.action_log[-1].ts_ms if board.action_log else 0
            record = ActionRecord(
                ts_ms=max(_now_ms(), last_ts + 1),
                kind=kind,
                digest=payload_digest(payload),
            )
            self._append_wal(board_id, record, payload)
            updated = updated.with_log(record)
            self._write_snapshot(updated)
            return updated

    def update_view_state(self, board_id: str, fn: Callable[[Board], Board]) -> Board:
        """Commit a view-only change (reference positions) without a log record."""
        with self._lock_for(board_id):
            updated = fn(self.get(board_id))
            self._write_snapshot(updated)
            return updated
