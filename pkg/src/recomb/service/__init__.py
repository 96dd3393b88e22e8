"""Board persistence and the REST service."""
from .app import ServiceConfig, create_app, problem
from .store import BlobStore, BoardStore, UnknownBlobError, UnknownBoardError

__all__ = [
    "BlobStore",
    "BoardStore",
    "ServiceConfig",
    "UnknownBlobError",
    "UnknownBoardError",
    "create_app",
    "problem",
]
