"""Live assessment HTTP service: FastAPI app, schemas and session store."""

from .app import ModelRegistry, create_app
from .sessions import CompiledModel, Event, Session, SessionStore

__all__ = [
    "CompiledModel",
    "Event",
    "ModelRegistry",
    "Session",
    "SessionStore",
    "create_app",
]
