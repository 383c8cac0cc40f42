"""In-memory session store with idle TTL and per-session serialization.

Sessions expire after `ttl` seconds of inactivity; expired or completed
sessions are flushed to the transcripts directory before removal. Checkout
hands back the session under that session's lock, so concurrent requests on
one session serialize while distinct sessions run freely.
"""

from __future__ import annotations

import logging
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable

from ace.errors import SessionError, SessionExpiredError

log = logging.getLogger(__name__)

Flusher = Callable[[str, object], None]


@dataclass
class _Entry:
    kind: str
    session: object
    last_access: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self, ttl: float = 1800.0, flusher: Flusher | None = None):
        self.ttl = ttl
        self.flusher = flusher
        self._entries: dict[str, _Entry] = {}
        self._guard = threading.Lock()

    def put(self, kind: str, session_id: str, session: object) -> None:
        with self._guard:
            self._entries[session_id] = _Entry(kind, session, time.monotonic())

    def _flush(self, session_id: str, entry: _Entry) -> None:
        if self.flusher is not None:
            try:
                self.flusher(entry.kind, entry.session)
            except Exception:
                log.exception("failed to flush transcript for session %s", session_id)

    def sweep(self) -> int:
        """Flush and drop idle-expired sessions; returns how many."""
        now = time.monotonic()
        expired = []
        with self._guard:
            for session_id, entry in list(self._entries.items()):
                if now - entry.last_access > self.ttl:
                    expired.append((session_id, entry))
                    del self._entries[session_id]
        for session_id, entry in expired:
            self._flush(session_id, entry)
            log.info("session %s expired after idle TTL", session_id)
        return len(expired)

    @contextmanager
    def checkout(self, session_id: str, kind: str):
        self.sweep()
        with self._guard:
            entry = self._entries.get(session_id)
        if entry is None:
            raise SessionExpiredError(f"session {session_id} does not exist or has expired")
        if entry.kind != kind:
            raise SessionError(f"session {session_id} is a {entry.kind} session, not {kind}")
        with entry.lock:
            entry.last_access = time.monotonic()
            yield entry.session
            entry.last_access = time.monotonic()

    def close(self, session_id: str) -> None:
        """Flush and remove a finished session."""
        with self._guard:
            entry = self._entries.pop(session_id, None)
        if entry is not None:
            self._flush(session_id, entry)

    def flush_one(self, session_id: str) -> None:
        """Flush a session's transcript while keeping the session live."""
        with self._guard:
            entry = self._entries.get(session_id)
        if entry is not None:
            self._flush(session_id, entry)

    def flush_all(self) -> None:
        with self._guard:
            entries = list(self._entries.items())
            self._entries.clear()
        for session_id, entry in entries:
            self._flush(session_id, entry)
