"""HTTP JSON API and command-line interface."""

from ace.service.app import create_app, serve
from ace.service.sessions import SessionStore

__all__ = ["SessionStore", "create_app", "serve"]
