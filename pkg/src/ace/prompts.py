"""Prompt pack: plain-text templates with literal placeholder substitution.

Templates live in the packaged `prompts/` directory; a config may point at
an alternative directory so instructors can tune wording without touching
code. Placeholders are replaced literally ({name} -> value), never through
str.format, so template text and substituted values may contain braces.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ace.errors import InputError


class PromptPack:
    def __init__(self, directory: str | Path | None = None):
        self._dir = Path(directory) if directory else None
        self._cache: dict[str, str] = {}

    def raw(self, name: str) -> str:
        if name not in self._cache:
            if self._dir is not None:
                path = self._dir / f"{name}.txt"
                if not path.is_file():
                    raise InputError(f"prompt template {name!r} not found in {self._dir}")
                self._cache[name] = path.read_text(encoding="utf-8")
            else:
                ref = resources.files("ace").joinpath(f"prompts/{name}.txt")
                try:
                    self._cache[name] = ref.read_text(encoding="utf-8")
                except FileNotFoundError:
                    raise InputError(f"prompt template {name!r} not packaged")
        return self._cache[name]

    def render(self, name: str, **subs: str) -> str:
        text = self.raw(name)
        for key, value in subs.items():
            text = text.replace("{" + key + "}", str(value))
        return text.strip()
