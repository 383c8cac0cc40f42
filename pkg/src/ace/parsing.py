"""Tolerant extraction of structured content from model replies.

Models fence JSON, prepend prose, or trail commentary; these helpers pull
out the first well-formed JSON value or numbered list without ever executing
anything.
"""

from __future__ import annotations

import json
import re

_FENCE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)
_NUMBERED = re.compile(r"^\s*(\d+)[.):]\s+(.*\S)\s*$")


def strip_code_fences(text: str) -> str:
    """Return the content of the first fenced block, or the text unchanged."""
    match = _FENCE.search(text)
    return match.group(1) if match else text


def extract_json_value(text: str):
    """Best-effort parse of the first JSON object or array in the text.

    Returns None when nothing parseable is found (callers decide whether
    that is an error or a retry).
    """
    for candidate in (text, strip_code_fences(text)):
        candidate = candidate.strip()
        try:
            return json.loads(candidate)
        except ValueError:
            pass
    # Scan for the first balanced {...} or [...] region.
    for opener, closer in (("{", "}"), ("[", "]")):
        start = text.find(opener)
        while start != -1:
            depth = 0
            in_string = False
            escaped = False
            for i in range(start, len(text)):
                ch = text[i]
                if in_string:
                    if escaped:
                        escaped = False
                    elif ch == "\\":
                        escaped = True
                    elif ch == '"':
                        in_string = False
                    continue
                if ch == '"':
                    in_string = True
                elif ch == opener:
                    depth += 1
                elif ch == closer:
                    depth -= 1
                    if depth == 0:
                        try:
                            return json.loads(text[start : i + 1])
                        except ValueError:
                            break
            start = text.find(opener, start + 1)
    return None


def parse_numbered_list(text: str) -> list[str]:
    """Extract "1. ..." style items in order; returns [] when none parse."""
    items: list[tuple[int, str]] = []
    for line in text.splitlines():
        match = _NUMBERED.match(line)
        if match:
            items.append((int(match.group(1)), match.group(2)))
    return [text for _num, text in items]
