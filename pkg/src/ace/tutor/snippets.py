"""Snippet plumbing for the code tutor.

Programs grow by plain line-append; indentation carries block structure.
`complete_block_opener` makes a partial program runnable when its final
line opens a block, and duplicate-prefix stripping keeps models honest when
they repeat lines the program already has.
"""

from __future__ import annotations

from ace.parsing import strip_code_fences


def complete_block_opener(snippet: str) -> str:
    """Append a one-line placeholder body when the final non-empty line ends
    with the block-opener character ':'; otherwise return unchanged."""
    lines = snippet.split("\n")
    for i in range(len(lines) - 1, -1, -1):
        stripped = lines[i].rstrip()
        if stripped:
            if stripped.endswith(":"):
                indent = lines[i][: len(lines[i]) - len(lines[i].lstrip())]
                lines.insert(i + 1, indent + "    pass")
                return "\n".join(lines)
            return snippet
    return snippet


def strip_duplicate_prefix(cumulative: str, snippet: str) -> str:
    """Drop leading snippet lines that repeat the tail of the program.

    Comparison ignores trailing whitespace per line. Leading blank lines of
    the remainder are dropped too.
    """
    if not cumulative.strip() or not snippet.strip():
        return snippet
    cum_lines = [l.rstrip() for l in cumulative.split("\n") if l.strip()]
    snip_lines = snippet.split("\n")
    snip_stripped = [l.rstrip() for l in snip_lines]
    max_k = min(len(cum_lines), len(snip_lines))
    for k in range(max_k, 0, -1):
        if cum_lines[-k:] == [l for l in snip_stripped[:k]]:
            remainder = snip_lines[k:]
            while remainder and not remainder[0].strip():
                remainder.pop(0)
            return "\n".join(remainder)
    return snippet


def extract_code(reply: str) -> str:
    """Pull code out of a model reply: first fenced block if present,
    otherwise the reply itself, trimmed of blank padding."""
    code = strip_code_fences(reply)
    lines = code.split("\n")
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    return "\n".join(lines)


def normalize_code(code: str) -> str:
    """Whitespace-normalized form for textual-equality comparison: trailing
    whitespace stripped per line, blank edge lines removed."""
    lines = [l.rstrip() for l in code.split("\n")]
    while lines and not lines[0]:
        lines.pop(0)
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines)


def join_program(parts: list[str]) -> str:
    """Assemble accepted snippets into one program."""
    cleaned = [normalize_code(p) for p in parts if p and p.strip()]
    return "\n".join(cleaned)


def match_output(actual: str, expected: str) -> bool:
    """Output equality modulo trailing whitespace per line and trailing
    newlines: '2' matches '2\\n'; 'a \\n' matches 'a'; 'a' never matches 'b'."""
    def canon(text: str) -> str:
        lines = [l.rstrip() for l in text.split("\n")]
        while lines and not lines[-1]:
            lines.pop()
        return "\n".join(lines)

    return canon(actual) == canon(expected)
