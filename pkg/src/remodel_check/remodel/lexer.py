from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

from .ast import Diagnostic, Span


@dataclass(frozen=True)
class Token:
    kind: str  # ID INT REAL STRING OP ATPRE ANNOT EOF
    value: str
    line: int
    col: int
    offset: int
    end: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.col)

    def is_op(self, *values: str) -> bool:
        return self.kind == "OP" and self.value in values

    def is_id(self, *values: str) -> bool:
        return self.kind == "ID" and (not values or self.value in values)


class LexError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


_SPEC = [
    ("WS", r"[ \t\r\f]+"),
    ("NL", r"\n"),
    ("LINE_COMMENT", r"//[^\n]*"),
    ("BLOCK_COMMENT", r"/\*.*?\*/"),
    ("REAL", r"\d+\.\d+(?:[eE][+-]?\d+)?"),
    ("INT", r"\d+"),
    ("STRING", r"\"(?:[^\"\\\n]|\\.)*\"|'(?:[^'\\\n]|\\.)*'"),
    ("ATPRE", r"@pre\b"),
    ("ANNOT", r"@[A-Za-z_]\w*"),
    ("ID", r"[A-Za-z_]\w*"),
    ("OP", r"::|->|<>|<=|>=|[-+*/=<>(){}\[\],.:;|^?]"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _SPEC), re.S)


def tokenize(text: str, source: str = "<input>") -> List[Token]:
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _MASTER.match(text, pos)
        if m is not None and text.startswith("/*", pos) and m.lastgroup != "BLOCK_COMMENT":
            m = None
        if m is None:
            col = pos - line_start + 1
            what = ("unterminated comment" if text.startswith("/*", pos)
                    else f"unexpected character {text[pos]!r}")
            raise LexError(Diagnostic("error", what, Span(line, col), source))
        kind = m.lastgroup
        value = m.group()
        if kind == "NL":
            line += 1
            line_start = m.end()
        elif kind in ("WS", "LINE_COMMENT"):
            pass
        elif kind == "BLOCK_COMMENT":
            newlines = value.count("\n")
            if newlines:
                line += newlines
                line_start = pos + value.rfind("\n") + 1
        else:
            tokens.append(Token(kind, value, line, pos - line_start + 1, pos, m.end()))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1, pos, pos))
    return tokens
