"""Tokenizer shared by the network, property and schedule parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DSLError

__all__ = ["Token", "Diagnostic", "tokenize"]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 1
    col: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.code}: {self.message}"

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "line": self.line, "col": self.col}


@dataclass(frozen=True)
class Token:
    kind: str  # INT TIME IDENT OP EOF
    text: str
    line: int
    col: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.col)


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(?://|\#)[^\n]*)
  | (?P<TIME>\d+s\b)
  | (?P<INT>\d+)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<OP>\.\.|->|&&|\|\||==|!=|<=|>=|[-+*/<>=!?(){}\[\];:,.])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        col = i - line_start + 1
        if m is None:
            raise DSLError([Diagnostic("SYNTAX_ERROR", f"unexpected character {text[i]!r}", line, col)])
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col))
        i = m.end()
    tokens.append(Token("EOF", "", line, i - line_start + 1))
    return tokens
