"""Minimal S-expression reader shared by the type, μTCL and FPC front ends."""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s();]+))")


class SyntaxError(Exception):  # noqa: A001 - deliberately mirrors the domain name
    def __init__(self, message: str, location: int | None = None):
        self.location = location
        where = f" at offset {location}" if location is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class Atom:
    text: str
    pos: int


@dataclass(frozen=True)
class SList:
    items: tuple
    pos: int

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom):
            return self.items[0].text
        return None


def _tokens(text: str):
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                return
            raise SyntaxError("unexpected character", pos)
        pos = m.end()
        if m.group(1):
            continue
        if m.group(2):
            yield "(", m.start(2)
        elif m.group(3):
            yield ")", m.start(3)
        elif m.group(4):
            yield m.group(4), m.start(4)


def read_all(text: str) -> list:
    """Read every top-level datum in ``text``."""
    stack: list[tuple[int, list]] = []
    out: list = []
    for tok, pos in _tokens(text):
        if tok == "(":
            stack.append((pos, []))
        elif tok == ")":
            if not stack:
                raise SyntaxError("unbalanced ')'", pos)
            start, items = stack.pop()
            node = SList(tuple(items), start)
            (stack[-1][1] if stack else out).append(node)
        else:
            node = Atom(tok, pos)
            (stack[-1][1] if stack else out).append(node)
    if stack:
        raise SyntaxError("unclosed '('", stack[-1][0])
    return out


def read_one(text: str):
    data = read_all(text)
    if len(data) != 1:
        raise SyntaxError(f"expected exactly one expression, found {len(data)}", 0)
    return data[0]
