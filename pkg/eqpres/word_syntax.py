"""Text form of words over S.

    word   := term*
    term   := atom ('^' int)?
    atom   := SYMBOL | '(' word ')' | '[' word ',' word ']'
    SYMBOL := orbitname '.' digits
    int    := '-'? digits

``[a, b]`` is a b a^-1 b^-1. Terms are separated by whitespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .action import GammaSet
from .errors import ParseError, UnknownSymbol
from .word import Letter, SymbolRef, Word, raw_invert

TOKEN_RE = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<symbol>[A-Za-z_][A-Za-z0-9_]*\.[0-9]+)"
    r"|(?P<int>-?[0-9]+)"
    r"|(?P<punct>[\^\(\)\[\],])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == "space":
            chunk = match.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
        else:
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


def resolve_symbol(gs: GammaSet, name: str) -> SymbolRef:
    rep, _, digits = name.rpartition(".")
    for index, orbit in enumerate(gs.orbits):
        if orbit.rep_name == rep:
            point = int(digits)
            if point >= orbit.domain_size:
                raise UnknownSymbol(f"symbol '{name}' is outside orbit '{rep}' of size {orbit.domain_size}")
            return SymbolRef(index, point)
    raise UnknownSymbol(f"unknown orbit '{rep}' in symbol '{name}'")


class _Parser:
    def __init__(self, text: str, gs: GammaSet):
        self.tokens = tokenize(text)
        self.pos = 0
        self.gs = gs

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self, text: str) -> Token:
        token = self.peek()
        if token.text != text or token.kind == "end":
            raise ParseError(f"expected {text!r}, found {token.text or 'end of input'!r}", token.line, token.column)
        self.pos += 1
        return token

    def word(self) -> tuple[Letter, ...]:
        out: list[Letter] = []
        while True:
            token = self.peek()
            if token.kind == "symbol" or token.text in ("(", "["):
                out.extend(self.term())
            else:
                return tuple(out)

    def term(self) -> tuple[Letter, ...]:
        base = self.atom()
        if self.peek().text != "^":
            return base
        self.take("^")
        token = self.peek()
        if token.kind != "int":
            raise ParseError(f"expected an integer exponent, found {token.text or 'end of input'!r}", token.line, token.column)
        self.pos += 1
        exponent = int(token.text)
        unit = base if exponent >= 0 else raw_invert(base)
        return unit * abs(exponent)

    def atom(self) -> tuple[Letter, ...]:
        token = self.peek()
        if token.kind == "symbol":
            self.pos += 1
            try:
                return (Letter(resolve_symbol(self.gs, token.text), 1),)
            except UnknownSymbol as exc:
                exc.with_context(f"at line {token.line}, column {token.column}")
                raise
        if token.text == "(":
            self.take("(")
            inner = self.word()
            self.take(")")
            return inner
        if token.text == "[":
            self.take("[")
            a = self.word()
            self.take(",")
            b = self.word()
            self.take("]")
            return a + b + raw_invert(a) + raw_invert(b)
        raise ParseError(f"unexpected {token.text or 'end of input'!r}", token.line, token.column)

    def parse(self) -> tuple[Letter, ...]:
        letters = self.word()
        token = self.peek()
        if token.kind != "end":
            raise ParseError(f"unexpected {token.text!r}", token.line, token.column)
        return letters


def parse_letters(text: str, gs: GammaSet) -> tuple[Letter, ...]:
    """Exponent-expanded letters, without free reduction."""
    return _Parser(text, gs).parse()


def parse_word(text: str, gs: GammaSet) -> Word:
    return Word(parse_letters(text, gs))


def format_letters(letters: Sequence[Letter], gs: GammaSet) -> str:
    """Runs of one letter compress to ``name^k``; parse_letters inverts this exactly."""
    parts: list[str] = []
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        name = gs.symbol_name(letters[i].symbol)
        power = (j - i) * letters[i].exponent
        parts.append(name if power == 1 else f"{name}^{power}")
        i = j
    return " ".join(parts)


def format_word(w: Word, gs: GammaSet) -> str:
    return format_letters(w.letters, gs)


def format_letter(letter: Letter, gs: GammaSet) -> str:
    return format_letters((letter,), gs)


def parse_letter(text: str, gs: GammaSet) -> Letter:
    letters = parse_letters(text, gs)
    if len(letters) != 1:
        raise ParseError(f"expected a single letter, got {text!r}", 1, 1)
    return letters[0]
