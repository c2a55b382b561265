"""Freely reduced words over the signed alphabet S of generator symbols."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import MissingImage


class SymbolRef(NamedTuple):
    orbit_index: int
    point: int


class Letter(NamedTuple):
    symbol: SymbolRef
    exponent: int

    def inverse(self) -> "Letter":
        return Letter(self.symbol, -self.exponent)


def _cancels(left: Letter, right: Letter) -> bool:
    return left.symbol == right.symbol and left.exponent == -right.exponent


def reduce_letters(raw: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for letter in raw:
        if letter.exponent not in (1, -1):
            raise ValueError(f"letter exponent must be +1 or -1, got {letter.exponent}")
        if stack and _cancels(stack[-1], letter):
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def raw_invert(raw: Sequence[Letter]) -> tuple[Letter, ...]:
    return tuple(letter.inverse() for letter in reversed(raw))


def is_reduced(raw: Sequence[Letter]) -> bool:
    return not any(_cancels(a, b) for a, b in zip(raw, raw[1:]))


@dataclass(frozen=True)
class Word:
    """An element of F(S); the letter tuple is always freely reduced."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", reduce_letters(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, index):
        return self.letters[index]

    def symbols(self) -> set[SymbolRef]:
        return {letter.symbol for letter in self.letters}

    @classmethod
    def of_symbol(cls, symbol: SymbolRef, exponent: int = 1) -> "Word":
        return cls((Letter(symbol, exponent),))


EMPTY_WORD = Word()


def reduce(raw: Iterable[Letter]) -> Word:
    return Word(tuple(raw))


def invert(w: Word) -> Word:
    return Word(raw_invert(w.letters))


def concat(u: Word, v: Word) -> Word:
    return Word(u.letters + v.letters)


def power(w: Word, exponent: int) -> Word:
    base = w if exponent >= 0 else invert(w)
    return Word(base.letters * abs(exponent))


def commutator(u: Word, v: Word) -> Word:
    return Word(u.letters + v.letters + invert(u).letters + invert(v).letters)


def substitute(w: Word, images: Mapping[SymbolRef, Word]) -> Word:
    """Image of ``w`` under the homomorphism F(S) -> F(T) fixed by ``images``."""
    out: list[Letter] = []
    for letter in w.letters:
        try:
            image = images[letter.symbol]
        except KeyError:
            raise MissingImage(f"no image assigned to symbol {tuple(letter.symbol)}") from None
        out.extend(image.letters if letter.exponent == 1 else raw_invert(image.letters))
    return Word(tuple(out))
