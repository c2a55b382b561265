"""Finitely presented groups ⟨S | R⟩ and their finite realizations.

Coset enumeration is plain HLT: relators are scanned at each live coset in
order, missing entries are defined on demand, and coincidences are merged
through a union-find keyed on the lower coset number.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import CapExceeded, MissingImage, UnknownSymbol
from .permgroup import DEFAULT_ELEMENT_CAP, PermGroup, Permutation, compose, identity, inverse
from .word import SymbolRef, Word

DEFAULT_MAX_COSETS = 1_000_000

UNDEFINED = -1


@dataclass(frozen=True)
class Presentation:
    symbols: tuple[SymbolRef, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        symbols = tuple(SymbolRef(*s) for s in self.symbols)
        if len(set(symbols)) != len(symbols):
            raise ValueError("presentation alphabet has repeated symbols")
        known = set(symbols)
        kept = []
        for index, relator in enumerate(self.relators):
            stray = relator.symbols() - known
            if stray:
                raise UnknownSymbol(f"relator {index} uses symbols outside the alphabet: {sorted(stray)}")
            if len(relator) == 0:
                logging.warning("Dropping relator %d: empty after free reduction", index)
                continue
            kept.append(relator)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "relators", tuple(kept))

    def column(self, symbol: SymbolRef, exponent: int) -> int:
        return 2 * self.symbols.index(symbol) + (0 if exponent == 1 else 1)


@dataclass(frozen=True)
class CosetTable:
    num_cosets: int
    symbols: tuple[SymbolRef, ...]
    rows: tuple[tuple[int, ...], ...]

    def image(self, coset: int, symbol: SymbolRef, exponent: int = 1) -> int:
        column = 2 * self.symbols.index(symbol) + (0 if exponent == 1 else 1)
        return self.rows[coset][column]

    def trace(self, coset: int, w: Word) -> int:
        for letter in w.letters:
            coset = self.image(coset, letter.symbol, letter.exponent)
        return coset


class _Enumeration:
    """Mutable HLT state; ``run`` returns a standardized CosetTable."""

    def __init__(self, p: Presentation, max_cosets: int):
        self.p = p
        self.ncols = 2 * len(p.symbols)
        self.max_cosets = max_cosets
        self.table: list[list[int]] = []
        self.parent: list[int] = []
        self.live = 0
        self.relators = [self._columns(r) for r in p.relators]
        self._new_coset()

    def _columns(self, w: Word) -> list[int]:
        return [self.p.column(l.symbol, l.exponent) for l in w.letters]

    def _new_coset(self) -> int:
        if self.live >= self.max_cosets:
            raise CapExceeded("coset enumeration", self.max_cosets)
        self.table.append([UNDEFINED] * self.ncols)
        self.parent.append(len(self.parent))
        self.live += 1
        return len(self.table) - 1

    def find(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def is_live(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, col: int) -> None:
        d = self._new_coset()
        self.table[c][col] = d
        self.table[d][col ^ 1] = c

    def _merge(self, a: int, b: int, queue: list[int]) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        low, high = min(a, b), max(a, b)
        self.parent[high] = low
        self.live -= 1
        queue.append(high)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self._merge(a, b, queue)
        position = 0
        while position < len(queue):
            dead = queue[position]
            position += 1
            for col in range(self.ncols):
                target = self.table[dead][col]
                if target == UNDEFINED:
                    continue
                self.table[target][col ^ 1] = UNDEFINED
                mu, nu = self.find(dead), self.find(target)
                if self.table[mu][col] != UNDEFINED:
                    self._merge(nu, self.table[mu][col], queue)
                elif self.table[nu][col ^ 1] != UNDEFINED:
                    self._merge(mu, self.table[nu][col ^ 1], queue)
                else:
                    self.table[mu][col] = nu
                    self.table[nu][col ^ 1] = mu

    def scan_and_fill(self, start: int, relator: list[int]) -> None:
        f, b = start, start
        i, j = 0, len(relator) - 1
        while True:
            while i <= j and self.table[f][relator[i]] != UNDEFINED:
                f = self.table[f][relator[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and self.table[b][relator[j] ^ 1] != UNDEFINED:
                b = self.table[b][relator[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                self.table[f][relator[i]] = b
                self.table[b][relator[i] ^ 1] = f
                return
            self.define(f, relator[i])

    def run(self, subgroup_words: Sequence[Word]) -> CosetTable:
        for w in subgroup_words:
            columns = self._columns(w)
            if columns:
                self.scan_and_fill(0, columns)
        alpha = 0
        while alpha < len(self.table):
            for relator in self.relators:
                if not self.is_live(alpha):
                    break
                self.scan_and_fill(alpha, relator)
            if self.is_live(alpha):
                for col in range(self.ncols):
                    if self.table[alpha][col] == UNDEFINED:
                        self.define(alpha, col)
            alpha += 1
        return self._standardize()

    def _standardize(self) -> CosetTable:
        order = [0]
        renumber = {0: 0}
        for c in order:
            for col in range(self.ncols):
                d = self.table[c][col]
                if d not in renumber:
                    renumber[d] = len(order)
                    order.append(d)
        rows = tuple(tuple(renumber[self.table[c][col]] for col in range(self.ncols)) for c in order)
        return CosetTable(len(order), self.p.symbols, rows)


def _check_table(p: Presentation, table: CosetTable, subgroup_words: Sequence[Word]) -> None:
    for col in range(2 * len(p.symbols)):
        column = [row[col] for row in table.rows]
        if sorted(column) != list(range(table.num_cosets)):
            raise RuntimeError(f"coset table column {col} is not a bijection")
    for coset in range(table.num_cosets):
        for relator in p.relators:
            if table.trace(coset, relator) != coset:
                raise RuntimeError(f"relator scan does not close at coset {coset}")
    for w in subgroup_words:
        if table.trace(0, w) != 0:
            raise RuntimeError("subgroup generator does not fix the base coset")


def todd_coxeter(
    p: Presentation,
    subgroup_words: Sequence[Word] = (),
    max_cosets: int = DEFAULT_MAX_COSETS,
) -> CosetTable:
    if max_cosets < 1:
        raise ValueError("max_cosets must be at least 1")
    table = _Enumeration(p, max_cosets).run(subgroup_words)
    _check_table(p, table, subgroup_words)
    logging.info(
        "Coset enumeration finished: %d cosets, %d symbols, %d relators",
        table.num_cosets,
        len(p.symbols),
        len(p.relators),
    )
    return table


@dataclass(frozen=True)
class Realization:
    group: PermGroup
    assignment: dict[SymbolRef, Permutation] = field(hash=False)
    table: CosetTable = field(hash=False)

    @property
    def order(self) -> int:
        return self.table.num_cosets


def regular_realization(p: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> Realization:
    table = todd_coxeter(p, (), max_cosets)
    assignment = {
        s: Permutation(tuple(row[2 * i] for row in table.rows)) for i, s in enumerate(p.symbols)
    }
    group = PermGroup(
        degree=table.num_cosets,
        generators=tuple((f"{s.orbit_index}:{s.point}", assignment[s]) for s in p.symbols),
        element_cap=max(DEFAULT_ELEMENT_CAP, table.num_cosets),
    )
    return Realization(group, assignment, table)


def evaluate(w: Word, assignment: Mapping[SymbolRef, Permutation], degree: int) -> Permutation:
    result = identity(degree)
    for letter in w.letters:
        try:
            perm = assignment[letter.symbol]
        except KeyError:
            raise MissingImage(f"no permutation assigned to symbol {tuple(letter.symbol)}") from None
        result = compose(result, perm if letter.exponent == 1 else inverse(perm))
    return result


@dataclass(frozen=True)
class RelatorCheck:
    passed: bool
    failures: tuple[int, ...] = ()


def verify_relators(p: Presentation, assignment: Mapping[SymbolRef, Permutation]) -> RelatorCheck:
    missing = [s for s in p.symbols if s not in assignment]
    if missing:
        raise MissingImage(f"assignment has no image for symbols {[tuple(s) for s in missing]}")
    if not assignment:
        return RelatorCheck(True)
    degree = next(iter(assignment.values())).degree
    failures = tuple(
        index
        for index, relator in enumerate(p.relators)
        if not evaluate(relator, assignment, degree).is_identity()
    )
    return RelatorCheck(not failures, failures)
