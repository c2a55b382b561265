"""Finite permutation groups, enumerated explicitly by breadth-first search.

Composition is left-to-right: ``compose(p, q)`` applies ``p`` first, then
``q``, and words in generators are evaluated in the same order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import CapExceeded, DegreeMismatch, NotInGroup, PointOutOfRange

DEFAULT_ELEMENT_CAP = 100_000

GammaLetter = tuple[str, int]


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a bijection of 0..{len(images) - 1}: {list(images)}")
        object.__setattr__(self, "images", images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.images))

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)})"


def identity(degree: int) -> Permutation:
    return Permutation(tuple(range(degree)))


def from_cycles(degree: int, cycles: Iterable[Sequence[int]]) -> Permutation:
    images = list(range(degree))
    for cycle in cycles:
        for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
            images[a] = b
    return Permutation(tuple(images))


def compose(p: Permutation, q: Permutation) -> Permutation:
    if p.degree != q.degree:
        raise DegreeMismatch(f"cannot compose degree {p.degree} with degree {q.degree}")
    qi = q.images
    return Permutation(tuple(qi[i] for i in p.images))


def inverse(p: Permutation) -> Permutation:
    images = [0] * p.degree
    for i, image in enumerate(p.images):
        images[image] = i
    return Permutation(tuple(images))


def conjugate(p: Permutation, by: Permutation) -> Permutation:
    """by * p * by^-1 in the left-to-right product."""
    return compose(compose(by, p), inverse(by))


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple[tuple[str, Permutation], ...] = ()
    element_cap: int = field(default=DEFAULT_ELEMENT_CAP, compare=False)

    def __post_init__(self):
        names = [name for name, _ in self.generators]
        if len(set(names)) != len(names):
            raise ValueError(f"generator names must be distinct: {names}")
        for name, perm in self.generators:
            if perm.degree != self.degree:
                raise DegreeMismatch(
                    f"generator '{name}' has degree {perm.degree}, group degree is {self.degree}"
                )
        if self.element_cap < 1:
            raise ValueError("element_cap must be positive")

    @property
    def generator_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.generators)

    def generator(self, name: str) -> Permutation:
        for gen_name, perm in self.generators:
            if gen_name == name:
                return perm
        raise KeyError(name)

    def identity(self) -> Permutation:
        return identity(self.degree)


def closure(generators: Sequence[Permutation], degree: int, cap: int) -> list[Permutation]:
    """All products of ``generators``, in BFS order from the identity."""
    start = identity(degree)
    elements = [start]
    seen = {start}
    position = 0
    while position < len(elements):
        current = elements[position]
        position += 1
        for gen in generators:
            product = compose(current, gen)
            if product not in seen:
                seen.add(product)
                elements.append(product)
                if len(elements) > cap:
                    raise CapExceeded("group enumeration", cap)
    return elements


@lru_cache(maxsize=128)
def _enumerate(g: PermGroup, cap: int) -> tuple[Permutation, ...]:
    elements = closure([perm for _, perm in g.generators], g.degree, cap)
    logging.info("Enumerated permutation group of degree %d: %d elements", g.degree, len(elements))
    return tuple(elements)


def enumerate_elements(g: PermGroup) -> tuple[Permutation, ...]:
    return _enumerate(g, g.element_cap)


def order(g: PermGroup) -> int:
    return len(enumerate_elements(g))


def subgroup_order(g: PermGroup, generators: Sequence[Permutation]) -> int:
    return len(closure(list(generators), g.degree, g.element_cap))


def _check_point(g: PermGroup, point: int) -> None:
    if not 0 <= point < g.degree:
        raise PointOutOfRange(f"point {point} outside 0..{g.degree - 1}")


def _transversal(g: PermGroup, point: int) -> dict[int, Permutation]:
    transversal = {point: g.identity()}
    queue = [point]
    for x in queue:
        for _, gen in g.generators:
            y = gen(x)
            if y not in transversal:
                transversal[y] = compose(transversal[x], gen)
                queue.append(y)
    return transversal


def orbit(g: PermGroup, point: int) -> list[int]:
    _check_point(g, point)
    return sorted(_transversal(g, point))


def stabilizer_generators(g: PermGroup, point: int) -> list[Permutation]:
    """Schreier generators of the stabilizer of ``point``."""
    _check_point(g, point)
    transversal = _transversal(g, point)
    found: list[Permutation] = []
    seen: set[Permutation] = set()
    for x, rep in transversal.items():
        for _, gen in g.generators:
            schreier = compose(compose(rep, gen), inverse(transversal[gen(x)]))
            if schreier.is_identity() or schreier in seen:
                continue
            seen.add(schreier)
            found.append(schreier)
    return found


def gamma_letters(g: PermGroup) -> list[tuple[GammaLetter, Permutation]]:
    """Generators and inverses in search order: declaration order, +1 before -1."""
    letters = []
    for name, perm in g.generators:
        letters.append(((name, 1), perm))
        letters.append(((name, -1), inverse(perm)))
    return letters


@lru_cache(maxsize=128)
def _word_tree(g: PermGroup, cap: int) -> dict[Permutation, tuple[Permutation, GammaLetter] | None]:
    letters = gamma_letters(g)
    start = g.identity()
    parents: dict[Permutation, tuple[Permutation, GammaLetter] | None] = {start: None}
    queue = [start]
    for current in queue:
        for letter, perm in letters:
            product = compose(current, perm)
            if product not in parents:
                parents[product] = (current, letter)
                queue.append(product)
                if len(queue) > cap:
                    raise CapExceeded("group word search", cap)
    return parents


def word_for_element(g: PermGroup, target: Permutation) -> tuple[GammaLetter, ...]:
    """Shortest, then lexicographically least, generator word evaluating to ``target``."""
    if target.degree != g.degree:
        raise DegreeMismatch(f"target degree {target.degree} differs from group degree {g.degree}")
    parents = _word_tree(g, g.element_cap)
    if target not in parents:
        raise NotInGroup(f"{target!r} is not an element of the group")
    letters: list[GammaLetter] = []
    node = parents[target]
    while node is not None:
        previous, letter = node
        letters.append(letter)
        node = parents[previous]
    return tuple(reversed(letters))


def evaluate_word(g: PermGroup, word: Sequence[GammaLetter]) -> Permutation:
    result = g.identity()
    for name, exponent in word:
        perm = g.generator(name)
        result = compose(result, perm if exponent == 1 else inverse(perm))
    return result


def contains(g: PermGroup, element: Permutation) -> bool:
    return element.degree == g.degree and element in set(enumerate_elements(g))


def derived_subgroup_order(g: PermGroup) -> int:
    """Order of [G, G], the normal closure of commutators of generators."""
    gens = [perm for _, perm in g.generators]
    commutators = []
    for a in gens:
        for b in gens:
            c = compose(compose(a, b), compose(inverse(a), inverse(b)))
            if not c.is_identity():
                commutators.append(c)
    normal = list(dict.fromkeys(commutators))
    seen = set(normal)
    for c in normal:
        for x in gens:
            d = conjugate(c, x)
            if d not in seen:
                seen.add(d)
                normal.append(d)
                if len(normal) > g.element_cap:
                    raise CapExceeded("commutator closure", g.element_cap)
    return len(closure(normal, g.degree, g.element_cap))
