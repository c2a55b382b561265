"""Γ-sets of generator symbols: S = Γ·S₀ given orbit by orbit."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import (
    ActionNotWellDefined,
    DegreeMismatch,
    MissingImage,
    PointOutOfRange,
    SymbolOutOfRange,
    UnknownGenerator,
)
from .permgroup import (
    GammaLetter,
    PermGroup,
    Permutation,
    compose,
    enumerate_elements,
    identity,
    inverse,
)
from .word import Letter, SymbolRef, Word


@dataclass(frozen=True)
class GeneratorOrbit:
    rep_name: str
    domain_size: int
    action_hom: tuple[tuple[str, Permutation], ...]
    base_point: int = 0

    @classmethod
    def build(
        cls,
        rep_name: str,
        domain_size: int,
        action: Mapping[str, Sequence[int] | Permutation],
        base_point: int = 0,
    ) -> "GeneratorOrbit":
        pairs = []
        for name, images in action.items():
            perm = images if isinstance(images, Permutation) else Permutation(tuple(images))
            pairs.append((name, perm))
        return cls(rep_name, domain_size, tuple(pairs), base_point)

    def image_of(self, generator: str) -> Permutation:
        for name, perm in self.action_hom:
            if name == generator:
                return perm
        raise UnknownGenerator(f"orbit '{self.rep_name}' has no image for Γ-generator '{generator}'")

    def is_transitive(self) -> bool:
        seen = {self.base_point}
        queue = [self.base_point]
        for x in queue:
            for _, perm in self.action_hom:
                for y in (perm(x), inverse(perm)(x)):
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
        return len(seen) == self.domain_size


@dataclass(frozen=True)
class GammaSet:
    gamma: PermGroup
    orbits: tuple[GeneratorOrbit, ...]

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        names = set(self.gamma.generator_names)
        for orbit in self.orbits:
            if orbit.domain_size < 1:
                raise PointOutOfRange(f"orbit '{orbit.rep_name}' has empty domain")
            if not 0 <= orbit.base_point < orbit.domain_size:
                raise PointOutOfRange(
                    f"base point {orbit.base_point} outside orbit '{orbit.rep_name}' domain"
                )
            given = [name for name, _ in orbit.action_hom]
            unknown = [name for name in given if name not in names]
            if unknown:
                raise UnknownGenerator(f"orbit '{orbit.rep_name}' names unknown Γ-generators {unknown}")
            missing = [name for name in self.gamma.generator_names if name not in given]
            if missing:
                raise MissingImage(f"orbit '{orbit.rep_name}' has no action for Γ-generators {missing}")
            for name, perm in orbit.action_hom:
                if perm.degree != orbit.domain_size:
                    raise DegreeMismatch(
                        f"orbit '{orbit.rep_name}': action of '{name}' has degree {perm.degree}, "
                        f"domain size is {orbit.domain_size}"
                    )
            if not orbit.is_transitive():
                raise ActionNotWellDefined(f"orbit '{orbit.rep_name}' is not a single Γ-orbit")

    def symbol_name(self, s: SymbolRef) -> str:
        check_symbol(self, s)
        return f"{self.orbits[s.orbit_index].rep_name}.{s.point}"


def check_symbol(gs: GammaSet, s: SymbolRef) -> None:
    if not 0 <= s.orbit_index < len(gs.orbits) or not 0 <= s.point < gs.orbits[s.orbit_index].domain_size:
        raise SymbolOutOfRange(f"symbol {tuple(s)} is not in S")


def enumerate_S(gs: GammaSet) -> list[SymbolRef]:
    return [
        SymbolRef(index, point)
        for index, orbit in enumerate(gs.orbits)
        for point in range(orbit.domain_size)
    ]


def base_symbols(gs: GammaSet) -> list[SymbolRef]:
    """S₀, one representative per orbit."""
    return [SymbolRef(index, orbit.base_point) for index, orbit in enumerate(gs.orbits)]


def act_symbol(gs: GammaSet, gamma_word: Sequence[GammaLetter], s: SymbolRef) -> SymbolRef:
    check_symbol(gs, s)
    orbit = gs.orbits[s.orbit_index]
    point = s.point
    # ^γ s = ρ(γ)⁻¹(s): undo the letters from the right
    for name, exponent in reversed(list(gamma_word)):
        if name not in gs.gamma.generator_names:
            raise UnknownGenerator(f"unknown Γ-generator '{name}'")
        perm = orbit.image_of(name)
        point = inverse(perm)(point) if exponent == 1 else perm(point)
    return SymbolRef(s.orbit_index, point)


def act_word(gs: GammaSet, gamma_word: Sequence[GammaLetter], w: Word) -> Word:
    return Word(tuple(Letter(act_symbol(gs, gamma_word, l.symbol), l.exponent) for l in w.letters))


@lru_cache(maxsize=64)
def _element_action(gs: GammaSet) -> tuple[dict[Permutation, tuple[Permutation, ...]], tuple[str, ...]]:
    start = gs.gamma.identity()
    rho = {start: tuple(identity(o.domain_size) for o in gs.orbits)}
    defects: list[str] = []
    queue = [start]
    for current in queue:
        for name, gen in gs.gamma.generators:
            product = compose(current, gen)
            image = tuple(compose(r, o.image_of(name)) for r, o in zip(rho[current], gs.orbits))
            if product not in rho:
                rho[product] = image
                queue.append(product)
            elif rho[product] != image:
                defects.append(f"action of {product!r} differs along generator '{name}'")
    if len(rho) != len(enumerate_elements(gs.gamma)):
        defects.append("Γ enumeration and action enumeration disagree")
    if defects:
        logging.warning("Orbit actions do not define a Γ-homomorphism: %d defects", len(defects))
    left = {gamma: tuple(inverse(r) for r in images) for gamma, images in rho.items()}
    return left, tuple(defects)


def homomorphism_defects(gs: GammaSet) -> list[str]:
    """Products γ·g whose action disagrees with the action of γ followed by g."""
    return list(_element_action(gs)[1])


def element_action(gs: GammaSet) -> dict[Permutation, tuple[Permutation, ...]]:
    """For each γ ∈ Γ, per orbit, the permutation s ↦ ^γ s."""
    left, defects = _element_action(gs)
    if defects:
        raise ActionNotWellDefined(defects[0])
    return left


def act_symbol_by(gs: GammaSet, gamma: Permutation, s: SymbolRef) -> SymbolRef:
    check_symbol(gs, s)
    try:
        images = element_action(gs)[gamma]
    except KeyError:
        raise UnknownGenerator(f"{gamma!r} is not an element of Γ") from None
    return SymbolRef(s.orbit_index, images[s.orbit_index](s.point))


def act_word_by(gs: GammaSet, gamma: Permutation, w: Word) -> Word:
    return Word(tuple(Letter(act_symbol_by(gs, gamma, l.symbol), l.exponent) for l in w.letters))


def stabilizer_of_symbol(gs: GammaSet, s: SymbolRef) -> list[Permutation]:
    """Schreier generators of Γ_s, as elements of Γ."""
    check_symbol(gs, s)
    orbit = gs.orbits[s.orbit_index]
    transversal = {s.point: gs.gamma.identity()}
    queue = [s.point]
    for x in queue:
        for name, gen in gs.gamma.generators:
            y = orbit.image_of(name)(x)
            if y not in transversal:
                transversal[y] = compose(transversal[x], gen)
                queue.append(y)
    found: list[Permutation] = []
    for x in queue:
        for name, gen in gs.gamma.generators:
            y = orbit.image_of(name)(x)
            schreier = compose(compose(transversal[x], gen), inverse(transversal[y]))
            if not schreier.is_identity() and schreier not in found:
                found.append(schreier)
    return found or [gs.gamma.identity()]


def orbit_transversal(gs: GammaSet, s0: SymbolRef) -> dict[SymbolRef, Permutation]:
    """For each symbol u in the orbit of s0, some γ with ^γ s0 = u."""
    check_symbol(gs, s0)
    out: dict[SymbolRef, Permutation] = {}
    for gamma, images in element_action(gs).items():
        u = SymbolRef(s0.orbit_index, images[s0.orbit_index](s0.point))
        out.setdefault(u, gamma)
    return out
