"""Finite and weakly finite Γ-equivariant presentations.

Finite mode: G = ⟨S | Γ·R₀⟩. Weak mode additionally imposes every
conjugation relation s t s⁻¹ (^s t)⁻¹, where ^s t is the action of
ι(s) ∈ Γ and G is identified with the normal subgroup ⟨ι(S)⟩ of Γ.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, Union

from .action import (
    GammaSet,
    act_symbol_by,
    act_word_by,
    base_symbols,
    check_symbol,
    enumerate_S,
    homomorphism_defects,
    orbit_transversal,
    stabilizer_of_symbol,
)
from .errors import ActionNotWellDefined, DegreeMismatch, EquivariantError, ModeMismatch, UnknownSymbol
from .models import CheckResult, ValidationReport
from .permgroup import (
    Permutation,
    closure,
    conjugate,
    contains,
    enumerate_elements,
    order,
)
from .presentation import (
    DEFAULT_MAX_COSETS,
    Presentation,
    Realization,
    regular_realization,
    verify_relators,
)
from .word import Letter, SymbolRef, Word

Mode = Literal["finite", "weak"]


@dataclass(frozen=True)
class EquivariantPresentation:
    gs: GammaSet
    r0: tuple[Word, ...]
    mode: Mode = "finite"
    iota: tuple[tuple[SymbolRef, Permutation], ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "r0", tuple(self.r0))
        object.__setattr__(self, "iota", tuple((SymbolRef(*s), p) for s, p in self.iota))
        for index, relator in enumerate(self.r0):
            for s in relator.symbols():
                try:
                    check_symbol(self.gs, s)
                except EquivariantError:
                    raise UnknownSymbol(f"R₀[{index}] uses symbol {tuple(s)} outside S") from None
        if self.mode == "finite" and self.iota:
            raise ModeMismatch("ι is only meaningful in weak mode")
        if self.mode == "weak":
            keys = sorted(s for s, _ in self.iota)
            if keys != sorted(base_symbols(self.gs)):
                raise ModeMismatch("weak mode needs ι on exactly the base symbols S₀")
            for s, perm in self.iota:
                if perm.degree != self.gs.gamma.degree:
                    raise DegreeMismatch(f"ι({tuple(s)}) has degree {perm.degree}")

    def iota_base(self, s0: SymbolRef) -> Permutation:
        for s, perm in self.iota:
            if s == s0:
                return perm
        raise ModeMismatch(f"no ι value for {tuple(s0)}")


@lru_cache(maxsize=32)
def iota_map(ep: EquivariantPresentation) -> dict[SymbolRef, Permutation]:
    """ι on all of S via ι(^γ s₀) = γ·ι(s₀)·γ⁻¹."""
    if ep.mode != "weak":
        raise ModeMismatch("ι is only defined in weak mode")
    out: dict[SymbolRef, Permutation] = {}
    for s0 in base_symbols(ep.gs):
        value = ep.iota_base(s0)
        for u, gamma in orbit_transversal(ep.gs, s0).items():
            out[u] = conjugate(value, gamma)
    return {s: out[s] for s in enumerate_S(ep.gs)}


def iota_defects(ep: EquivariantPresentation) -> list[str]:
    """Equivariance, membership and normality failures of ι."""
    if ep.mode != "weak":
        raise ModeMismatch("ι checks only apply in weak mode")
    defects = []
    gamma = ep.gs.gamma
    for s0 in base_symbols(ep.gs):
        value = ep.iota_base(s0)
        name = ep.gs.symbol_name(s0)
        if not contains(gamma, value):
            defects.append(f"ι({name}) is not an element of Γ")
        for sigma in stabilizer_of_symbol(ep.gs, s0):
            if conjugate(value, sigma) != value:
                defects.append(f"ι({name}) is not centralized by stabilizer element {sigma!r}")
    if defects:
        return defects
    images = list(dict.fromkeys(iota_map(ep).values()))
    subgroup = set(closure(images, gamma.degree, gamma.element_cap))
    for h in images:
        for gen_name, gen in gamma.generators:
            if conjugate(h, gen) not in subgroup:
                defects.append(f"⟨ι(S)⟩ is not normalized by Γ-generator '{gen_name}'")
    return defects


@dataclass(frozen=True)
class OrbitOrigin:
    gamma: Permutation
    r0_index: int


@dataclass(frozen=True)
class ConjOrigin:
    s: SymbolRef
    t: SymbolRef


@dataclass(frozen=True)
class ExpandedPresentation:
    base: Presentation
    provenance: tuple[Union[OrbitOrigin, ConjOrigin], ...] = field(default=())


def _conjugation_relators(ep: EquivariantPresentation) -> list[tuple[SymbolRef, SymbolRef, Word]]:
    if ep.mode != "weak":
        raise ModeMismatch("R_conj only exists in weak mode")
    iota = iota_map(ep)
    out = []
    for s in enumerate_S(ep.gs):
        for t in enumerate_S(ep.gs):
            u = act_symbol_by(ep.gs, iota[s], t)
            w = Word((Letter(s, 1), Letter(t, 1), Letter(s, -1), Letter(u, -1)))
            if len(w):
                out.append((s, t, w))
    return out


def r_conj(ep: EquivariantPresentation) -> list[Word]:
    return [w for _, _, w in _conjugation_relators(ep)]


@lru_cache(maxsize=32)
def expand_R(ep: EquivariantPresentation) -> ExpandedPresentation:
    relators: list[Word] = []
    provenance: list[Union[OrbitOrigin, ConjOrigin]] = []
    seen: set[Word] = set()
    for gamma in enumerate_elements(ep.gs.gamma):
        for index, r in enumerate(ep.r0):
            w = act_word_by(ep.gs, gamma, r)
            if len(w) and w not in seen:
                seen.add(w)
                relators.append(w)
                provenance.append(OrbitOrigin(gamma, index))
    if ep.mode == "weak":
        for s, t, w in _conjugation_relators(ep):
            if w not in seen:
                seen.add(w)
                relators.append(w)
                provenance.append(ConjOrigin(s, t))
    logging.info("Expanded %d orbit relators into %d relators", len(ep.r0), len(relators))
    base = Presentation(tuple(enumerate_S(ep.gs)), tuple(relators))
    return ExpandedPresentation(base, tuple(provenance))


def is_gamma_closed(ep: EquivariantPresentation, expanded: ExpandedPresentation) -> bool:
    relators = set(expanded.base.relators)
    for _, gen in ep.gs.gamma.generators:
        for w in relators:
            if act_word_by(ep.gs, gen, w) not in relators:
                return False
    return True


def realize(ep: EquivariantPresentation, max_cosets: int = DEFAULT_MAX_COSETS) -> Realization:
    return regular_realization(expand_R(ep).base, max_cosets)


def _check(name: str, passed: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=passed, detail=detail)


def validate(ep: EquivariantPresentation, max_cosets: int = DEFAULT_MAX_COSETS) -> ValidationReport:
    gs = ep.gs
    checks: list[CheckResult] = []
    defects = homomorphism_defects(gs)
    checks.append(_check("action_homomorphism", not defects, "; ".join(defects[:3])))
    if defects:
        return ValidationReport(
            mode=ep.mode,
            gamma_order=order(gs.gamma),
            num_symbols=len(enumerate_S(gs)),
            checks=checks,
        )

    if ep.mode == "weak":
        bad = iota_defects(ep)
        equivariance = [d for d in bad if "normalized" not in d]
        normality = [d for d in bad if "normalized" in d]
        checks.append(_check("iota_equivariance", not equivariance, "; ".join(equivariance[:3])))
        checks.append(_check("iota_normality", not normality, "; ".join(normality[:3])))
        if bad:
            return ValidationReport(
                mode=ep.mode,
                gamma_order=order(gs.gamma),
                num_symbols=len(enumerate_S(gs)),
                checks=checks,
            )

    expanded = expand_R(ep)
    checks.append(_check("gamma_closure", is_gamma_closed(ep, expanded)))
    try:
        realization = realize(ep, max_cosets)
    except EquivariantError as exc:
        exc.with_context(f"while realizing presentation '{ep.name}'")
        raise
    relator_check = verify_relators(expanded.base, realization.assignment)
    checks.append(
        _check(
            "realization",
            relator_check.passed,
            f"order {realization.order}; failing relators {list(relator_check.failures)}",
        )
    )

    if ep.mode == "weak":
        iota = iota_map(ep)
        images = list(dict.fromkeys(iota.values()))
        inner_order = len(closure(images, gs.gamma.degree, gs.gamma.element_cap))
        inner_check = verify_relators(expanded.base, iota)
        agree = inner_order == realization.order and inner_check.passed
        checks.append(
            _check(
                "iota_agreement",
                agree,
                f"⟨ι(S)⟩ has order {inner_order}; failing relators {list(inner_check.failures)}",
            )
        )

    generated = len(
        closure(list(realization.assignment.values()), realization.order, realization.group.element_cap)
    )
    checks.append(
        _check("generation", generated == realization.order, f"symbols generate order {generated}")
    )
    report = ValidationReport(
        mode=ep.mode,
        gamma_order=order(gs.gamma),
        num_symbols=len(enumerate_S(gs)),
        num_expanded_relators=len(expanded.base.relators),
        realized_order=realization.order,
        checks=checks,
    )
    logging.info("Validation of '%s': %s", ep.name or "presentation", "passed" if report.passed else "failed")
    return report


def require_weak(ep: EquivariantPresentation) -> None:
    if ep.mode != "weak":
        raise ModeMismatch("operation needs a weakly finite presentation")
    defects = homomorphism_defects(ep.gs) or iota_defects(ep)
    if defects:
        raise ActionNotWellDefined(defects[0])
