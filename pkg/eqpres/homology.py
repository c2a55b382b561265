"""Low-degree homology of a finite realized group from its presentation.

The abelianized relation module is the cycle space K = ker ∂₁ of the Cayley
graph of G on the symbols; K_G = K / I·K sits in

    0 → H₂(G) → K_G →φ ℤ^S →ψ H₁(G) → 0

and H₂ is read off as ker φ̄, the torsion of K_G. Group elements are
always indexed in permgroup BFS order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product as cartesian
from typing import Optional, Sequence

from .action import GammaSet, act_symbol_by, stabilizer_of_symbol
from .equivariant import ConjOrigin, EquivariantPresentation, expand_R, iota_map, realize
from .errors import ActionNotWellDefined, CapExceeded, HomologyError
from .models import (
    AbelianInvariants,
    CheckResult,
    GammaActionMatrix,
    GenerationResult,
    HomologyLimits,
    HomologyReport,
)
from .permgroup import (
    Permutation,
    compose,
    derived_subgroup_order,
    enumerate_elements,
    order,
    subgroup_order,
)
from .presentation import DEFAULT_MAX_COSETS, Presentation, Realization
from .smith import (
    SmithForm,
    abelian_invariants,
    hermite_normal_form,
    lattice_index,
    smith_normal_form_sparse,
)
from .word import SymbolRef, Word

Cycle = dict[int, int]


def exponent_matrix(p: Presentation) -> list[list[int]]:
    columns = {s: i for i, s in enumerate(p.symbols)}
    rows = []
    for relator in p.relators:
        row = [0] * len(p.symbols)
        for letter in relator.letters:
            row[columns[letter.symbol]] += letter.exponent
        rows.append(row)
    return rows


def abelianization(p: Presentation) -> AbelianInvariants:
    factors, free = abelian_invariants(exponent_matrix(p), len(p.symbols))
    return AbelianInvariants(invariant_factors=factors, free_rank=free)


# --- the Cayley complex -----------------------------------------------------


class CayleyComplex:
    """Vertices G, edges g → g·s; edge (g, s) has index g·|S| + s."""

    def __init__(self, symbols: Sequence[SymbolRef], realization: Realization):
        self.symbols = tuple(symbols)
        self.m = len(self.symbols)
        self.realization = realization
        self.elements = list(enumerate_elements(realization.group))
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.n = len(self.elements)
        perms = [realization.assignment[s] for s in self.symbols]
        self.perms = perms
        self.right = [[self.index[compose(g, p)] for p in perms] for g in self.elements]
        self.left = [[self.index[compose(p, g)] for g in self.elements] for p in perms]
        self.parent_edge: dict[int, int] = {}
        seen = {0}
        queue = [0]
        for g in queue:
            for s in range(self.m):
                h = self.right[g][s]
                if h not in seen:
                    seen.add(h)
                    self.parent_edge[h] = g * self.m + s
                    queue.append(h)
        tree = set(self.parent_edge.values())
        self.nontree = [e for e in range(self.n * self.m) if e not in tree]
        self.coord = {e: i for i, e in enumerate(self.nontree)}

    @property
    def rank(self) -> int:
        return len(self.nontree)

    def head(self, edge: int) -> int:
        return self.right[edge // self.m][edge % self.m]

    @cached_property
    def tree_paths(self) -> list[Cycle]:
        """P(v): tree edges from the identity to v, each with coefficient 1."""
        paths: list[Cycle] = [dict() for _ in range(self.n)]
        for v in range(self.n):
            path: Cycle = {}
            w = v
            while w != 0:
                e = self.parent_edge[w]
                path[e] = 1
                w = e // self.m
            paths[v] = path
        return paths

    def basis_cycle(self, coordinate: int) -> Cycle:
        e = self.nontree[coordinate]
        cycle = add_chains({e: 1}, self.tree_paths[e // self.m])
        return add_chains(cycle, self.tree_paths[self.head(e)], -1)

    def cycle_from_coords(self, coords: Sequence[int] | dict[int, int]) -> Cycle:
        items = coords.items() if isinstance(coords, dict) else enumerate(coords)
        cycle: Cycle = {}
        for i, c in items:
            if c:
                cycle = add_chains(cycle, self.basis_cycle(i), c)
        return cycle

    def coords(self, cycle: Cycle) -> dict[int, int]:
        return {self.coord[e]: c for e, c in cycle.items() if c and e in self.coord}

    def boundary(self, chain: Cycle) -> dict[int, int]:
        out: dict[int, int] = {}
        for e, c in chain.items():
            g, h = e // self.m, self.head(e)
            out[h] = out.get(h, 0) + c
            out[g] = out.get(g, 0) - c
        return {v: c for v, c in out.items() if c}

    def translate(self, cycle: Cycle, s: int) -> Cycle:
        """Left multiplication by the element of symbol s."""
        return {self.left[s][e // self.m] * self.m + e % self.m: c for e, c in cycle.items()}

    def phi(self, cycle: Cycle) -> list[int]:
        out = [0] * self.m
        for e, c in cycle.items():
            out[e % self.m] += c
        return out

    def lift(self, w: Word) -> Cycle:
        """The closed path of a relator read from the identity."""
        columns = {s: i for i, s in enumerate(self.symbols)}
        inverse_of = [{h: g for g, h in enumerate(self.right_column(s))} for s in range(self.m)]
        chain: Cycle = {}
        g = 0
        for letter in w.letters:
            s = columns[letter.symbol]
            if letter.exponent == 1:
                e = g * self.m + s
                g = self.right[g][s]
                chain[e] = chain.get(e, 0) + 1
            else:
                g = inverse_of[s][g]
                e = g * self.m + s
                chain[e] = chain.get(e, 0) - 1
        if g != 0:
            raise HomologyError("relator does not close up in the realized group")
        return {e: c for e, c in chain.items() if c}

    def right_column(self, s: int) -> list[int]:
        return [self.right[g][s] for g in range(self.n)]


def add_chains(a: Cycle, b: Cycle, scale: int = 1) -> Cycle:
    out = dict(a)
    for e, c in b.items():
        value = out.get(e, 0) + scale * c
        if value:
            out[e] = value
        else:
            out.pop(e, None)
    return out


def boundary1(p: Presentation, realization: Realization) -> list[list[int]]:
    """Dense matrix of ∂₁ : ℤ[G]^S → ℤ[G], columns g⊗e_s with g outer."""
    cx = CayleyComplex(p.symbols, realization)
    matrix = [[0] * (cx.n * cx.m) for _ in range(cx.n)]
    for e in range(cx.n * cx.m):
        g, h = e // cx.m, cx.head(e)
        matrix[h][e] += 1
        matrix[g][e] -= 1
    return matrix


# --- coinvariants -----------------------------------------------------------


@dataclass
class RelationModuleCoinv:
    """K_G = ℤ^k / L with L = span{(s - 1)·c}; reduced coordinates J of the Smith form."""

    complex: CayleyComplex
    smith: SmithForm
    coordinates: list[int]
    moduli: list[int]

    @property
    def torsion_positions(self) -> list[int]:
        return [i for i, d in enumerate(self.moduli) if d > 1]

    @property
    def free_positions(self) -> list[int]:
        return [i for i, d in enumerate(self.moduli) if d == 0]

    def reduce(self, vector: Sequence[int]) -> list[int]:
        return [v % d if d else v for v, d in zip(vector, self.moduli)]

    def class_of(self, coords: dict[int, int]) -> list[int]:
        """K-coordinates → reduced K_G coordinates."""
        V = self.smith.V
        out = []
        for j in self.coordinates:
            out.append(sum(c * V[i][j] for i, c in coords.items()))
        return self.reduce(out)

    def class_of_cycle(self, cycle: Cycle) -> list[int]:
        return self.class_of(self.complex.coords(cycle))

    def representative(self, position: int) -> list[int]:
        """K-coordinates of the generator at reduced coordinate ``position``."""
        return list(self.smith.V_inv[self.coordinates[position]])

    def relation_rows(self) -> list[list[int]]:
        """d·e_j rows, presenting K_G on the reduced coordinates."""
        rows = []
        for i, d in enumerate(self.moduli):
            if d:
                row = [0] * len(self.moduli)
                row[i] = d
                rows.append(row)
        return rows


def _check_limits(cx: CayleyComplex, limits: HomologyLimits) -> None:
    if cx.n > limits.max_group_order:
        raise CapExceeded("group order for homology", limits.max_group_order)
    if cx.m > limits.max_symbols:
        raise CapExceeded("symbol count for homology", limits.max_symbols)
    if cx.rank > limits.max_relation_rank:
        raise CapExceeded("relation module rank", limits.max_relation_rank)


def relation_module_coinvariants(
    p: Presentation,
    realization: Realization,
    limits: Optional[HomologyLimits] = None,
) -> RelationModuleCoinv:
    limits = limits or HomologyLimits()
    if realization.order > limits.max_group_order:
        raise CapExceeded("group order for homology", limits.max_group_order)
    cx = CayleyComplex(p.symbols, realization)
    _check_limits(cx, limits)
    rows: list[dict[int, int]] = []
    for s in range(cx.m):
        for i in range(cx.rank):
            row = cx.coords(cx.translate(cx.basis_cycle(i), s))
            row[i] = row.get(i, 0) - 1
            rows.append({j: c for j, c in row.items() if c})
    form = smith_normal_form_sparse(rows, cx.rank, track_left=False, track_right=True)
    coordinates = [j for j in range(cx.rank) if j >= form.rank or form.diag[j] != 1]
    moduli = [form.diag[j] if j < form.rank else 0 for j in coordinates]
    logging.info(
        "Relation module: |G|=%d, rank K=%d, %d relation rows, K_G coordinates %s",
        cx.n,
        cx.rank,
        len(rows),
        moduli,
    )
    return RelationModuleCoinv(cx, form, coordinates, moduli)


@dataclass
class PhiPsi:
    phi: list[list[int]]
    phi_on_basis: list[list[int]]
    exponent_lattice: list[list[int]]


def phi_psi_maps(rmc: RelationModuleCoinv, p: Presentation) -> PhiPsi:
    cx = rmc.complex
    on_basis = [cx.phi(cx.basis_cycle(i)) for i in range(cx.rank)]
    phi = []
    for position in range(len(rmc.coordinates)):
        rep = rmc.representative(position)
        out = [0] * cx.m
        for i, c in enumerate(rep):
            if c:
                out = [a + c * b for a, b in zip(out, on_basis[i])]
        phi.append(out)
    lattice = hermite_normal_form(exponent_matrix(p), cx.m)
    return PhiPsi(phi, on_basis, lattice)


@dataclass
class H2Result:
    invariant_factors: list[int]
    representatives: list[list[int]]
    rmc: RelationModuleCoinv
    maps: PhiPsi


def h2(p: Presentation, realization: Realization, limits: Optional[HomologyLimits] = None) -> H2Result:
    rmc = relation_module_coinvariants(p, realization, limits)
    maps = phi_psi_maps(rmc, p)
    free_rows = [maps.phi[i] for i in rmc.free_positions]
    if free_rows:
        form = smith_normal_form_sparse(
            [{j: v for j, v in enumerate(r) if v} for r in free_rows],
            len(p.symbols),
            track_right=False,
        )
        if form.rank != len(free_rows):
            raise HomologyError("φ̄ is not injective on the free part of K_G")
    torsion = rmc.torsion_positions
    return H2Result(
        [rmc.moduli[i] for i in torsion],
        [rmc.representative(i) for i in torsion],
        rmc,
        maps,
    )


# --- Γ-action ---------------------------------------------------------------


class GammaAction:
    """Matrices of Γ-elements on K_G (column j = image of generator j)."""

    def __init__(self, gs: GammaSet, rmc: RelationModuleCoinv):
        self.gs = gs
        self.rmc = rmc
        self._cache: dict[Permutation, list[list[int]]] = {}

    def automorphism(self, gamma: Permutation) -> list[int]:
        """α_γ on element indices, determined by s ↦ ^γ s."""
        cx = self.rmc.complex
        images = [cx.symbols.index(act_symbol_by(self.gs, gamma, s)) for s in cx.symbols]
        alpha = {0: 0}
        queue = [0]
        for g in queue:
            for s in range(cx.m):
                h = cx.right[g][s]
                if h not in alpha:
                    alpha[h] = cx.right[alpha[g]][images[s]]
                    queue.append(h)
        for g in range(cx.n):
            for s in range(cx.m):
                if alpha[cx.right[g][s]] != cx.right[alpha[g]][images[s]]:
                    raise ActionNotWellDefined(
                        f"symbol map of {gamma!r} does not extend to an automorphism of G"
                    )
        return [alpha[g] for g in range(cx.n)]

    def chain_map(self, gamma: Permutation, cycle: Cycle, alpha: list[int]) -> Cycle:
        cx = self.rmc.complex
        images = [cx.symbols.index(act_symbol_by(self.gs, gamma, s)) for s in cx.symbols]
        return {alpha[e // cx.m] * cx.m + images[e % cx.m]: c for e, c in cycle.items()}

    def matrix(self, gamma: Permutation) -> list[list[int]]:
        if gamma in self._cache:
            return self._cache[gamma]
        rmc = self.rmc
        cx = rmc.complex
        alpha = self.automorphism(gamma)
        size = len(rmc.coordinates)
        columns = []
        for position in range(size):
            cycle = cx.cycle_from_coords(rmc.representative(position))
            columns.append(rmc.class_of_cycle(self.chain_map(gamma, cycle, alpha)))
        matrix = [[columns[j][i] for j in range(size)] for i in range(size)]
        self._check(gamma, matrix)
        self._cache[gamma] = matrix
        return matrix

    def _check(self, gamma: Permutation, matrix: list[list[int]]) -> None:
        moduli = self.rmc.moduli
        size = len(moduli)
        for j, dj in enumerate(moduli):
            for i, di in enumerate(moduli):
                value = dj * matrix[i][j]
                if (di and value % di) or (not di and value):
                    raise ActionNotWellDefined(f"{gamma!r} does not preserve the relations of K_G")
        columns = [[matrix[i][j] for i in range(size)] for j in range(size)]
        if size and lattice_index(columns + self.rmc.relation_rows(), size) != 1:
            raise ActionNotWellDefined(f"{gamma!r} does not act bijectively on K_G")

    def apply(self, gamma: Permutation, vector: Sequence[int]) -> list[int]:
        matrix = self.matrix(gamma)
        out = [sum(row[j] * vector[j] for j in range(len(vector))) for row in matrix]
        return self.rmc.reduce(out)

    def h2_matrix(self, gamma: Permutation) -> list[list[int]]:
        torsion = self.rmc.torsion_positions
        matrix = self.matrix(gamma)
        return [[matrix[i][j] % self.rmc.moduli[i] for j in torsion] for i in torsion]


def gamma_action_on_h2(ep: EquivariantPresentation, result: H2Result) -> list[GammaActionMatrix]:
    action = GammaAction(ep.gs, result.rmc)
    return [
        GammaActionMatrix(generator=name, matrix=action.h2_matrix(gen))
        for name, gen in ep.gs.gamma.generators
    ]


def _h2_apply(matrix: list[list[int]], vector: Sequence[int], moduli: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, vector)) % d for row, d in zip(matrix, moduli)]


def _span_size(rows: list[list[int]], moduli: Sequence[int]) -> int:
    relations = [[d if i == j else 0 for j in range(len(moduli))] for i, d in enumerate(moduli)]
    total = 1
    for d in moduli:
        total *= d
    return total // lattice_index(rows + relations, len(moduli))


def gamma_generation_rank(
    h2_factors: Sequence[int],
    matrices: Sequence[Sequence[Sequence[int]]],
    limits: Optional[HomologyLimits] = None,
) -> GenerationResult:
    """Fewest Γ-orbits (greedy) whose ℤ-span is all of H₂.

    ``matrices`` are the H₂ matrices of every element of Γ.
    """
    limits = limits or HomologyLimits()
    moduli = list(h2_factors)
    if not moduli:
        return GenerationResult(rank=0)
    total = 1
    for d in moduli:
        total *= d

    def orbit(v: Sequence[int]) -> list[list[int]]:
        return [_h2_apply(m, v, moduli) for m in matrices] or [list(v)]

    chosen: list[list[int]] = []
    span_rows: list[list[int]] = []
    if total <= limits.generation_max_h2_order:
        candidates = [list(v) for v in cartesian(*(range(d) for d in moduli)) if any(v)]
        current = 1
        while current < total:
            best, best_size = None, current
            for v in candidates:
                size = _span_size(span_rows + orbit(v), moduli)
                if size > best_size:
                    best, best_size = v, size
            chosen.append(best)
            span_rows += orbit(best)
            current = best_size
        return GenerationResult(rank=len(chosen), generators=chosen, method="exhaustive")
    for i in range(len(moduli)):
        basis_vector = [1 if j == i else 0 for j in range(len(moduli))]
        before = _span_size(span_rows, moduli) if span_rows else 1
        after = _span_size(span_rows + [basis_vector], moduli)
        if after > before:
            chosen.append(basis_vector)
            span_rows += orbit(basis_vector)
    return GenerationResult(rank=len(chosen), generators=chosen, method="basis_scan")


# --- five-term diagnostics --------------------------------------------------


def _check(name: str, passed: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=passed, detail=detail)


def _module_span_closure(
    action: GammaAction, seeds: list[list[int]], generators: Sequence[Permutation]
) -> list[list[int]]:
    rmc = action.rmc
    size = len(rmc.moduli)
    basis = hermite_normal_form(seeds + rmc.relation_rows(), size)
    while True:
        images = [action.apply(g, row) for g in generators for row in basis]
        grown = hermite_normal_form(basis + images, size)
        if grown == basis:
            return basis
        basis = grown


def five_term_check(
    ep: EquivariantPresentation,
    p: Presentation,
    realization: Realization,
    result: H2Result,
    action: Optional[GammaAction] = None,
) -> list[CheckResult]:
    rmc = result.rmc
    cx = rmc.complex
    maps = result.maps
    checks: list[CheckResult] = []
    size = len(rmc.moduli)

    closed = all(not cx.boundary(cx.basis_cycle(i)) for i in range(cx.rank))
    checks.append(_check("basis_cycles_closed", closed, f"rank K = {cx.rank}"))

    stable = True
    for position in range(size):
        cycle = cx.cycle_from_coords(rmc.representative(position))
        for s in range(cx.m):
            moved = add_chains(cx.translate(cycle, s), cycle, -1)
            if any(rmc.class_of_cycle(moved)):
                stable = False
    checks.append(_check("coinvariant_saturation", stable))

    torsion_zero = all(not any(maps.phi[i]) for i in rmc.torsion_positions)
    checks.append(_check("phi_kills_h2", torsion_zero, f"H₂ = {result.invariant_factors}"))

    image = hermite_normal_form(maps.phi_on_basis, cx.m)
    checks.append(
        _check(
            "image_phi_equals_kernel_psi",
            image == maps.exponent_lattice,
            f"rank im φ = {len(image)}",
        )
    )

    two_route_factors, two_route_free = abelian_invariants(maps.phi_on_basis, cx.m)
    h1 = abelianization(p)
    checks.append(
        _check(
            "h1_two_routes_agree",
            (two_route_factors, two_route_free) == (h1.invariant_factors, h1.free_rank),
            f"H₁ = {h1.invariant_factors} ⊕ ℤ^{h1.free_rank}",
        )
    )
    generated = subgroup_order(realization.group, list(realization.assignment.values()))
    checks.append(_check("symbols_generate_group", generated == realization.order))
    h1_order = 1
    for d in h1.invariant_factors:
        h1_order *= d
    abelian_order = realization.order // derived_subgroup_order(realization.group)
    checks.append(
        _check(
            "h1_order_matches_derived_subgroup",
            h1.free_rank == 0 and h1_order == abelian_order,
            f"|H₁| = {h1_order}, |G/[G,G]| = {abelian_order}",
        )
    )

    relator_classes = [rmc.class_of_cycle(cx.lift(r)) for r in p.relators]
    spans = size == 0 or lattice_index(relator_classes + rmc.relation_rows(), size) == 1
    checks.append(_check("relator_classes_span", spans, f"{len(relator_classes)} relator classes"))

    action = action or GammaAction(ep.gs, rmc)
    seeds_words = list(ep.r0)
    if ep.mode == "weak":
        expanded = expand_R(ep)
        seeds_words += [
            w for w, origin in zip(expanded.base.relators, expanded.provenance) if isinstance(origin, ConjOrigin)
        ]
    seeds = [rmc.class_of_cycle(cx.lift(w)) for w in seeds_words if len(w)]
    gamma_gens = [gen for _, gen in ep.gs.gamma.generators]
    closure_basis = _module_span_closure(action, seeds, gamma_gens) if size else []
    module_spans = size == 0 or lattice_index(closure_basis, size) == 1
    checks.append(_check("r0_classes_generate_gamma_module", module_spans, f"{len(seeds)} seed classes"))

    gamma_order = order(ep.gs.gamma)
    details = []
    ok = True
    for index, orbit in enumerate(ep.gs.orbits):
        stabilizer = subgroup_order(ep.gs.gamma, stabilizer_of_symbol(ep.gs, SymbolRef(index, orbit.base_point)))
        ok = ok and orbit.domain_size * stabilizer == gamma_order
        details.append(f"{orbit.rep_name}: {orbit.domain_size}·{stabilizer}")
    checks.append(_check("orbit_stabilizer", ok, f"|Γ| = {gamma_order}; " + ", ".join(details)))
    return checks


# --- report -----------------------------------------------------------------


def trivial_gamma_matrices(size: int) -> list[list[list[int]]]:
    return [[[1 if i == j else 0 for j in range(size)] for i in range(size)]]


def homology_report(
    ep: EquivariantPresentation,
    limits: Optional[HomologyLimits] = None,
    max_cosets: int = DEFAULT_MAX_COSETS,
    trivial_gamma: bool = False,
    oracle: bool = False,
) -> HomologyReport:
    limits = limits or HomologyLimits()
    p = expand_R(ep).base
    realization = realize(ep, max_cosets)
    result = h2(p, realization, limits)
    rmc = result.rmc
    action = GammaAction(ep.gs, rmc)
    matrices = gamma_action_on_h2(ep, result)
    if trivial_gamma:
        all_matrices = trivial_gamma_matrices(len(result.invariant_factors))
    else:
        all_matrices = [action.h2_matrix(g) for g in enumerate_elements(ep.gs.gamma)]
    generation = gamma_generation_rank(result.invariant_factors, all_matrices, limits)
    diagnostics = five_term_check(ep, p, realization, result, action)
    oracle_data = None
    if oracle:
        from .bar_oracle import bar_h2_oracle

        factors = bar_h2_oracle(realization.group, limits)
        oracle_data = {"h2_invariant_factors": factors, "agrees": factors == result.invariant_factors}
        diagnostics.append(
            _check("bar_oracle_agrees", factors == result.invariant_factors, f"oracle H₂ = {factors}")
        )
    if ep.mode == "weak":
        inner = all(
            action.h2_matrix(g) == trivial_gamma_matrices(len(result.invariant_factors))[0]
            for g in dict.fromkeys(iota_map(ep).values())
        )
        diagnostics.append(_check("inner_action_trivial", inner))
    return HomologyReport(
        group_order=realization.order,
        num_symbols=len(p.symbols),
        relation_rank=rmc.complex.rank,
        h1=abelianization(p),
        h2_invariant_factors=result.invariant_factors,
        h2_basis_representatives=result.representatives,
        gamma_action_matrices=matrices,
        gamma_generation=generation,
        five_term_diagnostics=diagnostics,
        oracle=oracle_data,
    )
