"""Turning a weakly finite Γ-equivariant presentation into a finite one.

The conjugation relations R_conj are replaced by two finite families of
orbit relators:

* conjugation relators ``s₀ x s₀⁻¹ (^{s₀}x)⁻¹`` for s₀ ∈ S₀, x ∈ X
* transport relators ``(^y x) w_{y,x}⁻¹`` for y ∈ Y, x ∈ X

and every member of R_conj gets a derivation trace that a replay
validator can check step by step against the Γ-translates of these
relators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Literal, Optional, Sequence, Union

from .action import (
    GammaSet,
    act_symbol_by,
    act_word_by,
    base_symbols,
    check_symbol,
    enumerate_S,
)
from .equivariant import EquivariantPresentation, iota_map, realize, require_weak
from .errors import EquivariantError, MalformedStep
from .permgroup import PermGroup, Permutation, closure, compose, inverse, word_for_element
from .presentation import DEFAULT_MAX_COSETS, Realization
from .word import Letter, SymbolRef, Word, is_reduced, raw_invert, reduce_letters

Raw = tuple[Letter, ...]


# --- traces -----------------------------------------------------------------


@dataclass(frozen=True)
class FreeReduce:
    position: int
    letter: Letter


@dataclass(frozen=True)
class FreeExpand:
    position: int
    letter: Letter


@dataclass(frozen=True)
class ApplyRelator:
    gamma: Permutation
    relator: int
    position: int
    split: int
    direction: Literal["forward", "backward"] = "forward"


Step = Union[FreeReduce, FreeExpand, ApplyRelator]


@dataclass(frozen=True)
class DerivationTrace:
    start: Raw
    steps: tuple[Step, ...]
    end: Raw

    @classmethod
    def empty(cls, word: Raw) -> "DerivationTrace":
        return cls(tuple(word), (), tuple(word))

    def relator_applications(self) -> int:
        return sum(isinstance(step, ApplyRelator) for step in self.steps)


def _translated(gs: GammaSet, relators: Sequence[Optional[Word]], step: ApplyRelator) -> Raw:
    if not 0 <= step.relator < len(relators):
        raise MalformedStep(f"relator index {step.relator} out of range")
    base = relators[step.relator]
    if base is None:
        raise MalformedStep(f"relator {step.relator} is trivial and cannot be applied")
    try:
        return act_word_by(gs, step.gamma, base).letters
    except EquivariantError as exc:
        raise MalformedStep(f"cannot translate relator {step.relator}: {exc}") from None


def apply_step(
    word: Raw,
    step: Step,
    relators: Sequence[Optional[Word]],
    gs: GammaSet,
) -> Raw:
    """One replay step; raises MalformedStep when the step does not fit ``word``."""
    if isinstance(step, FreeReduce):
        p = step.position
        if not 0 <= p < len(word) - 1:
            raise MalformedStep(f"free reduction at {p} outside a word of length {len(word)}")
        if word[p] != step.letter or word[p + 1] != step.letter.inverse():
            raise MalformedStep(f"no cancelling pair at position {p}")
        return word[:p] + word[p + 2 :]
    if isinstance(step, FreeExpand):
        p = step.position
        if not 0 <= p <= len(word):
            raise MalformedStep(f"free expansion at {p} outside a word of length {len(word)}")
        try:
            check_symbol(gs, step.letter.symbol)
        except EquivariantError as exc:
            raise MalformedStep(str(exc)) from None
        return word[:p] + (step.letter, step.letter.inverse()) + word[p:]
    if isinstance(step, ApplyRelator):
        r = _translated(gs, relators, step)
        if not 0 <= step.split <= len(r):
            raise MalformedStep(f"split {step.split} outside relator of length {len(r)}")
        lhs, rhs = r[: step.split], raw_invert(r[step.split :])
        old, new = (lhs, rhs) if step.direction == "forward" else (rhs, lhs)
        p = step.position
        if p < 0 or word[p : p + len(old)] != old or p + len(old) > len(word):
            raise MalformedStep(f"relator {step.relator} does not match at position {p}")
        return word[:p] + new + word[p + len(old) :]
    raise MalformedStep(f"unknown step {step!r}")


def check_trace(trace: DerivationTrace, r0prime: Sequence[Optional[Word]], gs: GammaSet) -> bool:
    word = tuple(trace.start)
    for step in trace.steps:
        word = apply_step(word, step, r0prime, gs)
    return word == tuple(trace.end)


def transport(trace: DerivationTrace, gs: GammaSet, gamma: Permutation) -> DerivationTrace:
    """The γ-translate of a trace: letters acted on, relator translates composed with γ."""

    def act(raw: Raw) -> Raw:
        return tuple(Letter(act_symbol_by(gs, gamma, l.symbol), l.exponent) for l in raw)

    steps: list[Step] = []
    for step in trace.steps:
        if isinstance(step, ApplyRelator):
            steps.append(replace(step, gamma=compose(gamma, step.gamma)))
        else:
            letter = Letter(act_symbol_by(gs, gamma, step.letter.symbol), step.letter.exponent)
            steps.append(replace(step, letter=letter))
    return DerivationTrace(act(trace.start), tuple(steps), act(trace.end))


def reverse(trace: DerivationTrace) -> DerivationTrace:
    steps: list[Step] = []
    for step in reversed(trace.steps):
        if isinstance(step, FreeReduce):
            steps.append(FreeExpand(step.position, step.letter))
        elif isinstance(step, FreeExpand):
            steps.append(FreeReduce(step.position, step.letter))
        else:
            flipped = "backward" if step.direction == "forward" else "forward"
            steps.append(replace(step, direction=flipped))
    return DerivationTrace(trace.end, tuple(steps), trace.start)


class TraceBuilder:
    """Accumulates steps, replaying each one as it is added."""

    def __init__(self, gs: GammaSet, relators: Sequence[Optional[Word]], start: Raw):
        self.gs = gs
        self.relators = relators
        self.start = tuple(start)
        self.current = tuple(start)
        self.steps: list[Step] = []

    def apply(self, step: Step) -> None:
        self.current = apply_step(self.current, step, self.relators, self.gs)
        self.steps.append(step)

    def embed(self, trace: DerivationTrace, offset: int) -> None:
        for step in trace.steps:
            self.apply(replace(step, position=step.position + offset))

    def reduce_window(self, start: int, end: int) -> int:
        """Freely reduce current[start:end]; returns the new window end."""
        while True:
            for i in range(start, end - 1):
                a, b = self.current[i], self.current[i + 1]
                if a.symbol == b.symbol and a.exponent == -b.exponent:
                    self.apply(FreeReduce(i, a))
                    end -= 2
                    break
            else:
                return end

    def reduce_all(self) -> None:
        self.reduce_window(0, len(self.current))

    def rewrite(self, position: int, length: int, target: Raw, gamma: Permutation, slot: "R0PrimeSlot") -> None:
        """Replace current[position:position+length] by the reduced word ``target``."""
        segment = self.current[position : position + length]
        if slot.trivial:
            end = self.reduce_window(position, position + length)
            if self.current[position:end] != target:
                raise RuntimeError(f"trivial relator slot {slot.index} cannot rewrite {segment}")
            return
        r = act_word_by(self.gs, gamma, slot.word).letters
        r_inv = raw_invert(r)
        if is_reduced(segment) and segment + raw_invert(target) == r:
            self.apply(ApplyRelator(gamma, slot.index, position, len(segment), "forward"))
            return
        if is_reduced(segment) and target + raw_invert(segment) == r:
            self.apply(ApplyRelator(gamma, slot.index, position, len(target), "backward"))
            return
        before = reduce_letters(target + raw_invert(segment))
        after = reduce_letters(raw_invert(segment) + target)
        if after == r:
            self.apply(ApplyRelator(gamma, slot.index, position + length, len(r), "backward"))
        elif after == r_inv:
            self.apply(ApplyRelator(gamma, slot.index, position + length, 0, "forward"))
        elif before == r:
            self.apply(ApplyRelator(gamma, slot.index, position, len(r), "backward"))
        elif before == r_inv:
            self.apply(ApplyRelator(gamma, slot.index, position, 0, "forward"))
        else:
            raise RuntimeError(f"relator slot {slot.index} does not relate {segment} to {target}")
        end = self.reduce_window(position, position + length + len(r))
        if self.current[position:end] != target:
            raise RuntimeError(f"rewrite with slot {slot.index} ended at {self.current[position:end]}")

    def finish(self) -> DerivationTrace:
        return DerivationTrace(self.start, tuple(self.steps), self.current)


# --- deweakification data ---------------------------------------------------


@dataclass(frozen=True)
class R0PrimeSlot:
    index: int
    kind: Literal["conjugation", "transport"]
    word: Word
    trivial: bool
    s0: Optional[SymbolRef] = None
    y_index: Optional[int] = None
    x: Optional[SymbolRef] = None


@dataclass(frozen=True)
class DeweakInput:
    ep: EquivariantPresentation
    X: tuple[SymbolRef, ...]
    Y: tuple[Permutation, ...]

    def __post_init__(self):
        missing = [s for s in base_symbols(self.ep.gs) if s not in self.X]
        if missing:
            raise ValueError(f"X must contain every base symbol; missing {missing}")
        ys = set(self.Y)
        if any(inverse(y) not in ys for y in self.Y):
            raise ValueError("Y must be closed under inversion")


@dataclass
class DeweakContext:
    input: DeweakInput
    realization: Realization
    witnesses: dict[tuple[int, SymbolRef], Word]
    slots: list[R0PrimeSlot]
    conj_slot: dict[tuple[SymbolRef, SymbolRef], int] = field(default_factory=dict)
    transport_slot: dict[tuple[int, SymbolRef], int] = field(default_factory=dict)
    distance: dict[SymbolRef, int] = field(default_factory=dict)
    gamma_to: dict[SymbolRef, Permutation] = field(default_factory=dict)

    @property
    def gs(self) -> GammaSet:
        return self.input.ep.gs

    @property
    def relators(self) -> list[Optional[Word]]:
        return [None if slot.trivial else slot.word for slot in self.slots]


def symmetric_Y(gamma: PermGroup) -> list[Permutation]:
    """Generators and their inverses, self-inverse elements once."""
    out: list[Permutation] = []
    for _, gen in gamma.generators:
        for y in (gen, inverse(gen)):
            if y not in out:
                out.append(y)
    return out


def y_word(gamma: PermGroup, y: Permutation) -> tuple[tuple[str, int], ...]:
    return word_for_element(gamma, y)


def choose_X(ep: EquivariantPresentation, realization: Realization) -> list[SymbolRef]:
    target = realization.order
    degree = realization.group.degree
    cap = realization.group.element_cap
    X = list(base_symbols(ep.gs))
    current = len(closure([realization.assignment[s] for s in X], degree, cap))
    for s in enumerate_S(ep.gs):
        if current == target:
            break
        if s in X:
            continue
        size = len(closure([realization.assignment[x] for x in X + [s]], degree, cap))
        if size > current:
            X.append(s)
            current = size
    return X


def witness_words(inp: DeweakInput, realization: Realization) -> dict[tuple[int, SymbolRef], Word]:
    """Shortest, lexicographically least X-words for every symbol ^y x."""
    letters = [Letter(x, e) for x in inp.X for e in (1, -1)]
    perms = {
        letter: (realization.assignment[letter.symbol] if letter.exponent == 1 else inverse(realization.assignment[letter.symbol]))
        for letter in letters
    }
    start = realization.group.identity()
    parents: dict[Permutation, Optional[tuple[Permutation, Letter]]] = {start: None}
    queue = [start]
    for current in queue:
        for letter in letters:
            product = compose(current, perms[letter])
            if product not in parents:
                parents[product] = (current, letter)
                queue.append(product)

    def path(element: Permutation) -> Word:
        out: list[Letter] = []
        node = parents[element]
        while node is not None:
            previous, letter = node
            out.append(letter)
            node = parents[previous]
        return Word(tuple(reversed(out)))

    table = {}
    for yi, y in enumerate(inp.Y):
        for x in inp.X:
            image = act_symbol_by(inp.ep.gs, y, x)
            table[(yi, x)] = path(realization.assignment[image])
    return table


def build_R0prime(inp: DeweakInput, witnesses: dict[tuple[int, SymbolRef], Word]) -> list[R0PrimeSlot]:
    gs = inp.ep.gs
    iota = iota_map(inp.ep)
    slots: list[R0PrimeSlot] = []
    for s0 in base_symbols(gs):
        for x in inp.X:
            v = act_symbol_by(gs, iota[s0], x)
            w = Word((Letter(s0, 1), Letter(x, 1), Letter(s0, -1), Letter(v, -1)))
            slots.append(R0PrimeSlot(len(slots), "conjugation", w, len(w) == 0, s0=s0, x=x))
    for yi, y in enumerate(inp.Y):
        for x in inp.X:
            image = act_symbol_by(gs, y, x)
            w = Word((Letter(image, 1),) + raw_invert(witnesses[(yi, x)].letters))
            slots.append(R0PrimeSlot(len(slots), "transport", w, len(w) == 0, y_index=yi, x=x))
    return slots


def _orbit_distances(ctx: DeweakContext) -> None:
    gs = ctx.gs
    for s0 in base_symbols(gs):
        ctx.distance[s0] = 0
        ctx.gamma_to[s0] = gs.gamma.identity()
        queue = [s0]
        for v in queue:
            for y in ctx.input.Y:
                u = act_symbol_by(gs, y, v)
                if u not in ctx.distance:
                    ctx.distance[u] = ctx.distance[v] + 1
                    ctx.gamma_to[u] = compose(y, ctx.gamma_to[v])
                    queue.append(u)


def make_context(
    ep: EquivariantPresentation,
    X: Optional[Sequence[SymbolRef]] = None,
    Y: Optional[Sequence[Permutation]] = None,
    max_cosets: int = DEFAULT_MAX_COSETS,
) -> DeweakContext:
    require_weak(ep)
    realization = realize(ep, max_cosets)
    if X is None:
        X = choose_X(ep, realization)
    if Y is None:
        Y = symmetric_Y(ep.gs.gamma)
    inp = DeweakInput(ep, tuple(X), tuple(Y))
    generated = len(
        closure([realization.assignment[x] for x in inp.X], realization.group.degree, realization.group.element_cap)
    )
    if generated != realization.order:
        raise ValueError(f"X generates a subgroup of order {generated}, not {realization.order}")
    witnesses = witness_words(inp, realization)
    slots = build_R0prime(inp, witnesses)
    ctx = DeweakContext(inp, realization, witnesses, slots)
    for slot in slots:
        if slot.kind == "conjugation":
            ctx.conj_slot[(slot.s0, slot.x)] = slot.index
        else:
            ctx.transport_slot[(slot.y_index, slot.x)] = slot.index
    _orbit_distances(ctx)
    logging.info(
        "Deweak context: |X|=%d, |Y|=%d, %d relator slots (%d trivial)",
        len(inp.X),
        len(inp.Y),
        len(slots),
        sum(slot.trivial for slot in slots),
    )
    return ctx


def derive_over_X(u: SymbolRef, ctx: DeweakContext) -> DerivationTrace:
    """Trace from [u] to a reduced word over X."""
    gs = ctx.gs
    if u in ctx.input.X:
        return DerivationTrace.empty((Letter(u, 1),))
    k = ctx.distance[u]
    for yi, y in enumerate(ctx.input.Y):
        v = act_symbol_by(gs, inverse(y), u)
        if ctx.distance[v] == k - 1:
            break
    else:
        raise RuntimeError(f"no Y-step towards the base symbol from {tuple(u)}")
    inner_raw = derive_over_X(v, ctx)
    inner = transport(inner_raw, gs, y)
    builder = TraceBuilder(gs, ctx.relators, inner.start)
    builder.embed(inner, 0)
    identity = gs.gamma.identity()
    for i in reversed(range(len(inner_raw.end))):
        x, e = inner_raw.end[i]
        witness = ctx.witnesses[(yi, x)].letters
        target = witness if e == 1 else raw_invert(witness)
        slot = ctx.slots[ctx.transport_slot[(yi, x)]]
        builder.rewrite(i, 1, target, identity, slot)
    builder.reduce_all()
    return builder.finish()


derive_claim1 = derive_over_X


def derive_base_conjugation(s0: SymbolRef, u: SymbolRef, ctx: DeweakContext) -> DerivationTrace:
    """Trace from s₀ u s₀⁻¹ to ^{s₀}u."""
    gs = ctx.gs
    iota_s0 = ctx.input.ep.iota_base(s0)
    identity = gs.gamma.identity()
    first = derive_over_X(u, ctx)
    builder = TraceBuilder(gs, ctx.relators, (Letter(s0, 1), Letter(u, 1), Letter(s0, -1)))
    builder.embed(first, 1)
    w = first.end
    if not w:
        builder.reduce_all()
    else:
        for i in reversed(range(1, len(w))):
            builder.apply(FreeExpand(1 + i, Letter(s0, -1)))
        for i in reversed(range(len(w))):
            x, e = w[i]
            v = act_symbol_by(gs, iota_s0, x)
            slot = ctx.slots[ctx.conj_slot[(s0, x)]]
            builder.rewrite(3 * i, 3, (Letter(v, e),), identity, slot)
    back = reverse(transport(first, gs, iota_s0))
    if builder.current != back.start:
        raise RuntimeError("conjugated X-word does not match the transported trace")
    builder.embed(back, 0)
    return builder.finish()


def derive_conjugation(s: SymbolRef, t: SymbolRef, ctx: DeweakContext) -> DerivationTrace:
    """Trace from s t s⁻¹ to the single letter ^s t."""
    gs = ctx.gs
    s0 = base_symbols(gs)[s.orbit_index]
    gamma = ctx.gamma_to[s]
    u = act_symbol_by(gs, inverse(gamma), t)
    trace = transport(derive_base_conjugation(s0, u, ctx), gs, gamma)
    expected = act_symbol_by(gs, iota_map(ctx.input.ep)[s], t)
    if trace.end != (Letter(expected, 1),):
        raise RuntimeError(f"conjugation trace for {tuple(s)}, {tuple(t)} ends at {trace.end}")
    return trace


@dataclass
class DeweakResult:
    presentation: EquivariantPresentation
    context: DeweakContext
    traces: list[tuple[SymbolRef, SymbolRef, DerivationTrace]]
    valid: list[bool]

    @property
    def all_valid(self) -> bool:
        return all(self.valid)


def deweakify(ep: EquivariantPresentation, max_cosets: int = DEFAULT_MAX_COSETS) -> DeweakResult:
    ctx = make_context(ep, max_cosets=max_cosets)
    traces = []
    valid = []
    relators = ctx.relators
    for s in enumerate_S(ep.gs):
        for t in enumerate_S(ep.gs):
            trace = derive_conjugation(s, t, ctx)
            traces.append((s, t, trace))
            valid.append(check_trace(trace, relators, ep.gs))
    r0: list[Word] = []
    for w in list(ep.r0) + [slot.word for slot in ctx.slots if not slot.trivial]:
        if w not in r0:
            r0.append(w)
    name = f"{ep.name}-finite" if ep.name else "finite"
    output = EquivariantPresentation(ep.gs, tuple(r0), "finite", (), name)
    logging.info("Deweakified '%s': %d relators, %d/%d traces valid", ep.name, len(r0), sum(valid), len(valid))
    return DeweakResult(output, ctx, traces, valid)
