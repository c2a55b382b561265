from dataclasses import replace

import pytest

from eqpres.action import act_symbol_by, enumerate_S
from eqpres.catalog import builtin
from eqpres.deweak import (
    ApplyRelator,
    DerivationTrace,
    DeweakInput,
    FreeExpand,
    FreeReduce,
    apply_step,
    check_trace,
    choose_X,
    derive_claim1,
    derive_conjugation,
    derive_over_X,
    deweakify,
    make_context,
    reverse,
    symmetric_Y,
    transport,
)
from eqpres.equivariant import iota_map, realize, validate
from eqpres.errors import MalformedStep, ModeMismatch
from eqpres.files import to_equivariant
from eqpres.presentation import evaluate
from eqpres.word import Letter, SymbolRef, Word


def _example(name, n):
    return to_equivariant(builtin(name, n))


def _s(point, orbit=0):
    return SymbolRef(orbit, point)


def test_choose_X_for_hyperoct_is_all_flips():
    ep = _example("hyperoct", 3)
    assert choose_X(ep, realize(ep)) == [_s(0), _s(1), _s(2)]


def test_choose_X_for_cyclic_is_base_symbol():
    ep = _example("cyclic", 2)
    assert choose_X(ep, realize(ep)) == [_s(0)]


def test_choose_X_for_hyperpair_skips_generated_symbols():
    ep = _example("hyperpair", 3)
    assert choose_X(ep, realize(ep)) == [_s(0), _s(0, 1), _s(2)]


def test_symmetric_Y_for_hyperoct():
    ep = _example("hyperoct", 3)
    gamma = ep.gs.gamma
    Y = symmetric_Y(gamma)
    assert len(Y) == 3
    assert gamma.generator("c") in Y and gamma.generator("t") in Y
    assert len(symmetric_Y(_example("hyperoct", 2).gs.gamma)) == 2


def test_deweak_input_requires_base_symbols_in_X():
    ep = _example("hyperoct", 3)
    with pytest.raises(ValueError):
        DeweakInput(ep, (_s(1),), tuple(symmetric_Y(ep.gs.gamma)))


def test_witness_for_rotation_is_single_letter():
    ctx = make_context(_example("hyperoct", 3))
    c_index = ctx.input.Y.index(ctx.gs.gamma.generator("c"))
    assert ctx.witnesses[(c_index, _s(0))] == Word((Letter(_s(1), 1),))


WEAK_CASES = [("hyperoct", 2), ("hyperoct", 3), ("hyperpair", 3), ("cyclic", 5)]


@pytest.mark.parametrize("name,n", WEAK_CASES)
def test_every_witness_evaluates_to_its_symbol(name, n):
    ctx = make_context(_example(name, n))
    assignment = ctx.realization.assignment
    degree = ctx.realization.group.degree
    assert len(ctx.witnesses) == len(ctx.input.Y) * len(ctx.input.X)
    for (yi, x), witness in ctx.witnesses.items():
        assert all(letter.symbol in ctx.input.X for letter in witness.letters)
        image = act_symbol_by(ctx.gs, ctx.input.Y[yi], x)
        assert evaluate(witness, assignment, degree) == assignment[image]


@pytest.mark.parametrize("name,n", WEAK_CASES)
def test_derivation_over_X_stays_within_length_bound(name, n):
    ctx = make_context(_example(name, n))
    longest = max(len(witness) for witness in ctx.witnesses.values())
    for u in enumerate_S(ctx.gs):
        trace = derive_claim1(u, ctx)
        assert trace.relator_applications() <= ctx.distance[u] * (1 + longest)
        assert all(letter.symbol in ctx.input.X for letter in trace.end)


def test_derive_claim1_names_derive_over_X():
    assert derive_claim1 is derive_over_X


def test_hyperoct_relator_counts():
    ctx = make_context(_example("hyperoct", 3))
    kinds = [slot.kind for slot in ctx.slots]
    assert kinds.count("conjugation") == 3
    assert kinds.count("transport") == 9
    assert all(slot.trivial for slot in ctx.slots if slot.kind == "transport")


def test_derivation_short_circuits_inside_X():
    ctx = make_context(_example("hyperoct", 3))
    trace = derive_over_X(_s(1), ctx)
    assert trace.steps == ()
    assert trace.end == (Letter(_s(1), 1),)


def test_conjugation_trace_for_commuting_flips():
    ctx = make_context(_example("hyperoct", 3))
    trace = derive_conjugation(_s(0), _s(1), ctx)
    assert trace.start == (Letter(_s(0), 1), Letter(_s(1), 1), Letter(_s(0), -1))
    assert trace.end == (Letter(_s(1), 1),)
    assert check_trace(trace, ctx.relators, ctx.gs)


@pytest.mark.parametrize("n", [2, 3])
def test_deweakify_hyperoct(n):
    ep = _example("hyperoct", n)
    result = deweakify(ep)
    assert result.all_valid
    assert len(result.traces) == n * n
    assert result.presentation.mode == "finite"
    report = validate(result.presentation)
    assert report.passed
    assert report.realized_order == 2**n


def test_deweakify_hyperpair_needs_transport_steps():
    ep = _example("hyperpair", 3)
    result = deweakify(ep)
    assert result.all_valid
    assert len(result.traces) == 36
    assert validate(result.presentation).realized_order == 8
    assert max(trace.relator_applications() for _, _, trace in result.traces) >= 2
    iota = iota_map(ep)
    for s, t, trace in result.traces:
        assert trace.start == (Letter(s, 1), Letter(t, 1), Letter(s, -1))
        assert trace.end == (Letter(act_symbol_by(ep.gs, iota[s], t), 1),)


def test_derivation_at_distance_two_ends_in_X():
    ctx = make_context(_example("hyperpair", 3))
    far = _s(2, 1)
    assert ctx.distance[far] == 2
    trace = derive_over_X(far, ctx)
    assert all(letter.symbol in ctx.input.X for letter in trace.end)
    assert trace.relator_applications() >= 2
    assert check_trace(trace, ctx.relators, ctx.gs)


def test_deweakify_cyclic_has_only_trivial_relators():
    ep = _example("cyclic", 4)
    result = deweakify(ep)
    assert result.all_valid
    assert all(slot.trivial for slot in result.context.slots)
    assert validate(result.presentation).realized_order == 4


def test_deweakify_rejects_finite_input():
    with pytest.raises(ModeMismatch):
        deweakify(_example("z2sum", 2))


def test_reverse_and_transport_replay():
    ctx = make_context(_example("hyperpair", 3))
    trace = derive_conjugation(_s(0), _s(2, 1), ctx)
    back = reverse(trace)
    assert back.start == trace.end and back.end == trace.start
    assert check_trace(back, ctx.relators, ctx.gs)
    gamma = ctx.gs.gamma.generator("v")
    moved = transport(trace, ctx.gs, gamma)
    assert check_trace(moved, ctx.relators, ctx.gs)


def test_tampered_trace_is_rejected():
    ctx = make_context(_example("hyperpair", 3))
    trace = derive_conjugation(_s(0), _s(2, 1), ctx)
    index = next(i for i, step in enumerate(trace.steps) if isinstance(step, ApplyRelator))
    bad_step = replace(trace.steps[index], position=10_000)
    tampered = DerivationTrace(trace.start, trace.steps[:index] + (bad_step,) + trace.steps[index + 1 :], trace.end)
    with pytest.raises(MalformedStep):
        check_trace(tampered, ctx.relators, ctx.gs)


def test_apply_step_free_moves():
    gs = _example("hyperoct", 2).gs
    a = Letter(_s(0), 1)
    expanded = apply_step((a,), FreeExpand(1, Letter(_s(1), -1)), [], gs)
    assert expanded == (a, Letter(_s(1), -1), Letter(_s(1), 1))
    assert apply_step(expanded, FreeReduce(1, Letter(_s(1), -1)), [], gs) == (a,)
    with pytest.raises(MalformedStep):
        apply_step((a,), FreeReduce(0, a), [], gs)


def test_trivial_relator_cannot_be_applied():
    gs = _example("hyperoct", 2).gs
    step = ApplyRelator(gs.gamma.identity(), 0, 0, 0, "forward")
    with pytest.raises(MalformedStep):
        apply_step((), step, [None], gs)


def test_every_pair_of_symbols_is_derived():
    ep = _example("hyperoct", 3)
    result = deweakify(ep)
    pairs = {(s, t) for s, t, _ in result.traces}
    assert pairs == {(s, t) for s in enumerate_S(ep.gs) for t in enumerate_S(ep.gs)}
