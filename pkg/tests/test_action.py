import pytest

from eqpres.action import (
    GammaSet,
    GeneratorOrbit,
    act_symbol,
    act_symbol_by,
    act_word,
    base_symbols,
    element_action,
    enumerate_S,
    homomorphism_defects,
    orbit_transversal,
    stabilizer_of_symbol,
)
from eqpres.errors import (
    ActionNotWellDefined,
    DegreeMismatch,
    MissingImage,
    PointOutOfRange,
    SymbolOutOfRange,
    UnknownGenerator,
)
from eqpres.permgroup import PermGroup, compose, enumerate_elements, from_cycles, order, subgroup_order
from eqpres.word import Letter, SymbolRef, Word


def _sym(n):
    gens = [("a", from_cycles(n, [(0, 1)]))]
    if n > 2:
        gens.append(("b", from_cycles(n, [tuple(range(n))])))
    return PermGroup(n, tuple(gens))


def _natural(n, name="s"):
    gamma = _sym(n)
    return GammaSet(gamma, (GeneratorOrbit.build(name, n, dict(gamma.generators)),))


def test_enumerate_and_base_symbols():
    gs = _natural(3)
    assert enumerate_S(gs) == [SymbolRef(0, 0), SymbolRef(0, 1), SymbolRef(0, 2)]
    assert base_symbols(gs) == [SymbolRef(0, 0)]
    assert gs.symbol_name(SymbolRef(0, 2)) == "s.2"


def test_transposition_moves_base_symbol():
    gs = _natural(3)
    swap = from_cycles(3, [(0, 1)])
    assert act_symbol_by(gs, swap, SymbolRef(0, 0)) == SymbolRef(0, 1)
    assert act_symbol(gs, [("a", 1)], SymbolRef(0, 0)) == SymbolRef(0, 1)


def test_action_is_left_action():
    gs = _natural(4)
    elements = enumerate_elements(gs.gamma)
    for gamma in elements[:8]:
        for delta in elements[:8]:
            for s in enumerate_S(gs):
                product = act_symbol_by(gs, compose(gamma, delta), s)
                assert product == act_symbol_by(gs, gamma, act_symbol_by(gs, delta, s))


def test_word_action_matches_element_action():
    gs = _natural(4)
    word = [("b", 1), ("a", -1), ("b", 1)]
    element = compose(compose(from_cycles(4, [(0, 1, 2, 3)]), from_cycles(4, [(0, 1)])), from_cycles(4, [(0, 1, 2, 3)]))
    for s in enumerate_S(gs):
        assert act_symbol(gs, word, s) == act_symbol_by(gs, element, s)


def test_act_word_preserves_length():
    gs = _natural(3)
    w = Word((Letter(SymbolRef(0, 0), 1), Letter(SymbolRef(0, 1), -1)))
    moved = act_word(gs, [("b", 1)], w)
    assert len(moved) == 2


@pytest.mark.parametrize("n", [3, 4])
def test_orbit_stabilizer(n):
    gs = _natural(n)
    s = SymbolRef(0, 0)
    stabilizer = subgroup_order(gs.gamma, stabilizer_of_symbol(gs, s))
    assert stabilizer * n == order(gs.gamma)
    for sigma in stabilizer_of_symbol(gs, s):
        assert act_symbol_by(gs, sigma, s) == s


def test_stabilizer_of_symbol_in_sym4_has_order_six():
    gs = _natural(4)
    assert subgroup_order(gs.gamma, stabilizer_of_symbol(gs, SymbolRef(0, 0))) == 6


def test_orbit_transversal_reaches_every_symbol():
    gs = _natural(4)
    transversal = orbit_transversal(gs, SymbolRef(0, 0))
    assert sorted(transversal) == enumerate_S(gs)
    for u, gamma in transversal.items():
        assert act_symbol_by(gs, gamma, SymbolRef(0, 0)) == u


def test_non_homomorphic_action_is_reported():
    gamma = PermGroup(2, (("a", from_cycles(2, [(0, 1)])),))
    # a has order 2 in Γ but acts by a 3-cycle
    orbit = GeneratorOrbit.build("s", 3, {"a": from_cycles(3, [(0, 1, 2)])})
    gs = GammaSet(gamma, (orbit,))
    assert homomorphism_defects(gs)
    with pytest.raises(ActionNotWellDefined):
        element_action(gs)


def test_missing_generator_action():
    gamma = _sym(3)
    with pytest.raises(MissingImage):
        GammaSet(gamma, (GeneratorOrbit.build("s", 3, {"a": [1, 0, 2]}),))


def test_unknown_generator_action():
    gamma = _sym(3)
    orbit = GeneratorOrbit.build("s", 3, {"a": [1, 0, 2], "b": [1, 2, 0], "z": [0, 1, 2]})
    with pytest.raises(UnknownGenerator):
        GammaSet(gamma, (orbit,))


def test_action_degree_mismatch():
    gamma = _sym(3)
    with pytest.raises(DegreeMismatch):
        GammaSet(gamma, (GeneratorOrbit.build("s", 3, {"a": [1, 0], "b": [1, 2, 0]}),))


def test_base_point_out_of_range():
    gamma = _sym(3)
    with pytest.raises(PointOutOfRange):
        GammaSet(gamma, (GeneratorOrbit.build("s", 3, dict(gamma.generators), base_point=5),))


def test_non_transitive_orbit_is_rejected():
    gamma = PermGroup(3, (("a", from_cycles(3, [(0, 1)])),))
    with pytest.raises(ActionNotWellDefined):
        GammaSet(gamma, (GeneratorOrbit.build("s", 3, dict(gamma.generators)),))


def test_symbol_out_of_range():
    with pytest.raises(SymbolOutOfRange):
        act_symbol_by(_natural(3), from_cycles(3, [(0, 1)]), SymbolRef(0, 7))
