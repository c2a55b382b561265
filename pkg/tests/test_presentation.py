from itertools import permutations

import pytest

from eqpres.errors import CapExceeded, UnknownSymbol
from eqpres.permgroup import from_cycles, identity, order
from eqpres.presentation import (
    Presentation,
    evaluate,
    regular_realization,
    todd_coxeter,
    verify_relators,
)
from eqpres.word import Letter, SymbolRef, Word, commutator, power


def _sym(i):
    return SymbolRef(0, i)


def _letter_word(*indices):
    return Word(tuple(Letter(_sym(i), 1) for i in indices))


def _z2sum(n):
    relators = [power(_letter_word(i), 2) for i in range(n)]
    relators += [commutator(_letter_word(i), _letter_word(j)) for i in range(n) for j in range(n) if i != j]
    return Presentation(tuple(_sym(i) for i in range(n)), tuple(relators))


def _star(n, disjoint=True):
    relators = [power(_letter_word(i), 2) for i in range(n)]
    relators += [power(_letter_word(i, j), 3) for i, j in permutations(range(n), 2)]
    relators += [power(_letter_word(i, j, k), 4) for i, j, k in permutations(range(n), 3)]
    if disjoint:
        relators += [power(_letter_word(i, j, i, k), 2) for i, j, k in permutations(range(n), 3)]
    return Presentation(tuple(_sym(i) for i in range(n)), tuple(relators))


def _cyclic(n):
    return Presentation((_sym(0),), (power(_letter_word(0), n),))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_z2sum_has_two_to_the_n_cosets(n):
    assert todd_coxeter(_z2sum(n)).num_cosets == 2**n


@pytest.mark.parametrize("n,expected", [(3, 24), (4, 120)])
def test_star_presents_symmetric_group(n, expected):
    assert todd_coxeter(_star(n)).num_cosets == expected


def test_star_without_disjoint_commutation_is_larger():
    assert todd_coxeter(_star(3, disjoint=False)).num_cosets == 72



def test_cyclic_group_regular_realization():
    realization = regular_realization(_cyclic(3))
    assert realization.order == 3
    a = realization.assignment[_sym(0)]
    assert a == from_cycles(3, [(0, 1, 2)])
    assert order(realization.group) == 3


def test_trivial_subgroup_index_with_subgroup_words():
    table = todd_coxeter(_z2sum(2), subgroup_words=[_letter_word(0)])
    assert table.num_cosets == 2


def test_table_columns_are_bijections_and_relators_close():
    p = _star(3)
    table = todd_coxeter(p)
    for coset in range(table.num_cosets):
        for relator in p.relators:
            assert table.trace(coset, relator) == coset


def test_star_transpositions_satisfy_relators():
    p = _star(3)
    assignment = {_sym(i): from_cycles(4, [(i, 3)]) for i in range(3)}
    assert verify_relators(p, assignment).passed


def test_verify_relators_reports_failures():
    p = _z2sum(2)
    assignment = {_sym(0): from_cycles(3, [(0, 1)]), _sym(1): from_cycles(3, [(1, 2)])}
    check = verify_relators(p, assignment)
    assert not check.passed
    assert check.failures


def test_regular_realization_satisfies_its_relators():
    p = _star(3)
    realization = regular_realization(p)
    assert verify_relators(p, realization.assignment).passed
    assert order(realization.group) == realization.order


def test_empty_relators_are_dropped():
    p = Presentation((_sym(0),), (Word((Letter(_sym(0), 1), Letter(_sym(0), -1))), power(_letter_word(0), 2)))
    assert len(p.relators) == 1


def test_unknown_symbol_in_relator():
    with pytest.raises(UnknownSymbol):
        Presentation((_sym(0),), (_letter_word(1),))


def test_coset_cap():
    with pytest.raises(CapExceeded):
        todd_coxeter(_star(4), max_cosets=50)


def test_free_group_without_relators_hits_cap():
    with pytest.raises(CapExceeded):
        todd_coxeter(Presentation((_sym(0),), ()), max_cosets=100)


def test_evaluate_empty_word_is_identity():
    assert evaluate(Word(), {}, 4) == identity(4)
