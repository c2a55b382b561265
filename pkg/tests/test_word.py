import random

import pytest

from eqpres.errors import MissingImage
from eqpres.word import (
    EMPTY_WORD,
    Letter,
    SymbolRef,
    Word,
    commutator,
    concat,
    invert,
    is_reduced,
    power,
    raw_invert,
    reduce,
    substitute,
)

A = SymbolRef(0, 0)
B = SymbolRef(0, 1)
C = SymbolRef(1, 0)


def _w(*spec):
    return Word(tuple(Letter(s, e) for s, e in spec))


def _random_raw(rng, length, symbols=(A, B, C)):
    return tuple(Letter(rng.choice(symbols), rng.choice((1, -1))) for _ in range(length))


def test_reduce_cancels_adjacent_inverse_pairs():
    raw = (Letter(A, 1), Letter(B, 1), Letter(B, -1), Letter(A, -1), Letter(C, 1))
    assert reduce(raw).letters == (Letter(C, 1),)


def test_word_is_always_reduced():
    w = Word((Letter(A, 1), Letter(A, -1)))
    assert w == EMPTY_WORD
    assert len(w) == 0


def test_invert_and_concat_give_identity():
    w = _w((A, 1), (B, -1), (C, 1))
    assert concat(w, invert(w)) == EMPTY_WORD
    assert concat(invert(w), w) == EMPTY_WORD


def test_power_of_negative_exponent_is_inverse_power():
    w = _w((A, 1), (B, 1))
    assert power(w, -2) == power(invert(w), 2)
    assert len(power(w, 3)) == 6
    assert power(w, 0) == EMPTY_WORD


def test_commutator_of_letters():
    c = commutator(_w((A, 1)), _w((B, 1)))
    assert c == _w((A, 1), (B, 1), (A, -1), (B, -1))
    assert commutator(_w((A, 1)), _w((A, 1))) == EMPTY_WORD


def test_substitute_applies_homomorphism():
    images = {A: _w((B, 1), (B, 1)), B: _w((C, -1))}
    w = _w((A, 1), (B, -1))
    assert substitute(w, images) == _w((B, 1), (B, 1), (C, 1))


def test_substitute_missing_image():
    with pytest.raises(MissingImage):
        substitute(_w((C, 1)), {A: EMPTY_WORD})


def test_exponent_must_be_unit():
    with pytest.raises(ValueError):
        Word((Letter(A, 2),))


def test_raw_invert_keeps_cancelling_pairs():
    raw = (Letter(A, 1), Letter(A, -1), Letter(B, 1))
    assert raw_invert(raw) == (Letter(B, -1), Letter(A, 1), Letter(A, -1))
    assert not is_reduced(raw_invert(raw))


def test_reduction_laws_on_random_words():
    rng = random.Random(20240101)
    for _ in range(1000):
        u = _random_raw(rng, rng.randint(0, 64))
        v = _random_raw(rng, rng.randint(0, 64))
        wu, wv = reduce(u), reduce(v)
        assert is_reduced(wu.letters)
        assert reduce(wu.letters) == wu
        assert reduce(u + v) == concat(wu, wv)
        assert invert(invert(wu)) == wu
        assert invert(concat(wu, wv)) == concat(invert(wv), invert(wu))
        assert reduce(raw_invert(u)) == invert(wu)


def test_substitute_commutes_with_inversion_on_random_words():
    rng = random.Random(7)
    for _ in range(200):
        images = {s: reduce(_random_raw(rng, rng.randint(0, 6))) for s in (A, B, C)}
        w = reduce(_random_raw(rng, rng.randint(0, 64)))
        assert substitute(invert(w), images) == invert(substitute(w, images))
