import logging

import pytest

from eqpres.bar_oracle import _chain_from_counts, bar_boundary3, bar_h2_oracle, rank_mod_p
from eqpres.catalog import builtin
from eqpres.equivariant import realize
from eqpres.errors import CapExceeded
from eqpres.files import to_equivariant
from eqpres.models import HomologyLimits


def _group(name, n):
    return realize(to_equivariant(builtin(name, n))).group


def test_boundary_rows_have_expected_width():
    rows, c2 = bar_boundary3(_group("z2sum", 2))
    assert c2 == 9
    assert all(0 <= c < c2 for row in rows for c in row)


def test_rank_mod_p_small_matrices():
    rows = [{0: 1, 1: 1}, {0: 2, 1: 2}]
    assert rank_mod_p(rows, 2, 2) == 1
    assert rank_mod_p(rows, 2, 3) == 1
    assert rank_mod_p([{0: 2}], 2, 2) == 0
    assert rank_mod_p([{0: 1}, {1: 1}, {0: 1, 1: 1}], 2, 5) == 2


def test_chain_from_prime_counts():
    assert _chain_from_counts({2: 3, 3: 1}) == [2, 2, 6]
    assert _chain_from_counts({}) == []


@pytest.mark.parametrize(
    "name,n,factors",
    [
        ("z2sum", 2, [2]),
        ("z2sum", 3, [2, 2, 2]),
        ("cyclic", 4, []),
        ("cyclic", 6, []),
    ],
)
def test_integer_route(name, n, factors):
    assert bar_h2_oracle(_group(name, n)) == factors


def test_mod_p_route_matches_integer_route():
    limits = HomologyLimits(bar_integer_max_order=1)
    assert bar_h2_oracle(_group("z2sum", 3), limits) == [2, 2, 2]


def test_sym4_through_mod_p_route(caplog):
    with caplog.at_level(logging.WARNING):
        assert bar_h2_oracle(_group("star", 3)) == [2]
    assert "squarefree" in caplog.text


def test_oracle_cap():
    with pytest.raises(CapExceeded):
        bar_h2_oracle(_group("star", 4))
