import random
from itertools import combinations
from math import gcd

import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_smith

from eqpres.smith import (
    abelian_invariants,
    diagonal_matrix,
    hermite_normal_form,
    lattice_contains,
    lattice_index,
    matmul,
    smith_normal_form,
)


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _minor_gcd_factors(A):
    """Invariant factors from gcds of k×k minors."""
    M = Matrix(A)
    rows, cols = M.shape
    previous = 1
    factors = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for r in combinations(range(rows), k):
            for c in combinations(range(cols), k):
                g = gcd(g, int(M.extract(list(r), list(c)).det()))
        if g == 0:
            break
        factors.append(g // previous)
        previous = g
    return factors


def _random_matrix(rng, rows, cols, bound=6):
    return [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]


def test_known_example():
    A = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    form = smith_normal_form(A)
    assert form.diag == [2, 6, 12]


def test_transforms_diagonalize():
    A = [[2, 4, 4], [-6, 6, 12], [10, -4, -16], [1, 0, 3]]
    form = smith_normal_form(A)
    assert matmul(matmul(form.U, A), form.V) == diagonal_matrix(form)
    assert matmul(form.V, form.V_inv) == _identity(3)


def test_zero_and_empty_matrices():
    assert smith_normal_form([[0, 0], [0, 0]]).diag == []
    assert smith_normal_form([], ncols=3).free_rank() == 3


def test_random_matrices_against_minor_gcds():
    rng = random.Random(7)
    for _ in range(60):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        A = _random_matrix(rng, rows, cols)
        form = smith_normal_form(A)
        assert form.diag == _minor_gcd_factors(A)
        for a, b in zip(form.diag, form.diag[1:]):
            assert b % a == 0
        assert matmul(matmul(form.U, A), form.V) == diagonal_matrix(form)
        assert matmul(form.V, form.V_inv) == _identity(cols)


def test_six_by_six_against_sympy():
    rng = random.Random(11)
    for _ in range(10):
        A = _random_matrix(rng, 6, 6, bound=4)
        expected = sympy_smith(Matrix(A), domain=ZZ)
        diag = [abs(int(expected[i, i])) for i in range(6) if expected[i, i] != 0]
        assert smith_normal_form(A, transforms=False).diag == diag


@pytest.mark.parametrize(
    "rows,ncols,factors,free",
    [
        ([[2, 0], [0, 3]], 2, [6], 0),
        ([[2, 0], [0, 2]], 2, [2, 2], 0),
        ([[4, 6]], 2, [2], 1),
        ([], 2, [], 2),
    ],
)
def test_abelian_invariants(rows, ncols, factors, free):
    assert abelian_invariants(rows, ncols) == (factors, free)


def test_hermite_form_is_canonical():
    a = hermite_normal_form([[2, 4], [6, 8]], 2)
    b = hermite_normal_form([[4, 0], [2, 4], [0, 12]], 2)
    assert a == b
    assert all(row[i] > 0 for i, row in enumerate(a))


def test_lattice_membership_and_index():
    basis = hermite_normal_form([[2, 0], [0, 3]], 2)
    assert lattice_contains(basis, [4, 9])
    assert not lattice_contains(basis, [1, 3])
    assert lattice_index([[2, 0], [0, 3]], 2) == 6
    assert lattice_index([[1, 1]], 2) == 0
    assert lattice_index([[1, 1], [0, 1]], 2) == 1
