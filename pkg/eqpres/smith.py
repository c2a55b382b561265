"""Exact integer Smith and Hermite normal forms.

Matrices are lists of integer rows. Internally rows are kept sparse
(``{column: value}``) because the relation matrices of the homology
pipeline are large and mostly 0/±1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

SparseRow = dict[int, int]
IntMatrix = list[list[int]]


@dataclass
class SmithForm:
    """``U·A·V = D`` where D carries ``diag`` on its leading diagonal."""

    rows: int
    cols: int
    diag: list[int]
    U: Optional[IntMatrix] = None
    V: Optional[IntMatrix] = None
    V_inv: Optional[IntMatrix] = None

    @property
    def rank(self) -> int:
        return len(self.diag)

    def invariant_factors(self) -> list[int]:
        """Nontrivial invariant factors of the cokernel ℤ^cols / rowspace."""
        return [d for d in self.diag if d != 1]

    def free_rank(self) -> int:
        return self.cols - self.rank


def to_sparse(A: Sequence[Sequence[int]]) -> list[SparseRow]:
    return [{j: int(v) for j, v in enumerate(row) if v} for row in A]


def _axpy(target: SparseRow, source: SparseRow, q: int) -> None:
    """target -= q * source"""
    for j, v in source.items():
        value = target.get(j, 0) - q * v
        if value:
            target[j] = value
        else:
            target.pop(j, None)


class _Reducer:
    def __init__(self, rows: list[SparseRow], ncols: int, track_left: bool, track_right: bool):
        self.rows = [dict(r) for r in rows]
        self.ncols = ncols
        self.left = [{i: 1} for i in range(len(rows))] if track_left else None
        # V by columns, V⁻¹ by rows; both start as the identity
        self.right = [{j: 1} for j in range(ncols)] if track_right else None
        self.right_inv = [{j: 1} for j in range(ncols)] if track_right else None
        self.active = [i for i, r in enumerate(self.rows) if r]

    def row_op(self, target: int, source: int, q: int) -> None:
        _axpy(self.rows[target], self.rows[source], q)
        if self.left is not None:
            _axpy(self.left[target], self.left[source], q)

    def col_op(self, target: int, source: int, q: int) -> None:
        """col_target -= q * col_source, for a source column that is zero outside ``pivot_row``."""
        if self.right is not None:
            _axpy(self.right[target], self.right[source], q)
            # V⁻¹: row_source += q * row_target
            _axpy(self.right_inv[source], self.right_inv[target], -q)

    def negate_column(self, j: int) -> None:
        if self.right is not None:
            self.right[j] = {i: -v for i, v in self.right[j].items()}
            self.right_inv[j] = {i: -v for i, v in self.right_inv[j].items()}

    def find_pivot(self) -> Optional[tuple[int, int]]:
        best = None
        best_abs = 0
        for i in self.active:
            row = self.rows[i]
            for j in sorted(row):
                a = abs(row[j])
                if best is None or a < best_abs:
                    best, best_abs = (i, j), a
                    if a == 1:
                        return best
        return best

    def clear_column(self, r: int, c: int) -> Optional[int]:
        """Row ops killing column c outside row r; returns a row with a nonzero remainder."""
        v = self.rows[r][c]
        leftover = None
        for i in self.active:
            if i == r or c not in self.rows[i]:
                continue
            q = self.rows[i][c] // v
            if q:
                self.row_op(i, r, q)
            if c in self.rows[i] and (leftover is None or abs(self.rows[i][c]) < abs(self.rows[leftover][c])):
                leftover = i
        return leftover

    def clear_row(self, r: int, c: int) -> Optional[int]:
        """Column ops killing row r outside column c; returns a column with a nonzero remainder."""
        row = self.rows[r]
        v = row[c]
        leftover = None
        for j in sorted(row):
            if j == c:
                continue
            q = row[j] // v
            if q:
                self.col_op(j, c, q)
                value = row[j] - q * v
                if value:
                    row[j] = value
                else:
                    del row[j]
            if j in row and (leftover is None or abs(row[j]) < abs(row[leftover])):
                leftover = j
        return leftover

    def run(self) -> list[tuple[int, int, int]]:
        pivots = []
        while True:
            self.active = [i for i in self.active if self.rows[i]]
            found = self.find_pivot()
            if found is None:
                return pivots
            r, c = found
            while True:
                other = self.clear_column(r, c)
                if other is not None:
                    r = other
                    continue
                other = self.clear_row(r, c)
                if other is not None:
                    c = other
                    continue
                break
            pivots.append((r, c, self.rows[r][c]))
            self.active.remove(r)
            self.rows[r] = {}


def _fix_divisibility(red: _Reducer, pivots: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    pivots = sorted(pivots, key=lambda p: (abs(p[2]), p[1]))
    values = [v for _, _, v in pivots]
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            a, b = values[i], values[j]
            if b % a == 0:
                continue
            g = gcd(a, b)
            x, y = _bezout(a, b)
            ri, ci, _ = pivots[i]
            rj, cj, _ = pivots[j]
            if red.left is not None:
                li, lj = red.left[ri], red.left[rj]
                new_i: SparseRow = {}
                _axpy(new_i, li, -x)
                _axpy(new_i, lj, -y)
                new_j: SparseRow = {}
                _axpy(new_j, li, b // g)
                _axpy(new_j, lj, -(a // g))
                red.left[ri], red.left[rj] = new_i, new_j
            if red.right is not None:
                vi, vj = red.right[ci], red.right[cj]
                col_i: SparseRow = {}
                _axpy(col_i, vi, -1)
                _axpy(col_i, vj, -1)
                col_j: SparseRow = {}
                _axpy(col_j, vi, y * b // g)
                _axpy(col_j, vj, -(x * a // g))
                red.right[ci], red.right[cj] = col_i, col_j
                wi, wj = red.right_inv[ci], red.right_inv[cj]
                row_i: SparseRow = {}
                _axpy(row_i, wi, -(x * a // g))
                _axpy(row_i, wj, -(y * b // g))
                row_j: SparseRow = {}
                _axpy(row_j, wi, 1)
                _axpy(row_j, wj, -1)
                red.right_inv[ci], red.right_inv[cj] = row_i, row_j
            values[i], values[j] = g, a * b // g
    signed = []
    for (r, c, _), v in zip(pivots, values):
        if v < 0:
            red.negate_column(c)
            v = -v
        signed.append((r, c, v))
    return signed


def _bezout(a: int, b: int) -> tuple[int, int]:
    """x, y with x·a + y·b = gcd(a, b) > 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_x, old_y = -old_x, -old_y
    return old_x, old_y


def _dense_columns(columns: list[SparseRow], n: int, order: list[int]) -> IntMatrix:
    out = [[0] * n for _ in range(n)]
    for k, j in enumerate(order):
        for i, v in columns[j].items():
            out[i][k] = v
    return out


def _dense_rows(rows: list[SparseRow], width: int, order: list[int]) -> IntMatrix:
    out = []
    for i in order:
        line = [0] * width
        for j, v in rows[i].items():
            line[j] = v
        out.append(line)
    return out


def smith_normal_form_sparse(
    rows: list[SparseRow],
    ncols: int,
    track_left: bool = False,
    track_right: bool = True,
) -> SmithForm:
    red = _Reducer(rows, ncols, track_left, track_right)
    pivots = _fix_divisibility(red, red.run())
    pivot_rows = [r for r, _, _ in pivots]
    pivot_cols = [c for _, c, _ in pivots]
    row_order = pivot_rows + [i for i in range(len(rows)) if i not in set(pivot_rows)]
    col_order = pivot_cols + [j for j in range(ncols) if j not in set(pivot_cols)]
    form = SmithForm(len(rows), ncols, [v for _, _, v in pivots])
    if red.left is not None:
        form.U = _dense_rows(red.left, len(rows), row_order)
    if red.right is not None:
        form.V = _dense_columns(red.right, ncols, col_order)
        form.V_inv = _dense_rows(red.right_inv, ncols, col_order)
    logging.debug("Smith form of %dx%d matrix: rank %d", len(rows), ncols, form.rank)
    return form


def smith_normal_form(A: Sequence[Sequence[int]], ncols: Optional[int] = None, transforms: bool = True) -> SmithForm:
    """Pivots on the smallest nonzero |entry|, row-major among ties."""
    width = ncols if ncols is not None else (len(A[0]) if len(A) else 0)
    return smith_normal_form_sparse(to_sparse(A), width, track_left=transforms, track_right=transforms)


def diagonal_matrix(form: SmithForm) -> IntMatrix:
    out = [[0] * form.cols for _ in range(form.rows)]
    for i, d in enumerate(form.diag):
        out[i][i] = d
    return out


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    inner = len(B)
    width = len(B[0]) if inner else 0
    return [[sum(row[k] * B[k][j] for k in range(inner)) for j in range(width)] for row in A]


# --- lattices ---------------------------------------------------------------


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> IntMatrix:
    """Row-style HNF basis of the lattice spanned by ``rows``; canonical per lattice."""
    work = [list(r) for r in rows if any(r)]
    basis: IntMatrix = []
    for c in range(ncols):
        with_c = [r for r in work if r[c]]
        work = [r for r in work if not r[c]]
        while len(with_c) > 1:
            with_c.sort(key=lambda r: abs(r[c]))
            pivot = with_c[0]
            survivors = [pivot]
            for r in with_c[1:]:
                q = r[c] // pivot[c]
                reduced = [a - q * b for a, b in zip(r, pivot)]
                if reduced[c]:
                    survivors.append(reduced)
                elif any(reduced):
                    work.append(reduced)
            with_c = survivors
        if with_c:
            pivot = with_c[0]
            basis.append(pivot if pivot[c] > 0 else [-a for a in pivot])
    for i, row in enumerate(basis):
        c = next(j for j, v in enumerate(row) if v)
        for k in range(i):
            q = basis[k][c] // row[c]
            if q:
                basis[k] = [a - q * b for a, b in zip(basis[k], row)]
    return basis


def lattice_contains(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership of v in the lattice of an HNF basis."""
    rest = list(v)
    for row in basis:
        c = next(j for j, x in enumerate(row) if x)
        if rest[c] % row[c]:
            return False
        q = rest[c] // row[c]
        if q:
            rest = [a - q * b for a, b in zip(rest, row)]
    return not any(rest)


def lattice_index(rows: Sequence[Sequence[int]], ncols: int) -> int:
    """[ℤ^ncols : span(rows)], or 0 when the span has lower rank."""
    basis = hermite_normal_form(rows, ncols)
    if len(basis) < ncols:
        return 0
    index = 1
    for i, row in enumerate(basis):
        index *= abs(row[i])
    return index


def abelian_invariants(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[int], int]:
    """Invariant factors > 1 and free rank of ℤ^ncols / span(rows)."""
    form = smith_normal_form_sparse(to_sparse(rows), ncols, track_left=False, track_right=False)
    return form.invariant_factors(), form.free_rank()
