"""Independent H₂ from the normalized bar resolution, for small groups only."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
from sympy import primefactors

from .errors import CapExceeded
from .models import HomologyLimits
from .permgroup import PermGroup, compose, enumerate_elements
from .smith import smith_normal_form_sparse

LARGE_PRIME = 2**31 - 1


def _multiplication_table(group: PermGroup) -> list[list[int]]:
    elements = list(enumerate_elements(group))
    index = {g: i for i, g in enumerate(elements)}
    return [[index[compose(g, h)] for h in elements] for g in elements]


def bar_boundary3(group: PermGroup) -> tuple[list[dict[int, int]], int]:
    """Rows ∂₃[g|h|k] over the basis [g|h] of non-identity pairs.

    ∂₃[g|h|k] = [h|k] - [gh|k] + [g|hk] - [g|h]; cells with an identity entry vanish.
    """
    mul = _multiplication_table(group)
    n = len(mul)
    width = n - 1

    def cell(a: int, b: int) -> Optional[int]:
        if a == 0 or b == 0:
            return None
        return (a - 1) * width + (b - 1)

    rows = []
    for g in range(1, n):
        for h in range(1, n):
            gh = mul[g][h]
            for k in range(1, n):
                hk = mul[h][k]
                row: dict[int, int] = {}
                for a, b, sign in ((h, k, 1), (gh, k, -1), (g, hk, 1), (g, h, -1)):
                    c = cell(a, b)
                    if c is not None:
                        row[c] = row.get(c, 0) + sign
                row = {c: v for c, v in row.items() if v}
                if row:
                    rows.append(row)
    return rows, width * width


def rank_mod_p(rows: list[dict[int, int]], ncols: int, p: int) -> int:
    A = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, v in row.items():
            A[i, j] = v % p
    rank = 0
    for c in range(ncols):
        if rank == len(A):
            break
        nonzero = np.nonzero(A[rank:, c])[0]
        if nonzero.size == 0:
            continue
        pivot = rank + int(nonzero[0])
        if pivot != rank:
            A[[rank, pivot]] = A[[pivot, rank]]
        inv = pow(int(A[rank, c]), -1, p)
        A[rank] = (A[rank] * inv) % p
        factors = A[:, c].copy()
        factors[rank] = 0
        mask = factors != 0
        if mask.any():
            A[mask] = (A[mask] - np.outer(factors[mask], A[rank]) % p) % p
        rank += 1
        if rank % 32 == 0:
            rest = A[rank:]
            A = np.vstack([A[:rank], rest[rest.any(axis=1)]])
    return rank


def _chain_from_counts(counts: dict[int, int]) -> list[int]:
    length = max(counts.values(), default=0)
    factors = []
    for j in range(length):
        d = 1
        for p, t in counts.items():
            if t >= length - j:
                d *= p
        factors.append(d)
    return factors


def bar_h2_oracle(group: PermGroup, limits: Optional[HomologyLimits] = None) -> list[int]:
    """Invariant factors of H₂(G; ℤ).

    Integer Smith form of ∂₃ up to ``bar_integer_max_order``; above that, ranks
    mod each prime dividing |G|, which assumes every p-part of H₂ is elementary.
    """
    limits = limits or HomologyLimits()
    n = len(enumerate_elements(group))
    if n > limits.bar_max_order:
        raise CapExceeded("group order for the bar oracle", limits.bar_max_order)
    rows, c2 = bar_boundary3(group)
    if n <= limits.bar_integer_max_order:
        form = smith_normal_form_sparse(rows, c2, track_right=False)
        factors = form.invariant_factors()
        logging.info("Bar oracle (integer) for |G|=%d: H₂ = %s", n, factors)
        return factors
    c1 = n - 1
    counts = {}
    for p in primefactors(n):
        counts[p] = c2 - rank_mod_p(rows, c2, p) - c1
    free_check = c2 - rank_mod_p(rows, c2, LARGE_PRIME) - c1
    if free_check != 0:
        logging.warning("Bar oracle: rank mod %d leaves %d unexplained dimensions", LARGE_PRIME, free_check)
    logging.warning("Bar oracle for |G|=%d uses ranks mod p; H₂ is assumed to have squarefree exponent", n)
    factors = _chain_from_counts({p: t for p, t in counts.items() if t > 0})
    logging.info("Bar oracle (mod p) for |G|=%d: H₂ = %s", n, factors)
    return factors
