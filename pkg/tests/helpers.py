"""Shared test utilities: independent oracles kept deliberately separate from
the engine's own linear algebra."""

import random


def pmul(a, b):
    """Carry-less product of two F2[h] polynomials stored as int bitmasks."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def field_rank(cells, nrows, ncols):
    """Rank over the fraction field F2(h) by fraction-free elimination.

    `cells` maps (r, c) to an h-exponent (monomial entries).  This is the
    oracle path: plain polynomial Gaussian elimination, no monomial tricks.
    """
    rows = [[0] * ncols for _ in range(nrows)]
    for (r, c), e in cells.items():
        rows[r][c] ^= 1 << e
    rank = 0
    for c in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if rows[r][c]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pv = rows[rank][c]
        for r in range(nrows):
            if r != rank and rows[r][c]:
                rv = rows[r][c]
                rows[r] = [pmul(x, pv) ^ pmul(y, rv) for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def random_homogeneous(rng: random.Random, max_dim=30, max_exp=4, density=0.35):
    """Random quantum-graded monomial matrix data: (row_q, col_q, cells)."""
    nrows = rng.randint(1, max_dim)
    ncols = rng.randint(1, max_dim)
    col_q = [2 * rng.randint(0, max_exp) for _ in range(ncols)]
    row_q = [2 * rng.randint(0, max_exp) for _ in range(nrows)]
    cells = {}
    for r in range(nrows):
        for c in range(ncols):
            diff = row_q[r] - col_q[c]
            if diff < 0 or diff % 2:
                continue
            e = diff // 2
            if e <= max_exp and rng.random() < density:
                cells[(r, c)] = e
    return row_q, col_q, cells
