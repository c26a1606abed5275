"""Sparse matrices over F2[h] whose entries are single monomials h^k.

Everything the cube construction produces is graded-homogeneous, which forces
every matrix entry to be a monomial: the exponent of a cell is determined by
the quantum gradings of its row and column.  That restriction turns Smith
normal form over the PID F2[h] into near-F2 linear algebra — pivot on a
minimal-exponent entry and all fill-in stays monomial, because two
contributions to one cell always carry the same exponent and either cancel
(characteristic 2) or coincide.

A matrix entry at (r, c) with exponent e means: column generator c maps to
h^e times row generator r.  Rows and columns carry quantum gradings; a matrix
declared with quantum shift q satisfies  gr_q(row) - gr_q(col) - q = 2e  for
every stored entry.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, NonHomogeneousSum


class MonomialMatrix:
    """Immutable sparse monomial matrix with grading-checked cells.

    `row_q` / `col_q` are tuples of quantum gradings (one per index).
    `qshift` is the declared quantum degree of the map, or None for a matrix
    with no homogeneity contract (general change-of-basis bookkeeping).
    """

    __slots__ = ("row_q", "col_q", "qshift", "_cols", "_rows")

    def __init__(self, row_q, col_q, entries=None, qshift=None, _trust=False):
        self.row_q = tuple(row_q)
        self.col_q = tuple(col_q)
        self.qshift = qshift
        self._cols = {}
        self._rows = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (r, c), e in items:
                self._set(r, c, e)
        if qshift is not None and not _trust:
            self._check_homogeneous()

    def _set(self, r, c, e):
        if not (0 <= r < len(self.row_q)) or not (0 <= c < len(self.col_q)):
            raise DimensionMismatch(f"entry ({r},{c}) outside matrix shape {self.shape}")
        if e < 0:
            raise ValueError("negative h-exponent")
        col = self._cols.setdefault(c, {})
        if r in col:
            raise NonHomogeneousSum(f"duplicate cell ({r},{c})")
        col[r] = e
        self._rows.setdefault(r, {})[c] = e

    def _check_homogeneous(self):
        q = self.qshift
        for c, col in self._cols.items():
            for r, e in col.items():
                want = self.row_q[r] - self.col_q[c] - q
                if want != 2 * e:
                    raise NonHomogeneousSum(
                        f"cell ({r},{c}) has h^{e} but gradings demand "
                        f"gr_q difference {want} (qshift {q})"
                    )

    # -- inspection ---------------------------------------------------------

    @property
    def shape(self):
        return (len(self.row_q), len(self.col_q))

    @property
    def nnz(self):
        return sum(len(col) for col in self._cols.values())

    def entry(self, r, c):
        col = self._cols.get(c)
        return None if col is None else col.get(r)

    def items(self):
        for c in sorted(self._cols):
            for r in sorted(self._cols[c]):
                yield (r, c), self._cols[c][r]

    def column(self, c):
        return dict(self._cols.get(c, ()))

    def row(self, r):
        return dict(self._rows.get(r, ()))

    def is_zero(self):
        return not self._cols

    def __eq__(self, other):
        if not isinstance(other, MonomialMatrix):
            return NotImplemented
        return (
            self.row_q == other.row_q
            and self.col_q == other.col_q
            and self._cols == other._cols
        )

    def __hash__(self):
        raise TypeError("MonomialMatrix is not hashable")

    def __repr__(self):
        cells = ", ".join(f"({r},{c}):h^{e}" for (r, c), e in self.items())
        return f"MonomialMatrix({len(self.row_q)}x{len(self.col_q)}, {{{cells}}})"

    # -- arithmetic ---------------------------------------------------------

    def add(self, other):
        """Entrywise sum over F2: equal cells with equal exponent cancel."""
        if self.row_q != other.row_q or self.col_q != other.col_q:
            raise DimensionMismatch("matAdd requires identical row/col index sets")
        cells = {}
        for m in (self, other):
            for c, col in m._cols.items():
                for r, e in col.items():
                    key = (r, c)
                    if key in cells:
                        if cells[key] != e:
                            raise NonHomogeneousSum(
                                f"cell {key}: h^{cells[key]} + h^{e} is not a monomial"
                            )
                        del cells[key]
                    else:
                        cells[key] = e
        q = self.qshift if self.qshift == other.qshift else None
        return MonomialMatrix(self.row_q, self.col_q, cells, qshift=q, _trust=True)

    __add__ = add

    def mul(self, other):
        """Matrix product; paths with equal exponent into one cell cancel mod 2."""
        if self.col_q != other.row_q:
            raise DimensionMismatch(
                f"matMul shape mismatch: {self.shape} @ {other.shape}"
            )
        cells = {}
        for c, col in other._cols.items():
            acc = {}
            for mid, e1 in col.items():
                inner = self._cols.get(mid)
                if not inner:
                    continue
                for r, e0 in inner.items():
                    e = e0 + e1
                    if r in acc:
                        if acc[r] != e:
                            raise NonHomogeneousSum(
                                f"product cell ({r},{c}): h^{acc[r]} + h^{e}"
                            )
                        del acc[r]
                    else:
                        acc[r] = e
            for r, e in acc.items():
                cells[(r, c)] = e
        q = None
        if self.qshift is not None and other.qshift is not None:
            q = self.qshift + other.qshift
        return MonomialMatrix(self.row_q, other.col_q, cells, qshift=q, _trust=True)

    __matmul__ = mul

    def scale(self, k):
        """Multiply every entry by h^k."""
        if k == 0:
            return self
        cells = {key: e + k for key, e in self.items()}
        q = None if self.qshift is None else self.qshift - 2 * k
        return MonomialMatrix(self.row_q, self.col_q, cells, qshift=q, _trust=True)

    def transpose(self):
        cells = {(c, r): e for (r, c), e in self.items()}
        return MonomialMatrix(self.col_q, self.row_q, cells, qshift=None, _trust=True)

    def apply(self, vec):
        """Apply to a column vector {index: exponent}; F2 cancellation."""
        out = {}
        for c, e1 in vec.items():
            col = self._cols.get(c)
            if not col:
                continue
            for r, e0 in col.items():
                e = e0 + e1
                if r in out:
                    if out[r] != e:
                        raise NonHomogeneousSum(f"vector cell {r}: h^{out[r]} + h^{e}")
                    del out[r]
                else:
                    out[r] = e
        return out

    @staticmethod
    def identity(gradings, qshift=0):
        g = tuple(gradings)
        cells = {(i, i): 0 for i in range(len(g))}
        return MonomialMatrix(g, g, cells, qshift=qshift, _trust=True)

    @staticmethod
    def zero(row_q, col_q, qshift=None):
        return MonomialMatrix(row_q, col_q, {}, qshift=qshift, _trust=True)


@dataclass(frozen=True)
class SnfResult:
    """D = U @ M @ V with D diagonal h^{k_1}, ..., h^{k_rank}, k_i ascending.

    U, V are invertible over F2[h]; their inverses are recorded so callers can
    move vectors between the original and the diagonal basis without solving.
    """

    diagonal: tuple
    rank: int
    u: MonomialMatrix
    u_inv: MonomialMatrix
    v: MonomialMatrix
    v_inv: MonomialMatrix

    def diagonal_matrix(self):
        cells = {(i, i): k for i, k in enumerate(self.diagonal)}
        return MonomialMatrix(self.u.row_q, self.v.col_q, cells, _trust=True)

    def verify(self, m):
        """Recompose and confirm every recorded identity bit-exactly."""
        if (self.u @ m @ self.v) != self.diagonal_matrix():
            return False
        if (self.u @ self.u_inv) != MonomialMatrix.identity(self.u.row_q):
            return False
        if (self.u_inv @ self.u) != MonomialMatrix.identity(self.u_inv.row_q):
            return False
        if (self.v @ self.v_inv) != MonomialMatrix.identity(self.v.row_q):
            return False
        if (self.v_inv @ self.v) != MonomialMatrix.identity(self.v_inv.row_q):
            return False
        return True


class _Work:
    """Mutable row/column-indexed copy used only inside the SNF routine."""

    __slots__ = ("cols", "rows")

    def __init__(self, mat):
        self.cols = {c: dict(col) for c, col in mat._cols.items()}
        self.rows = {r: dict(row) for r, row in mat._rows.items()}

    def toggle(self, r, c, e):
        col = self.cols.setdefault(c, {})
        if r in col:
            if col[r] != e:
                raise NonHomogeneousSum(f"SNF fill-in at ({r},{c}): h^{col[r]} + h^{e}")
            del col[r]
            row = self.rows[r]
            del row[c]
            if not col:
                del self.cols[c]
            if not row:
                del self.rows[r]
        else:
            col[r] = e
            self.rows.setdefault(r, {})[c] = e


def smith_normal_form(m: MonomialMatrix) -> SnfResult:
    """Graded Smith normal form of a monomial matrix.

    Pivot rule: minimal exponent, ties broken by lowest column then lowest
    row.  Minimal-exponent pivoting keeps every fill-in exponent at or above
    the pivot's, so the diagonal comes out ascending and the divisibility
    chain h^{k_1} | h^{k_2} | ... holds with no polynomial division.
    """
    nrows, ncols = m.shape
    work = _Work(m)
    # U (row ops, left) and V (col ops, right) with inverses, as plain dicts.
    u_rows = {r: {r: 0} for r in range(nrows)}      # U[r] = row r of U
    uinv_cols = {r: {r: 0} for r in range(nrows)}   # U^-1 column r
    v_cols = {c: {c: 0} for c in range(ncols)}      # V column c
    vinv_rows = {c: {c: 0} for c in range(ncols)}   # V^-1 row c

    def _toggle(d, i, j, e):
        slot = d.setdefault(i, {})
        if j in slot:
            if slot[j] != e:
                raise NonHomogeneousSum("basis-change fill-in is not monomial")
            del slot[j]
        else:
            slot[j] = e

    pivots = []
    while work.cols:
        # minimal exponent, tie-break (column, row)
        best = None
        for c, col in work.cols.items():
            for r, e in col.items():
                key = (e, c, r)
                if best is None or key < best:
                    best = key
        e0, pc, pr = best
        # clear column pc: rows r != pr holding h^m gain h^{m-e0} * row pr
        for r, me in [(r, me) for r, me in work.cols[pc].items() if r != pr]:
            k = me - e0
            for c2, e2 in list(work.rows[pr].items()):
                work.toggle(r, c2, e2 + k)
            # row op on U: row_r += h^k row_pr ; U^-1: col_pr += h^k col_r
            for j, e2 in list(u_rows[pr].items()):
                _toggle(u_rows, r, j, e2 + k)
            for i, e2 in list(uinv_cols[r].items()):
                _toggle(uinv_cols, pr, i, e2 + k)
        # clear row pr: columns c != pc holding h^m gain h^{m-e0} * col pc
        for c, me in [(c, me) for c, me in work.rows[pr].items() if c != pc]:
            k = me - e0
            for r2, e2 in list(work.cols[pc].items()):
                work.toggle(r2, c, e2 + k)
            for i, e2 in list(v_cols[pc].items()):
                _toggle(v_cols, c, i, e2 + k)
            for i, e2 in list(vinv_rows[c].items()):
                _toggle(vinv_rows, pc, i, e2 + k)
        # retire the pivot cell
        work.toggle(pr, pc, e0)
        pivots.append((pr, pc, e0))

    pivots.sort(key=lambda t: t[2])
    rank = len(pivots)
    # permutations moving pivot rows/cols to the leading diagonal slots
    row_order = [pr for pr, _, _ in pivots]
    row_order += [r for r in range(nrows) if r not in set(row_order)]
    col_order = [pc for _, pc, _ in pivots]
    col_order += [c for c in range(ncols) if c not in set(col_order)]
    row_pos = {r: i for i, r in enumerate(row_order)}
    col_pos = {c: i for i, c in enumerate(col_order)}

    new_row_q = tuple(m.row_q[r] for r in row_order)
    new_col_q = tuple(m.col_q[c] for c in col_order)

    u = MonomialMatrix(
        new_row_q, m.row_q,
        {(row_pos[r], j): e for r, row in u_rows.items() for j, e in row.items()},
        _trust=True,
    )
    u_inv = MonomialMatrix(
        m.row_q, new_row_q,
        {(i, row_pos[r]): e for r, col in uinv_cols.items() for i, e in col.items()},
        _trust=True,
    )
    v = MonomialMatrix(
        m.col_q, new_col_q,
        {(i, col_pos[c]): e for c, col in v_cols.items() for i, e in col.items()},
        _trust=True,
    )
    v_inv = MonomialMatrix(
        new_col_q, m.col_q,
        {(col_pos[c], j): e for c, row in vinv_rows.items() for j, e in row.items()},
        _trust=True,
    )
    return SnfResult(
        diagonal=tuple(e for _, _, e in pivots),
        rank=rank,
        u=u, u_inv=u_inv, v=v, v_inv=v_inv,
    )


def solve(m: MonomialMatrix, target: dict, snf: SnfResult = None):
    """One solution x of  m @ x = target  over F2[h], or None.

    `target` and the result are sparse vectors {index: exponent}.  Both must
    be quantum-homogeneous (all the engine's cycles and boundaries are);
    inhomogeneous input can trip the monomial-cell invariant.
    """
    if snf is None:
        snf = smith_normal_form(m)
    w = snf.u.apply(target)
    y = {}
    for i, e in w.items():
        if i >= snf.rank:
            return None
        k = snf.diagonal[i]
        if e < k:
            return None
        y[i] = e - k
    return snf.v.apply(y)


def vec_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for i, e in b.items():
        if i in out:
            if out[i] != e:
                raise NonHomogeneousSum(f"vector cell {i}: h^{out[i]} + h^{e}")
            del out[i]
        else:
            out[i] = e
    return out


def vec_scale(v: dict, k: int) -> dict:
    return {i: e + k for i, e in v.items()}
