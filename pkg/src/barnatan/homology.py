"""Bigraded Bar-Natan homology as a graded F2[h]-module.

Per homological degree k the differentials d_{k-1}, d_k go through graded
Smith normal form.  The complex is free with homogeneous differential, so
homology splits into shifted copies of F2[h] (free summands) and
F2[h]/(h^e) (torsion of order e); the maximum torsion order over all
homology classes is realized on a cyclic summand, which is what the torsion
bound invariant reads off.

Plumbing kept per degree for induced-map computations:

* kernel coordinates: rows (rank..n) of V^{-1} for d_k map a cycle to its
  coordinates in the kernel basis (columns rank..n of V);
* the boundary matrix rewritten in kernel coordinates goes through a second
  SNF whose diagonal h^{e_i} entries are the torsion orders (e = 0 entries
  die, the kernel columns beyond its rank stay free).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    NotAComplex,
    NotAKnotProfile,
    RepresentativeNotCycle,
    UnexpectedGap,
)
from .polymat import MonomialMatrix, smith_normal_form


@dataclass(frozen=True)
class Summand:
    grh: int
    grq: int
    order: int | None          # None for a free summand, else torsion order >= 1
    witness: dict              # cycle representative {generator index: h-exponent}

    @property
    def is_free(self):
        return self.order is None

    def key(self):
        return (self.grh, self.grq, 0 if self.order is None else self.order)


@dataclass
class _DegreeData:
    """Linear-algebra leftovers for one homological degree."""

    ker_coords: MonomialMatrix        # cycles -> kernel coordinates
    cycle_rank: int                   # rank of d_k (coords that must vanish)
    v_inv: MonomialMatrix
    udd: MonomialMatrix               # U'' of the boundary-in-kernel SNF
    orders: tuple                     # SNF diagonal of the boundary matrix
    homology_rows: tuple              # y-coordinate row per summand, in order
    summand_ids: tuple                # indices into profile.summands


class HomologyProfile:
    """Summand list plus enough basis data to push cycles into homology."""

    def __init__(self, summands, degree_data, complex_):
        self.summands = summands
        self._degree_data = degree_data
        self.complex = complex_

    # -- views ----------------------------------------------------------------

    def multiset(self):
        """Multiset of (grh, grq, order-with-0-for-free): the isomorphism type."""
        return sorted(s.key() for s in self.summands)

    def free_summands(self):
        return [s for s in self.summands if s.is_free]

    def torsion_summands(self):
        return [s for s in self.summands if not s.is_free]

    def free_rank(self):
        return len(self.free_summands())

    def degree_data(self, grh):
        return self._degree_data.get(grh)

    def project_cycle(self, grh, vec):
        """Coordinates of a cycle's homology class: {summand id: h-exponent}.

        Torsion coordinates are reduced mod h^order.  Raises if `vec` is not
        a cycle of the stored complex.
        """
        dd = self._degree_data.get(grh)
        if dd is None:
            if vec:
                raise RepresentativeNotCycle(f"no homology in degree {grh}")
            return {}
        full = dd.v_inv.apply(vec)
        if any(i < dd.cycle_rank for i in full):
            raise RepresentativeNotCycle(f"vector in degree {grh} is not a cycle")
        coords = {i - dd.cycle_rank: e for i, e in full.items()}
        y = dd.udd.apply(coords)
        out = {}
        row_of = {row: pos for pos, row in enumerate(dd.homology_rows)}
        for row, e in y.items():
            pos = row_of.get(row)
            if pos is None:
                # killed by a unit boundary entry
                continue
            sid = dd.summand_ids[pos]
            order = self.summands[sid].order
            if order is not None and e >= order:
                continue
            out[sid] = e
        return out

    def __repr__(self):
        parts = []
        for s in self.summands:
            kind = "F" if s.is_free else f"T{s.order}"
            parts.append(f"({s.grh},{s.grq}){kind}")
        return "HomologyProfile[" + " ".join(parts) + "]"


def compute_homology(cx) -> HomologyProfile:
    """Homology of a BNComplex as free + torsion summands with witnesses."""
    cx.verify_d_squared()

    degrees = cx.degrees
    snf_out = {}          # SNF of d_k per degree k
    for k in degrees:
        dk = cx.diffs.get(k)
        if dk is not None and not dk.is_zero():
            snf_out[k] = smith_normal_form(dk)

    summands = []
    degree_data = {}
    for k in degrees:
        nk = len(cx.generators(k))
        if nk == 0:
            continue
        grqs = cx.grq_list(k)
        out = snf_out.get(k)
        if out is None:
            rank_out = 0
            v = MonomialMatrix.identity(grqs)
            v_inv = v
        else:
            rank_out = out.rank
            v, v_inv = out.v, out.v_inv
        ker_dim = nk - rank_out
        if ker_dim == 0:
            continue
        ker_q = v.col_q[rank_out:]
        ker_basis = MonomialMatrix(
            grqs, ker_q,
            {(r, c - rank_out): e for (r, c), e in v.items() if c >= rank_out},
            _trust=True,
        )
        ker_coords = MonomialMatrix(
            ker_q, grqs,
            {(r - rank_out, c): e for (r, c), e in v_inv.items() if r >= rank_out},
            _trust=True,
        )

        # boundaries from below, in kernel coordinates
        din = cx.diffs.get(k - 1)
        if din is None or din.is_zero():
            b = MonomialMatrix.zero(ker_q, ())
        else:
            b = ker_coords @ din
        bs = smith_normal_form(b)

        ids = []
        rows = []
        new_summands = []
        for i, e in enumerate(bs.diagonal):
            if e == 0:
                continue
            rows.append(i)
            wit = ker_basis.apply(bs.u_inv.column(i))
            grq = _vector_grq(wit, grqs)
            new_summands.append(Summand(k, grq, e, wit))
        for i in range(bs.rank, ker_dim):
            rows.append(i)
            wit = ker_basis.apply(bs.u_inv.column(i))
            grq = _vector_grq(wit, grqs)
            new_summands.append(Summand(k, grq, None, wit))
        if not new_summands:
            continue
        base = len(summands)
        order = sorted(range(len(new_summands)), key=lambda j: new_summands[j].key())
        inverse = [0] * len(order)
        for pos, j in enumerate(order):
            inverse[j] = base + pos
        summands.extend(new_summands[j] for j in order)
        degree_data[k] = _DegreeData(
            ker_coords=ker_coords,
            cycle_rank=rank_out,
            v_inv=v_inv,
            udd=bs.u,
            orders=bs.diagonal,
            homology_rows=tuple(rows),
            summand_ids=tuple(inverse[j] for j in range(len(new_summands))),
        )

    return HomologyProfile(summands, degree_data, cx)


def _vector_grq(vec, grqs):
    qs = {grqs[i] - 2 * e for i, e in vec.items()}
    if len(qs) != 1:
        raise NotAComplex(f"witness is not quantum-homogeneous: {qs}")
    return qs.pop()


def u_invariant(profile: HomologyProfile) -> int:
    """Maximum torsion order over all summands; 0 for torsion-free homology."""
    orders = [s.order for s in profile.torsion_summands()]
    return max(orders, default=0)


def s_invariant(profile: HomologyProfile) -> int:
    """Mean quantum grading of the two free summands of a knot profile."""
    free = profile.free_summands()
    if len(free) != 2:
        raise NotAKnotProfile(f"free rank {len(free)} != 2")
    q1, q2 = sorted(s.grq for s in free)
    if q2 - q1 != 2:
        raise UnexpectedGap(f"free quantum gradings {q1}, {q2} not 2 apart")
    return (q1 + q2) // 2


def collapse_page(profile: HomologyProfile) -> int:
    """Page at which the h=1 spectral sequence collapses: max order + 1.

    Order-k torsion supports a page-k differential, so everything is gone
    after page (max order), i.e. the sequence is stable from page
    max-order + 1 on.  Torsion-free homology collapses at page 1.
    """
    return u_invariant(profile) + 1


@dataclass(frozen=True)
class InvariantReport:
    name: str | None
    crossings: int
    u: int
    s: int | None
    collapse_page: int
    free: tuple
    torsion: tuple

    @property
    def total_torsion_count(self):
        return len(self.torsion)

    def to_json_dict(self):
        out = {
            "schema": 1,
            "name": self.name,
            "crossings": self.crossings,
            "u": self.u,
            "s": self.s,
            "collapse_page": self.collapse_page,
            "free": [{"grh": h, "grq": q} for h, q in self.free],
            "torsion": [
                {"grh": h, "grq": q, "order": o} for h, q, o in self.torsion
            ],
        }
        return out

    def csv_row(self):
        s = "" if self.s is None else str(self.s)
        return f"{self.name},{self.crossings},{self.u},{s},{self.collapse_page}"


def invariant_report(profile: HomologyProfile, name=None, crossings=None) -> InvariantReport:
    try:
        s = s_invariant(profile)
    except (NotAKnotProfile, UnexpectedGap):
        s = None
    return InvariantReport(
        name=name,
        crossings=profile.complex.diagram.n if crossings is None else crossings,
        u=u_invariant(profile),
        s=s,
        collapse_page=collapse_page(profile),
        free=tuple(sorted((x.grh, x.grq) for x in profile.free_summands())),
        torsion=tuple(sorted((x.grh, x.grq, x.order) for x in profile.torsion_summands())),
    )


def h_inverted_rank(cx) -> int:
    """Rank of homology over F2(h): an oracle path for the free rank.

    Treats every monomial as a unit and does plain rank counting; completely
    independent of the graded SNF machinery.
    """
    total = 0
    ranks = {}
    for k in cx.degrees:
        dk = cx.diffs.get(k)
        if dk is None or dk.is_zero():
            ranks[k] = 0
            continue
        ranks[k] = _f2h_field_rank(dk)
    for k in cx.degrees:
        nk = len(cx.generators(k))
        total += nk - ranks.get(k, 0) - ranks.get(k - 1, 0)
    return total


def _f2h_field_rank(m: MonomialMatrix) -> int:
    """Fraction-field rank by elimination with F2[h] polynomials as bitmasks."""
    nrows, ncols = m.shape
    rows = [[0] * ncols for _ in range(nrows)]
    for (r, c), e in m.items():
        rows[r][c] ^= 1 << e

    def pmul(a, b):
        out = 0
        while b:
            if b & 1:
                out ^= a
            a <<= 1
            b >>= 1
        return out

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
        for r in range(rank + 1, nrows):
            if rows[r][c]:
                rv = rows[r][c]
                rows[r] = [
                    pmul(x, pv) ^ pmul(y, rv) for x, y in zip(rows[r], rows[rank])
                ]
        rank += 1
        if rank == nrows:
            break
    return rank
