"""The Bar-Natan chain complex of a diagram: cube of resolutions + TQFT.

The Frobenius algebra is rank 2 over F2[h] on labels x+ and x-:

    m(x+,x+) = x+        Delta(x+) = (x+,x-) + (x-,x+) + h (x+,x+)
    m(x+,x-) = x-        Delta(x-) = (x-,x-)
    m(x-,x+) = x-
    m(x-,x-) = h x-

h has homological degree 0 and quantum degree -2.  Generators are labelings
of the circles of a complete resolution; gradings

    gr_h = |v| - n_minus
    gr_q = n_plus - 2 n_minus + |v| + (#x+ circles) - (#x- circles).

Label bit 0 is x+, bit 1 is x-; within a vertex, circles are ordered by
minimal arc id, and generators within one homological degree sort by
(vertex bits, label bits) so matrices come out reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import config
from .diagram import PlanarDiagram, resolve, smoothing_pairs
from .errors import NotAComplex, TooLarge
from .polymat import MonomialMatrix

X_PLUS = 0
X_MINUS = 1


def frobenius_multiply(a, b):
    """m(a, b) as a list of (label, h-exponent) terms."""
    if a == X_PLUS and b == X_PLUS:
        return [(X_PLUS, 0)]
    if a == X_MINUS and b == X_MINUS:
        return [(X_MINUS, 1)]
    return [(X_MINUS, 0)]


def frobenius_comultiply(a):
    """Delta(a) as a list of ((label, label), h-exponent) terms."""
    if a == X_MINUS:
        return [((X_MINUS, X_MINUS), 0)]
    return [((X_PLUS, X_MINUS), 0), ((X_MINUS, X_PLUS), 0), ((X_PLUS, X_PLUS), 1)]


@dataclass(frozen=True)
class BNGenerator:
    vertex: tuple      # resolution bits, one per crossing
    labels: tuple      # one label per circle of resolve(d, vertex)
    grh: int
    grq: int


class BNComplex:
    """Bigraded free F2[h]-complex with one monomial matrix per degree."""

    def __init__(self, diagram, generators_by_degree, differentials, states=None):
        self.diagram = diagram
        self.gens = generators_by_degree          # grh -> list[BNGenerator]
        self.diffs = differentials                # grh -> MonomialMatrix
        self.states = states or {}                # vertex -> StateCircles
        self._index = {
            (g.vertex, g.labels): (k, i)
            for k, gens in generators_by_degree.items()
            for i, g in enumerate(gens)
        }

    # -- shape ---------------------------------------------------------------

    @property
    def degrees(self):
        return sorted(self.gens)

    def generators(self, grh):
        return self.gens.get(grh, [])

    def grq_list(self, grh):
        return tuple(g.grq for g in self.gens.get(grh, ()))

    def total_generators(self):
        return sum(len(v) for v in self.gens.values())

    def differential(self, grh):
        d = self.diffs.get(grh)
        if d is None:
            d = MonomialMatrix.zero(self.grq_list(grh + 1), self.grq_list(grh), qshift=0)
        return d

    def locate(self, vertex, labels):
        return self._index[(tuple(vertex), tuple(labels))]

    def state(self, vertex):
        vertex = tuple(vertex)
        if vertex not in self.states:
            self.states[vertex] = resolve(self.diagram, vertex)
        return self.states[vertex]

    # -- verification ----------------------------------------------------------

    def verify_d_squared(self):
        for k in self.degrees:
            a = self.diffs.get(k)
            b = self.diffs.get(k + 1)
            if a is not None and b is not None and not (b @ a).is_zero():
                raise NotAComplex(f"d^2 != 0 between degrees {k} and {k + 2}")

    def summary(self):
        return {k: len(v) for k, v in sorted(self.gens.items())}


def _label_masks(k):
    return range(1 << k)


def build_complex(d: PlanarDiagram, cap=None, verify=None) -> BNComplex:
    """Materialize the full cube complex of `d`.

    Refuses diagrams above the configured crossing cap (2^n vertices); big
    inputs go through the scan reduction instead.
    """
    cap = config.FULL_CUBE_CAP if cap is None else cap
    if d.n > cap:
        raise TooLarge(f"{d.n} crossings exceeds full-cube cap {cap}")
    verify = config.DEBUG_CHECKS if verify is None else verify

    n = d.n
    states = {}
    vertex_bits = []
    for mask in range(1 << n):
        bits = tuple((mask >> i) & 1 for i in range(n))
        vertex_bits.append(bits)
        states[bits] = resolve(d, bits)

    gens_by_degree = {}
    for bits in sorted(vertex_bits):
        st = states[bits]
        k = st.count
        grh = sum(bits) - d.n_minus
        base_q = d.n_plus - 2 * d.n_minus + sum(bits)
        bucket = gens_by_degree.setdefault(grh, [])
        for mask in _label_masks(k):
            labels = tuple((mask >> i) & 1 for i in range(k))
            minus = sum(labels)
            grq = base_q + (k - minus) - minus
            bucket.append(BNGenerator(bits, labels, grh, grq))

    index = {}
    for grh, bucket in gens_by_degree.items():
        bucket.sort(key=lambda g: (g.vertex, g.labels))
        for i, g in enumerate(bucket):
            index[(g.vertex, g.labels)] = i

    cells_by_degree = {}
    for bits in vertex_bits:
        su = states[bits]
        grh = sum(bits) - d.n_minus
        for ci in range(n):
            if bits[ci]:
                continue
            vbits = bits[:ci] + (1,) + bits[ci + 1:]
            sv = states[vbits]
            cells = cells_by_degree.setdefault(grh, {})
            _edge_entries(d, ci, bits, su, vbits, sv, index, cells)

    diffs = {}
    for grh, cells in cells_by_degree.items():
        diffs[grh] = MonomialMatrix(
            tuple(g.grq for g in gens_by_degree.get(grh + 1, ())),
            tuple(g.grq for g in gens_by_degree.get(grh, ())),
            cells,
            qshift=0,
        )

    cx = BNComplex(d, gens_by_degree, diffs, states)
    if verify:
        cx.verify_d_squared()
    return cx


def _edge_entries(d, ci, ubits, su, vbits, sv, index, cells):
    """Write the block of the differential along one cube edge into `cells`."""
    quad = d.crossings[ci]
    touched_u = sorted({su.circle_of(a) for a in quad})
    touched_v = sorted({sv.circle_of(a) for a in quad})
    # correspondence for untouched circles: identical arc sets
    corr = {}
    sv_lookup = {circ: j for j, circ in enumerate(sv.circles)}
    for i, circ in enumerate(su.circles):
        if i in touched_u:
            continue
        corr[i] = sv_lookup[circ]

    ku = su.count
    if len(touched_u) == 2:
        ia, ib = touched_u
        (it,) = touched_v
        for mask in range(1 << ku):
            labels = [(mask >> i) & 1 for i in range(ku)]
            src = index[(ubits, tuple(labels))]
            for lab, e in frobenius_multiply(labels[ia], labels[ib]):
                tgt_labels = [None] * sv.count
                tgt_labels[it] = lab
                for i, j in corr.items():
                    tgt_labels[j] = labels[i]
                tgt = index[(vbits, tuple(tgt_labels))]
                _toggle_cell(cells, tgt, src, e)
    else:
        (isrc,) = touched_u
        ja, jb = touched_v
        for mask in range(1 << ku):
            labels = [(mask >> i) & 1 for i in range(ku)]
            src = index[(ubits, tuple(labels))]
            for (la, lb), e in frobenius_comultiply(labels[isrc]):
                tgt_labels = [None] * sv.count
                tgt_labels[ja] = la
                tgt_labels[jb] = lb
                for i, j in corr.items():
                    tgt_labels[j] = labels[i]
                tgt = index[(vbits, tuple(tgt_labels))]
                _toggle_cell(cells, tgt, src, e)


def _toggle_cell(cells, r, c, e):
    key = (r, c)
    if key in cells:
        if cells[key] != e:
            raise NotAComplex(f"non-monomial differential cell {key}")
        del cells[key]
    else:
        cells[key] = e
