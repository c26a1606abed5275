"""Programmatic diagram constructions with verifiable provenance.

Everything the bundled knot table contains is built here rather than typed
in from memory: braid closures, twist knots (clasp plus half-twist ladder),
plat-style connected sums, and the Reidemeister-move variants used by the
invariance tests.  Identities are anchored by construction (a braid word
IS the knot) instead of table lookups.
"""

from __future__ import annotations

from .diagram import PlanarDiagram, parse_pd, switch_crossing
from .errors import ValidationError


def braid_closure(word, strands, name=None) -> PlanarDiagram:
    """Closure of a braid word (ints: +i for sigma_i, -i for its inverse).

    Strands run upward; sigma_i takes the strand in position i over the one
    in position i+1.  The closure joins top position j to bottom position j.
    """
    if not word:
        raise ValidationError("empty braid word")
    if any(abs(g) < 1 or abs(g) >= strands for g in word):
        raise ValidationError("generator index out of range")

    next_arc = strands + 1
    current = list(range(1, strands + 1))
    start = list(current)
    crossings = []
    for g in word:
        i = abs(g) - 1
        x, y = current[i], current[i + 1]
        z, w = next_arc, next_arc + 1
        next_arc += 2
        if g > 0:
            # over-strand x -> w, under y -> z: positive crossing
            crossings.append((y, w, z, x))
        else:
            crossings.append((x, y, w, z))
        current[i], current[i + 1] = z, w

    # closure: identify top arcs with the bottom ones
    ident = {top: bot for top, bot in zip(current, start)}

    def res(a):
        return ident.get(a, a)

    quads = [tuple(res(a) for a in q) for q in crossings]
    return PlanarDiagram(quads, name=name)


def braid_permutation_cycles(word, strands):
    perm = list(range(strands))
    for g in word:
        i = abs(g) - 1
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
    seen, cycles = set(), 0
    for i in range(strands):
        if i in seen:
            continue
        cycles += 1
        j = i
        while j not in seen:
            seen.add(j)
            j = perm[j]
    return cycles


def torus_2n(n, name=None) -> PlanarDiagram:
    """The (2, n) torus knot/link as the closure of sigma_1^n."""
    return braid_closure([1] * n, 2, name=name)


class RationalTangle:
    """Rational tangle built by bottom and right twists, with the Conway
    fraction tracked alongside; the numerator closure of the p/q tangle is
    the 2-bridge knot or link b(p, q)."""

    def __init__(self):
        self.crossings = []       # (slots ccw, over_diag in {0, 1})
        self.next_arc = 3
        self.nw, self.ne, self.sw, self.se = 1, 1, 2, 2
        self.num, self.den = 0, 1          # fraction num/den of the tangle

    def bottom_twist(self, sign=1):
        u, v = self.sw, self.se
        x, y = self.next_arc, self.next_arc + 1
        self.next_arc += 2
        # slots ccw: top-left, bottom-left, bottom-right, top-right
        self.crossings.append(((u, x, y, v), 0 if sign > 0 else 1))
        self.sw, self.se = x, y
        # F -> 1/(1/F + sign)
        self.num, self.den = self.num, self.den + sign * self.num

    def right_twist(self, sign=1):
        u, v = self.ne, self.se
        x, y = self.next_arc, self.next_arc + 1
        self.next_arc += 2
        # slots ccw: west-top, west-bottom, east-bottom, east-top
        self.crossings.append(((u, v, y, x), 0 if sign > 0 else 1))
        self.ne, self.se = x, y
        self.num += sign * self.den

    def fraction(self):
        return self.num, self.den

    def closure(self, name=None) -> PlanarDiagram:
        """Numerator closure: join NW to NE and SW to SE."""
        ident = {}

        def find(a):
            while a in ident:
                a = ident[a]
            return a

        loops = 0
        for a, b in ((self.nw, self.ne), (self.sw, self.se)):
            ra, rb = find(a), find(b)
            if ra == rb:
                loops += 1
            else:
                ident[ra] = rb
        quads = [tuple(find(a) for a in slots) for slots, _ in self.crossings]
        overs = [over for _, over in self.crossings]
        return _orient_raw(quads, overs, loops, name)


def _orient_raw(quads, over_diags, loops, name=None) -> PlanarDiagram:
    """Turn (ccw slot lists + over-diagonal flags) into a proper PD.

    Walks the strands to orient every arc, then rotates each quadruple so
    the incoming under-strand sits first.
    """
    occ = {}
    for ci, q in enumerate(quads):
        for pos, a in enumerate(q):
            occ.setdefault(a, []).append((ci, pos))
    for a, spots in occ.items():
        if len(spots) != 2:
            raise ValidationError(f"arc {a} appears {len(spots)} times")

    # direction[(ci, pos)] = 'in' or 'out', propagated along strands
    direction = {}
    for a, spots in sorted(occ.items()):
        if (spots[0] in direction) or (spots[1] in direction):
            continue
        # orient this component: arc a flows out of spots[0]'s crossing
        frontier = [(spots[0], "out")]
        while frontier:
            (ci, pos), tag = frontier.pop()
            if (ci, pos) in direction:
                if direction[(ci, pos)] != tag:
                    raise ValidationError("inconsistent strand orientation")
                continue
            direction[(ci, pos)] = tag
            # the same arc's other end has the opposite role
            s1, s2 = occ[quads[ci][pos]]
            other = s2 if (ci, pos) == s1 else s1
            frontier.append((other, "in" if tag == "out" else "out"))
            # the strand through this crossing: partner slot two steps away
            partner = (ci, (pos + 2) % 4)
            frontier.append((partner, "in" if tag == "out" else "out"))

    out_quads = []
    for ci, q in enumerate(quads):
        under = 1 - over_diags[ci]        # 0: diagonal (0,2); 1: (1,3)
        first = under if direction[(ci, under)] == "in" else under + 2
        out_quads.append(tuple(q[(first + k) % 4] for k in range(4)))
    return PlanarDiagram(out_quads, free_loops=loops, name=name)


def rational_knot(*coeffs, name=None) -> PlanarDiagram:
    """Numerator closure of the rational tangle C(a1, a2, ...): a1 right
    twists, a2 bottom twists, alternating; the closure realizes the 2-bridge
    knot of the continued fraction [ak, ..., a1]."""
    t = RationalTangle()
    for i, a in enumerate(coeffs):
        step = t.right_twist if i % 2 == 0 else t.bottom_twist
        for _ in range(abs(a)):
            step(1 if a > 0 else -1)
    return t.closure(name=name)


def twist_knot(twists, name=None) -> PlanarDiagram:
    """Twist knot with `twists` half-twists and a 2-crossing clasp, i.e.
    the 2-bridge knot of fraction (2 twists + 1)/2: 1 -> trefoil, 2 ->
    figure-eight, then 5_2, 6_1, 7_2, 8_1, 9_2, ...  Unknotting number 1:
    switching one clasp crossing frees the hook."""
    if twists < 1:
        raise ValidationError("need at least one half-twist")
    return rational_knot(1, 1, twists, name=name)


def connected_sum(d1: PlanarDiagram, d2: PlanarDiagram, name=None) -> PlanarDiagram:
    """Connected sum of two knot diagrams (splice along one arc of each)."""
    if not (d1.is_knot() and d2.is_knot()):
        raise ValidationError("connected sum implemented for knots")
    if d1.n == 0 or d2.n == 0:
        keep = d1 if d1.n else d2
        return PlanarDiagram(keep.crossings, keep.free_loops, name, keep.signs)
    off = d1.max_arc()
    quads = [list(q) for q in d1.crossings] + [
        [a + off for a in quad] for quad in d2.crossings
    ]
    signs = tuple(d1.signs) + tuple(d2.signs)
    a1 = d1.arcs[0]
    a2 = d2.arcs[0] + off

    def head_spot(d, arc, ci_off, arc_off):
        for ci, q in enumerate(d.crossings):
            for pos in range(4):
                if q[pos] + arc_off != arc:
                    continue
                if pos == 0 or (pos == 3 and d.signs[ci] > 0) or (
                    pos == 1 and d.signs[ci] < 0
                ):
                    return ci + ci_off, pos
        raise ValidationError(f"arc {arc} has no head")

    c1, p1 = head_spot(d1, a1, 0, 0)
    c2, p2 = head_spot(d2, a2, d1.n, off)
    quads[c1][p1] = a2
    quads[c2][p2] = a1
    return PlanarDiagram([tuple(q) for q in quads], 0, name, signs)


def add_kink(d: PlanarDiagram, arc, positive=True) -> PlanarDiagram:
    """Reidemeister-I twist on `arc` (new crossing just before its head)."""
    arc = d.check_arc(arc)
    if arc in d.loop_arcs:
        raise ValidationError("kink a real arc, not a free loop")
    lam = d.max_arc() + 1
    beta = d.max_arc() + 2

    def is_head(ci, pos):
        return pos == 0 or (pos == 3 and d.signs[ci] > 0) or (
            pos == 1 and d.signs[ci] < 0
        )

    quads = [list(q) for q in d.crossings]
    ci, pos = next(
        (ci, pos)
        for ci, q in enumerate(d.crossings)
        for pos in range(4)
        if q[pos] == arc and is_head(ci, pos)
    )
    quads[ci][pos] = beta
    if positive:
        kink = (arc, beta, lam, lam)
    else:
        kink = (arc, lam, lam, beta)
    signs = tuple(d.signs) + ((1,) if positive else (-1,))
    return PlanarDiagram([tuple(q) for q in quads] + [kink], d.free_loops, d.name, signs)


def poke(d: PlanarDiagram, ci: int) -> PlanarDiagram:
    """Reidemeister-II move near crossing `ci`.

    Takes the two arcs leaving the crossing through one corner (they bound a
    common face, so the move stays planar) and pushes one across the other:
    two new crossings of opposite sign, same link type.
    """
    quad = d.crossings[ci]
    if d.signs[ci] > 0:
        y, x = quad[1], quad[2]     # both tails at a positive crossing
    else:
        x, y = quad[2], quad[3]
    if x == y:
        raise ValidationError("kinked corner; poke elsewhere")
    m1, m2, e1, e2 = (d.max_arc() + k for k in (1, 2, 3, 4))

    def is_tail_at_ci(pos):
        return pos == 2 or (pos == 1 and d.signs[ci] > 0) or (
            pos == 3 and d.signs[ci] < 0
        )

    def head_of(arc):
        for cj, q in enumerate(d.crossings):
            for pos in range(4):
                if q[pos] == arc and not (cj == ci and is_tail_at_ci(pos)):
                    return cj, pos
        raise ValidationError(f"arc {arc} has no head")

    quads = [list(q) for q in d.crossings]
    hx, hy = head_of(x), head_of(y)
    quads[hx[0]][hx[1]] = e1
    quads[hy[0]][hy[1]] = e2
    # x runs over y twice: x, m1, e1 along x; y, m2, e2 along y
    new1 = (y, m1, m2, x)            # positive
    new2 = (m2, m1, e2, e1)          # negative
    signs = tuple(d.signs) + (1, -1)
    return PlanarDiagram(
        [tuple(q) for q in quads] + [new1, new2], d.free_loops, d.name, signs
    )
