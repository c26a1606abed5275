"""Oriented link diagrams in PD code, their resolutions, and diagram surgery.

Conventions fixed for the whole engine:

* ``X(a,b,c,d)``: `a` is the incoming under-strand arc, `b,c,d` follow
  counterclockwise.  The under-strand runs a -> c.
* Sign: the crossing is positive when the over-strand enters at `d`
  (equivalently runs d -> b), negative when it enters at `b`.  This is the
  convention of the public knot tables, so table PD codes load unmodified.
* Smoothings: the 0-smoothing joins (a,b) and (c,d); the 1-smoothing joins
  (a,d) and (b,c).  At a positive crossing the 0-smoothing is the oriented
  one, which puts the Seifert state in homological degree 0.

Crossing-free unknot components (``U`` tokens) carry synthetic negative arc
ids so they can hold basepoints and participate in resolutions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    IndexOutOfRange,
    InvalidBasepoint,
    NotAnEdge,
    ParseError,
    ValidationError,
)


class PlanarDiagram:
    """Validated PD-coded diagram with derived orientation data.

    `signs` may be supplied to skip re-derivation (surgery ops know the signs
    of the diagrams they build); when supplied it is still cross-checked
    against the arc-consistency validation.
    """

    __slots__ = (
        "crossings", "free_loops", "name", "signs",
        "arcs", "succ", "components", "n_plus", "n_minus",
    )

    def __init__(self, crossings, free_loops=0, name=None, signs=None):
        self.crossings = tuple(tuple(map(int, q)) for q in crossings)
        self.free_loops = int(free_loops)
        self.name = name
        for q in self.crossings:
            if len(q) != 4 or any(a <= 0 for a in q):
                raise ValidationError(f"bad quadruple {q}")
        self._validate_arcs()
        heads = self._orient(signs)
        self._finish(heads)

    # -- construction helpers ------------------------------------------------

    def _validate_arcs(self):
        count = {}
        for q in self.crossings:
            for a in q:
                count[a] = count.get(a, 0) + 1
        bad = {a: n for a, n in count.items() if n != 2}
        if bad:
            raise ValidationError(f"arcs not appearing exactly twice: {bad}")
        self.arcs = tuple(sorted(count))

    def _occurrences(self):
        occ = {}
        for ci, q in enumerate(self.crossings):
            for pos, a in enumerate(q):
                occ.setdefault(a, []).append((ci, pos))
        return occ

    def _orient(self, given_signs):
        """Assign head/tail roles to every arc occurrence.

        Position 0 is always a head (arc ends there), position 2 a tail.  The
        over-strand direction per crossing is the unknown; constraints
        propagate through arcs (one head and one tail each).  Crossings left
        free by propagation fall back to the table-numbering heuristic: arcs
        are numbered along the strand, so the over-strand leaves through the
        higher-numbered arc except at the component wraparound.
        """
        occ = self._occurrences()
        n = len(self.crossings)
        over_in_d = [None] * n  # True: over-strand enters at slot 3 (positive)
        if given_signs is not None:
            if len(given_signs) != n:
                raise ValidationError("signs length mismatch")
            over_in_d = [s > 0 for s in given_signs]

        # role[(ci, pos)] = True for head (incoming), False for tail
        role = {}
        for ci, q in enumerate(self.crossings):
            role[(ci, 0)] = True
            role[(ci, 2)] = False

        def other(a, here):
            o1, o2 = occ[a]
            return o2 if o1 == here else o1

        changed = True
        while changed:
            changed = False
            for ci, q in enumerate(self.crossings):
                if over_in_d[ci] is not None:
                    continue
                for pos in (1, 3):
                    spot = (ci, pos)
                    oth = other(q[pos], spot)
                    if oth in role:
                        head_here = not role[oth]
                        over_in_d[ci] = head_here if pos == 3 else not head_here
                        changed = True
                        break
                if over_in_d[ci] is not None:
                    q = self.crossings[ci]
                    role[(ci, 3)] = over_in_d[ci]
                    role[(ci, 1)] = not over_in_d[ci]

        for ci, q in enumerate(self.crossings):
            if over_in_d[ci] is None:
                b, d = q[1], q[3]
                # numbered along the strand: incoming is the smaller label,
                # except across the wraparound where the larger one re-enters
                over_in_d[ci] = (d < b) != (abs(b - d) > 1)
            role[(ci, 3)] = over_in_d[ci]
            role[(ci, 1)] = not over_in_d[ci]

        # global consistency: each arc exactly one head and one tail
        for a, spots in occ.items():
            roles = sorted(role[s] for s in spots)
            if roles != [False, True]:
                raise ValidationError(f"arc {a} has inconsistent orientation")

        self.signs = tuple(1 if over_in_d[ci] else -1 for ci in range(n))
        if given_signs is not None and tuple(given_signs) != self.signs:
            raise ValidationError("supplied signs contradict arc orientation")
        return role

    def _finish(self, role):
        succ = {}
        for ci, q in enumerate(self.crossings):
            succ[q[0]] = q[2]
            if role[(ci, 3)]:
                succ[q[3]] = q[1]
            else:
                succ[q[1]] = q[3]
        self.succ = succ
        seen = set()
        comps = []
        for a in self.arcs:
            if a in seen:
                continue
            cyc = [a]
            seen.add(a)
            b = succ[a]
            while b != a:
                if b in seen:
                    raise ValidationError("orientation cycles are not disjoint")
                cyc.append(b)
                seen.add(b)
                b = succ[b]
            comps.append(tuple(cyc))
        if set(self.arcs) - seen:
            raise ValidationError("arcs not covered by orientation cycles")
        self.components = tuple(comps)
        self.n_plus = sum(1 for s in self.signs if s > 0)
        self.n_minus = len(self.signs) - self.n_plus

    # -- basic queries --------------------------------------------------------

    @property
    def n(self):
        return len(self.crossings)

    @property
    def loop_arcs(self):
        """Synthetic arc ids of the crossing-free unknot components."""
        return tuple(-(i + 1) for i in range(self.free_loops))

    @property
    def all_arcs(self):
        return self.arcs + self.loop_arcs

    @property
    def component_count(self):
        return len(self.components) + self.free_loops

    def is_knot(self):
        return self.component_count == 1

    def max_arc(self):
        return max(self.arcs, default=0)

    def check_arc(self, arc):
        if arc not in self.arcs and arc not in self.loop_arcs:
            raise InvalidBasepoint(f"arc {arc} not in diagram")
        return arc

    def over_pair(self, ci):
        """Over-strand (incoming, outgoing) arcs at crossing ci."""
        a, b, c, d = self.crossings[ci]
        return (d, b) if self.signs[ci] > 0 else (b, d)

    def with_name(self, name):
        return PlanarDiagram(self.crossings, self.free_loops, name, self.signs)

    def __repr__(self):
        return f"PlanarDiagram({format_pd(self)!r}, name={self.name!r})"

    def __eq__(self, other):
        if not isinstance(other, PlanarDiagram):
            return NotImplemented
        return (
            self.crossings == other.crossings
            and self.free_loops == other.free_loops
        )


@dataclass(frozen=True)
class StateCircles:
    """Circles of one complete resolution, sorted by minimal arc id."""

    circles: tuple          # tuple of frozensets of arc ids
    arc_to_circle: dict     # arc id -> index into `circles`

    @property
    def count(self):
        return len(self.circles)

    def circle_of(self, arc):
        return self.arc_to_circle[arc]


@dataclass(frozen=True)
class Merge:
    sources: tuple      # two circle indices in resolve(u)
    target: int         # circle index in resolve(v)
    corr: dict          # untouched circles, index in u -> index in v


@dataclass(frozen=True)
class Split:
    source: int
    targets: tuple
    corr: dict


_PD_RE = re.compile(r"^PD\[(.*)\]$")
_X_RE = re.compile(r"^X\((\d+),(\d+),(\d+),(\d+)\)$")


def parse_pd(text: str, name=None) -> PlanarDiagram:
    """Parse `PD[X(a,b,c,d),...,U,...]`; `U` tokens are free unknot loops."""
    s = text.strip().replace(" ", "")
    m = _PD_RE.match(s)
    if not m:
        raise ParseError(f"not a PD expression: {text!r}")
    body = m.group(1)
    crossings, loops = [], 0
    if body:
        # split at commas that sit outside parentheses
        depth, tok, tokens = 0, "", []
        for ch in body:
            if ch == "," and depth == 0:
                tokens.append(tok)
                tok = ""
                continue
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            tok += ch
        tokens.append(tok)
        for t in tokens:
            if t == "U":
                loops += 1
                continue
            xm = _X_RE.match(t)
            if not xm:
                raise ParseError(f"malformed token {t!r} in {text!r}")
            crossings.append(tuple(int(g) for g in xm.groups()))
    if not crossings and loops == 0:
        raise ParseError("empty diagram: use PD[U] for the unknot")
    return PlanarDiagram(crossings, free_loops=loops, name=name)


def format_pd(d: PlanarDiagram) -> str:
    toks = [f"X({a},{b},{c},{e})" for a, b, c, e in d.crossings]
    toks += ["U"] * d.free_loops
    return "PD[" + ",".join(toks) + "]"


def smoothing_pairs(quad, bit):
    a, b, c, d = quad
    return ((a, b), (c, d)) if bit == 0 else ((a, d), (b, c))


def resolve(d: PlanarDiagram, bits) -> StateCircles:
    """Circles of the complete resolution selected by `bits` (one per crossing)."""
    bits = tuple(bits)
    if len(bits) != d.n:
        raise ValidationError(f"resolution length {len(bits)} != {d.n} crossings")
    parent = {a: a for a in d.all_arcs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for quad, bit in zip(d.crossings, bits):
        for x, y in smoothing_pairs(quad, bit):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry
    groups = {}
    for a in d.all_arcs:
        groups.setdefault(find(a), set()).add(a)
    circles = tuple(sorted((frozenset(g) for g in groups.values()), key=min))
    a2c = {a: i for i, circ in enumerate(circles) for a in circ}
    return StateCircles(circles, a2c)


def _match_circles(src: StateCircles, tgt: StateCircles):
    """Correspondence of identical circles; returns (corr, leftovers_src, leftovers_tgt)."""
    tgt_index = {circ: i for i, circ in enumerate(tgt.circles)}
    corr, left_src = {}, []
    used = set()
    for i, circ in enumerate(src.circles):
        j = tgt_index.get(circ)
        if j is None:
            left_src.append(i)
        else:
            corr[i] = j
            used.add(j)
    left_tgt = [j for j in range(tgt.count) if j not in used]
    return corr, left_src, left_tgt


def edge_data(d: PlanarDiagram, u, v):
    """Merge or Split along a cube edge u <| v (one bit raised)."""
    u, v = tuple(u), tuple(v)
    diff = [i for i in range(d.n) if u[i] != v[i]]
    if len(diff) != 1 or u[diff[0]] != 0:
        raise NotAnEdge(f"{u} -> {v} is not a cube edge")
    su, sv = resolve(d, u), resolve(d, v)
    corr, left_u, left_v = _match_circles(su, sv)
    if len(left_u) == 2 and len(left_v) == 1:
        return Merge(tuple(left_u), left_v[0], corr)
    if len(left_u) == 1 and len(left_v) == 2:
        return Split(left_u[0], tuple(left_v), corr)
    raise NotAnEdge(f"edge {u}->{v} changed {left_u}/{left_v} circles")


def switch_crossing(d: PlanarDiagram, ci: int) -> PlanarDiagram:
    """Exchange over/under strands at crossing ci; sign negates, arcs stay."""
    if not (0 <= ci < d.n):
        raise IndexOutOfRange(f"crossing {ci} out of range")
    a, b, c, e = d.crossings[ci]
    quad = (e, a, b, c) if d.signs[ci] > 0 else (b, c, e, a)
    crossings = list(d.crossings)
    crossings[ci] = quad
    signs = list(d.signs)
    signs[ci] = -signs[ci]
    return PlanarDiagram(crossings, d.free_loops, d.name, signs)


def mirror(d: PlanarDiagram) -> PlanarDiagram:
    """Switch every crossing."""
    out = d
    for ci in range(d.n):
        out = switch_crossing(out, ci)
    return out


def disjoint_union(d: PlanarDiagram, near=None) -> PlanarDiagram:
    """Add a crossing-free unknot component (near a basepoint, combinatorially
    its position is immaterial)."""
    if near is not None:
        d.check_arc(near)
    return PlanarDiagram(d.crossings, d.free_loops + 1, d.name, d.signs)


def drop_loop(d: PlanarDiagram) -> PlanarDiagram:
    if d.free_loops == 0:
        raise ValidationError("no free loop to drop")
    return PlanarDiagram(d.crossings, d.free_loops - 1, d.name, d.signs)


def connect_hopf(d: PlanarDiagram, p, handed="right"):
    """Connected sum with a Hopf link by a local clasp at basepoint arc `p`.

    Returns (diagram, (c, c')) with the two new crossing indices appended at
    the end.  Right-handed inserts two positive crossings, left-handed two
    negative ones.  Resolving (c, c') at (0,0) or (1,1) detaches a small
    circle near p; at (0,1) or (1,0) the diagram is isotopic to the input.
    """
    if handed not in ("right", "left"):
        raise ValidationError(f"handedness {handed!r}")
    alpha = d.check_arc(p)
    big = d.max_arc()
    m_arc, e_arc, s_arc, t_arc = big + 1, big + 2, big + 3, big + 4

    if alpha in d.loop_arcs:
        # the loop becomes a real strand; a fresh id labels its surviving arc
        alpha = big + 5
        if handed == "right":
            new = [(alpha, s_arc, m_arc, t_arc), (s_arc, alpha, t_arc, m_arc)]
            new_signs = [1, 1]
        else:
            new = [(t_arc, alpha, s_arc, m_arc), (m_arc, s_arc, alpha, t_arc)]
            new_signs = [-1, -1]
        out = PlanarDiagram(
            list(d.crossings) + new,
            d.free_loops - 1,
            d.name,
            tuple(d.signs) + tuple(new_signs),
        )
        return out, (d.n, d.n + 1)

    crossings = [list(q) for q in d.crossings]
    # alpha keeps its tail; its head occurrence is rewired to the exit arc e
    def _is_head(ci, pos):
        return pos == 0 or (pos == 3 and d.signs[ci] > 0) or (pos == 1 and d.signs[ci] < 0)

    head_spot = next(
        (ci, pos)
        for ci, q in enumerate(d.crossings)
        for pos in range(4)
        if q[pos] == alpha and _is_head(ci, pos)
    )
    crossings[head_spot[0]][head_spot[1]] = e_arc

    if handed == "right":
        new = [(alpha, s_arc, m_arc, t_arc), (s_arc, e_arc, t_arc, m_arc)]
        new_signs = [1, 1]
    else:
        new = [(t_arc, alpha, s_arc, m_arc), (m_arc, s_arc, e_arc, t_arc)]
        new_signs = [-1, -1]
    out = PlanarDiagram(
        [tuple(q) for q in crossings] + new,
        d.free_loops,
        d.name,
        tuple(d.signs) + tuple(new_signs),
    )
    return out, (d.n, d.n + 1)


def hopf_new_arcs(d_before: PlanarDiagram):
    """Arc ids (m, e, s, t) created by the matching connect_hopf call."""
    big = d_before.max_arc()
    return big + 1, big + 2, big + 3, big + 4
