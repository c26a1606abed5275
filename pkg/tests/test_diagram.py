import pytest

from barnatan.diagram import (
    Merge,
    Split,
    connect_hopf,
    disjoint_union,
    edge_data,
    format_pd,
    mirror,
    parse_pd,
    resolve,
    switch_crossing,
)
from barnatan.errors import (
    IndexOutOfRange,
    InvalidBasepoint,
    NotAnEdge,
    ParseError,
    ValidationError,
)

HOPF = "PD[X(1,3,2,4),X(3,1,4,2)]"
TREFOIL = "PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]"
# figure-eight: closure of the braid (s1 s2^-1)^2, derived by hand
FIG8 = "PD[X(2,5,4,1),X(5,3,7,6),X(6,8,1,4),X(8,7,3,2)]"


class TestParse:
    def test_hopf_signs_equal_positive(self):
        d = parse_pd(HOPF)
        assert d.n == 2
        assert d.signs == (1, 1)
        assert d.n_plus == 2 and d.n_minus == 0
        assert d.component_count == 2

    def test_trefoil_all_negative(self):
        # the public-table trefoil PD is the left-handed one
        d = parse_pd(TREFOIL)
        assert d.signs == (-1, -1, -1)
        assert d.is_knot()

    def test_figure_eight_balanced(self):
        d = parse_pd(FIG8)
        assert sorted(d.signs) == [-1, -1, 1, 1]
        assert d.is_knot()

    def test_unknot_loop(self):
        d = parse_pd("PD[U]")
        assert d.n == 0 and d.free_loops == 1
        assert d.component_count == 1

    def test_roundtrip_bit_exact(self):
        for text in (HOPF, TREFOIL, FIG8, "PD[U]", "PD[X(1,1,2,2),U]"):
            assert format_pd(parse_pd(text)) == text

    def test_parse_tolerates_spaces(self):
        assert format_pd(parse_pd("PD[X(1,3,2,4), X(3,1,4,2)]")) == HOPF

    def test_malformed_token(self):
        with pytest.raises(ParseError):
            parse_pd("PD[X(1,2,3)]")
        with pytest.raises(ParseError):
            parse_pd("knot")
        with pytest.raises(ParseError):
            parse_pd("PD[]")

    def test_arc_count_validation(self):
        # perturbed index: arc appears three times / once
        with pytest.raises(ValidationError):
            parse_pd("PD[X(1,4,2,3),X(8,6,1,5),X(6,3,7,2),X(2,7,3,8)]")

    def test_kink_negative(self):
        d = parse_pd("PD[X(1,2,2,1)]")
        assert d.signs == (-1,)
        assert d.is_knot()


class TestResolve:
    def test_unknot(self):
        d = parse_pd("PD[U]")
        assert resolve(d, ()).count == 1

    def test_hopf_counts(self):
        d = parse_pd(HOPF)
        assert resolve(d, (0, 0)).count == 2
        assert resolve(d, (1, 0)).count == 1
        assert resolve(d, (0, 1)).count == 1
        assert resolve(d, (1, 1)).count == 2

    def test_trefoil_counts(self):
        # left-handed table trefoil: oriented (Seifert) state at (1,1,1)
        d = parse_pd(TREFOIL)
        assert resolve(d, (1, 1, 1)).count == 2
        assert resolve(d, (0, 0, 0)).count == 3

    def test_kink_counts(self):
        d = parse_pd("PD[X(1,2,2,1)]")
        # negative kink: oriented smoothing is the 1-side
        assert resolve(d, (1,)).count == 2
        assert resolve(d, (0,)).count == 1

    def test_edge_counts_differ_by_one(self):
        for text in (HOPF, TREFOIL, FIG8):
            d = parse_pd(text)
            for u in range(2 ** d.n):
                ub = tuple((u >> i) & 1 for i in range(d.n))
                ku = resolve(d, ub).count
                for i in range(d.n):
                    if ub[i] == 0:
                        vb = list(ub)
                        vb[i] = 1
                        kv = resolve(d, tuple(vb)).count
                        assert abs(ku - kv) == 1


class TestEdgeData:
    def test_hopf_merge_then_split(self):
        d = parse_pd(HOPF)
        assert isinstance(edge_data(d, (0, 0), (1, 0)), Merge)
        assert isinstance(edge_data(d, (1, 0), (1, 1)), Split)

    def test_trefoil_first_edge(self):
        d = parse_pd(TREFOIL)
        # counts 3 -> 2: a merge
        assert isinstance(edge_data(d, (0, 0, 0), (1, 0, 0)), Merge)

    def test_not_an_edge(self):
        d = parse_pd(HOPF)
        with pytest.raises(NotAnEdge):
            edge_data(d, (0, 0), (1, 1))
        with pytest.raises(NotAnEdge):
            edge_data(d, (1, 0), (0, 0))


class TestSwitch:
    def test_involution(self):
        for text in (HOPF, TREFOIL, FIG8):
            d = parse_pd(text)
            for ci in range(d.n):
                assert switch_crossing(switch_crossing(d, ci), ci) == d

    def test_sign_bookkeeping(self):
        d = parse_pd(HOPF)
        s = switch_crossing(d, 0)
        assert s.n_plus == d.n_plus - 1
        assert s.n_minus == d.n_minus + 1

    def test_smoothings_swap(self):
        # unoriented 0-smoothing of the switched crossing = old 1-smoothing
        d = parse_pd(TREFOIL)
        s = switch_crossing(d, 1)
        for rest in range(4):
            b0, b2 = rest & 1, (rest >> 1) & 1
            r1 = resolve(d, (b0, 0, b2)).circles
            r2 = resolve(s, (b0, 1, b2)).circles
            assert r1 == r2

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            switch_crossing(parse_pd(HOPF), 5)

    def test_mirror_swaps_sign_counts(self):
        d = parse_pd(FIG8)
        m = mirror(d)
        assert (m.n_plus, m.n_minus) == (d.n_minus, d.n_plus)


class TestDisjointUnion:
    def test_adds_loop(self):
        d = parse_pd(TREFOIL)
        u = disjoint_union(d, near=1)
        assert u.free_loops == 1
        assert u.component_count == d.component_count + 1
        for v in ((0, 0, 0), (1, 0, 1), (1, 1, 1)):
            assert resolve(u, v).count == resolve(d, v).count + 1

    def test_arc_numbering_preserved(self):
        d = parse_pd(TREFOIL)
        assert disjoint_union(d).crossings == d.crossings


class TestConnectHopf:
    def test_unknot_becomes_hopf(self):
        d = parse_pd("PD[U]")
        h, (c1, c2) = connect_hopf(d, -1, "right")
        assert h.n == 2
        assert h.signs == (1, 1)
        assert h.component_count == 2
        # same resolution profile as the positive Hopf link
        ref = parse_pd(HOPF)
        for v in ((0, 0), (0, 1), (1, 0), (1, 1)):
            assert resolve(h, v).count == resolve(ref, v).count

    def test_crossing_count_and_signs(self):
        d = parse_pd(TREFOIL)
        for handed, sgn in (("right", 1), ("left", -1)):
            h, (c1, c2) = connect_hopf(d, 1, handed)
            assert h.n == d.n + 2
            assert (c1, c2) == (d.n, d.n + 1)
            assert h.signs[:3] == d.signs
            assert h.signs[3:] == (sgn, sgn)

    def test_mapping_cone_square_shape(self):
        # (0,0) and (1,1) at the new crossings: K plus a detached circle;
        # (0,1) and (1,0): circle count of K itself, for every old vertex
        d = parse_pd(TREFOIL)
        h, (c1, c2) = connect_hopf(d, 1, "right")
        for u in range(8):
            ub = tuple((u >> i) & 1 for i in range(3))
            k = resolve(d, ub).count
            assert resolve(h, ub + (0, 0)).count == k + 1
            assert resolve(h, ub + (1, 1)).count == k + 1
            assert resolve(h, ub + (0, 1)).count == k
            assert resolve(h, ub + (1, 0)).count == k

    def test_invalid_basepoint(self):
        with pytest.raises(InvalidBasepoint):
            connect_hopf(parse_pd(HOPF), 99, "right")

    def test_loop_basepoint(self):
        d = parse_pd("PD[X(1,1,2,2),U]")
        h, _ = connect_hopf(d, -1, "right")
        assert h.n == 3 and h.free_loops == 0
        # kink component, plus the two components of the Hopf summand
        assert h.component_count == 3
