import random

import pytest

from barnatan.errors import DimensionMismatch, NonHomogeneousSum
from barnatan.polymat import MonomialMatrix, smith_normal_form, solve, vec_add

from helpers import field_rank, random_homogeneous


def M(row_q, col_q, cells, qshift=None):
    return MonomialMatrix(row_q, col_q, cells, qshift=qshift)


class TestAdd:
    def test_equal_entries_cancel(self):
        a = M([0], [0], {(0, 0): 0}, qshift=0)
        assert (a + a).is_zero()

    def test_add_empty_is_identity(self):
        a = M([4], [0, 0], {(0, 1): 2})
        z = MonomialMatrix.zero([4], [0, 0])
        assert a + z == a

    def test_partial_cancellation(self):
        a = M([2, 0], [0, 0], {(0, 0): 1, (1, 1): 0})
        b = M([2, 0], [0, 0], {(0, 0): 1})
        assert a + b == M([2, 0], [0, 0], {(1, 1): 0})

    def test_same_cell_different_exponent_raises(self):
        a = M([0], [0], {(0, 0): 1})
        b = M([0], [0], {(0, 0): 2})
        with pytest.raises(NonHomogeneousSum):
            a + b

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            M([0], [0], {}) + M([0, 0], [0], {})

    def test_commutative(self):
        rng = random.Random(7)
        for _ in range(25):
            rq, cq, cells = random_homogeneous(rng, max_dim=8)
            keys = list(cells)
            half = {k: cells[k] for k in keys[::2]}
            rest = {k: cells[k] for k in keys[1::2]}
            a, b = M(rq, cq, half), M(rq, cq, rest)
            assert a + b == b + a

    def test_self_inverse(self):
        rng = random.Random(8)
        rq, cq, cells = random_homogeneous(rng, max_dim=10)
        a = M(rq, cq, cells)
        assert (a + a).is_zero()


class TestMul:
    def test_identity(self):
        a = M([2, 0], [0, 0], {(0, 0): 1, (1, 1): 0})
        left = MonomialMatrix.identity([2, 0])
        right = MonomialMatrix.identity([0, 0])
        assert left @ a == a
        assert a @ right == a

    def test_exponents_add(self):
        a = M([6], [4], {(0, 0): 1})
        b = M([4], [0], {(0, 0): 2})
        assert (a @ b).entry(0, 0) == 3

    def test_two_path_cancellation(self):
        # row vector (h^0, h^0) times column (h^1, h^1)^T: two equal paths
        a = M([2], [2, 2], {(0, 0): 0, (0, 1): 0})
        b = M([2, 2], [0], {(0, 0): 1, (1, 0): 1})
        assert (a @ b).is_zero()

    def test_associative(self):
        rng = random.Random(9)
        for _ in range(15):
            n1, n2, n3, n4 = (rng.randint(1, 6) for _ in range(4))
            qs = [[2 * rng.randint(0, 3) for _ in range(n)] for n in (n1, n2, n3, n4)]

            def rand_between(rq, cq):
                cells = {}
                for r in range(len(rq)):
                    for c in range(len(cq)):
                        d = rq[r] - cq[c]
                        if d >= 0 and d % 2 == 0 and rng.random() < 0.5:
                            cells[(r, c)] = d // 2
                return M(rq, cq, cells)

            a = rand_between(qs[0], qs[1])
            b = rand_between(qs[1], qs[2])
            c = rand_between(qs[2], qs[3])
            assert (a @ b) @ c == a @ (b @ c)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            M([0], [0], {}) @ M([2], [0], {})


class TestHomogeneity:
    def test_declared_qshift_checks_cells(self):
        M([2], [0], {(0, 0): 1}, qshift=0)  # (2-0-0)/2 = 1, fine
        with pytest.raises(NonHomogeneousSum):
            M([2], [0], {(0, 0): 2}, qshift=0)

    def test_qshift_for_maps(self):
        # a map of quantum degree -2 from grq 0 to grq 0 carries h^1
        M([0], [0], {(0, 0): 1}, qshift=-2)


class TestSnf:
    def test_zero_matrix(self):
        res = smith_normal_form(MonomialMatrix.zero([0, 0], [0, 0, 0]))
        assert res.diagonal == () and res.rank == 0

    def test_1x1(self):
        m = M([6], [0], {(0, 0): 3})
        res = smith_normal_form(m)
        assert res.diagonal == (3,) and res.rank == 1
        assert res.verify(m)

    def test_2x2_dependent_rows(self):
        # [[h, 1], [h^2, h]]: the two diagonal products carry equal exponent,
        # so the determinant vanishes over F2 and the rank is 1.
        m = M([2, 4], [0, 2], {(0, 0): 1, (0, 1): 0, (1, 0): 2, (1, 1): 1}, qshift=0)
        res = smith_normal_form(m)
        assert res.diagonal == (0,)
        assert res.rank == 1
        assert res.verify(m)
        assert field_rank(dict(m.items()), 2, 2) == 1

    def test_2x2_diagonal_gap(self):
        m = M([0, 4], [0, 0], {(0, 0): 0, (1, 1): 2}, qshift=0)
        res = smith_normal_form(m)
        assert res.diagonal == (0, 2)
        assert res.verify(m)

    def test_divisibility_chain_and_sorting(self):
        rng = random.Random(10)
        for _ in range(50):
            rq, cq, cells = random_homogeneous(rng, max_dim=12)
            res = smith_normal_form(M(rq, cq, cells))
            assert list(res.diagonal) == sorted(res.diagonal)

    def test_rank_nullity(self):
        rng = random.Random(11)
        for _ in range(30):
            rq, cq, cells = random_homogeneous(rng, max_dim=10)
            res = smith_normal_form(M(rq, cq, cells))
            assert res.rank <= min(len(rq), len(cq))

    def test_recomposition_and_oracle_rank(self):
        rng = random.Random(12)
        for _ in range(60):
            rq, cq, cells = random_homogeneous(rng, max_dim=14)
            m = M(rq, cq, cells)
            res = smith_normal_form(m)
            assert res.verify(m)
            assert res.rank == field_rank(cells, len(rq), len(cq))


class TestSolve:
    def test_solvable(self):
        rng = random.Random(13)
        for _ in range(30):
            rq, cq, cells = random_homogeneous(rng, max_dim=8)
            m = M(rq, cq, cells)
            # homogeneous unknown: all coordinates share one quantum degree
            qt = min(cq)
            x = {
                c: (cq[c] - qt) // 2
                for c in range(len(cq))
                if (cq[c] - qt) % 2 == 0 and rng.random() < 0.5
            }
            target = m.apply(x)
            got = solve(m, target)
            assert got is not None
            assert m.apply(got) == target

    def test_unsolvable(self):
        m = M([0], [0], {(0, 0): 2})  # h^2 x = h has no solution
        assert solve(m, {0: 1}) is None

    def test_vec_add_cancels(self):
        assert vec_add({0: 1, 1: 2}, {0: 1}) == {1: 2}
