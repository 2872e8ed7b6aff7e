"""Dense oracle: classic DBM operations and their canonical-form theory.

The fixture matrices follow the worked three-variable example used across
the suite: x <= 1/2, -y <= 3/2, y + z <= 1 (signed codes: x+=0, x-=1,
y+=2, y-=3, z+=4, z-=5).
"""

import random
from fractions import Fraction

import pytest

from genutil import random_coherent_matrix, random_dense_matrix, random_weakly_closed
from weakoct import dense, sparse
from weakoct.core import EMPTY, INF, IntegerModeError, bar
from weakoct.dense import DenseDbm, PointSet

F = Fraction


@pytest.fixture
def matrix_a() -> DenseDbm:
    """x+ - x- <= 1, y- - y+ <= 3, y+ - z- <= 1; no diagonal, not coherent."""
    return DenseDbm.from_cells(3, {(0, 1): F(1), (3, 2): F(3), (2, 5): F(1)})


@pytest.fixture
def matrix_a_coherent(matrix_a) -> DenseDbm:
    return dense.make_coherent(matrix_a)


def env(**kw):
    return {i: F(v) for i, v in enumerate(kw.values())}


class TestMember:
    def test_origin_satisfies_example(self, matrix_a):
        assert dense.member({0: F(0), 1: F(0), 2: F(0)}, matrix_a)

    def test_violating_point(self, matrix_a):
        assert not dense.member({0: F(1), 1: F(0), 2: F(0)}, matrix_a)

    def test_top_accepts_anything(self):
        top = DenseDbm.top(2)
        assert dense.member({0: F(17), 1: F(-9, 2)}, top)


class TestAlphaPoints:
    def test_singleton(self):
        got = dense.alpha_points(PointSet(1, ({0: F(0)},)))
        assert got.get(0, 1) == 0 and got.get(1, 0) == 0
        assert got.get(0, 0) == 0 and got.get(1, 1) == 0

    def test_two_points(self):
        got = dense.alpha_points(PointSet(1, ({0: F(0)}, {0: F(1)})))
        assert got.get(0, 1) == 2  # sup of 2x
        assert got.get(1, 0) == 0  # sup of -2x

    def test_galois_soundness(self):
        rnd = random.Random(5)
        for _ in range(50):
            n = rnd.randint(1, 3)
            pts = tuple(
                {i: F(rnd.randint(-5, 5), rnd.choice((1, 2))) for i in range(n)}
                for _ in range(rnd.randint(1, 6))
            )
            abstraction = dense.alpha_points(PointSet(n, pts))
            assert all(dense.member(p, abstraction) for p in pts)

    def test_alpha_is_pointwise_minimal(self):
        """Lowering any finite cell excludes a witness point of the set."""
        rnd = random.Random(6)
        for _ in range(30):
            n = rnd.randint(1, 3)
            pts = tuple(
                {i: F(rnd.randint(-4, 4)) for i in range(n)}
                for _ in range(rnd.randint(1, 5))
            )
            ps = PointSet(n, pts)
            abstraction = dense.alpha_points(ps)
            for u, v, b in abstraction.finite_items():
                if u == v:
                    continue
                witnesses = [
                    p
                    for p in pts
                    if dense.eval_signed(p, u) - dense.eval_signed(p, v) == b
                ]
                assert witnesses, f"cell ({u},{v})={b} is not attained"

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            dense.alpha_points(PointSet(1, ()))


class TestClose:
    def test_example_adds_derived_cell_and_diagonal(self, matrix_a):
        closed = dense.close(matrix_a)
        assert closed.get(3, 5) == 4
        assert all(closed.get(v, v) == 0 for v in range(6))
        # nothing else appears
        extra = {
            (u, v)
            for u, v, _ in closed.finite_items()
            if u != v and matrix_a.get(u, v) == INF
        }
        assert extra == {(3, 5)}

    def test_coherent_example(self, matrix_a_coherent):
        closed = dense.close(matrix_a_coherent)
        assert closed.get(4, 2) == 4
        assert closed.get(4, 5) == 5

    def test_negative_cycle_is_empty(self):
        m = DenseDbm.from_cells(1, {(0, 1): F(0), (1, 0): F(-1)})
        assert dense.close(m) is EMPTY

    def test_idempotent(self):
        rnd = random.Random(7)
        for _ in range(40):
            closed = dense.close(random_dense_matrix(rnd, rnd.randint(1, 3)))
            if closed is EMPTY:
                continue
            assert dense.close(closed) == closed
            assert dense.is_closed(closed)


class TestMakeCoherent:
    def test_example_adds_mirror_cell(self, matrix_a):
        got = dense.make_coherent(matrix_a)
        assert got.get(4, 3) == 1
        assert dense.is_coherent(got)

    def test_idempotent_on_coherent(self, matrix_a_coherent):
        assert dense.make_coherent(matrix_a_coherent) == matrix_a_coherent

    def test_all_inf_unchanged(self):
        m = DenseDbm(2)
        assert dense.make_coherent(m) == m


class TestStrengthen:
    def test_example_new_entries(self, matrix_a_coherent):
        s = dense.strengthen(dense.close(matrix_a_coherent))
        assert s.get(0, 2) == 2 and s.get(3, 1) == 2
        assert s.get(0, 5) == 3 and s.get(4, 1) == 3

    def test_no_unary_cells_means_identity(self):
        m = DenseDbm.from_cells(2, {(0, 2): F(1), (3, 1): F(1)}, zero_diagonal=True)
        assert dense.strengthen(m) == m

    def test_idempotent(self):
        rnd = random.Random(8)
        for _ in range(60):
            m = random_dense_matrix(rnd, rnd.randint(1, 3))
            s = dense.strengthen(m)
            assert dense.strengthen(s) == s


class TestStrongClose:
    def test_full_example(self, matrix_a_coherent):
        s = dense.strong_close(matrix_a_coherent)
        expected = {
            (0, 1): F(1), (3, 2): F(3), (2, 5): F(1), (4, 3): F(1),
            (3, 5): F(4), (4, 2): F(4), (4, 5): F(5),
            (0, 2): F(2), (3, 1): F(2), (0, 5): F(3), (4, 1): F(3),
        }
        got = {(u, v): b for u, v, b in s.finite_items() if u != v}
        assert got == expected
        assert dense.is_strongly_closed(s)

    def test_fixpoint_on_strongly_closed(self, matrix_a_coherent):
        s = dense.strong_close(matrix_a_coherent)
        assert dense.strong_close(s) == s

    def test_half_bound_contradiction_is_empty(self):
        m = DenseDbm.from_cells(1, {(0, 1): F(-1), (1, 0): F(0)})
        assert dense.strong_close(m) is EMPTY


class TestPredicates:
    def test_closed_coherent_but_not_strengthened(self, matrix_a_coherent):
        closed = dense.close(matrix_a_coherent)
        assert dense.is_closed(closed)
        assert not dense.is_strongly_closed(closed)
        assert dense.is_weakly_closed(closed)

    def test_strong_closure_satisfies_all(self, matrix_a_coherent):
        s = dense.strong_close(matrix_a_coherent)
        assert dense.is_closed(s) and dense.is_coherent(s)
        assert dense.is_strongly_closed(s) and dense.is_weakly_closed(s)

    def test_missing_diagonal_fails_all(self, matrix_a):
        assert not dense.is_closed(matrix_a)
        assert not dense.is_strongly_closed(matrix_a)
        assert not dense.is_weakly_closed(matrix_a)
        # coherence alone does not need the diagonal
        assert not dense.is_coherent(matrix_a)


class TestWeakClosednessFormsAgree:
    def test_on_example(self, matrix_a_coherent):
        assert dense.weak_closedness_forms_agree(dense.close(matrix_a_coherent))

    def test_trivial_top(self):
        assert dense.weak_closedness_forms_agree(DenseDbm.top(2))

    def test_random_sample(self):
        rnd = random.Random(9)
        for _ in range(300):
            m = random_dense_matrix(rnd, rnd.randint(1, 3), zero_diagonal=rnd.random() < 0.8)
            assert dense.weak_closedness_forms_agree(m)


class TestOrderAndJoin:
    def test_reflexive(self, matrix_a):
        assert dense.leq_dense(matrix_a, matrix_a)

    def test_closure_only_lowers(self, matrix_a_coherent):
        closed = dense.close(matrix_a_coherent)
        assert dense.leq_dense(closed, matrix_a_coherent)
        assert not dense.leq_dense(matrix_a_coherent, closed)

    def test_join_idempotent(self, matrix_a):
        assert dense.join_dense(matrix_a, matrix_a) == matrix_a

    def test_join_with_top(self, matrix_a):
        top = DenseDbm(3)
        assert dense.join_dense(matrix_a, top) == top

    def test_strengthened_join_reveals_shared_relation(self):
        """2x <= 1, 2y <= 0 joined with 2x <= 0, 2y <= 1: both strengthenings
        entail x + y <= 1/2, so the join of the strengthenings does too."""
        a = dense.strong_close(
            DenseDbm.from_cells(2, {(0, 1): F(1), (2, 3): F(0)}, zero_diagonal=True)
        )
        b = dense.strong_close(
            DenseDbm.from_cells(2, {(0, 1): F(0), (2, 3): F(1)}, zero_diagonal=True)
        )
        joined = dense.join_dense(a, b)
        assert joined.get(0, 3) == F(1, 2)
        assert joined.get(2, 1) == F(1, 2)


class TestForget:
    def test_forget_z_on_example_closure(self, matrix_a_coherent):
        closed = dense.close(matrix_a_coherent)
        got = dense.forget_oct(2, closed)
        kept = {(u, v): b for u, v, b in got.finite_items() if u != v}
        assert kept == {(0, 1): F(1), (3, 2): F(3)}
        assert all(got.get(u, u) == 0 for u in range(6))

    def test_idempotent(self, matrix_a_coherent):
        once = dense.forget_oct(0, matrix_a_coherent)
        assert dense.forget_oct(0, once) == once

    def test_unconstrained_variable(self):
        m = DenseDbm.from_cells(2, {(0, 1): F(2)})
        got = dense.forget_oct(1, m)
        assert got.get(0, 1) == 2
        assert got.get(2, 2) == 0 and got.get(3, 3) == 0


class TestAssume:
    def test_assume_on_top(self):
        got = dense.assume_oct(0, 2, F(2), DenseDbm.top(2))
        cells = {(u, v): b for u, v, b in got.finite_items() if u != v}
        assert cells == {(0, 2): F(2), (3, 1): F(2)}

    def test_contradiction_is_empty(self):
        m = DenseDbm.top(2)
        m.set(2, 0, F(-3))  # y - x <= -3
        assert dense.assume_oct(0, 2, F(2), m) is EMPTY

    def test_entailed_constraint_is_identity(self, matrix_a_coherent):
        s = dense.strong_close(matrix_a_coherent)
        # (z+, y+) = 4 in the closure; assuming z - y <= 9 changes nothing
        assert dense.assume_pot(4, 2, F(9), s) == s
        assert dense.assume_oct(4, 2, F(9), s) == s


class TestTightening:
    def test_odd_unary_cell_drops(self):
        m = DenseDbm.from_cells(1, {(0, 1): F(3)}, zero_diagonal=True)
        assert dense.tighten(m).get(0, 1) == 2

    def test_relational_cell_untouched(self):
        m = DenseDbm.from_cells(2, {(0, 2): F(3)}, zero_diagonal=True)
        assert dense.tighten(m).get(0, 2) == 3

    def test_non_integral_rejected(self):
        m = DenseDbm.from_cells(1, {(0, 1): F(1, 2)})
        with pytest.raises(IntegerModeError):
            dense.tighten(m)

    def test_tight_close_detects_integer_emptiness(self):
        # x <= 1/2 and x >= 1: rationally empty via the negative cycle
        m = DenseDbm.from_cells(1, {(0, 1): F(1), (1, 0): F(-2)}, zero_diagonal=True)
        assert dense.tight_close(m) is EMPTY

    def test_tight_close_example(self):
        m = DenseDbm.from_cells(1, {(0, 1): F(1), (1, 0): F(0)}, zero_diagonal=True)
        got = dense.tight_close(m)
        assert got.get(0, 1) == 0 and got.get(1, 0) == 0
        assert dense.is_tightly_closed(got)

    def test_is_tightly_closed_spots_odd_unary(self):
        m = dense.strong_close(
            DenseDbm.from_cells(1, {(0, 1): F(3), (1, 0): F(1)}, zero_diagonal=True)
        )
        assert dense.is_strongly_closed(m)
        assert not dense.is_tightly_closed(m)


class TestConcreteOperations:
    def test_assume_filters(self):
        s = PointSet(2, ({0: F(1), 1: F(0)}, {0: F(0), 1: F(1)}))
        got = dense.concrete_assume(0, 2, F(0), s)  # x - y <= 0
        assert got.points == ({0: F(0), 1: F(1)},)

    def test_forget_substitutes(self):
        s = PointSet(2, ({0: F(5), 1: F(1)},))
        got = dense.concrete_forget(0, s, [F(0), F(2)])
        assert got.points == ({0: F(0), 1: F(1)}, {0: F(2), 1: F(1)})

    def test_soundness_spot_check(self):
        rnd = random.Random(10)
        for _ in range(30):
            n = rnd.randint(1, 3)
            pts = tuple(
                {i: F(rnd.randint(-3, 3)) for i in range(n)}
                for _ in range(rnd.randint(1, 5))
            )
            u = rnd.randrange(2 * n)
            v = rnd.randrange(2 * n)
            if u == v:
                continue
            c = F(rnd.randint(-2, 4))
            filtered = dense.concrete_assume(u, v, c, PointSet(n, pts))
            if not filtered.points:
                continue
            abstract = dense.assume_pot(u, v, c, dense.alpha_points(PointSet(n, pts)))
            assert dense.leq_dense(dense.alpha_points(filtered), abstract) or all(
                dense.member(p, abstract) for p in filtered.points
            )


class TestCanonicityTheory:
    def test_strongly_closed_iff_strong_close_fixpoint(self):
        rnd = random.Random(11)
        checked_true = checked_false = 0
        for _ in range(150):
            m = random_coherent_matrix(rnd, rnd.randint(1, 3))
            s = dense.strong_close(m)
            if dense.is_strongly_closed(m):
                assert s == m
                checked_true += 1
            else:
                assert s is EMPTY or s != m
                checked_false += 1
            if s is not EMPTY:
                assert dense.is_strongly_closed(s)
        assert checked_false  # the sample exercised both branches
        rnd2 = random.Random(12)
        for _ in range(50):
            w = random_weakly_closed(rnd2, rnd2.randint(1, 3))
            s = sparse.strengthen_export(w)
            assert dense.is_strongly_closed(s)
            assert dense.strong_close(s) == s

    def test_strong_close_equals_strengthen_of_close(self):
        rnd = random.Random(13)
        for _ in range(120):
            m = random_coherent_matrix(rnd, rnd.randint(1, 3))
            closed = dense.close(m)
            s = dense.strong_close(m)
            if closed is EMPTY:
                assert s is EMPTY
            elif s is not EMPTY:
                assert s == dense.strengthen(closed)

    def test_order_monotone_on_membership(self):
        rnd = random.Random(14)
        for _ in range(60):
            n = rnd.randint(1, 3)
            a = random_dense_matrix(rnd, n, density=0.4)
            b = dense.join_dense(a, random_dense_matrix(rnd, n, density=0.3))
            assert dense.leq_dense(a, b)
            for _ in range(10):
                p = {i: F(rnd.randint(-6, 6), rnd.choice((1, 2))) for i in range(n)}
                if dense.member(p, a):
                    assert dense.member(p, b)
