from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btfvs.errors import DimensionMismatch
from btfvs.graph import Arc, BipartiteTournament, MixedMultigraph, new_tournament

from conftest import a, b, tournament


def orient_matrices(max_side=5):
    return st.integers(0, max_side).flatmap(
        lambda m: st.integers(0, max_side).flatmap(
            lambda n: st.lists(
                st.lists(st.booleans(), min_size=n, max_size=n),
                min_size=m, max_size=m)))


class TestConstruction:
    def test_single_arc(self):
        T = new_tournament(1, 1, [[True]])
        assert T.arc(a(0), b(0)) is Arc.U_TO_V

    def test_square(self):
        T = new_tournament(2, 2, [[True, False], [False, True]])
        assert T.has_arc(a(0), b(0))
        assert T.has_arc(b(0), a(1))
        assert T.has_arc(a(1), b(1))
        assert T.has_arc(b(1), a(0))

    def test_ragged_rejected(self):
        with pytest.raises(DimensionMismatch):
            new_tournament(2, 2, [[True], [False, True]])

    def test_row_count_rejected(self):
        with pytest.raises(DimensionMismatch):
            new_tournament(3, 2, [[True, False], [False, True]])

    def test_empty_sides_legal(self):
        T = new_tournament(0, 3, [])
        assert T.num_vertices == 3
        T2 = new_tournament(2, 0, [[], []])
        assert T2.num_vertices == 2

    def test_immutable(self, square_2x2):
        with pytest.raises(AttributeError):
            square_2x2.m = 5

    def test_bad_labels(self):
        with pytest.raises(DimensionMismatch):
            new_tournament(1, 1, [[True]], labels=["x"])
        with pytest.raises(DimensionMismatch):
            new_tournament(1, 1, [[True]], labels=["x", "x"])


class TestArcs:
    def test_same_side_no_arc(self, square_2x2):
        assert square_2x2.arc(a(0), a(1)) is Arc.NO_ARC

    def test_reverse_direction(self, square_2x2):
        assert square_2x2.arc(b(1), a(0)) is Arc.U_TO_V
        assert square_2x2.arc(a(0), b(1)) is Arc.V_TO_U

    def test_exactly_one_arc_per_cross_pair(self):
        T = tournament([[True, False, True], [False, False, True]])
        for u in T.a_vertices():
            for v in T.b_vertices():
                assert (T.arc(u, v) is Arc.U_TO_V) != (T.arc(v, u) is Arc.U_TO_V)

    def test_neighbors(self, square_2x2):
        assert square_2x2.out_neighbors(a(0)) == {b(0)}
        assert square_2x2.in_neighbors(a(0)) == {b(1)}
        assert square_2x2.out_neighbors(a(0), within={b(1)}) == frozenset()


class TestInduced:
    def test_remove_breaks_square(self, square_2x2):
        sub = square_2x2.remove({a(0)})
        assert sub.tournament.num_vertices == 3
        from btfvs.structure import is_acyclic
        assert is_acyclic(sub.tournament)

    def test_identity(self, square_2x2):
        sub = square_2x2.induced(square_2x2.vertices())
        assert sub.tournament == square_2x2
        assert all(sub.to_host[v] == v for v in sub.tournament.vertices())

    def test_pair(self, square_2x2):
        sub = square_2x2.induced({a(0), b(0)})
        assert sub.tournament.num_vertices == 2
        assert sub.tournament.has_arc(a(0), b(0))

    def test_labels_follow(self):
        T = new_tournament(2, 1, [[True], [False]], labels=["x", "y", "z"])
        sub = T.remove({a(0)})
        assert sub.tournament.labels == ("y", "z")

    @given(orient_matrices(4), st.data())
    @settings(max_examples=60, deadline=None)
    def test_remove_composes(self, orient, data):
        m = len(orient)
        n = len(orient[0]) if orient else 0
        T = BipartiteTournament(m, n, orient)
        vs = T.vertices()
        s1 = set(data.draw(st.lists(st.sampled_from(vs), max_size=3, unique=True))) if vs else set()
        rest = [v for v in vs if v not in s1]
        s2_host = set(data.draw(st.lists(st.sampled_from(rest), max_size=3, unique=True))) if rest else set()
        once = T.remove(s1 | s2_host).tournament
        step1 = T.remove(s1)
        s2_new = {step1.from_host[v] for v in s2_host}
        twice = step1.tournament.remove(s2_new).tournament
        # identical up to relabeling: compare via the orientation matrices
        assert once.orient == twice.orient


class TestTwins:
    def test_identical_rows(self):
        T = tournament([[True], [True]])
        classes = T.false_twin_classes()
        assert frozenset({a(0), a(1)}) in classes
        assert frozenset({b(0)}) in classes

    def test_square_all_singletons(self, square_2x2):
        assert all(len(c) == 1 for c in square_2x2.false_twin_classes())

    def test_matches_pairwise_bruteforce(self):
        from btfvs.generators import GenKind, GenSpec, generate
        T = generate(GenSpec(3, 2, GenKind.UNIFORM_RANDOM, seed=99))
        classes = T.false_twin_classes()
        for u in T.vertices():
            for v in T.vertices():
                same = any(u in c and v in c for c in classes)
                expected = (u.side == v.side
                            and T.out_neighbors(u) == T.out_neighbors(v)
                            and T.in_neighbors(u) == T.in_neighbors(v))
                assert same == expected

    @given(orient_matrices(4))
    @settings(max_examples=60, deadline=None)
    def test_is_partition(self, orient):
        m = len(orient)
        n = len(orient[0]) if orient else 0
        T = BipartiteTournament(m, n, orient)
        classes = T.false_twin_classes()
        union = set()
        total = 0
        for c in classes:
            union |= c
            total += len(c)
        assert union == set(T.vertices())
        assert total == T.num_vertices

    @given(orient_matrices(4))
    @settings(max_examples=40, deadline=None)
    def test_twins_never_share_a_square(self, orient):
        from btfvs.structure import all_squares
        m = len(orient)
        n = len(orient[0]) if orient else 0
        T = BipartiteTournament(m, n, orient)
        classes = T.false_twin_classes()
        cls_of = {v: i for i, c in enumerate(classes) for v in c}
        for sq, _ in all_squares(T):
            ids = [cls_of[v] for v in sq.vertices()]
            assert len(set(ids)) == 4


class TestMixedMultigraph:
    def test_cross_part_edges_only(self, square_2x2, chain_2x2):
        MixedMultigraph([square_2x2, chain_2x2],
                        [((0, a(0)), (1, b(1)))])
        with pytest.raises(ValueError):
            MixedMultigraph([square_2x2, chain_2x2],
                            [((0, a(0)), (0, b(1)))])

    def test_degree_and_matching(self, square_2x2, chain_2x2):
        g = MixedMultigraph(
            [square_2x2, chain_2x2],
            [((0, a(0)), (1, b(1))), ((0, b(0)), (1, a(0)))])
        assert g.undirected_degree(0) == 2
        assert g.is_undirected_matching()
        g2 = MixedMultigraph(
            [square_2x2, chain_2x2],
            [((0, a(0)), (1, b(1))), ((0, a(0)), (1, a(0)))])
        assert not g2.is_undirected_matching()
