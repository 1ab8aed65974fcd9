from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tigerhunt.exact import det
from tigerhunt.exceptions import GuardExceeded, InputError
from tigerhunt.singularity import (
    SMOOTH,
    ChainSingularity,
    StarSingularity,
    Verdict,
    bogomolov_tuples,
    boundary_coefficient_chain,
    chain_index,
    chain_inverse_solve,
    chain_matrix,
    classify_reduced_germ,
    different_coefficients,
    discrepancies,
    enumerate_small_coefficient,
    enumerate_small_index,
    germ_coefficients,
    graph_discrepancies,
    hj_chain,
    parse_graph,
    spectral_value,
    star_coefficient,
    star_log_discrepancy,
    suspend,
)

chains = st.lists(st.integers(2, 6), min_size=1, max_size=7).map(tuple)


class TestChainSingularity:
    def test_parse_expands_a_tokens(self):
        chain = ChainSingularity.parse("(2,2,3,3,A5)")
        assert chain.weights == (2, 2, 3, 3, 2, 2, 2, 2, 2)
        assert chain.marked == (False, False)

    def test_parse_marker(self):
        assert ChainSingularity.parse("3,2,2@L").marked == (True, False)
        assert ChainSingularity.parse("3,2,2@r").marked == (False, True)

    @pytest.mark.parametrize("text", ["", "2,,3", "2,x", "2@Q"])
    def test_parse_errors(self, text):
        with pytest.raises(InputError):
            ChainSingularity.parse(text)

    def test_weights_at_least_two(self):
        with pytest.raises(InputError):
            ChainSingularity((2, 1))

    def test_canonical_moves_mark_left(self):
        chain = ChainSingularity((2, 3), (False, True)).canonical()
        assert chain.weights == (3, 2)
        assert chain.marked == (True, False)

    def test_str(self):
        assert str(ChainSingularity((3, 2, 2), (True, False))) == "3,2,2@L"
        assert str(ChainSingularity((2, 5))) == "2,5"

    def test_matrix(self):
        assert chain_matrix((2, 5)).rows == ((-2, 1), (1, -5))


class TestIndex:
    @pytest.mark.parametrize(
        "text, index",
        [
            ("2,5,2,2,2,2", 37),
            ("2,2,4,2,2,2,2", 38),
            ("2,7,2,2,2,2", 57),
            ("2,2,3,2", 11),
            ("A5,3", 13),
            ("2,2,3,3,A5", 73),
            ("2,2,2,3,A5", 34),
        ],
    )
    def test_chain_index(self, text, index):
        assert chain_index(ChainSingularity.parse(text)) == index

    @given(chains)
    def test_index_is_determinant(self, weights):
        assert chain_index(ChainSingularity(weights)) == abs(det(chain_matrix(weights)))

    @given(chains)
    def test_index_is_symmetric(self, weights):
        assert chain_index(ChainSingularity(weights)) == chain_index(
            ChainSingularity(weights[::-1])
        )

    @pytest.mark.parametrize(
        "r, q, weights", [(5, 2, (3, 2)), (7, 3, (3, 2, 2)), (37, 1, (37,))]
    )
    def test_hj_chain(self, r, q, weights):
        assert hj_chain(r, q).weights == weights

    def test_hj_chain_needs_coprime(self):
        with pytest.raises(InputError):
            hj_chain(6, 4)


class TestDiscrepancies:
    def test_du_val(self):
        data = discrepancies(ChainSingularity((2, 2, 2)))
        assert data.e == (0, 0, 0)
        assert data.index == 4

    def test_banana_point(self):
        data = discrepancies(ChainSingularity((2, 5, 2, 2, 2, 2)))
        assert data.index == 37
        assert data.coefficient == Fraction(30, 37)
        assert data.e[0] == Fraction(15, 37)

    def test_two_curves(self):
        assert discrepancies(ChainSingularity((2, 3))).e == (Fraction(1, 5), Fraction(2, 5))

    def test_smooth_has_none(self):
        with pytest.raises(InputError):
            discrepancies(SMOOTH)

    @given(chains)
    def test_closed_form_matches_solve(self, weights):
        edges = [(i, i + 1) for i in range(len(weights) - 1)]
        assert discrepancies(ChainSingularity(weights)).e == graph_discrepancies(weights, edges)

    @given(chains)
    def test_coefficients_in_unit_interval(self, weights):
        assert all(0 <= e < 1 for e in discrepancies(ChainSingularity(weights)).e)

    @given(chains, st.integers(0, 6), st.fractions(0, 5, max_denominator=9))
    def test_inverse_solve(self, weights, position, value):
        position = position % len(weights)
        x = chain_inverse_solve(weights, {position: value})
        rhs = [Fraction(0)] * len(weights)
        rhs[position] = value
        assert chain_matrix(weights).mul_vector(x) == tuple(-v for v in rhs)


class TestSpectralValue:
    def test_needs_mark(self):
        with pytest.raises(InputError):
            spectral_value(ChainSingularity((2, 3)))

    def test_values(self):
        assert spectral_value(ChainSingularity.parse("2,3@L")) == 1
        assert spectral_value(ChainSingularity.parse("3,2,2@L")) == 3
        assert spectral_value(ChainSingularity.parse("2,2,3@R")) == 3

    @given(chains)
    def test_invariant_under_suspension(self, weights):
        chain = ChainSingularity(weights, (True, False))
        assert spectral_value(suspend(chain)) == spectral_value(chain)

    def test_suspend(self):
        assert suspend(ChainSingularity.parse("3@L")).weights == (2, 3)

    def test_boundary_coefficient(self):
        chain = ChainSingularity.parse("3,2,2@L")
        assert boundary_coefficient_chain(chain, Fraction(60, 67)) == Fraction(381, 469)
        assert boundary_coefficient_chain(chain, 1) == Fraction(6, 7)
        assert boundary_coefficient_chain(chain, 0) == discrepancies(chain).e[0]

    def test_germ_coefficients_agree(self):
        chain = ChainSingularity.parse("3,2,2@L")
        edges = [(0, 1), (1, 2)]
        e = germ_coefficients(chain.weights, edges, {0: Fraction(60, 67)})
        assert e[0] == Fraction(381, 469)


class TestStar:
    def test_parse(self):
        star = StarSingularity.parse("star(2; 2 | 2 | 3)")
        assert star.center == 2
        assert [b.weights for b in star.branches] == [(2,), (2,), (3,)]
        assert parse_graph(str(star)) == star

    def test_not_log_terminal(self):
        with pytest.raises(InputError):
            StarSingularity.parse("star(2; 2 | 3 | 6)")

    def test_d4(self):
        data = discrepancies(StarSingularity.parse("star(2; 2 | 2 | 2)"))
        assert data.det_abs == 4
        assert data.index is None
        assert data.coefficient == 0

    def test_coefficient_and_closed_form(self):
        star = StarSingularity.parse("star(2; 2 | 2 | 3)")
        data = discrepancies(star)
        assert data.det_abs == 8
        assert data.e[0] == Fraction(1, 2)
        assert star_coefficient(star) == Fraction(1, 2)
        assert star_log_discrepancy(star) == 1 - data.e[0]

    def test_closed_form_needs_two_short_branches(self):
        with pytest.raises(InputError):
            star_log_discrepancy(StarSingularity.parse("star(2; 2 | 3 | 3)"))

    @pytest.mark.parametrize(
        "text",
        [
            "star(2; 2 | 2 | 2,2)",
            "star(3; 2 | 3 | 2,2)",
            "star(2; 2 | 3 | 4)",
            "star(4; 2 | 2 | 5,2)",
        ],
    )
    def test_matches_solve(self, text):
        star = StarSingularity.parse(text)
        assert discrepancies(star).e == graph_discrepancies(*star.vertices())

    @pytest.mark.parametrize("third", ["3", "5,2", "2,4", "3,3"])
    def test_closed_form_matches_solve(self, third):
        star = StarSingularity.parse("star(3; 2 | 2 | {})".format(third))
        assert star_log_discrepancy(star) == 1 - graph_discrepancies(*star.vertices())[0]


def _chains_of_index_up_to(n):
    for r in range(2, n + 1):
        for q in range(1, r):
            if gcd(r, q) == 1:
                yield hj_chain(r, q)


class TestMonotonicity:
    @staticmethod
    def _grown(weights):
        for i in range(len(weights)):
            yield weights[:i] + (weights[i] + 1,) + weights[i + 1:], 0
        for w in range(2, 6):
            yield weights + (w,), 0
            yield (w,) + weights, 1

    @pytest.mark.slow
    def test_raising_or_appending_increases(self):
        for length in range(1, 7):
            for weights in product(range(2, 6), repeat=length):
                r = chain_index(ChainSingularity(weights))
                e = discrepancies(ChainSingularity(weights)).e
                for grown, offset in self._grown(weights):
                    chain = ChainSingularity(grown)
                    assert chain_index(chain) > r
                    if chain.is_du_val:
                        continue
                    after = discrepancies(chain).e[offset:offset + length]
                    assert all(x > y for x, y in zip(after, e)), (weights, grown)


class TestBoundaryCoefficientSweep:
    @pytest.mark.slow
    @pytest.mark.parametrize(
        "lam", [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)]
    )
    def test_matches_log_pullback(self, lam):
        for chain in _chains_of_index_up_to(100):
            marked = ChainSingularity(chain.weights, (True, False))
            edges = [(i, i + 1) for i in range(chain.length - 1)]
            solved = germ_coefficients(chain.weights, edges, {0: lam})[0]
            value = boundary_coefficient_chain(marked, lam)
            assert value == solved, chain
            if value < lam:
                k = spectral_value(marked)
                assert lam > Fraction(k, k + 1), chain


class TestStarSweep:
    @pytest.mark.slow
    @pytest.mark.parametrize("center", [2, 3, 4])
    def test_center_is_maximal_and_k_over_k_plus_one(self, center):
        branches = list(_chains_of_index_up_to(6))
        checked = 0
        for triple in combinations_with_replacement(branches, 3):
            if sum(Fraction(1, b.index) for b in triple) <= 1:
                continue
            star = StarSingularity(center, triple)
            value = star_coefficient(star)
            solved = graph_discrepancies(*star.vertices())
            assert value == solved[0] == max(solved), star
            assert (1 - value).numerator == 1, star
            checked += 1
        assert checked > 0


class TestClassifyReducedGerm:
    def test_smooth_point(self):
        assert classify_reduced_germ(SMOOTH, []) is Verdict.KLT
        assert classify_reduced_germ(SMOOTH, [{0: 1}, {0: 1}]) is Verdict.LT
        assert classify_reduced_germ(SMOOTH, [{0: 1}] * 3) is Verdict.NOT_LC

    def test_chain_end(self):
        chain = ChainSingularity((2, 3))
        assert classify_reduced_germ(chain, [{0: 1}]) is Verdict.PLT
        assert classify_reduced_germ(chain, [{0: 1}, {1: 1}]) is Verdict.LC
        assert classify_reduced_germ(chain, [{0: 2}]) is Verdict.NOT_LC

    def test_chain_middle(self):
        assert classify_reduced_germ(ChainSingularity((2, 3, 2)), [{1: 1}]) is Verdict.LC
        assert classify_reduced_germ(ChainSingularity((2, 3, 3)), [{1: 1}]) is Verdict.NOT_LC

    def test_star(self):
        star = StarSingularity.parse("star(2; 2 | 2 | 3)")
        assert classify_reduced_germ(star, [{3: 1}]) is Verdict.LC
        assert classify_reduced_germ(star, [{0: 1}]) is Verdict.NOT_LC


class TestEnumeration:
    def test_small_index(self):
        found = {str(c) for c in enumerate_small_index(7)}
        assert found == {"3", "4", "5", "3,2", "6", "7", "4,2", "3,2,2"}

    def test_small_index_guard(self):
        with pytest.raises(GuardExceeded):
            enumerate_small_index(31)

    def test_small_coefficient_bound(self):
        with pytest.raises(InputError):
            enumerate_small_coefficient(Fraction(2, 3))

    @pytest.mark.slow
    def test_small_coefficient_members(self):
        bound = Fraction(3, 5)
        families = enumerate_small_coefficient(bound, max_index=30)
        members = [m for family in families for m in family.members]
        assert all(discrepancies(m).coefficient < bound for m in members)
        assert not any(m.is_du_val for m in members)
        assert ChainSingularity((3,)) in members
        assert ChainSingularity((3, 2, 2)) in members
        assert any(family.is_unbounded for family in families)
        assert len(members) == len({str(m) for m in members})

    @pytest.mark.slow
    def test_small_coefficient_list(self):
        families = enumerate_small_coefficient(Fraction(3, 5), max_index=30)
        assert {(f.template, f.j_min, f.j_max) for f in families} == {
            ("3,A_j", 0, None),
            ("3,A_j,3", 0, None),
            ("star(2; 2 | 2 | A_j,3)", 0, None),
            ("2,3,A_j", 2, 4),
            ("4", 0, 0),
            ("4,2", 0, 0),
            ("2,3,2", 0, 0),
        }
        assert len(families) == 7

    def test_star_family_is_unbounded_past_the_cap(self):
        families = enumerate_small_coefficient(Fraction(3, 5), max_index=12)
        (star,) = [f for f in families if f.template.startswith("star")]
        assert star.is_unbounded
        assert star.coefficient == "1/2"

    def test_small_coefficient_below_one_third(self):
        assert enumerate_small_coefficient(Fraction(1, 3), max_index=50) == []

    def test_small_coefficient_below_two_fifths(self):
        (family,) = enumerate_small_coefficient(Fraction(2, 5), max_index=50)
        assert family.is_sporadic
        assert family.members == (ChainSingularity((3,)),)
        assert family.coefficient == "1/3"

    def test_bogomolov_tuples(self):
        families = bogomolov_tuples()
        assert [(f.prefix, f.low, f.high) for f in families] == [
            ((3, 3, 3), 3, None),
            ((3, 3, 4), 4, 12),
            ((3, 3, 5), 5, 7),
            ((3, 3, 6), 6, 6),
            ((3, 4, 4), 4, 6),
            ((4, 4, 4), 4, 4),
        ]
        assert (3, 3, 4, 12) in families[1]
        assert (3, 3, 4, 13) not in families[1]
        assert str(families[0]) == "(3,3,3,m) 3<=m<=∞"

    def test_different(self):
        assert different_coefficients([2, 3]) == [Fraction(1, 2), Fraction(2, 3)]
        with pytest.raises(InputError):
            different_coefficients([0])
