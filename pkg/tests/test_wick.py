# tests/test_wick.py
from fractions import Fraction
from math import factorial
import pytest
from sympy import I, Rational
from src.models.errors import CapExceededError
from src.wick.scalar import ExactScalar, as_exact
from src.wick.expansion import (
    WickExpansion, WickTerm, c_coefficient, enumerate_pairings, expand_all,
    pairing_count, timeordered_expansion, verify_coefficient_identity
)


class TestPairingCount:

    def test_known_coefficients(self):
        assert pairing_count(3, 1) == 3
        assert pairing_count(4, 1) == 6
        assert pairing_count(4, 2) == 3

    @pytest.mark.parametrize("m", range(0, 11))
    def test_closed_form(self, m):
        for r in range(m // 2 + 1):
            expected = factorial(m) // (factorial(r) * factorial(m - 2 * r) * 2 ** r)
            assert pairing_count(m, r) == expected

    def test_out_of_range_strata_are_empty(self):
        assert pairing_count(3, 2) == 0
        assert pairing_count(3, -1) == 0

    def test_negative_field_count(self):
        with pytest.raises(ValueError):
            pairing_count(-1, 0)


class TestEnumeratePairings:

    @pytest.mark.parametrize("m,r", [(2, 1), (3, 1), (4, 1), (4, 2), (6, 2), (6, 3), (8, 4)])
    def test_count_matches_closed_form(self, m, r):
        terms = enumerate_pairings(m, r)
        assert len(terms) == pairing_count(m, r)

    def test_full_contractions_of_four_fields(self):
        terms = enumerate_pairings(4, 2)
        assert {term.pair_set for term in terms} == {
            frozenset({(1, 2), (3, 4)}),
            frozenset({(1, 3), (2, 4)}),
            frozenset({(1, 4), (2, 3)}),
        }
        assert all(term.unpaired == () for term in terms)

    def test_every_index_used_once(self):
        for term in enumerate_pairings(7, 2):
            assert sorted(term.indices) == list(range(1, 8))

    def test_terms_are_distinct(self):
        terms = enumerate_pairings(6, 2)
        assert len({(term.pair_set, term.unpaired) for term in terms}) == len(terms)

    def test_cap_exceeded(self):
        with pytest.raises(CapExceededError) as error:
            enumerate_pairings(17, 1, cap=16)
        assert error.value.value == 17
        assert error.value.cap == 16

    def test_too_many_pairs(self):
        with pytest.raises(ValueError):
            enumerate_pairings(3, 2)


class TestWickTerm:

    def test_pairs_are_canonical(self):
        term = WickTerm(pairs=((4, 3), (2, 1)), unpaired=(5,))
        assert term.pairs == ((1, 2), (3, 4))
        assert term.r == 2

    def test_repeated_index_rejected(self):
        with pytest.raises(ValueError):
            WickTerm(pairs=((1, 2),), unpaired=(2,))

    def test_self_contraction_rejected(self):
        with pytest.raises(ValueError):
            WickTerm(pairs=((1, 1),), unpaired=())


class TestExpansions:

    def test_symmetrized_multiplicities(self):
        expansion = timeordered_expansion(4)
        assert expansion.symmetrized
        assert expansion.multiplicity(0) == 1
        assert expansion.multiplicity(1) == 6
        assert expansion.multiplicity(2) == 3

    def test_three_fields(self):
        assert timeordered_expansion(3).multiplicity(1) == 3

    @pytest.mark.parametrize("m", range(0, 8))
    def test_enumerated_strata_match_symmetrized(self, m):
        enumerated = expand_all(m)
        symmetrized = timeordered_expansion(m)
        for r in range(m // 2 + 1):
            assert enumerated.multiplicity(r) == symmetrized.multiplicity(r)

    def test_missing_stratum_rejected(self):
        terms = (WickTerm(pairs=(), unpaired=(1, 2, 3, 4)), WickTerm(pairs=((1, 2), (3, 4)), unpaired=()))
        with pytest.raises(ValueError):
            WickExpansion(m=4, terms=terms, symmetrized=False)


class TestCoefficientIdentity:

    def test_c_coefficient_values(self):
        assert c_coefficient(0, 0) == 1
        assert c_coefficient(0, 1) == Rational(-1, 2)
        assert c_coefficient(1, 0) == I
        assert c_coefficient(2, 1) == Rational(1, 4)

    def test_identity_through_twelve_fields(self):
        report = verify_coefficient_identity(12)
        assert report.passed
        assert len(report.cases) == sum(m // 2 + 1 for m in range(13))
        assert report.first_failure is None

    def test_single_field(self):
        report = verify_coefficient_identity(1)
        assert report.passed
        assert [case.name for case in report.cases] == ["m=0,r=0", "m=1,r=0"]

    def test_zero_fields_rejected(self):
        with pytest.raises(ValueError):
            verify_coefficient_identity(0)

    def test_exact_scalar_arithmetic(self):
        i = ExactScalar.i_to(1)
        assert i * i == -1
        assert (i * i * i * i) == 1
        assert ExactScalar(Fraction(3), 0) / ExactScalar(Rational(3), 1) == ExactScalar.i_to(3)

    def test_equal_scalars_hash_equal(self):
        minus_one = ExactScalar(Rational(-1), 0)
        rotated = ExactScalar(Rational(1), 2)
        assert minus_one == rotated
        assert hash(minus_one) == hash(rotated)
        assert len({minus_one, rotated}) == 1

    def test_float_rejected(self):
        with pytest.raises(TypeError):
            ExactScalar(0.5, 0)
        with pytest.raises(TypeError):
            as_exact(0.5)

    def test_sum_stays_exact(self):
        total = ExactScalar(Rational(1, 3), 0) + ExactScalar(Rational(1, 6), 0)
        assert total == Rational(1, 2)
        assert as_exact(total) == Rational(1, 2)
