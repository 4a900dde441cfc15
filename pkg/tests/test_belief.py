"""Tests for bbas and belief/plausibility."""

import pytest

from dsmbcr.belief import Bba, l1_distance
from dsmbcr.errors import InvalidBbaError, ModelError, TotalConflictError
from dsmbcr.formula import load_bba, parse_formula
from dsmbcr.frame import atom_element, complement, empty_element, enumerate_elements, total_element


class TestConstruction:
    def test_sum_must_be_one(self, free3):
        with pytest.raises(InvalidBbaError, match="sum"):
            Bba(free3, {atom_element(free3, 0): 0.5})

    def test_negative_mass(self, free3):
        with pytest.raises(InvalidBbaError):
            Bba(free3, {atom_element(free3, 0): 1.5, atom_element(free3, 1): -0.5})

    def test_empty_key_rejected(self, shafer3):
        with pytest.raises(InvalidBbaError, match="empty"):
            Bba(shafer3, {empty_element(shafer3): 0.5, atom_element(shafer3, 0): 0.5})

    def test_foreign_element_rejected(self, free3, shafer3):
        with pytest.raises(ModelError):
            Bba(free3, {atom_element(shafer3, 0): 1.0})

    def test_sum_inside_tolerance_renormalized(self, free3):
        a, b = atom_element(free3, 0), atom_element(free3, 1)
        bba = Bba(free3, {a: 0.5, b: 0.5000004})
        assert sum(m for _, m in bba.items()) == pytest.approx(1.0, abs=1e-15)
        assert bba.mass_of(b) / bba.mass_of(a) == pytest.approx(1.0000008)

    def test_conflict_kept_when_renormalizing(self, shafer3):
        a = atom_element(shafer3, 0)
        bba = Bba(shafer3, {a: 0.3000002}, conflict=0.7)
        assert bba.mass_of(a) + bba.conflict == pytest.approx(1.0, abs=1e-15)
        assert bba.conflict == 0.7

    def test_zero_masses_dropped(self, free3):
        bba = Bba(free3, {atom_element(free3, 0): 1.0, atom_element(free3, 1): 0.0})
        assert len(bba) == 1

    def test_categorical_and_vacuous(self, free3):
        a = atom_element(free3, 0)
        assert Bba.categorical(a).as_dict() == {"A": 1.0}
        assert Bba.vacuous(free3).focal_elements() == [total_element(free3)]

    def test_categorical_on_empty(self, free3):
        with pytest.raises(InvalidBbaError):
            Bba.categorical(empty_element(free3))

    def test_canonical_order(self, example1):
        cardinals = [x.bits.bit_count() for x in example1]
        assert cardinals == sorted(cardinals)


class TestMassOf:
    def test_focal(self, example2):
        assert example2.mass_of(parse_formula(example2.model, "A | B")) == pytest.approx(0.1)

    def test_empty(self, example2):
        assert example2.mass_of(empty_element(example2.model)) == 0.0

    def test_non_focal(self, example2):
        assert example2.mass_of(parse_formula(example2.model, "A | C")) == 0.0


class TestBelPl:
    def test_total_ignorance(self, example1):
        top = total_element(example1.model)
        assert example1.bel(top) == pytest.approx(1.0)
        assert example1.pl(top) == pytest.approx(1.0)

    def test_bel_of_union(self, example2):
        # B, C and B | C
        assert example2.bel(parse_formula(example2.model, "B | C")) == pytest.approx(0.4)

    def test_bayesian_bel_equals_pl(self, example3):
        for i in range(4):
            atom = atom_element(example3.model, i)
            assert example3.bel(atom) == pytest.approx(example3.mass_of(atom))
            assert example3.pl(atom) == pytest.approx(example3.mass_of(atom))

    def test_bel_le_pl_and_monotone(self, example1):
        elements = enumerate_elements(example1.model)
        for x in elements:
            assert 0.0 <= example1.bel(x) <= example1.pl(x) + 1e-12 <= 1.0 + 1e-12
            for y in elements:
                if x <= y:
                    assert example1.bel(x) <= example1.bel(y) + 1e-12
                    assert example1.pl(x) <= example1.pl(y) + 1e-12

    def test_pl_is_one_minus_bel_of_complement(self, example2):
        for x in enumerate_elements(example2.model):
            if x == total_element(example2.model):
                continue
            assert example2.pl(x) == pytest.approx(1.0 - example2.bel(complement(x)))

    def test_free_model_intersections_count_for_pl(self, example1):
        # every focal element of the free prior meets B
        b = parse_formula(example1.model, "B")
        assert example1.pl(b) == pytest.approx(1.0)

    def test_table(self, example2):
        table = example2.bel_pl_table()
        assert len(table) == 7
        assert all(bel <= pl + 1e-12 for _, bel, pl in table)


class TestBayesian:
    def test_bayesian_prior(self, example3):
        assert example3.is_bayesian()

    def test_non_bayesian_prior(self, example2):
        assert not example2.is_bayesian()

    def test_uniform(self):
        assert load_bba("frame: A, B\nmodel: shafer\nA : 0.5\nB : 0.5\n").is_bayesian()


class TestConflict:
    def test_normalized(self, shafer3):
        a, b = atom_element(shafer3, 0), atom_element(shafer3, 1)
        bba = Bba(shafer3, {a: 0.3, b: 0.1}, conflict=0.6)
        result = bba.normalized()
        assert result.conflict == 0.0
        assert result.mass_of(a) == pytest.approx(0.75)

    def test_total_conflict(self, shafer3):
        with pytest.raises(TotalConflictError):
            Bba(shafer3, {}, conflict=1.0).normalized()


class TestDistance:
    def test_zero_on_self(self, example1):
        assert l1_distance(example1, example1) == 0.0

    def test_disjoint_supports(self, free3):
        a = Bba.categorical(atom_element(free3, 0))
        b = Bba.categorical(atom_element(free3, 1))
        assert l1_distance(a, b) == pytest.approx(2.0)

    def test_model_mismatch(self, example1, example2):
        with pytest.raises(ModelError):
            l1_distance(example1, example2)
