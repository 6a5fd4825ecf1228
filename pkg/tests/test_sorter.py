import json

import pytest

from notesort.core import Authenticity, Category, Fitness
from notesort.sorter import CheckOutcome, category_histogram, ecb_test, sort_note


def outcome(auth, fit=Fitness.FIT):
    return CheckOutcome(auth, fit)


class TestSortNote:
    def test_reject_is_cat1_regardless_of_checks(self):
        assert sort_note(0) is Category.CAT1
        assert sort_note(0, outcome(Authenticity.PASSES)) is Category.CAT1

    def test_clearly_failing_authenticity(self):
        assert sort_note(7, outcome(Authenticity.CLEARLY_FAILS)) is Category.CAT2

    def test_unclear_authenticity(self):
        assert sort_note(7, outcome(Authenticity.UNCLEAR)) is Category.CAT3

    def test_fit_genuine(self):
        assert sort_note(7, CheckOutcome.genuine_fit()) is Category.CAT4A

    def test_unfit_genuine(self):
        assert sort_note(7, CheckOutcome.genuine_unfit()) is Category.CAT4B

    def test_accepted_note_requires_checks(self):
        with pytest.raises(ValueError):
            sort_note(3)

    def test_exactly_one_category(self):
        for decision in (0, 1, 40):
            for auth in Authenticity:
                for fit in Fitness:
                    assert sort_note(decision, CheckOutcome(auth, fit)) in Category


def deck(**counts):
    spec = {"1": Category.CAT1, "2": Category.CAT2, "3": Category.CAT3,
            "4a": Category.CAT4A, "4b": Category.CAT4B}
    out = []
    for key, n in counts.items():
        out.extend([spec[key.removeprefix("c")]] * n)
    return out


PERFECT_UNFIT = deck(c4b=100)
PERFECT_FIT = deck(c4a=100)


class TestEcbTest:
    def test_counterfeit_ninety_percent_boundary(self):
        report = ecb_test(deck(c2=95, c1=5), PERFECT_UNFIT, PERFECT_FIT)
        assert report.criteria["counterfeit_detection"]
        report = ecb_test(deck(c2=90, c1=10), PERFECT_UNFIT, PERFECT_FIT)
        assert report.criteria["counterfeit_detection"]
        report = ecb_test(deck(c2=89, c1=11), PERFECT_UNFIT, PERFECT_FIT)
        assert not report.criteria["counterfeit_detection"]

    def test_no_counterfeit_in_category_four(self):
        report = ecb_test(deck(c2=99, c4a=1), PERFECT_UNFIT, PERFECT_FIT)
        assert not report.criteria["counterfeit_detection"]
        report = ecb_test(deck(c2=99, c4b=1), PERFECT_UNFIT, PERFECT_FIT)
        assert not report.criteria["counterfeit_detection"]

    def test_unfit_five_percent_boundary(self):
        report = ecb_test(deck(c2=100), deck(c4a=5, c4b=95), PERFECT_FIT)
        assert report.criteria["unfit_leakage"]
        report = ecb_test(deck(c2=100), deck(c4a=6, c4b=94), PERFECT_FIT)
        assert not report.criteria["unfit_leakage"]

    def test_fit_deck_both_criteria(self):
        # 98.9% in 4a passes acceptance, but 1.1% rejected breaches the 1% bound.
        report = ecb_test(deck(c2=100), PERFECT_UNFIT, deck(c4a=989, c1=11))
        assert report.criteria["fit_acceptance"]
        assert not report.criteria["genuine_reject"]
        assert not report.passed

    def test_one_percent_boundary_inclusive(self):
        report = ecb_test(deck(c2=100), PERFECT_UNFIT, deck(c4a=990, c1=10))
        assert report.criteria["genuine_reject"]
        report = ecb_test(deck(c2=100), PERFECT_UNFIT, deck(c4a=989, c1=10, c4b=1))
        assert report.criteria["genuine_reject"]

    def test_fit_acceptance_ninety_boundary(self):
        report = ecb_test(deck(c2=100), PERFECT_UNFIT, deck(c4a=900, c4b=100))
        assert report.criteria["fit_acceptance"]
        report = ecb_test(deck(c2=100), PERFECT_UNFIT, deck(c4a=899, c4b=101))
        assert not report.criteria["fit_acceptance"]

    def test_all_perfect_passes(self):
        report = ecb_test(deck(c2=100), PERFECT_UNFIT, PERFECT_FIT)
        assert report.passed
        assert all(report.criteria.values())

    def test_histogram_conservation(self):
        fit = deck(c4a=989, c1=7, c2=3, c3=1)
        report = ecb_test(deck(c2=50, c3=50), PERFECT_UNFIT, fit)
        assert sum(report.fit.values()) == len(fit)
        assert sum(report.counterfeit.values()) == 100
        assert sum(report.unfit.values()) == 100

    def test_empty_deck_rejected(self):
        with pytest.raises(ValueError):
            ecb_test([], PERFECT_UNFIT, PERFECT_FIT)

    def test_json_fields(self):
        report = ecb_test(deck(c2=100), PERFECT_UNFIT, PERFECT_FIT)
        doc = json.loads(report.to_json())
        assert set(doc) == {"counterfeit", "unfit", "fit", "criteria", "pass"}
        assert set(doc["criteria"]) == {
            "counterfeit_detection",
            "unfit_leakage",
            "fit_acceptance",
            "genuine_reject",
        }
        assert doc["pass"] is True
        assert set(doc["fit"]) == {"1", "2", "3", "4a", "4b"}


class TestHistogram:
    def test_counts(self):
        hist = category_histogram(deck(c1=2, c4a=3))
        assert hist == {"1": 2, "2": 0, "3": 0, "4a": 3, "4b": 0}
