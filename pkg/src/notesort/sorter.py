"""ECB category decision over classifier output and the certification test.

Categories follow the banknote recycling framework: rejected inputs are
category 1, recognized notes fall into 2/3/4a/4b depending on the injected
authenticity and fitness check outcomes. Actual security-feature and fitness
algorithms are out of scope; callers supply their results per note.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .core import Authenticity, Category, Fitness

__all__ = [
    "CheckOutcome",
    "DeckReport",
    "category_histogram",
    "ecb_test",
    "sort_note",
]

# Criterion names follow the test procedure: counterfeit detection >= 90%
# with zero counterfeits credited, unfit leakage <= 5%, fit acceptance
# >= 90%, genuine reject <= 1%.
CRITERIA = (
    "counterfeit_detection",
    "unfit_leakage",
    "fit_acceptance",
    "genuine_reject",
)


@dataclass(frozen=True)
class CheckOutcome:
    """Results of the authenticity and fitness checks for one note.

    Fitness is only meaningful when authenticity passes; consumers ignore it
    otherwise.
    """

    authenticity: Authenticity
    fitness: Fitness = Fitness.FIT

    @classmethod
    def genuine_fit(cls) -> "CheckOutcome":
        return cls(Authenticity.PASSES, Fitness.FIT)

    @classmethod
    def genuine_unfit(cls) -> "CheckOutcome":
        return cls(Authenticity.PASSES, Fitness.UNFIT)


def sort_note(decision: int, checks: CheckOutcome | None = None) -> Category:
    """ECB category of one input given its class decision and check results.

    decision 0 (reject) is category 1 regardless of checks. Otherwise the
    authenticity outcomes clearly-fails/unclear map to categories 2/3, and
    passing notes split into 4a (fit) and 4b (unfit).
    """
    if decision == 0:
        return Category.CAT1
    if checks is None:
        raise ValueError("check outcomes required for accepted notes")
    if checks.authenticity is Authenticity.CLEARLY_FAILS:
        return Category.CAT2
    if checks.authenticity is Authenticity.UNCLEAR:
        return Category.CAT3
    return Category.CAT4A if checks.fitness is Fitness.FIT else Category.CAT4B


def category_histogram(categories: Sequence[Category]) -> dict[str, int]:
    hist = {c.value: 0 for c in Category}
    for c in categories:
        hist[c.value] += 1
    return hist


@dataclass(frozen=True)
class DeckReport:
    """Certification outcome for the three test decks.

    Histograms count categories per deck; ``criteria`` holds one boolean per
    certification criterion and ``passed`` their conjunction.
    """

    counterfeit: dict[str, int]
    unfit: dict[str, int]
    fit: dict[str, int]
    criteria: dict[str, bool]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "counterfeit": self.counterfeit,
            "unfit": self.unfit,
            "fit": self.fit,
            "criteria": self.criteria,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _counts(hist: dict[str, int], *cats: Category) -> int:
    return sum(hist[c.value] for c in cats)


def ecb_test(
    counterfeit: Sequence[Category],
    unfit: Sequence[Category],
    fit: Sequence[Category],
) -> DeckReport:
    """Evaluate the four certification criteria on sorted test decks.

    Criteria, each boundary inclusive and computed in exact integer
    arithmetic: (i) at least 90% of the counterfeit deck in category 2 or 3
    and none in category 4; (ii) at most 5% of the unfit deck in category
    4a; (iii) at least 90% of the fit deck in category 4a; (iv) at most 1%
    of the fit deck in categories 1, 2 or 3.
    """
    if not counterfeit or not unfit or not fit:
        raise ValueError("all three test decks must be nonempty")
    cf = category_histogram(counterfeit)
    uf = category_histogram(unfit)
    ft = category_histogram(fit)
    n_cf, n_uf, n_ft = len(counterfeit), len(unfit), len(fit)

    cf_detected = _counts(cf, Category.CAT2, Category.CAT3)
    cf_credited = _counts(cf, Category.CAT4A, Category.CAT4B)
    criteria = {
        "counterfeit_detection": 10 * cf_detected >= 9 * n_cf and cf_credited == 0,
        "unfit_leakage": 20 * _counts(uf, Category.CAT4A) <= n_uf,
        "fit_acceptance": 10 * _counts(ft, Category.CAT4A) >= 9 * n_ft,
        "genuine_reject": 100 * _counts(ft, Category.CAT1, Category.CAT2, Category.CAT3)
        <= n_ft,
    }
    return DeckReport(cf, uf, ft, criteria, all(criteria.values()))
