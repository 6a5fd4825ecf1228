#!/usr/bin/env python3
"""Run the certification-style deck test on a trained pipeline.

Three decks go through classifier, reject module and category sorter: a
counterfeit deck (correct image, failing security features), an unfit
genuine deck and a fit genuine deck. The evaluator checks the four criteria:
counterfeits at least 90% in categories 2/3 and none credited, at most 5%
of unfit notes leaking into 4a, at least 90% of fit notes in 4a, and at
most 1% of fit notes rejected or withdrawn.
"""

import numpy as np

from notesort import (
    CheckOutcome,
    SynthConfig,
    TrainConfig,
    apply,
    ecb_test,
    forward,
    gen_synthetic,
    sort_note,
    stratified_split,
    train,
)
from notesort.core import Authenticity

config = SynthConfig(n_classes=10, dim=32, per_class_counts=200, separation=9.0, seed=3)
data = gen_synthetic(config)
train_set, _, test_set = stratified_split(data, seed=3)
params, _ = train(train_set, TrainConfig(episodes=1200, batch_size=100, seed=3))
threshold = 0.5


def sort_deck(deck, checks):
    probs = forward(deck.features, params)
    return [sort_note(apply(y, threshold), checks) for y in probs]


# Counterfeits look like banknotes to the classifier; their authenticity
# check outcome is what routes them to category 2 (here: clearly failing).
counterfeit_deck = test_set.subset(np.arange(0, 60))
unfit_deck = test_set.subset(np.arange(60, 120))
fit_deck = test_set.subset(np.arange(120, 200))

report = ecb_test(
    sort_deck(counterfeit_deck, CheckOutcome(Authenticity.CLEARLY_FAILS)),
    sort_deck(unfit_deck, CheckOutcome.genuine_unfit()),
    sort_deck(fit_deck, CheckOutcome.genuine_fit()),
)
print(report.to_json())
print("overall:", "PASS" if report.passed else "FAIL")
