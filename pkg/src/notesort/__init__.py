"""Banknote recognition on feature embeddings with a reject class.

The pipeline starts at feature vectors: a trainable softmax head maps them
to class probabilities, a threshold module rejects low-confidence inputs to
class 0, and a sorter assigns ECB categories given authenticity and fitness
check outcomes. Synthetic datasets, an FVEC file format, an experiment
harness and a CLI round out the package.
"""

from .core import (
    CANONICAL_LABELS,
    Authenticity,
    BanknoteClassLabel,
    Category,
    Disposition,
    Fitness,
    LabeledSample,
    Provenance,
    SampleSet,
    argmax_decision,
    class_index,
    format_class_label,
    label_for_index,
    parse_class_label,
    validate_probability_vector,
)
from .datasets import (
    SynthConfig,
    gen_synthetic,
    read_fvec,
    read_manifest,
    stratified_split,
    write_fvec,
    write_manifest,
)
from .evaluation import GridResult, TimingReport, accuracy, bench, confusion, run_grid
from .head import (
    AdamState,
    HeadParams,
    TrainConfig,
    adam_step,
    adam_update,
    forward,
    gradient,
    load_head,
    loss,
    save_head,
    softmax,
    train,
)
from .rejector import (
    Ecdf,
    SweepRow,
    apply,
    build_ecdf,
    calibrate_threshold,
    legacy_recognized_max_probs,
    max_prob,
    threshold_sweep,
)
from .sorter import CheckOutcome, DeckReport, category_histogram, ecb_test, sort_note

__version__ = "0.1.0"
