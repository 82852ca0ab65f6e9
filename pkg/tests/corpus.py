"""Shared fixture builders: labeled covariances spanning all five classes.

Each instance comes with the label set it was built to have, so
classifier/oracle agreement tests and containment tests can iterate one
corpus. Fringe blocks are forced well above every tolerance in play, which
keeps the intended negatives (reciprocal false, cm_f false, ...) structural
rather than accidental.
"""

from __future__ import annotations

from cmseq import BlockCovariance, PatternForm, random_cm_instance, random_spd_covariance

# comfortably above classify/oracle tolerances, well below the O(1) diagonal
MIN_FRINGE = 0.05

ALL_TRUE = {"markov": True, "reciprocal": True, "cm_l": True, "cm_f": True}
ALL_FALSE = {"markov": False, "reciprocal": False, "cm_l": False, "cm_f": False}

CLASS_LABELS = {
    "general": ALL_FALSE,
    "markov": ALL_TRUE,
    "reciprocal_only": {"markov": False, "reciprocal": True, "cm_l": True, "cm_f": True},
    "cm_l_only": {"markov": False, "reciprocal": False, "cm_l": True, "cm_f": False},
    "cm_f_only": {"markov": False, "reciprocal": False, "cm_l": False, "cm_f": True},
}

# N >= 3 where the class must exclude CM_F or CM_L: at N = 2 those supports
# cover the whole matrix and the distinction vanishes.
_SIZES = {
    "general": [(3, 1), (4, 1), (4, 2), (6, 1), (8, 2)],
    "markov": [(2, 1), (3, 2), (4, 1), (8, 2), (16, 1)],
    "reciprocal_only": [(3, 1), (4, 2), (6, 1), (8, 2), (16, 1)],
    "cm_l_only": [(3, 1), (4, 2), (6, 1), (8, 2), (16, 1)],
    "cm_f_only": [(3, 1), (4, 2), (6, 1), (8, 2), (16, 1)],
}

_FORMS = {
    "markov": PatternForm.TRIDIAGONAL,
    "reciprocal_only": PatternForm.CYCLIC,
    "cm_l_only": PatternForm.CM_L,
    "cm_f_only": PatternForm.CM_F,
}


def corpus_instance(kind: str, index: int) -> BlockCovariance:
    N, d = _SIZES[kind][index % len(_SIZES[kind])]
    seed = 10_000 * list(CLASS_LABELS).index(kind) + index
    if kind == "general":
        return random_spd_covariance(N, d, seed)
    return random_cm_instance(N, d, _FORMS[kind], seed, min_fringe=MIN_FRINGE)


def equivalence_corpus(per_class: int):
    """(kind, covariance, expected labels) triples, per_class of each kind."""
    return [
        (kind, corpus_instance(kind, i), CLASS_LABELS[kind])
        for kind in CLASS_LABELS
        for i in range(per_class)
    ]
