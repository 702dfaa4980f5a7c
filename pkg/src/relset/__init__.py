"""Exact discovery of related sets under fuzzy element matching.

Two sets are related when the maximum-weight bipartite matching between
their elements, scored by a thresholded similarity function, reaches a
fraction delta of the reference size (containment) or of the union size
(similarity). The engine guarantees the same answers as brute-force
verification of every pair while pruning most of the work through
signatures, an inverted index, and two candidate filters.
"""

from .engine import (
    ConfigError,
    PassStats,
    RelatedPair,
    RelatednessConfig,
    brute_force,
    discover,
    normalize,
    search,
    search_pass,
)
from .invindex import InvertedIndex
from .matching import (
    CONTAINMENT,
    METRICS,
    SIMILARITY,
    MatchingResult,
    contain,
    contain_value,
    matching_score,
    max_weight_matching,
    reduced_matching_score,
    similar,
    similar_value,
)
from .refine import nn_filter, nn_search, select_and_check, size_filter
from .signature import (
    COMBINED_UNWEIGHTED,
    DICHOTOMY,
    EPS,
    SCHEMES,
    SKYLINE,
    UNWEIGHTED,
    WEIGHTED,
    Signature,
    build_signature,
    max_q,
    simthresh_count,
    theta,
)
from .simfn import (
    EDS,
    JACCARD,
    KINDS,
    NEDS,
    PhiCache,
    SimConfig,
    eds,
    jaccard,
    levenshtein,
    neds,
    phi,
    phi_alpha,
)
from .tokens import (
    GRAMS,
    PAD,
    WORDS,
    Element,
    SetRecord,
    TokenDictionary,
    make_element,
    make_set,
    qchunks,
    qgrams,
    word_tokens,
)

__version__ = "1.0.0"

__all__ = [
    "COMBINED_UNWEIGHTED",
    "CONTAINMENT",
    "ConfigError",
    "DICHOTOMY",
    "EDS",
    "EPS",
    "Element",
    "GRAMS",
    "InvertedIndex",
    "JACCARD",
    "KINDS",
    "METRICS",
    "MatchingResult",
    "NEDS",
    "PAD",
    "PassStats",
    "PhiCache",
    "RelatedPair",
    "RelatednessConfig",
    "SCHEMES",
    "SIMILARITY",
    "SKYLINE",
    "SetRecord",
    "Signature",
    "SimConfig",
    "TokenDictionary",
    "UNWEIGHTED",
    "WEIGHTED",
    "WORDS",
    "brute_force",
    "build_signature",
    "contain",
    "contain_value",
    "discover",
    "eds",
    "jaccard",
    "levenshtein",
    "make_element",
    "make_set",
    "matching_score",
    "max_q",
    "max_weight_matching",
    "neds",
    "nn_filter",
    "nn_search",
    "normalize",
    "phi",
    "phi_alpha",
    "qchunks",
    "qgrams",
    "reduced_matching_score",
    "search",
    "search_pass",
    "select_and_check",
    "similar",
    "similar_value",
    "simthresh_count",
    "size_filter",
    "theta",
    "word_tokens",
]
