"""Maximum-weight bipartite matching between two sets of elements.

The matching score of (R, S) is the weight of a maximum-weight matching in the
bipartite graph whose edge weights are phi_alpha over element pairs. Two set
relatedness metrics are derived from it:

  similar(R, S) = m / (|R| + |S| - m)
  contain(R, S) = m / |R|

`reduced_matching_score` first strips greedily paired identical elements
(weight exactly 1) and solves the residue; with alpha = 0 and a measure whose
dual 1 - phi satisfies the triangle inequality (jaccard, eds) this equals the
plain score, usually much faster on near-duplicate sets.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .simfn import JACCARD, NEDS, PhiCache, SimConfig, phi_alpha
from .tokens import SetRecord

SIMILARITY = "similarity"
CONTAINMENT = "containment"
METRICS = (SIMILARITY, CONTAINMENT)


@dataclass
class MatchingResult:
    score: float
    assignment: dict[int, int]  # row element index -> column element index


def max_weight_matching(weights) -> MatchingResult:
    """Solve max-weight bipartite matching on a non-negative weight matrix.

    Rectangular matrices are fine; rows/columns beyond min(n, m) stay
    unmatched. Zero-weight pairs are dropped from the reported assignment
    (they never change the score).
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] == 0 or w.shape[1] == 0:
        raise ValueError("weight matrix must be non-empty and 2-dimensional")
    if w.min() < 0.0:
        raise ValueError("weights must be non-negative")
    rows, cols = linear_sum_assignment(w, maximize=True)
    score = float(w[rows, cols].sum())
    assignment = {
        int(i): int(j) for i, j in zip(rows, cols) if w[i, j] > 0.0
    }
    return MatchingResult(score, assignment)


def _weight_matrix(R: SetRecord, S: SetRecord, sim: SimConfig, cache: PhiCache | None):
    if cache is not None:
        get = cache.phi_alpha
    else:
        get = lambda x, y: phi_alpha(sim, x, y)  # noqa: E731
    return [[get(r, s) for s in S.elements] for r in R.elements]


def matching_score(
    R: SetRecord, S: SetRecord, sim: SimConfig, cache: PhiCache | None = None
) -> MatchingResult:
    """Matching score of (R, S) under phi_alpha weights."""
    if not R.elements or not S.elements:
        raise ValueError("matching requires non-empty sets")
    return max_weight_matching(_weight_matrix(R, S, sim, cache))


def reduced_matching_score(
    R: SetRecord, S: SetRecord, sim: SimConfig, cache: PhiCache | None = None
) -> MatchingResult:
    """Matching score via identical-pair removal plus matching on the residue.

    Each element of R greedily claims one so-far-unclaimed identical element
    of S (token-set equality for jaccard, raw-string equality for edit
    similarity); every such pair contributes exactly 1. Only exact for
    alpha = 0 and kind in {jaccard, eds}.
    """
    if not R.elements or not S.elements:
        raise ValueError("matching requires non-empty sets")
    if sim.alpha != 0.0:
        raise ValueError("reduction requires alpha = 0")
    if sim.kind == NEDS:
        raise ValueError("reduction is not exact for neds")

    if sim.kind == JACCARD:
        # Empty-token elements have similarity 0 to everything, including
        # each other, so they never form a weight-1 identical pair.
        def key(e):
            return e.tokens if e.tokens else None
    else:
        def key(e):
            return e.raw

    pool: dict = defaultdict(list)
    for j, s in enumerate(S.elements):
        k = key(s)
        if k is not None:
            pool[k].append(j)

    paired: dict[int, int] = {}
    rest_r: list[int] = []
    for i, r in enumerate(R.elements):
        k = key(r)
        js = pool.get(k) if k is not None else None
        if js:
            paired[i] = js.pop()
        else:
            rest_r.append(i)
    used = set(paired.values())
    rest_s = [j for j in range(len(S.elements)) if j not in used]

    score = float(len(paired))
    assignment = dict(paired)
    if rest_r and rest_s:
        sub = [
            [
                (cache.phi_alpha if cache else (lambda x, y: phi_alpha(sim, x, y)))(
                    R.elements[i], S.elements[j]
                )
                for j in rest_s
            ]
            for i in rest_r
        ]
        res = max_weight_matching(sub)
        score += res.score
        for ri, sj in res.assignment.items():
            assignment[rest_r[ri]] = rest_s[sj]
    return MatchingResult(score, assignment)


def similar_value(score: float, nr: int, ns: int) -> float:
    return score / (nr + ns - score)


def contain_value(score: float, nr: int) -> float:
    return score / nr


def similar(
    R: SetRecord, S: SetRecord, sim: SimConfig, cache: PhiCache | None = None
) -> float:
    """Set similarity: matching score over |R| + |S| - score."""
    return similar_value(matching_score(R, S, sim, cache).score, R.size, S.size)


def contain(
    R: SetRecord, S: SetRecord, sim: SimConfig, cache: PhiCache | None = None
) -> float:
    """Set containment of R in S: matching score over |R|."""
    return contain_value(matching_score(R, S, sim, cache).score, R.size)
