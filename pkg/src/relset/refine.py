"""Candidate refinement: check filter, nearest-neighbor filter, size filter.

A search pass probes the inverted index with the reference set's signature
tokens. Every set reached by a posting is an initial candidate; the check
filter keeps only candidates where at least one probed element pair reaches
the signature's per-element bound, and the nearest-neighbor filter prunes
candidates whose per-element best similarities provably cannot sum to θ.
Both filters only ever discard sets whose matching score is below θ, so the
final verification stage sees every related set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .invindex import InvertedIndex
from .matching import CONTAINMENT
from .signature import EPS, Signature
from .simfn import PhiCache
from .tokens import GRAMS, Element, SetRecord


@dataclass
class Candidate:
    """Reference elements matched during probing and their best raw φ."""

    matched_refs: set[int] = field(default_factory=set)
    best_sim: dict[int, float] = field(default_factory=dict)


CandidateMap = dict[int, Candidate]


def size_filter(r_size: int, s_size: int, delta: float, metric: str) -> bool:
    """Size bounds implied by score ≤ min(|R|, |S|): a containment-related S
    needs |S| ≥ δ|R|; a similarity-related S also needs |S| ≤ |R|/δ."""
    if metric == CONTAINMENT:
        return s_size >= delta * r_size - EPS
    return delta * r_size - EPS <= s_size <= r_size / delta + EPS


def select_and_check(
    R: SetRecord,
    sig: Signature,
    index: InvertedIndex,
    cache: PhiCache,
    check: bool = True,
    allowed: set[int] | None = None,
) -> tuple[CandidateMap, int]:
    """Scan postings of every signature token, admitting (r_i, s) pairs whose
    similarity reaches the element's bound (min(α, b_i) when α > 0).

    Returns the surviving candidates plus the count of initially reached sets.
    With `check` off, every reached pair is admitted unverified (best_sim is
    left empty so downstream consumers recompute).
    """
    alpha = cache.sim.alpha
    if alpha > 0.0:
        thresholds = [min(alpha, b) for b in sig.bounds]
    else:
        thresholds = sig.bounds
    elems = R.elements

    cands: CandidateMap = {}
    for tid, owners in sig.owners.items():
        for ordinal, elem_idx in index.posting_list(tid):
            if allowed is not None and ordinal not in allowed:
                continue
            cand = cands.get(ordinal)
            if cand is None:
                cand = cands[ordinal] = Candidate()
            if not check:
                cand.matched_refs.update(owners)
                continue
            s_elem = index.sets[ordinal].elements[elem_idx]
            for i in owners:
                phi = cache.phi(elems[i], s_elem)
                if phi >= thresholds[i] - EPS:
                    cand.matched_refs.add(i)
                    if phi > cand.best_sim.get(i, -1.0):
                        cand.best_sim[i] = phi
    initial = len(cands)
    if check:
        cands = {o: c for o, c in cands.items() if c.matched_refs}
    return cands, initial


def nn_search(
    r: Element,
    ordinal: int,
    index: InvertedIndex,
    cache: PhiCache,
) -> float:
    """Best φ_α between r and any element of the indexed set `ordinal`.

    Only elements sharing a token with r are evaluated. Sharing no word token
    means Jaccard 0, but two strings can share no q-gram and still be
    somewhat similar, so in the gram view an untouched element contributes up
    to the all-chunks-missed ceiling |r|/(|r|+⌈|r|/q⌉).
    """
    rec = index.sets[ordinal]
    touched: set[int] = set()
    for t in r.tokens:
        touched.update(index.postings_in_set(t, ordinal))
    best = 0.0
    for idx in touched:
        phi = cache.phi_alpha(r, rec.elements[idx])
        if phi > best:
            best = phi
    if index.mode == GRAMS and len(touched) < rec.size:
        floor = r.strlen / (r.strlen + len(r.chunks))
        if floor >= cache.sim.alpha - EPS and floor > best:
            best = floor
    return best


def nn_filter(
    R: SetRecord,
    sig: Signature,
    index: InvertedIndex,
    cands: CandidateMap,
    theta_: float,
    cache: PhiCache,
    check_used: bool = True,
) -> CandidateMap:
    """Keep candidates whose per-element nearest-neighbor estimates can still
    sum to θ.

    The estimate starts at Σ b_i; matched elements contribute their check
    similarity (never less than b_i, so the estimate stays an upper bound on
    the matching score), then unmatched elements are refined one by one with
    a real NN search, aborting as soon as the total drops below θ. Elements
    with b_i = 0 stay at 0 when unmatched: any partner at or above α would
    have been probed. When the check filter did not run, matched elements get
    a fresh NN search too.
    """
    alpha = cache.sim.alpha
    bounds = sig.bounds
    base = sum(bounds)
    out: CandidateMap = {}
    for ordinal, cand in cands.items():
        total = base
        if check_used:
            for i, best in cand.best_sim.items():
                filt = best if best >= alpha else 0.0
                if filt > bounds[i]:
                    total += filt - bounds[i]
        else:
            for i in sorted(cand.matched_refs):
                nn = nn_search(R.elements[i], ordinal, index, cache)
                total += nn - bounds[i]
        doomed = total < theta_ - EPS
        if not doomed:
            for i in range(R.size):
                if i in cand.matched_refs or bounds[i] == 0.0:
                    continue
                nn = nn_search(R.elements[i], ordinal, index, cache)
                total += nn - bounds[i]
                if total < theta_ - EPS:
                    doomed = True
                    break
        if not doomed:
            out[ordinal] = cand
    return out
