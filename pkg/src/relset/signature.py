"""Signature schemes for related-set search.

A signature of a reference set R is a subset of R's tokens (whole-element
word tokens, or q-chunks of each element in the edit view) such that any set
whose matching score against R reaches θ = δ·|R| must share at least one
signature token. Candidate selection probes only signature tokens, so a
smaller signature means fewer postings scanned, while validity guarantees no
related set is missed.

Schemes:
  weighted            greedy cost/value selection until the no-match bounds
                      sum below θ (works for both token views)
  unweighted          drop the ⌈θ⌉−1 most frequent token instances, probe the
                      rest (word view only; the counting argument that makes
                      it valid needs "similar implies shares a token", which
                      holds for Jaccard but not edit similarity)
  skyline             weighted selection, then elements that accumulated the
                      α-count are cut down to that many tokens with bound 0
  dichotomy           per-element cheapest-first selection where completing
                      an element's α-count zeroes its bound
  combined_unweighted unweighted removal applied to the per-element α-count
                      cuts

Per element the signature stores l_i (the probed token ids) and a bound b_i:
an upper bound on φ(r_i, s) for any s sharing no probed token, 0 exactly when
l_i covers the α-count (then any s with φ ≥ α must share a token). Selection
arithmetic uses exact rationals so the strict stopping rule Σ < θ never
suffers float drift.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .invindex import InvertedIndex
from .tokens import GRAMS, WORDS, Element, SetRecord

EPS = 1e-9

WEIGHTED = "weighted"
UNWEIGHTED = "unweighted"
SKYLINE = "skyline"
DICHOTOMY = "dichotomy"
COMBINED_UNWEIGHTED = "combined_unweighted"
SCHEMES = (WEIGHTED, UNWEIGHTED, SKYLINE, DICHOTOMY, COMBINED_UNWEIGHTED)


@dataclass
class Signature:
    """Per-element probe sets l_i, no-match bounds b_i, and their union."""

    per_element: list[frozenset[int]]
    bounds: list[float]
    owners: dict[int, tuple[int, ...]] = field(default_factory=dict)
    degenerate: bool = False

    @property
    def flattened(self) -> frozenset[int]:
        return frozenset(self.owners)


def _make_owners(per_element: list[frozenset[int]]) -> dict[int, tuple[int, ...]]:
    owners: dict[int, list[int]] = {}
    for i, toks in enumerate(per_element):
        for t in toks:
            owners.setdefault(t, []).append(i)
    return {t: tuple(idxs) for t, idxs in owners.items()}


def _finish(per_element, bounds) -> Signature:
    return Signature(per_element, bounds, _make_owners(per_element))


def _degenerate(n: int) -> Signature:
    return Signature([frozenset()] * n, [1.0] * n, {}, degenerate=True)


def theta(R: SetRecord, delta: float) -> float:
    """Matching-score threshold δ·|R|, shared by both relatedness metrics."""
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    return delta * R.size


def max_q(delta: float, alpha: float = 0.0) -> int:
    """Largest q usable for edit similarity: q < δ/(1−δ) and, when an
    element-level threshold is in force, q < α/(1−α).

    Both bounds are strict. When neither binds (δ = 1, α = 0) there is no
    mathematical limit and a practical default of 16 is returned.
    """
    bound = math.inf
    if delta < 1.0:
        bound = delta / (1.0 - delta)
    if alpha > 0.0:
        bound = min(bound, alpha / (1.0 - alpha))
    if bound is math.inf:
        return 16
    q = math.ceil(bound - EPS) - 1
    if q < 1:
        raise ValueError(
            f"no q >= 1 satisfies q < {bound:.6g} (delta={delta}, alpha={alpha})"
        )
    return q


def _count_raw(elem: Element, alpha: float, mode: str) -> int:
    """Sim-thresh count before capping: probing this many of the element's
    tokens (chunks) guarantees any partner with φ ≥ α shares one of them."""
    if alpha <= 0.0:
        raise ValueError("sim-thresh count requires alpha > 0")
    if mode == WORDS:
        n = len(elem.tokens)
        return min(math.floor((1.0 - alpha) * n + EPS) + 1, n) if n else 1
    return math.floor(((1.0 - alpha) / alpha) * elem.strlen + EPS) + 1


def simthresh_count(elem: Element, alpha: float, mode: str) -> int:
    """Number of tokens (word view) or q-chunks (edit view, capped at the
    chunk count) forming the element's sim-thresh cut."""
    count = _count_raw(elem, alpha, mode)
    if mode == GRAMS:
        count = min(count, len(elem.chunks))
    return count


def _zero_ok(elem: Element, selected: int, alpha: float, mode: str) -> bool:
    """True when `selected` probes justify bound 0 for the element: either
    the raw α-count is covered, or (edit view) every chunk is probed and the
    all-chunks-missed ceiling already falls below α."""
    if alpha <= 0.0:
        return False
    if selected >= _count_raw(elem, alpha, mode):
        return True
    if mode == GRAMS and selected == len(elem.chunks):
        L = elem.strlen
        return L / (L + selected) < alpha - EPS
    return False


# --- per-element token orderings ----------------------------------------


def _cheap_tokens(elem: Element, index: InvertedIndex) -> list[tuple[int, int]]:
    """Element's distinct tokens as (cost, tid), cheapest first."""
    return sorted((index.list_len(t), t) for t in elem.tokens)


def _cheap_chunks(elem: Element, index: InvertedIndex) -> list[tuple[int, int, int]]:
    """Element's chunk positions as (cost, chunk id, position), cheapest first."""
    return sorted(
        (index.list_len(c), c, pos) for pos, c in enumerate(elem.chunks)
    )


# --- weighted scheme ------------------------------------------------------


def _weighted_core(R: SetRecord, index: InvertedIndex, theta_: float):
    """Greedy token selection by ascending cost/value (Jaccard view).

    Returns per-element selected token sets and the exact residual sum
    Σ (n_i − |k_i|)/n_i at the stopping point.
    """
    elems = R.elements
    owners: dict[int, list[int]] = {}
    for i, e in enumerate(elems):
        for t in e.tokens:
            owners.setdefault(t, []).append(i)

    ranked = []
    for t, owner in owners.items():
        value = sum(Fraction(1, len(elems[i].tokens)) for i in owner)
        cost = index.list_len(t)
        ranked.append((Fraction(cost) / value, cost, t))
    ranked.sort()

    total = sum(
        (Fraction(1) for e in elems if e.tokens), start=Fraction(0)
    )
    goal = Fraction(theta_ - EPS)
    selected: list[set[int]] = [set() for _ in elems]
    for _, _, t in ranked:
        if total < goal:
            break
        for i in owners[t]:
            selected[i].add(t)
            total -= Fraction(1, len(elems[i].tokens))
    return selected, total


def _jaccard_bound(elem: Element, kept: int) -> float:
    n = len(elem.tokens)
    if n == 0:
        return 0.0
    return (n - kept) / n


def _edit_bound(elem: Element, kept: int) -> float:
    L = elem.strlen
    return L / (L + kept)


def weighted_signature(R: SetRecord, index: InvertedIndex, theta_: float) -> Signature:
    """Greedy weighted scheme for the word view: token value Σ 1/|r_i| over
    owning elements, cost |I[t]|, selected in ascending cost/value until
    Σ (|r_i|−|k_i|)/|r_i| < θ."""
    if index.mode != WORDS:
        raise ValueError("weighted_signature requires the word view")
    selected, _ = _weighted_core(R, index, theta_)
    per_element = [frozenset(s) for s in selected]
    bounds = [_jaccard_bound(e, len(s)) for e, s in zip(R.elements, selected)]
    return _finish(per_element, bounds)


def _edit_weighted_core(R: SetRecord, index: InvertedIndex, theta_: float):
    """Greedy chunk selection by ascending cost/marginal-gain (edit view).

    Element bounds follow |r_i|/(|r_i|+j) in the number of selected chunk
    positions j; each next position is the element's cheapest unselected one.
    Returns (per-element selected chunk ids, per-element position counts,
    residual sum) or None when even selecting everything cannot reach Σ < θ.
    """
    elems = R.elements
    orders = [_cheap_chunks(e, index) for e in elems]
    taken = [0] * len(elems)
    chosen: list[set[int]] = [set() for _ in elems]
    total = Fraction(len(elems))
    goal = Fraction(theta_ - EPS)

    def gain(i: int, j: int) -> Fraction:
        L = elems[i].strlen
        before = Fraction(L, L + j)
        after = Fraction(L, L + j + 1)
        return before - after

    heap = []
    for i, order in enumerate(orders):
        if order:
            cost, cid, pos = order[0]
            heapq.heappush(heap, (Fraction(cost) / gain(i, 0), cost, cid, pos, i))

    while total >= goal and heap:
        _, _, cid, pos, i = heapq.heappop(heap)
        j = taken[i]
        total -= gain(i, j)
        taken[i] = j + 1
        chosen[i].add(cid)
        if taken[i] < len(orders[i]):
            cost, ncid, npos = orders[i][taken[i]]
            heapq.heappush(
                heap, (Fraction(cost) / gain(i, taken[i]), cost, ncid, npos, i)
            )
    if total >= goal:
        return None
    return chosen, taken, total


def edit_weighted_signature(
    R: SetRecord, index: InvertedIndex, theta_: float
) -> Signature:
    """Weighted scheme on q-chunks. Degenerate (empty, full-scan) when even
    selecting every chunk leaves Σ |r_i|/(|r_i|+⌈|r_i|/q⌉) ≥ θ."""
    if index.mode != GRAMS:
        raise ValueError("edit_weighted_signature requires the gram view")
    core = _edit_weighted_core(R, index, theta_)
    if core is None:
        return _degenerate(R.size)
    chosen, taken, _ = core
    per_element = [frozenset(s) for s in chosen]
    bounds = [_edit_bound(e, j) for e, j in zip(R.elements, taken)]
    return _finish(per_element, bounds)


# --- unweighted baselines -------------------------------------------------


def _removal_count(theta_: float) -> int:
    return max(math.ceil(theta_ - EPS) - 1, 0)


def unweighted_signature(
    R: SetRecord, index: InvertedIndex, theta_: float
) -> Signature:
    """Baseline: drop the ⌈θ⌉−1 token instances of the multiset R^T with the
    longest inverted lists, probe everything else (word view only)."""
    if index.mode != WORDS:
        raise ValueError("unweighted_signature requires the word view")
    instances = []
    for i, e in enumerate(R.elements):
        for t in e.tokens:
            instances.append((index.list_len(t), t, i))
    instances.sort()
    keep = instances[: max(len(instances) - _removal_count(theta_), 0)]

    selected: list[set[int]] = [set() for _ in R.elements]
    for _, t, i in keep:
        selected[i].add(t)
    per_element = [frozenset(s) for s in selected]
    bounds = [_jaccard_bound(e, len(s)) for e, s in zip(R.elements, selected)]
    return _finish(per_element, bounds)


def combined_unweighted_signature(
    R: SetRecord, index: InvertedIndex, theta_: float, alpha: float
) -> Signature:
    """Baseline: per-element sim-thresh cuts, then unweighted removal of the
    ⌈θ⌉−1 longest-list instances among the cut tokens."""
    if alpha <= 0.0:
        return unweighted_signature(R, index, theta_)
    edit = index.mode == GRAMS

    cuts: list[list[tuple]] = []
    for e in R.elements:
        if not edit and not e.tokens:
            cuts.append([])
            continue
        count = simthresh_count(e, alpha, index.mode)
        order = _cheap_chunks(e, index) if edit else _cheap_tokens(e, index)
        cuts.append(order[:count])

    instances = []
    for i, cut in enumerate(cuts):
        for entry in cut:
            instances.append((*entry, i))
    instances.sort()
    keep = instances[: max(len(instances) - _removal_count(theta_), 0)]

    selected: list[set[int]] = [set() for _ in R.elements]
    counts = [0] * len(R.elements)
    for entry in keep:
        i = entry[-1]
        selected[i].add(entry[1])
        counts[i] += 1

    per_element = [frozenset(s) for s in selected]
    bounds = []
    degenerate = False
    for e, cut, kept in zip(R.elements, cuts, counts):
        if kept == len(cut) and _zero_ok(e, kept, alpha, index.mode):
            bounds.append(0.0)
        elif edit:
            bounds.append(_edit_bound(e, kept))
            if kept == len(e.chunks):
                # every chunk probed yet the no-share ceiling stays >= alpha:
                # a partner at threshold could avoid the whole cut, so the
                # counting argument breaks; fall back to scanning.
                degenerate = True
        else:
            bounds.append(_jaccard_bound(e, kept))
    if degenerate:
        return _degenerate(R.size)
    return _finish(per_element, bounds)


# --- skyline ----------------------------------------------------------------


def skyline_signature(
    R: SetRecord, index: InvertedIndex, theta_: float, alpha: float
) -> Signature:
    """Weighted selection, then every element whose selection reached its
    sim-thresh count is cut to that many cheapest selected tokens with
    bound 0. With α = 0 this is exactly the weighted scheme."""
    edit = index.mode == GRAMS
    if alpha <= 0.0:
        return (
            edit_weighted_signature(R, index, theta_)
            if edit
            else weighted_signature(R, index, theta_)
        )

    if edit:
        core = _edit_weighted_core(R, index, theta_)
        if core is None:
            return _degenerate(R.size)
        chosen, taken, _ = core
    else:
        chosen, _ = _weighted_core(R, index, theta_)
        taken = [len(s) for s in chosen]

    per_element: list[frozenset[int]] = []
    bounds: list[float] = []
    for i, e in enumerate(R.elements):
        count = simthresh_count(e, alpha, index.mode)
        if taken[i] >= count and _zero_ok(e, taken[i], alpha, index.mode):
            if edit:
                sel = [
                    (c, cid, pos)
                    for (c, cid, pos) in _cheap_chunks(e, index)
                    if cid in chosen[i]
                ]
                kept = sel[:count]
                per_element.append(frozenset(cid for _, cid, _ in kept))
            else:
                kept = sorted((index.list_len(t), t) for t in chosen[i])[:count]
                per_element.append(frozenset(t for _, t in kept))
            bounds.append(0.0)
        else:
            per_element.append(frozenset(chosen[i]))
            bounds.append(
                _edit_bound(e, taken[i]) if edit else _jaccard_bound(e, taken[i])
            )
    return _finish(per_element, bounds)


# --- dichotomy --------------------------------------------------------------


def dichotomy_signature(
    R: SetRecord, index: InvertedIndex, theta_: float, alpha: float
) -> Signature:
    """Per-element cheapest-first selection where an element's bound drops
    linearly per token and snaps to 0 once its sim-thresh count is complete;
    globally greedy by cost over marginal bound reduction."""
    if alpha <= 0.0:
        raise ValueError("dichotomy requires alpha > 0")
    edit = index.mode == GRAMS
    elems = R.elements

    # Per-element step sequence: the `cap` cheapest tokens/positions.
    orders: list[list[tuple]] = []
    caps: list[int] = []
    zero_at: list[int] = []  # step count at which the bound becomes 0 (or -1)
    for e in elems:
        if edit:
            raw = _count_raw(e, alpha, GRAMS)
            cap = min(raw, len(e.chunks))
            orders.append(_cheap_chunks(e, index)[:cap])
            caps.append(cap)
            zero_at.append(cap if _zero_ok(e, cap, alpha, GRAMS) else -1)
        elif not e.tokens:
            orders.append([])
            caps.append(0)
            zero_at.append(0)
        else:
            cap = simthresh_count(e, alpha, WORDS)
            orders.append(_cheap_tokens(e, index)[:cap])
            caps.append(cap)
            zero_at.append(cap)

    def bound_frac(i: int, j: int) -> Fraction:
        if j == zero_at[i]:
            return Fraction(0)
        e = elems[i]
        if edit:
            return Fraction(e.strlen, e.strlen + j)
        return Fraction(len(e.tokens) - j, len(e.tokens))

    total = sum((bound_frac(i, 0) for i in range(len(elems))), start=Fraction(0))
    goal = Fraction(theta_ - EPS)
    taken = [0] * len(elems)
    chosen: list[set[int]] = [set() for _ in elems]

    heap = []

    def push(i: int) -> None:
        j = taken[i]
        if j >= caps[i]:
            return
        entry = orders[i][j]
        cost, tid = entry[0], entry[1]
        gain = bound_frac(i, j) - bound_frac(i, j + 1)
        heapq.heappush(heap, (Fraction(cost) / gain, cost, tid, i))

    for i in range(len(elems)):
        push(i)

    while total >= goal and heap:
        _, _, tid, i = heapq.heappop(heap)
        j = taken[i]
        total -= bound_frac(i, j) - bound_frac(i, j + 1)
        taken[i] = j + 1
        chosen[i].add(tid)
        push(i)

    if total >= goal:
        return _degenerate(R.size)
    per_element = [frozenset(s) for s in chosen]
    bounds = [float(bound_frac(i, taken[i])) for i in range(len(elems))]
    return _finish(per_element, bounds)


# --- dispatch ---------------------------------------------------------------


def build_signature(
    R: SetRecord,
    index: InvertedIndex,
    theta_: float,
    alpha: float,
    scheme: str,
) -> Signature:
    if scheme == WEIGHTED:
        if index.mode == GRAMS:
            return edit_weighted_signature(R, index, theta_)
        return weighted_signature(R, index, theta_)
    if scheme == UNWEIGHTED:
        return unweighted_signature(R, index, theta_)
    if scheme == SKYLINE:
        return skyline_signature(R, index, theta_, alpha)
    if scheme == DICHOTOMY:
        return dichotomy_signature(R, index, theta_, alpha)
    if scheme == COMBINED_UNWEIGHTED:
        return combined_unweighted_signature(R, index, theta_, alpha)
    raise ValueError(f"unknown scheme {scheme!r}")
