"""Search-pass orchestration: discovery, single-reference search, oracle.

A pass takes one reference set R against an indexed collection: size filter,
signature generation, candidate selection + check filter, NN filter, then
exact verification by maximum-weight matching. Discovery runs one pass per
reference set; `brute_force` verifies every pair with no filtering and is the
ground truth the filtered pipeline must reproduce exactly.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from . import refine
from .invindex import InvertedIndex
from .matching import (
    CONTAINMENT,
    METRICS,
    SIMILARITY,
    contain_value,
    matching_score,
    reduced_matching_score,
    similar_value,
)
from .signature import (
    DICHOTOMY,
    EPS,
    SCHEMES,
    UNWEIGHTED,
    WEIGHTED,
    build_signature,
    max_q,
    theta,
)
from .simfn import JACCARD, NEDS, PhiCache, SimConfig
from .tokens import GRAMS, WORDS, SetRecord


class ConfigError(ValueError):
    """Raised for invalid search configurations."""


@dataclass(frozen=True)
class RelatednessConfig:
    """Full specification of one discovery/search run.

    `scheme`, `q` and `reduction` may be left unset; `normalize` fills them
    with the documented defaults (dichotomy when α > 0 else weighted; the
    largest legal q; reduction on whenever it is exact).
    """

    metric: str = CONTAINMENT
    sim: SimConfig = SimConfig()
    delta: float = 0.7
    q: int | None = None
    scheme: str | None = None
    size_filter: bool = True
    check_filter: bool = True
    nn_filter: bool = True
    reduction: bool | None = None
    workers: int = 1

    @property
    def mode(self) -> str:
        return WORDS if self.sim.kind == JACCARD else GRAMS


def normalize(cfg: RelatednessConfig) -> RelatednessConfig:
    """Validate a configuration and resolve defaulted fields."""
    if cfg.metric not in METRICS:
        raise ConfigError(f"unknown metric {cfg.metric!r}")
    if not 0.0 < cfg.delta <= 1.0:
        raise ConfigError(f"delta must be in (0, 1], got {cfg.delta}")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    alpha = cfg.sim.alpha

    scheme = cfg.scheme
    if scheme is None:
        scheme = DICHOTOMY if alpha > 0.0 else WEIGHTED
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    if alpha == 0.0 and scheme not in (WEIGHTED, UNWEIGHTED):
        raise ConfigError(f"scheme {scheme!r} requires alpha > 0")
    if scheme == UNWEIGHTED and cfg.sim.kind != JACCARD:
        raise ConfigError(
            "the unweighted scheme is only valid for jaccard: a signature "
            "miss does not bound edit similarity"
        )

    q = cfg.q
    if cfg.sim.kind == JACCARD:
        if q is not None:
            raise ConfigError("q applies only to edit similarity")
    else:
        if q is None:
            try:
                q = max_q(cfg.delta, alpha)
            except ValueError as e:
                raise ConfigError(str(e)) from None
        if q < 1:
            raise ConfigError(f"q must be >= 1, got {q}")
        if cfg.delta < 1.0 and q >= cfg.delta / (1.0 - cfg.delta) - EPS:
            raise ConfigError(
                f"q={q} violates q < delta/(1-delta) = "
                f"{cfg.delta / (1.0 - cfg.delta):.6g}"
            )
        if alpha > 0.0 and q >= alpha / (1.0 - alpha) - EPS:
            raise ConfigError(
                f"q={q} violates q < alpha/(1-alpha) = "
                f"{alpha / (1.0 - alpha):.6g}"
            )

    reduction = cfg.reduction
    reducible = alpha == 0.0 and cfg.sim.kind != NEDS
    if reduction is None:
        reduction = reducible
    elif reduction and not reducible:
        raise ConfigError(
            "reduction-based verification is exact only for alpha = 0 with "
            "jaccard or eds"
        )
    return replace(cfg, scheme=scheme, q=q, reduction=reduction)


@dataclass
class PassStats:
    """Per-stage candidate counts and timings, summable across passes."""

    sets_scanned: int = 0
    size_filtered: int = 0
    candidates_initial: int = 0
    after_check: int = 0
    after_nn: int = 0
    matchings_computed: int = 0
    verified: int = 0
    timings: dict[str, float] = field(default_factory=dict)

    COUNTERS = (
        "sets_scanned",
        "size_filtered",
        "candidates_initial",
        "after_check",
        "after_nn",
        "matchings_computed",
        "verified",
    )

    def merge(self, other: "PassStats") -> None:
        for name in self.COUNTERS:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        for stage, secs in other.timings.items():
            self.timings[stage] = self.timings.get(stage, 0.0) + secs

    def _time(self, stage: str, secs: float) -> None:
        self.timings[stage] = self.timings.get(stage, 0.0) + secs

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in self.COUNTERS}
        out["timings"] = dict(self.timings)
        return out


@dataclass(frozen=True)
class RelatedPair:
    r_id: str
    s_id: str
    matching_score: float
    relatedness: float
    metric: str


def _relatedness(score: float, metric: str, nr: int, ns: int) -> float:
    if metric == CONTAINMENT:
        return contain_value(score, nr)
    return similar_value(score, nr, ns)


def _verify(R, S, cfg, cache, stats):
    solve = reduced_matching_score if cfg.reduction else matching_score
    res = solve(R, S, cfg.sim, cache)
    stats.matchings_computed += 1
    return res.score


def search_pass(
    R: SetRecord,
    index: InvertedIndex,
    cfg: RelatednessConfig,
    cache: PhiCache,
    stats: PassStats,
    skip: int | None = None,
    min_ordinal: int = -1,
) -> list[RelatedPair]:
    """One reference set against the indexed collection. `skip` drops one
    ordinal (self-join identity); ordinals ≤ `min_ordinal` are not verified
    (self-join similarity emits each unordered pair from its first pass)."""
    n = len(index.sets)
    stats.sets_scanned += n

    t0 = time.perf_counter()
    allowed = set(range(n))
    if skip is not None:
        allowed.discard(skip)
    if min_ordinal >= 0:
        allowed = {o for o in allowed if o > min_ordinal}
    if cfg.size_filter:
        passing = {
            o
            for o in allowed
            if refine.size_filter(R.size, index.sets[o].size, cfg.delta, cfg.metric)
        }
        stats.size_filtered += len(allowed) - len(passing)
        allowed = passing
    stats._time("size", time.perf_counter() - t0)

    t0 = time.perf_counter()
    theta_ = theta(R, cfg.delta)
    sig = build_signature(R, index, theta_, cfg.sim.alpha, cfg.scheme)
    stats._time("signature", time.perf_counter() - t0)

    if sig.degenerate:
        survivors = sorted(allowed)
        k = len(survivors)
        stats.candidates_initial += k
        stats.after_check += k
        stats.after_nn += k
    else:
        t0 = time.perf_counter()
        cands, initial = refine.select_and_check(
            R, sig, index, cache, check=cfg.check_filter, allowed=allowed
        )
        stats.candidates_initial += initial
        stats.after_check += len(cands)
        stats._time("select_check", time.perf_counter() - t0)

        if cfg.nn_filter:
            t0 = time.perf_counter()
            cands = refine.nn_filter(
                R, sig, index, cands, theta_, cache, check_used=cfg.check_filter
            )
            stats._time("nn", time.perf_counter() - t0)
        stats.after_nn += len(cands)
        survivors = sorted(cands)

    t0 = time.perf_counter()
    pairs = []
    for o in survivors:
        S = index.sets[o]
        score = _verify(R, S, cfg, cache, stats)
        rel = _relatedness(score, cfg.metric, R.size, S.size)
        if rel >= cfg.delta - EPS:
            stats.verified += 1
            pairs.append(RelatedPair(R.sid, S.sid, score, rel, cfg.metric))
    stats._time("verify", time.perf_counter() - t0)
    return pairs


def _pair_sort(pairs: list[RelatedPair]) -> list[RelatedPair]:
    return sorted(pairs, key=lambda p: (p.r_id, p.s_id))


def _run_passes(tasks, cfg, worker):
    """Run one worker call per task, merging (pairs, stats) deterministically."""
    pairs: list[RelatedPair] = []
    stats = PassStats()
    if cfg.workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(worker, tasks))
    else:
        results = [worker(t) for t in tasks]
    for got, st in results:
        pairs.extend(got)
        stats.merge(st)
    return pairs, stats


def discover(
    Rcoll: list[SetRecord],
    Scoll: list[SetRecord] | None,
    cfg: RelatednessConfig,
    memo: dict | None = None,
) -> tuple[list[RelatedPair], PassStats]:
    """All related pairs between Rcoll and Scoll (self-join when Scoll is
    None: similarity pairs unordered-once, containment pairs both ways,
    identity excluded)."""
    cfg = normalize(cfg)
    self_join = Scoll is None
    coll = Rcoll if self_join else Scoll
    index = InvertedIndex.build(coll, cfg.mode, cfg.q)
    cache = PhiCache(cfg.sim, memo)

    def worker(task):
        i, R = task
        st = PassStats()
        if not self_join:
            got = search_pass(R, index, cfg, cache, st)
        elif cfg.metric == SIMILARITY:
            got = search_pass(R, index, cfg, cache, st, skip=i, min_ordinal=i)
        else:
            got = search_pass(R, index, cfg, cache, st, skip=i)
        return got, st

    pairs, stats = _run_passes(list(enumerate(Rcoll)), cfg, worker)
    return _pair_sort(pairs), stats


def search(
    R: SetRecord,
    collection: list[SetRecord] | InvertedIndex,
    cfg: RelatednessConfig,
    memo: dict | None = None,
) -> tuple[list[RelatedPair], PassStats]:
    """All sets of the collection related to the single reference R
    (a set identical to R is reported)."""
    cfg = normalize(cfg)
    if isinstance(collection, InvertedIndex):
        index = collection
    else:
        index = InvertedIndex.build(collection, cfg.mode, cfg.q)
    cache = PhiCache(cfg.sim, memo)
    stats = PassStats()
    pairs = search_pass(R, index, cfg, cache, stats)
    return _pair_sort(pairs), stats


def brute_force(
    Rcoll: list[SetRecord],
    Scoll: list[SetRecord] | None,
    cfg: RelatednessConfig,
    memo: dict | None = None,
) -> list[RelatedPair]:
    """Ground-truth oracle: verify every pair with plain matching, no
    signatures, filters, or reduction. Pair semantics mirror `discover`."""
    cfg = normalize(cfg)
    self_join = Scoll is None
    coll = Rcoll if self_join else Scoll
    cache = PhiCache(cfg.sim, memo)
    stats = PassStats()
    pairs = []
    for i, R in enumerate(Rcoll):
        for j, S in enumerate(coll):
            if self_join and (j == i or (cfg.metric == SIMILARITY and j < i)):
                continue
            score = _verify(R, S, replace(cfg, reduction=False), cache, stats)
            rel = _relatedness(score, cfg.metric, R.size, S.size)
            if rel >= cfg.delta - EPS:
                pairs.append(RelatedPair(R.sid, S.sid, score, rel, cfg.metric))
    return _pair_sort(pairs)
