"""Element similarity functions and the alpha cutoff wrapper.

Three measures over element pairs, all in [0, 1]:

  jaccard(x, y)  = |x & y| / |x | y|            on token-id sets
  eds(a, b)      = 1 - 2*LD / (|a| + |b| + LD)  on raw strings
  neds(a, b)     = 1 - LD / max(|a|, |b|)       on raw strings

where LD is the unit-cost Levenshtein distance. eds(a, b) >= neds(a, b) always,
with equality exactly when LD equals the length difference.

phi_alpha zeroes any similarity below alpha, which is what the matching and the
filters consume.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tokens import Element

JACCARD = "jaccard"
EDS = "eds"
NEDS = "neds"
KINDS = (JACCARD, EDS, NEDS)


def levenshtein(a: str, b: str, cutoff: int | None = None) -> int:
    """Unit-cost edit distance (insert / delete / substitute).

    Without a cutoff the exact distance is returned (two-row DP, O(min*max)
    time, O(min) space). With cutoff k the DP is banded to the diagonal strip
    of width 2k+1 and returns k+1 as soon as the distance provably exceeds k;
    values <= k are still exact.
    """
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la > lb:
        a, b, la, lb = b, a, lb, la
    if cutoff is not None:
        if cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        if lb - la > cutoff:
            return cutoff + 1

    # Shared prefix and suffix contribute nothing.
    start = 0
    while start < la and a[start] == b[start]:
        start += 1
    ea, eb = la, lb
    while ea > start and a[ea - 1] == b[eb - 1]:
        ea -= 1
        eb -= 1
    a, b = a[start:ea], b[start:eb]
    la, lb = len(a), len(b)
    if la == 0:
        return lb if cutoff is None else min(lb, cutoff + 1)

    if cutoff is None:
        row = list(range(la + 1))
        for j in range(1, lb + 1):
            cb = b[j - 1]
            diag = row[0]
            row[0] = j
            for i in range(1, la + 1):
                cur = diag if a[i - 1] == cb else diag + 1
                v = row[i] + 1
                if v < cur:
                    cur = v
                v = row[i - 1] + 1
                if v < cur:
                    cur = v
                diag = row[i]
                row[i] = cur
        return row[la]

    k = cutoff
    inf = k + 1
    # row[i] holds cell (i, j) of the DP table, clipped to inf outside the
    # |i - j| <= k band (any alignment path through such a cell costs > k).
    row = [i if i <= k else inf for i in range(la + 1)]
    for j in range(1, lb + 1):
        cb = b[j - 1]
        lo = max(1, j - k)
        hi = min(la, j + k)
        diag = row[lo - 1]
        left = j if lo == 1 and j <= k else inf
        row[lo - 1] = left
        best = left
        for i in range(lo, hi + 1):
            up = row[i] if i - j + 1 <= k else inf
            cur = diag if a[i - 1] == cb else diag + 1
            if up + 1 < cur:
                cur = up + 1
            if left + 1 < cur:
                cur = left + 1
            if cur > inf:
                cur = inf
            diag = row[i]
            row[i] = cur
            left = cur
            if cur < best:
                best = cur
        if best > k:
            return inf
    return min(row[la], inf)


def jaccard(x: frozenset[int], y: frozenset[int]) -> float:
    """Jaccard similarity of two token-id sets; 0.0 when the union is empty."""
    if not x or not y:
        return 0.0
    inter = len(x & y)
    return inter / (len(x) + len(y) - inter)


def eds(a: str, b: str) -> float:
    """Edit similarity normalized by |a| + |b| + LD; 1.0 for two empty strings."""
    ld = levenshtein(a, b)
    denom = len(a) + len(b) + ld
    return 1.0 - (2.0 * ld) / denom if denom else 1.0


def neds(a: str, b: str) -> float:
    """Edit similarity normalized by the longer length; 1.0 for two empty strings."""
    m = max(len(a), len(b))
    return 1.0 - levenshtein(a, b) / m if m else 1.0


@dataclass(frozen=True)
class SimConfig:
    """Element similarity: which measure, and the alpha cutoff."""

    kind: str = JACCARD
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown similarity kind {self.kind!r}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")


def phi(cfg: SimConfig, x: Element, y: Element) -> float:
    """Raw similarity of two elements under cfg.kind (no alpha cutoff)."""
    if cfg.kind == JACCARD:
        return jaccard(x.tokens, y.tokens)
    if cfg.kind == EDS:
        return eds(x.raw, y.raw)
    return neds(x.raw, y.raw)


def phi_alpha(cfg: SimConfig, x: Element, y: Element) -> float:
    v = phi(cfg, x, y)
    return v if v >= cfg.alpha else 0.0


class PhiCache:
    """Memoizes raw phi per unordered element pair.

    The raw value is independent of alpha, so one memo dict can be shared
    across runs that differ only in alpha / delta / scheme (pass it in as
    `memo`). Keys are element eids; all measures here are symmetric.
    """

    __slots__ = ("sim", "_memo")

    def __init__(self, sim: SimConfig, memo: dict | None = None) -> None:
        self.sim = sim
        self._memo = {} if memo is None else memo

    def phi(self, x: Element, y: Element) -> float:
        key = (x.eid, y.eid) if x.eid <= y.eid else (y.eid, x.eid)
        v = self._memo.get(key)
        if v is None:
            v = phi(self.sim, x, y)
            self._memo[key] = v
        return v

    def phi_alpha(self, x: Element, y: Element) -> float:
        v = self.phi(x, y)
        return v if v >= self.sim.alpha else 0.0

    def __len__(self) -> int:
        return len(self._memo)
