"""Shared test utilities: independent oracles and random corpus generators.

The oracles here deliberately use different algorithms than the package
(full-matrix edit DP, exhaustive permutation matching) so agreement is
meaningful.
"""

from __future__ import annotations

import itertools
import random

from relset import GRAMS, WORDS, SetRecord, TokenDictionary, make_set


def slow_levenshtein(a: str, b: str) -> int:
    """Textbook full-matrix edit distance."""
    m, n = len(a), len(b)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        dp[i][0] = i
    for j in range(n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            dp[i][j] = min(dp[i - 1][j] + 1, dp[i][j - 1] + 1, dp[i - 1][j - 1] + cost)
    return dp[m][n]


def permutation_matching(weights) -> float:
    """Maximum assignment score by trying every injection of the smaller
    side into the larger. Assumes non-negative weights."""
    rows = [list(r) for r in weights]
    if not rows or not rows[0]:
        return 0.0
    if len(rows) > len(rows[0]):
        rows = [list(c) for c in zip(*rows)]
    m, n = len(rows), len(rows[0])
    best = 0.0
    for perm in itertools.permutations(range(n), m):
        best = max(best, sum(rows[i][perm[i]] for i in range(m)))
    return best


def mutate_words(rng: random.Random, raw: str, vocab: list[str]) -> str:
    words = raw.split()
    op = rng.randrange(3)
    if op == 0 and len(words) > 1:
        words.pop(rng.randrange(len(words)))
    elif op == 1:
        words.insert(rng.randrange(len(words) + 1), rng.choice(vocab))
    else:
        words[rng.randrange(len(words))] = rng.choice(vocab)
    return " ".join(words) if words else rng.choice(vocab)


def random_word_corpus(
    rng: random.Random, n_sets: int, max_elems: int = 6, max_tokens: int = 8
) -> list[tuple[str, list[str]]]:
    """Sets of word-token elements with planted exact and near duplicates."""
    vocab = [f"w{i}" for i in range(24)]
    pool = [
        " ".join(rng.sample(vocab, rng.randint(1, max_tokens))) for _ in range(14)
    ]
    rows = []
    for i in range(n_sets):
        raws = []
        for _ in range(rng.randint(1, max_elems)):
            r = rng.random()
            if r < 0.45:
                raws.append(rng.choice(pool))
            elif r < 0.85:
                raws.append(mutate_words(rng, rng.choice(pool), vocab))
            elif r < 0.90:
                raws.append("")
            else:
                raws.append(" ".join(rng.sample(vocab, rng.randint(1, max_tokens))))
        rows.append((f"S{i}", raws))
    return rows


def mutate_string(rng: random.Random, raw: str, alphabet: str) -> str:
    chars = list(raw)
    for _ in range(rng.randint(0, 3)):
        op = rng.randrange(3)
        if op == 0 and len(chars) > 4:
            chars.pop(rng.randrange(len(chars)))
        elif op == 1 and len(chars) < 20:
            chars.insert(rng.randrange(len(chars) + 1), rng.choice(alphabet))
        else:
            chars[rng.randrange(len(chars))] = rng.choice(alphabet)
    return "".join(chars)


def random_edit_corpus(
    rng: random.Random, n_sets: int, max_elems: int = 6
) -> list[tuple[str, list[str]]]:
    """Sets of strings (length 4-20) with planted near-duplicates."""
    alphabet = "abcdef"
    pool = [
        "".join(rng.choice(alphabet) for _ in range(rng.randint(4, 20)))
        for _ in range(12)
    ]
    rows = []
    for i in range(n_sets):
        raws = []
        for _ in range(rng.randint(1, max_elems)):
            r = rng.random()
            if r < 0.45:
                raws.append(rng.choice(pool))
            elif r < 0.9:
                raws.append(mutate_string(rng, rng.choice(pool), alphabet))
            else:
                raws.append(
                    "".join(rng.choice(alphabet) for _ in range(rng.randint(4, 20)))
                )
        rows.append((f"S{i}", raws))
    return rows


def build_records(
    rows: list[tuple[str, list[str]]], mode: str, q: int | None = None
) -> tuple[list[SetRecord], TokenDictionary]:
    d = TokenDictionary()
    return [make_set(sid, raws, mode, q, d) for sid, raws in rows], d


def pair_ids(pairs) -> list[tuple[str, str]]:
    return [(p.r_id, p.s_id) for p in pairs]


def assert_same_pairs(got, want) -> None:
    assert pair_ids(got) == pair_ids(want)
    for g, w in zip(got, want):
        assert g.metric == w.metric
        assert abs(g.matching_score - w.matching_score) < 1e-9
        assert abs(g.relatedness - w.relatedness) < 1e-9


GOLDEN_COLLECTION = [
    ("S1", ["t2 t3 t5 t6 t7", "t1 t2 t4 t5 t6", "t1 t2 t3 t4 t7"]),
    ("S2", ["t1 t6 t8", "t1 t4 t5 t6 t7", "t1 t2 t3 t7 t9"]),
    ("S3", ["t1 t2 t3 t4 t6 t8", "t2 t3 t11 t12", "t1 t2 t3 t5"]),
    ("S4", ["t1 t2 t3 t8", "t4 t5 t7 t9 t10", "t1 t4 t5 t6 t9"]),
]
GOLDEN_REFERENCE = ("R", ["t1 t2 t3 t6 t8", "t4 t5 t7 t9 t10", "t1 t4 t5 t11 t12"])
