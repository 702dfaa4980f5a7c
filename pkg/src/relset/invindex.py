"""Inverted index over a collection of sets.

Maps each token id to the postings list of (set ordinal, element index) pairs
for every element whose token set contains it. Ordinals are positions in the
indexed collection, so postings lists come out sorted by construction.

In the gram view the index is keyed by q-grams; q-chunk ids probe it directly
because every chunk is also one of its string's grams.
"""

from __future__ import annotations

from bisect import bisect_left

from .tokens import WORDS, SetRecord, TokenDictionary

_EMPTY: tuple = ()


class InvertedIndex:
    __slots__ = ("sets", "mode", "q", "postings")

    def __init__(
        self,
        sets: list[SetRecord],
        mode: str,
        q: int | None,
        postings: dict[int, list[tuple[int, int]]],
    ) -> None:
        self.sets = sets
        self.mode = mode
        self.q = q
        self.postings = postings

    @classmethod
    def build(
        cls,
        sets: list[SetRecord],
        mode: str = WORDS,
        q: int | None = None,
        dictionary: TokenDictionary | None = None,
    ) -> "InvertedIndex":
        postings: dict[int, list[tuple[int, int]]] = {}
        for ordinal, rec in enumerate(sets):
            for idx, elem in enumerate(rec.elements):
                for tid in elem.tokens:
                    postings.setdefault(tid, []).append((ordinal, idx))
        index = cls(sets, mode, q, postings)
        if dictionary is not None:
            dictionary.df = [
                len(postings.get(tid, _EMPTY)) for tid in range(len(dictionary))
            ]
        return index

    def list_len(self, tid: int) -> int:
        """Postings list length for a token id; 0 when unindexed."""
        return len(self.postings.get(tid, _EMPTY))

    def posting_list(self, tid: int) -> list[tuple[int, int]]:
        return self.postings.get(tid, [])

    def postings_in_set(self, tid: int, ordinal: int) -> list[int]:
        """Element indices of one indexed set whose tokens contain `tid`."""
        lst = self.postings.get(tid)
        if not lst:
            return []
        out = []
        i = bisect_left(lst, (ordinal,))
        while i < len(lst) and lst[i][0] == ordinal:
            out.append(lst[i][1])
            i += 1
        return out

    def __len__(self) -> int:
        return len(self.sets)
