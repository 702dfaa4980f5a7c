"""Token layer: interning dictionary, word / q-gram tokenization, elements and sets.

Elements are short strings. Depending on the configured element similarity they
are viewed either as sets of whitespace-delimited words (token-based measures)
or as sets of padded q-grams (edit-based measures). Both views intern token
strings into dense integer ids through a shared TokenDictionary so that
downstream structures (inverted index, signatures) work on ints only.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

# Reserved pad code point appended to the tail of q-grams / the final q-chunk.
# Inputs containing it are rejected at tokenization time.
PAD = "\x01"

# Element view names. WORDS: whitespace words, set semantics.
# GRAMS: padded q-grams (element strings treated as sequences).
WORDS = "words"
GRAMS = "grams"

_WORD_SPLIT = re.compile(r"[ \t\n]+")

_eid_counter = itertools.count()


class TokenDictionary:
    """Interns token strings to dense ids in first-seen order.

    The same dictionary must be shared by every collection that participates
    in one search so that equal strings map to equal ids. `df` mirrors the
    inverted-list length per token id once an index has been built over a
    collection (reference-only tokens interned later simply have no entry).
    """

    __slots__ = ("_ids", "_strings", "df")

    def __init__(self) -> None:
        self._ids: dict[str, int] = {}
        self._strings: list[str] = []
        self.df: list[int] = []

    def intern(self, token: str) -> int:
        tid = self._ids.get(token)
        if tid is None:
            tid = len(self._strings)
            self._ids[token] = tid
            self._strings.append(token)
        return tid

    def get(self, token: str) -> int | None:
        """Id of an already-interned token, or None."""
        return self._ids.get(token)

    def token(self, tid: int) -> str:
        return self._strings[tid]

    def __len__(self) -> int:
        return len(self._strings)

    def __contains__(self, token: str) -> bool:
        return token in self._ids


def word_tokens(raw: str, dictionary: TokenDictionary) -> frozenset[int]:
    """Distinct whitespace-delimited words of `raw` as interned ids.

    Runs of ASCII space, tab and newline separate words; repeated words
    collapse (set semantics).
    """
    _reject_pad(raw)
    return frozenset(
        dictionary.intern(w) for w in _WORD_SPLIT.split(raw) if w
    )


def qgrams(raw: str, q: int, dictionary: TokenDictionary) -> frozenset[int]:
    """Distinct q-grams of `raw` padded at the end with q-1 pad characters.

    A string of n code points yields n gram positions (the trailing grams run
    into the padding), deduplicated to a set of ids.
    """
    _reject_pad(raw)
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    padded = raw + PAD * (q - 1)
    return frozenset(
        dictionary.intern(padded[i : i + q]) for i in range(len(raw))
    )


def qchunks(raw: str, q: int, dictionary: TokenDictionary) -> tuple[int, ...]:
    """Disjoint q-chunks of `raw` in position order, final chunk padded to q.

    A string of n code points has ceil(n / q) chunks. Every chunk is also one
    of the string's q-grams (the final one thanks to the shared padding), so
    chunk ids can be probed against a gram-keyed index directly.
    """
    _reject_pad(raw)
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    padded = raw + PAD * (q - 1)
    return tuple(
        dictionary.intern(padded[i : i + q]) for i in range(0, len(raw), q)
    )


def _reject_pad(raw: str) -> None:
    if PAD in raw:
        raise ValueError("input contains the reserved pad code point U+0001")


@dataclass(eq=False)
class Element:
    """One element of a set: its raw string plus the tokenized view.

    `tokens` holds word ids (WORDS view) or all gram ids (GRAMS view).
    `chunks` holds the per-position q-chunk ids and is only set in the GRAMS
    view. `eid` is a process-unique id used as a cache key.
    """

    raw: str
    tokens: frozenset[int]
    chunks: tuple[int, ...] | None = None
    eid: int = field(default_factory=lambda: next(_eid_counter))

    @property
    def strlen(self) -> int:
        return len(self.raw)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Element({self.raw!r})"


@dataclass(eq=False)
class SetRecord:
    """A named set of elements."""

    sid: str
    elements: list[Element]

    @property
    def size(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:  # pragma: no cover
        return f"SetRecord({self.sid!r}, {self.size} elements)"


def make_element(
    raw: str, mode: str, q: int | None, dictionary: TokenDictionary
) -> Element:
    """Tokenize one raw string under the given view."""
    if mode == WORDS:
        return Element(raw, word_tokens(raw, dictionary))
    if mode == GRAMS:
        if q is None:
            raise ValueError("gram view requires q")
        if not raw:
            raise ValueError("empty element string not allowed in gram view")
        return Element(raw, qgrams(raw, q, dictionary), qchunks(raw, q, dictionary))
    raise ValueError(f"unknown tokenization mode {mode!r}")


def make_set(
    sid: str,
    raws: list[str],
    mode: str,
    q: int | None,
    dictionary: TokenDictionary,
) -> SetRecord:
    if not raws:
        raise ValueError(f"set {sid!r} has no elements")
    return SetRecord(sid, [make_element(r, mode, q, dictionary) for r in raws])
