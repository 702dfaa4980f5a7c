from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import GOLDEN_COLLECTION, GOLDEN_REFERENCE, build_records

from relset import InvertedIndex, SetRecord, TokenDictionary, WORDS, make_set

DATA_DIR = Path(__file__).parent / "data"


@dataclass
class GoldenCorpus:
    """The running-example corpus: reference R against sets S1-S4."""

    dictionary: TokenDictionary
    collection: list[SetRecord]
    reference: SetRecord
    index: InvertedIndex

    def tid(self, token: str) -> int:
        return self.dictionary.get(token)

    def tids(self, *tokens: str) -> frozenset[int]:
        return frozenset(self.dictionary.get(t) for t in tokens)


@pytest.fixture(scope="session")
def golden() -> GoldenCorpus:
    # Collection interned before the reference so index ids are dense.
    d = TokenDictionary()
    coll = [make_set(sid, raws, WORDS, None, d) for sid, raws in GOLDEN_COLLECTION]
    ref = make_set(GOLDEN_REFERENCE[0], GOLDEN_REFERENCE[1], WORDS, None, d)
    index = InvertedIndex.build(coll, WORDS, None, dictionary=d)
    return GoldenCorpus(d, coll, ref, index)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
