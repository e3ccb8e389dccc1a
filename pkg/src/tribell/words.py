"""Operator words and generating sets for moment-matrix relaxations.

Only 0-outcome projectors are represented: for a two-outcome projective
measurement the other projector is the identity minus this one, so words
over 0-outcome projectors span everything needed.

Projectors of different parties commute, so any word factorizes into one
ordered local word per party; a Word is stored as that triple of per-party
setting sequences (empty sequence = identity).  Within a party, projector
idempotence collapses adjacent equal settings, leaving alternating
sequences.  The canonical representative of a moment class additionally
identifies a word with its reversal (operator adjoint); the reversal carries
complex conjugation of the moment, tracked by a flag.

Two families of generating sets are built here, both duplicate-free lists
of canonical words:

* ``npa(k)``    -- all words of total length <= k (sizes 7, 25, 63);
* ``local(l)``  -- Cartesian products of per-party words of length <= l
                   (sizes (2l+1)^3: 27, 125, ..., 2197), whose product
                   index structure is what partial transposition acts on.

``local(1)`` is the almost-quantum set's generating set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import UnsupportedLevel

LocalWord = tuple[int, ...]
Word = tuple[LocalWord, LocalWord, LocalWord]

IDENTITY_WORD: Word = ((), (), ())

NPA_LEVELS = (1, 2, 3)
LOCAL_LEVELS = (1, 2, 3, 4, 5, 6)
#: Levels whose moment matrices exceed the desk-scale solve budget; the
#: generating set is still constructed (structure checks only).
SOLVE_GATED_LOCAL_LEVELS = (4, 5, 6)


@dataclass(frozen=True)
class Projector:
    """A 0-outcome projector of one party at one setting."""

    party: int
    setting: int

    def __post_init__(self):
        if self.party not in (0, 1, 2) or self.setting not in (0, 1):
            raise ValueError("party in {0,1,2} and setting in {0,1} required")


def reduce_local(seq: Iterable[int]) -> LocalWord:
    """Collapse adjacent equal settings to a fixpoint (idempotence)."""
    out: list[int] = []
    for s in seq:
        if out and out[-1] == s:
            continue
        out.append(s)
    return tuple(out)


def word_from_projectors(projectors: Sequence[Projector]) -> Word:
    """Sort a projector sequence into per-party local words (stable order)."""
    parts: tuple[list[int], ...] = ([], [], [])
    for p in projectors:
        parts[p.party].append(p.setting)
    return tuple(reduce_local(part) for part in parts)  # type: ignore[return-value]


def reverse_word(w: Word) -> Word:
    return tuple(tuple(reversed(part)) for part in w)  # type: ignore[return-value]


def multiply(left: Word, right: Word) -> Word:
    """Concatenate per party and reduce."""
    return tuple(reduce_local(l + r) for l, r in zip(left, right))  # type: ignore[return-value]


def word_length(w: Word) -> int:
    return sum(len(part) for part in w)


@dataclass(frozen=True)
class MomentKey:
    """Canonical label of a moment equivalence class.

    ``word`` is the representative (lexicographically smaller of the reduced
    word and its reversal); ``conjugated`` records whether the queried word
    was the reversal of the representative, in which case its moment is the
    complex conjugate of the class value.
    """

    word: Word
    conjugated: bool

    @property
    def is_real(self) -> bool:
        # palindromic words equal their reversal, pinning the moment real
        return self.word == reverse_word(self.word)

    def conjugate(self) -> "MomentKey":
        return MomentKey(self.word, not self.conjugated)


def canonicalize(w: Word | Sequence[Projector]) -> MomentKey:
    """Canonical moment key of a word (or raw projector sequence)."""
    if w and isinstance(w[0], Projector):
        word = word_from_projectors(w)  # type: ignore[arg-type]
    else:
        word = tuple(reduce_local(part) for part in w)  # type: ignore[assignment]
        if len(word) != 3:
            raise ValueError("a word has exactly three per-party parts")
    rev = reverse_word(word)
    if rev < word:
        return MomentKey(rev, True)
    return MomentKey(word, False)


def entry_key(row_word: Word, col_word: Word) -> MomentKey:
    """Key of the moment <(row word)^dagger (col word)>."""
    return canonicalize(multiply(reverse_word(row_word), col_word))


def local_words_up_to(level: int) -> tuple[LocalWord, ...]:
    """Alternating one-party words of length 0..level, by (length, lex)."""
    out: list[LocalWord] = [()]
    for length in range(1, level + 1):
        for start in (0, 1):
            out.append(tuple((start + i) % 2 for i in range(length)))
    return tuple(sorted(out, key=lambda t: (len(t), t)))


@dataclass(frozen=True)
class GeneratingSet:
    """An ordered, duplicate-free list of canonical words labelling a moment matrix."""

    kind: str  # "npa" | "local"
    level: int
    words: tuple[Word, ...]
    local_words: tuple[LocalWord, ...] | None = None  # per-party labels (product sets)

    @property
    def is_product(self) -> bool:
        return self.kind == "local"

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def solve_gated(self) -> bool:
        return self.kind == "local" and self.level in SOLVE_GATED_LOCAL_LEVELS

    def product_index(self, ia: int, ib: int, ic: int) -> int:
        """Row index of the per-party label triple (product sets only)."""
        assert self.local_words is not None
        n = len(self.local_words)
        return (ia * n + ib) * n + ic

    def describe(self) -> str:
        return f"{self.kind}{self.level}"


def _npa_words(k: int) -> tuple[Word, ...]:
    per_party = local_words_up_to(k)
    words = [
        w
        for w in itertools.product(per_party, repeat=3)
        if sum(len(part) for part in w) <= k
    ]
    words.sort(key=lambda w: (word_length(w), w))
    return tuple(words)  # type: ignore[return-value]


def generating_set(spec: str) -> GeneratingSet:
    """Build a generating set from a tag: "npa1".."npa3", "local1".."local6", "aq".

    "aq" is an alias for "local1" (the almost-quantum set).  Raises
    :class:`UnsupportedLevel` outside the supported ranges.
    """
    tag = spec.strip().lower()
    if tag == "aq":
        tag = "local1"
    if tag.startswith("npa"):
        try:
            k = int(tag[3:])
        except ValueError:
            raise UnsupportedLevel(f"bad generating-set tag {spec!r}")
        if k not in NPA_LEVELS:
            raise UnsupportedLevel(f"npa level {k} unsupported (levels {NPA_LEVELS})")
        return GeneratingSet(kind="npa", level=k, words=_npa_words(k))
    if tag.startswith("local"):
        try:
            lvl = int(tag[5:])
        except ValueError:
            raise UnsupportedLevel(f"bad generating-set tag {spec!r}")
        if lvl not in LOCAL_LEVELS:
            raise UnsupportedLevel(f"local level {lvl} unsupported (levels {LOCAL_LEVELS})")
        per_party = local_words_up_to(lvl)
        words = tuple(itertools.product(per_party, repeat=3))
        return GeneratingSet(kind="local", level=lvl, words=words, local_words=per_party)
    raise UnsupportedLevel(f"unknown generating-set tag {spec!r}")
