"""Bigram counting, interpolated Kneser-Ney estimation, and ARPA
serialization.

The model interpolates a discounted bigram estimate with a continuation
unigram distribution:

    p(w|v) = max(c2(v,w) - D, 0) / c1(v) + lambda(v) * p_cont(w)
    lambda(v) = D * fertility(v) / c1(v)
    p_cont(w) = continuation(w) / total_bigram_types

where ``continuation(w)`` is the number of distinct left contexts of ``w``
and ``fertility(v)`` the number of distinct continuations of ``v``. The
discount defaults to the count-of-counts estimate ``n1 / (n1 + 2*n2)``.

Probabilities are normalized over the trained event space (corpus lemmas
plus the sentence-end symbol). The unknown symbol sits outside that
simplex as an epsilon floor on the continuation distribution, so known
probabilities are untouched by out-of-vocabulary policy while unknown
queries still return a positive value.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Document, sentences
from .errors import DegenerateCountsError, ParseError

START = "<s>"
END = "</s>"
UNK = "<unk>"
RESERVED = (START, END, UNK)

DISCOUNT_EPS = 1e-6


@dataclass(frozen=True)
class Vocabulary:
    """Dense 0-based lemma ids with the reserved symbols first."""

    index: dict[str, int]

    @classmethod
    def from_lemmas(cls, lemmas: Iterable[str]) -> "Vocabulary":
        corpus_lemmas = sorted(set(lemmas))
        for symbol in RESERVED:
            if symbol in corpus_lemmas:
                raise ValueError(
                    f"reserved symbol {symbol!r} appears as a corpus lemma"
                )
        index = {symbol: i for i, symbol in enumerate(RESERVED)}
        for lemma in corpus_lemmas:
            index[lemma] = len(index)
        return cls(index)

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.index

    def __len__(self) -> int:
        return len(self.index)

    def words(self) -> list[str]:
        return sorted(self.index, key=self.index.__getitem__)

    def corpus_size(self) -> int:
        return len(self.index) - len(RESERVED)

    def event_words(self) -> list[str]:
        """Vocabulary entries the model assigns normalized mass to:
        everything except the start and unknown symbols."""
        return [w for w in self.words() if w not in (START, UNK)]


@dataclass
class BigramCounts:
    """Raw and derived count statistics for one or more documents.

    ``c1`` counts tokens of each symbol in start/end-padded sentences, so
    ``sum_w c2(v, w) == c1(v)`` for every context except the end symbol.
    """

    c1: Counter = field(default_factory=Counter)
    c2: Counter = field(default_factory=Counter)
    continuation: Counter = field(default_factory=Counter)  # distinct left contexts per word
    fertility: Counter = field(default_factory=Counter)     # distinct continuations per context
    total_bigram_types: int = 0

    def _refresh_derived(self):
        self.continuation = Counter()
        self.fertility = Counter()
        for (v, w) in self.c2:
            self.continuation[w] += 1
            self.fertility[v] += 1
        self.total_bigram_types = len(self.c2)

    def merge(self, other: "BigramCounts") -> "BigramCounts":
        merged = BigramCounts(self.c1 + other.c1, self.c2 + other.c2)
        merged._refresh_derived()
        return merged

    def token_count(self) -> int:
        """Corpus word tokens (padding symbols excluded)."""
        return sum(n for w, n in self.c1.items() if w not in RESERVED)

    def sentence_count(self) -> int:
        return self.c1[START]


def count_bigrams(
    docs: Iterable[Document],
    include_punctuation: bool = False,
    unit: str = "lemma",
) -> BigramCounts:
    """Count padded within-sentence bigrams over all documents.

    Each sentence is wrapped in one start and one end symbol; no bigram
    crosses a sentence boundary. Sentences without any countable token
    contribute nothing.
    """
    counts = BigramCounts()
    for doc in docs:
        for sentence in sentences(doc, include_punctuation, unit):
            padded = [START] + sentence + [END]
            for symbol in padded:
                counts.c1[symbol] += 1
            for left, right in zip(padded, padded[1:]):
                counts.c2[(left, right)] += 1
    counts._refresh_derived()
    return counts


def estimate_discount(counts: BigramCounts, eps: float = DISCOUNT_EPS) -> float:
    """Count-of-counts discount ``n1 / (n1 + 2*n2)`` over bigram types,
    clamped into ``[eps, 1 - eps]`` with a warning at the boundaries."""
    count_of_counts = Counter(counts.c2.values())
    n1, n2 = count_of_counts[1], count_of_counts[2]
    if n1 == 0 and n2 == 0:
        raise DegenerateCountsError("degenerate counts; supply an explicit discount")
    discount = n1 / (n1 + 2 * n2)
    if discount >= 1.0:
        warnings.warn(f"discount {discount} clamped to {1 - eps}")
        return 1 - eps
    if discount <= 0.0:
        warnings.warn(f"discount {discount} clamped to {eps}")
        return eps
    return discount


@dataclass
class KneserNeyBigramModel:
    """Queryable bigram model over linear-space probability tables.

    ``bigram_p`` stores the full interpolated probability for every
    counted bigram; all other pairs back off to ``bow[v] * unigram_p[w]``.
    The tables double as the ARPA serialization content, so a model
    imported from ARPA behaves identically to the trained original.
    """

    vocabulary: Vocabulary
    unigram_p: dict[str, float]   # continuation distribution; START maps to 0.0
    bow: dict[str, float]         # per-context backoff weight; 1.0 when unseen as context
    bigram_p: dict[tuple[str, str], float]
    unk_floor: float
    discount: float | None = None  # estimation metadata; absent on imported models

    def _map_word(self, word: str) -> str:
        # The start symbol is a context, never an outcome; as a queried
        # word it is out of the event space like any unknown lemma.
        if word == START or word not in self.vocabulary:
            return UNK
        return word

    def _map_context(self, context: str) -> str:
        return context if context in self.vocabulary else UNK

    def prob(self, context: str, word: str) -> float:
        """p(word | context); unknown lemmas map to the unknown symbol.

        Total and strictly positive for every input pair.
        """
        v = self._map_context(context)
        w = self._map_word(word)
        hit = self.bigram_p.get((v, w))
        if hit is not None:
            return hit
        return self.bow.get(v, 1.0) * self.unigram_p[w]

    def event_words(self) -> list[str]:
        return self.vocabulary.event_words()


def prob(model: KneserNeyBigramModel, context: str, word: str) -> float:
    return model.prob(context, word)


def train_kn(
    counts: BigramCounts,
    discount: float | None = None,
    unk_floor: float | None = None,
) -> KneserNeyBigramModel:
    """Estimate the interpolated Kneser-Ney model from counts.

    ``discount`` defaults to the count-of-counts estimate and must lie in
    (0, 1) when given. ``unk_floor`` is the continuation mass of the
    unknown symbol, default ``1 / (total_bigram_types + 1)``.
    """
    if counts.total_bigram_types == 0:
        raise DegenerateCountsError("no bigrams to train on")
    if discount is None:
        discount = estimate_discount(counts)
    elif not 0.0 < discount < 1.0:
        raise ValueError(f"discount must be in (0, 1), got {discount}")

    total_types = counts.total_bigram_types
    if unk_floor is None:
        unk_floor = 1.0 / (total_types + 1)

    vocabulary = Vocabulary.from_lemmas(
        w for w in counts.c1 if w not in RESERVED
    )

    unigram_p: dict[str, float] = {START: 0.0, UNK: unk_floor}
    for word in vocabulary.event_words():
        unigram_p[word] = counts.continuation[word] / total_types

    bow: dict[str, float] = {}
    for context in vocabulary.words():
        c1 = counts.c1[context]
        if c1 > 0 and counts.fertility[context] > 0:
            bow[context] = discount * counts.fertility[context] / c1
        else:
            bow[context] = 1.0

    bigram_p: dict[tuple[str, str], float] = {}
    for (v, w), c in counts.c2.items():
        bigram_p[(v, w)] = max(c - discount, 0.0) / counts.c1[v] + bow[v] * unigram_p[w]

    return KneserNeyBigramModel(
        vocabulary, unigram_p, bow, bigram_p, unk_floor, discount
    )


def perplexity(
    model: KneserNeyBigramModel,
    docs: Iterable[Document],
    include_punctuation: bool = False,
) -> float:
    """2 to the mean per-event surprisal in bits.

    Events are every in-sentence token plus the sentence-end symbol; the
    start symbol conditions but is never itself an event.
    """
    total_bits = 0.0
    events = 0
    for doc in docs:
        for sentence in sentences(doc, include_punctuation):
            chain = [START] + sentence + [END]
            for left, right in zip(chain, chain[1:]):
                total_bits += -math.log2(model.prob(left, right))
                events += 1
    if events == 0:
        raise ValueError("empty corpus: no events to evaluate")
    return 2.0 ** (total_bits / events)


# --- ARPA serialization ---------------------------------------------------
#
# Standard back-off layout at orders 1 and 2, base-10 log probabilities,
# six decimal places. The start symbol gets the conventional -99 sentinel
# as a unigram (it is never predicted) and its real backoff weight as a
# context. Query semantics: a listed bigram is taken verbatim, anything
# else is bow(v) + unigram(w), which reproduces the interpolated model.

_LOG10_ZERO = -99.0


def _fmt(value: float) -> str:
    if abs(value) < 5e-7:  # avoid the "-0.000000" rendering
        value = 0.0
    return f"{value:.6f}"


def export_arpa(model: KneserNeyBigramModel) -> str:
    """Serialize the model to ARPA text in canonical (vocabulary) order."""
    words = model.vocabulary.words()
    word_id = model.vocabulary.index
    lines = ["\\data\\", f"ngram 1={len(words)}", f"ngram 2={len(model.bigram_p)}", ""]

    lines.append("\\1-grams:")
    for word in words:
        p = model.unigram_p[word]
        lp = _LOG10_ZERO if p <= 0.0 else math.log10(p)
        lines.append(f"{_fmt(lp)}\t{word}\t{_fmt(math.log10(model.bow[word]))}")
    lines.append("")

    lines.append("\\2-grams:")
    for (v, w) in sorted(model.bigram_p, key=lambda vw: (word_id[vw[0]], word_id[vw[1]])):
        lines.append(f"{_fmt(math.log10(model.bigram_p[(v, w)]))}\t{v} {w}")
    lines.append("")

    lines.append("\\end\\")
    return "\n".join(lines) + "\n"


def import_arpa(text: str) -> KneserNeyBigramModel:
    """Reconstruct a model from ARPA text (orders 1 and 2 only).

    Raises :class:`ParseError` with a line number on malformed headers,
    inconsistent n-gram counts, non-numeric fields, or truncation. The
    reserved symbols must be present among the unigrams.
    """
    declared: dict[int, int] = {}
    unigram_p: dict[str, float] = {}
    bow: dict[str, float] = {}
    bigram_p: dict[tuple[str, str], float] = {}

    lines = text.splitlines()
    i = 0
    n = len(lines)

    def skip_blank(i: int) -> int:
        while i < n and not lines[i].strip():
            i += 1
        return i

    i = skip_blank(i)
    if i >= n or lines[i].strip() != "\\data\\":
        raise ParseError("missing \\data\\ header", i + 1 if i < n else None)
    i += 1
    while i < n and lines[i].strip().startswith("ngram "):
        entry = lines[i].strip()[len("ngram "):]
        try:
            order_str, count_str = entry.split("=")
            declared[int(order_str)] = int(count_str)
        except ValueError:
            raise ParseError(f"malformed ngram declaration {entry!r}", i + 1)
        i += 1
    if set(declared) != {1, 2}:
        raise ParseError(f"expected orders 1 and 2, declared {sorted(declared)}")

    def parse_log10(field: str, lineno: int) -> float:
        try:
            return float(field)
        except ValueError:
            raise ParseError(f"non-numeric log probability {field!r}", lineno)

    i = skip_blank(i)
    if i >= n or lines[i].strip() != "\\1-grams:":
        raise ParseError("missing \\1-grams: section", i + 1 if i < n else None)
    i += 1
    while i < n and lines[i].strip() and not lines[i].startswith("\\"):
        fields = lines[i].rstrip("\n").split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields in 1-gram entry, got {len(fields)}", i + 1)
        lp = parse_log10(fields[0], i + 1)
        word = fields[1]
        unigram_p[word] = 0.0 if lp <= _LOG10_ZERO else 10.0 ** lp
        bow[word] = 10.0 ** parse_log10(fields[2], i + 1)
        i += 1

    i = skip_blank(i)
    if i >= n or lines[i].strip() != "\\2-grams:":
        raise ParseError("missing \\2-grams: section", i + 1 if i < n else None)
    i += 1
    while i < n and lines[i].strip() and not lines[i].startswith("\\"):
        fields = lines[i].rstrip("\n").split("\t")
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields in 2-gram entry, got {len(fields)}", i + 1)
        lp = parse_log10(fields[0], i + 1)
        pair = fields[1].split(" ")
        if len(pair) != 2:
            raise ParseError(f"expected two words in bigram entry {fields[1]!r}", i + 1)
        bigram_p[(pair[0], pair[1])] = 10.0 ** lp
        i += 1

    i = skip_blank(i)
    if i >= n or lines[i].strip() != "\\end\\":
        raise ParseError("missing \\end\\ marker (truncated file?)")

    if len(unigram_p) != declared[1]:
        raise ParseError(
            f"declared {declared[1]} unigrams but found {len(unigram_p)}"
        )
    if len(bigram_p) != declared[2]:
        raise ParseError(
            f"declared {declared[2]} bigrams but found {len(bigram_p)}"
        )
    for symbol in RESERVED:
        if symbol not in unigram_p:
            raise ParseError(f"reserved symbol {symbol!r} missing from unigrams")
    for (v, w) in bigram_p:
        if v not in unigram_p or w not in unigram_p:
            raise ParseError(f"bigram ({v!r}, {w!r}) uses an undeclared word")

    vocabulary = Vocabulary.from_lemmas(
        w for w in unigram_p if w not in RESERVED
    )
    return KneserNeyBigramModel(
        vocabulary, unigram_p, bow, bigram_p, unk_floor=unigram_p[UNK], discount=None
    )
