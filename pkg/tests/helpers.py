"""Shared fixtures and independent reference implementations.

The reference functions here recompute everything from raw inputs with
plain loops so the tests never reuse the code paths they check: the
smoothed bigram probability from scratch counts, perplexity as an explicit
log sum, and the chi-square tail by Simpson integration of the normal
density.
"""

from __future__ import annotations

import math

from rcsurp import load_vertical, resegment_sentences

START = "<s>"
END = "</s>"
UNK = "<unk>"

TOY_SENTENCES = [["the", "cat", "sat"], ["the", "cat", "ran"]]

TOY_VERTICAL = """# doc: toy
the\tthe
cat\tcat
sat\tsat

the\tthe
cat\tcat
ran\tran
"""


def toy_documents():
    return load_vertical(TOY_VERTICAL)


def reference_counts(sentences: list[list[str]]):
    """Scratch bigram statistics: token counts, pair counts, distinct
    left-context and continuation sets, and the number of pair types."""
    c1: dict[str, int] = {}
    c2: dict[tuple[str, str], int] = {}
    left: dict[str, set[str]] = {}
    right: dict[str, set[str]] = {}
    for sentence in sentences:
        padded = [START] + list(sentence) + [END]
        for token in padded:
            c1[token] = c1.get(token, 0) + 1
        for v, w in zip(padded, padded[1:]):
            c2[(v, w)] = c2.get((v, w), 0) + 1
            left.setdefault(w, set()).add(v)
            right.setdefault(v, set()).add(w)
    return c1, c2, left, right, len(c2)


def reference_kn(sentences: list[list[str]], discount: float,
                 unk_floor: float | None = None):
    """Brute-force interpolated Kneser-Ney probability from raw counts.

    Returns ``prob(context, word)`` with the same out-of-vocabulary
    mapping as the trained model: unknown lemmas (and the start symbol as
    an outcome) become the unknown symbol, which carries the epsilon
    continuation floor; unknown contexts back off to the continuation
    distribution.
    """
    c1, c2, left, right, total_types = reference_counts(sentences)
    if unk_floor is None:
        unk_floor = 1.0 / (total_types + 1)

    def p_cont(w: str) -> float:
        if w == UNK:
            return unk_floor
        return len(left.get(w, ())) / total_types

    def prob(context: str, word: str) -> float:
        v = context if context in c1 else UNK
        w = word if word in c1 and word != START else UNK
        fertility = len(right.get(v, ()))
        if c1.get(v, 0) == 0 or fertility == 0:
            return p_cont(w)
        lam = discount * fertility / c1[v]
        return max(c2.get((v, w), 0) - discount, 0.0) / c1[v] + lam * p_cont(w)

    return prob


def reference_perplexity(sentences: list[list[str]], prob) -> float:
    """Explicit log-sum perplexity over in-sentence events plus the end
    symbol, given any conditional probability function."""
    log_sum = 0.0
    events = 0
    for sentence in sentences:
        padded = [START] + list(sentence) + [END]
        for v, w in zip(padded, padded[1:]):
            log_sum += math.log2(prob(v, w))
            events += 1
    return 2.0 ** (-log_sum / events)


def simpson(f, a: float, b: float, intervals: int) -> float:
    if intervals % 2:
        intervals += 1
    h = (b - a) / intervals
    total = f(a) + f(b)
    for i in range(1, intervals):
        total += f(a + i * h) * (4 if i % 2 else 2)
    return total * h / 3.0


def reference_chi2_upper_tail(statistic: float) -> float:
    """Upper tail of the chi-square distribution with one degree of
    freedom, via the half-normal identity and Simpson integration of the
    normal density."""
    if statistic == 0.0:
        return 1.0
    z = math.sqrt(statistic)
    density = lambda t: math.exp(-t * t / 2.0) / math.sqrt(2.0 * math.pi)
    return 2.0 * simpson(density, z, z + 45.0, 20000)


def resegmented(docs):
    return [resegment_sentences(d) for d in docs]
