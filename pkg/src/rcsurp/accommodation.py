"""Mention-history weighting of surprisal: a novelty bonus that wears out
over repeated mentions and partially resets after long gaps.

Each lemma carries an effective mention count ``x``. A fresh lemma starts
at ``x = 1`` and earns the factor ``bonus / x`` until ``x`` reaches the
wearout point, after which the factor is 1. Re-mentions within the decay
window increment ``x``; a re-mention after ``gap`` words decrements it by
``gap // window`` instead, but never below the floor, so re-introduced
items keep a reduced bonus rather than the full one.

Distances are measured in non-punctuation word positions within one
document; state never crosses documents.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, TextIO

from .corpus import Document, Token
from .surprisal import SurprisalAnnotation, SurprisalEntry

# POS tags treated as content words (UD tags plus the common STTS ones).
DEFAULT_CONTENT_POS = frozenset({
    "NOUN", "PROPN", "VERB", "ADJ", "ADV",
    "NN", "NE", "ADJA", "ADJD",
    "VVFIN", "VVINF", "VVIZU", "VVIMP", "VVPP",
})


@dataclass(frozen=True)
class FactorConfig:
    bonus: float = 4.0   # factor at first mention
    wearout: int = 4     # effective count at which the bonus is gone
    window: int = 200    # words of silence per reset point
    floor: int = 2       # reset never drops the count below this

    def __post_init__(self):
        if self.bonus <= 0:
            raise ValueError("bonus must be positive")
        if self.wearout < 1:
            raise ValueError("wearout must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not 1 <= self.floor <= self.wearout:
            raise ValueError("floor must lie in [1, wearout]")


def factor(x: int, cfg: FactorConfig = FactorConfig()) -> float:
    """Weight for the x-th effective mention: ``bonus / x`` below the
    wearout point, 1 from there on."""
    if x < 1:
        raise ValueError(f"mention count must be >= 1, got {x}")
    if x < cfg.wearout:
        return cfg.bonus / x
    return 1.0


def next_x(prev_x: int, gap: int, cfg: FactorConfig = FactorConfig()) -> int:
    """Effective count of a re-mention ``gap`` words after the previous one.

    Inside the window the count advances by one; from the window boundary
    on it decays by one point per full window, floored.
    """
    if prev_x < 1:
        raise ValueError(f"previous count must be >= 1, got {prev_x}")
    if gap < 1:
        raise ValueError(f"gap must be >= 1, got {gap}")
    if gap < cfg.window:
        return prev_x + 1
    return max(cfg.floor, prev_x - gap // cfg.window)


class AccommodationState:
    """Per-lemma effective counts over a strictly forward scan of one
    document."""

    def __init__(self):
        self._entries: dict[str, tuple[int, int]] = {}  # lemma -> (x, last_position)

    def observe(
        self, lemma: str, position: int, cfg: FactorConfig = FactorConfig()
    ) -> tuple[int, float]:
        """Advance the counter for one occurrence; returns ``(x, factor)``."""
        previous = self._entries.get(lemma)
        if previous is None:
            x = 1
        else:
            prev_x, last_position = previous
            if position <= last_position:
                raise ValueError(
                    f"stream must be scanned in order: {lemma!r} at {position} "
                    f"after {last_position}"
                )
            x = next_x(prev_x, position - last_position, cfg)
        self._entries[lemma] = (x, position)
        return x, factor(x, cfg)


def observe(
    state: AccommodationState, lemma: str, position: int,
    cfg: FactorConfig = FactorConfig(),
) -> tuple[int, float]:
    return state.observe(lemma, position, cfg)


def load_stoplist(path: str | Path | None = None) -> frozenset[str]:
    """Function-word lemmas used when tokens carry no POS tag. Defaults to
    the bundled German list; one lemma per line, ``#`` comments."""
    if path is None:
        text = (
            resources.files("rcsurp").joinpath("data/function_words_de.txt")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    lemmas = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lemmas.add(line)
    return frozenset(lemmas)


def make_content_predicate(
    content_pos: frozenset[str] = DEFAULT_CONTENT_POS,
    stoplist: frozenset[str] | None = None,
) -> Callable[[Token], bool]:
    """Token predicate for "content word": POS in the content set when a
    tag is present, otherwise lemma not in the function-word stoplist."""
    def is_content(token: Token) -> bool:
        if token.is_punctuation:
            return False
        if token.pos is not None:
            return token.pos in content_pos
        effective = stoplist if stoplist is not None else _default_stoplist()
        return token.lemma not in effective

    return is_content


_STOPLIST_CACHE: frozenset[str] | None = None


def _default_stoplist() -> frozenset[str]:
    global _STOPLIST_CACHE
    if _STOPLIST_CACHE is None:
        _STOPLIST_CACHE = load_stoplist()
    return _STOPLIST_CACHE


@dataclass(frozen=True)
class WeightedEntry:
    base: SurprisalEntry
    x: int | None          # None for non-content tokens
    factor: float
    weighted_surprisal: float


@dataclass(frozen=True)
class WeightedAnnotation:
    doc_id: str | None
    entries: tuple[WeightedEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def accommodation_factors(
    doc: Document,
    content_predicate: Callable[[Token], bool] | None = None,
    cfg: FactorConfig = FactorConfig(),
) -> dict[int, tuple[int | None, float]]:
    """Scan a document once and map every word position to its
    ``(x, factor)`` pair; non-content words get ``(None, 1.0)``.

    Factors depend only on the lemma stream, so they can be applied to
    scores from any re-linearization anchored at the same positions.
    """
    if content_predicate is None:
        content_predicate = make_content_predicate()
    state = AccommodationState()
    factors: dict[int, tuple[int | None, float]] = {}
    for token in doc.tokens:
        if token.doc_position is None:
            continue
        if content_predicate(token):
            factors[token.doc_position] = state.observe(token.lemma, token.doc_position, cfg)
        else:
            factors[token.doc_position] = (None, 1.0)
    return factors


def accommodate_document(
    annotation: SurprisalAnnotation,
    doc: Document,
    content_predicate: Callable[[Token], bool] | None = None,
    cfg: FactorConfig = FactorConfig(),
) -> WeightedAnnotation:
    """Apply mention-history factors to a document's surprisal annotation.

    Content-word surprisal is multiplied by the factor of that occurrence;
    everything else keeps weight 1. The annotation must align one-to-one
    with the document's word tokens.
    """
    word_positions = [t.doc_position for t in doc.word_tokens()]
    entry_positions = [e.doc_position for e in annotation.entries]
    if entry_positions != word_positions:
        raise ValueError("annotation does not align with the document's word tokens")

    factors = accommodation_factors(doc, content_predicate, cfg)
    weighted = tuple(
        WeightedEntry(
            entry,
            factors[entry.doc_position][0],
            factors[entry.doc_position][1],
            entry.surprisal_bits * factors[entry.doc_position][1],
        )
        for entry in annotation.entries
    )
    return WeightedAnnotation(annotation.doc_id, weighted)


def write_weighted_tsv(
    annotation: WeightedAnnotation, fh: TextIO, header: bool = True
) -> None:
    """Surprisal dump plus ``x factor weighted_surprisal`` columns."""
    if header:
        fh.write(
            "doc\tposition\tlemma\tcontext\tprob\tsurprisal_bits"
            "\tx\tfactor\tweighted_surprisal\n"
        )
    doc_id = annotation.doc_id or "-"
    for w in annotation.entries:
        e = w.base
        position = "NA" if e.doc_position is None else str(e.doc_position)
        x = "NA" if w.x is None else str(w.x)
        fh.write(
            f"{doc_id}\t{position}\t{e.lemma}\t{e.context}"
            f"\t{e.probability:.6e}\t{e.surprisal_bits:.6f}"
            f"\t{x}\t{w.factor:.6f}\t{w.weighted_surprisal:.6f}\n"
        )
