"""Five-way givenness/salience classification of referent mentions,
per-clause givenness tables, and the 2x2 chi-square comparison.

A mention is classified against the document's mention history: unseen
referents are new (or inferable-new when flagged), re-mentions are salient
when at most ``SALIENCE_WINDOW`` mention events intervene since the last
mention of the same referent, and non-salient otherwise; salient mentions
flagged as the clause's aboutness-topic form their own category.
Inferability and topichood are annotation inputs, never computed here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

from .clauses import ClauseRecord, Span, Variant
from .errors import ParseError, ValidationError

SALIENCE_WINDOW = 10


class SalienceCategory(enum.Enum):
    NEW = "new"
    INFERABLE_NEW = "inferable_new"
    GIVEN_NON_SALIENT = "given_non_salient"
    GIVEN_SALIENT = "given_salient"
    SALIENT_TOPIC = "salient_topic"


SALIENT_CATEGORIES = (SalienceCategory.GIVEN_SALIENT, SalienceCategory.SALIENT_TOPIC)


@dataclass(frozen=True)
class ReferentMention:
    doc_id: str
    start: int
    end: int  # exclusive, word positions
    referent_id: str
    inferable: bool
    topic: bool
    mention_ordinal: int  # dense 0-based index in the document's mention sequence


def classify_mention(
    history: Sequence[ReferentMention],
    mention: ReferentMention,
    window: int = SALIENCE_WINDOW,
    count_distinct: bool = False,
) -> SalienceCategory:
    """Classify one mention given all earlier mentions of its document.

    ``count_distinct`` switches the interveners from mention events (the
    default) to distinct referents.
    """
    last = None
    for previous in reversed(history):
        if previous.referent_id == mention.referent_id:
            last = previous
            break
    if last is None:
        return (
            SalienceCategory.INFERABLE_NEW if mention.inferable else SalienceCategory.NEW
        )
    between = [
        m for m in history
        if last.mention_ordinal < m.mention_ordinal < mention.mention_ordinal
    ]
    intervening = (
        len({m.referent_id for m in between}) if count_distinct else len(between)
    )
    if intervening > window:
        return SalienceCategory.GIVEN_NON_SALIENT
    return SalienceCategory.SALIENT_TOPIC if mention.topic else SalienceCategory.GIVEN_SALIENT


def classify_document(
    mentions: Sequence[ReferentMention],
    window: int = SALIENCE_WINDOW,
    count_distinct: bool = False,
) -> list[tuple[ReferentMention, SalienceCategory]]:
    """Sequential classification of one document's mentions in order."""
    ordered = sorted(mentions, key=lambda m: m.mention_ordinal)
    classified = []
    for i, mention in enumerate(ordered):
        classified.append(
            (mention, classify_mention(ordered[:i], mention, window, count_distinct))
        )
    return classified


def load_referent_annotations(source: str | TextIO) -> list[ReferentMention]:
    """Parse the referent TSV: ``doc start end referent_id inferable topic``.

    Mention ordinals are assigned per document by interval order.
    Intervals of one document must not overlap.
    """
    text = source.read() if hasattr(source, "read") else source
    raw: dict[str, list[tuple[int, int, str, bool, bool]]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise ParseError(f"expected 6 tab-separated fields, got {len(fields)}", lineno)
        doc_id, start_s, end_s, referent_id, inferable_s, topic_s = fields
        try:
            start, end = int(start_s), int(end_s)
        except ValueError:
            raise ParseError(f"non-integer interval {start_s!r}..{end_s!r}", lineno)
        if end <= start:
            raise ParseError(f"empty interval [{start}, {end})", lineno)
        if inferable_s not in ("0", "1") or topic_s not in ("0", "1"):
            raise ParseError("inferable and topic flags must be 0 or 1", lineno)
        raw.setdefault(doc_id, []).append(
            (start, end, referent_id, inferable_s == "1", topic_s == "1")
        )

    mentions: list[ReferentMention] = []
    problems: list[str] = []
    for doc_id, rows in raw.items():
        rows.sort()
        for i, (start, end, referent_id, inferable, topic) in enumerate(rows):
            if i > 0 and start < rows[i - 1][1]:
                problems.append(
                    f"{doc_id}: overlapping mention intervals at {start}"
                )
            mentions.append(
                ReferentMention(doc_id, start, end, referent_id, inferable, topic, i)
            )
    if problems:
        raise ValidationError(problems)
    return mentions


@dataclass(frozen=True)
class GivennessCounts:
    total: int
    by_category: Mapping[SalienceCategory, int]

    @property
    def new(self) -> int:
        return self.by_category[SalienceCategory.NEW]

    @property
    def salient(self) -> int:
        return sum(self.by_category[c] for c in SALIENT_CATEGORIES)

    def ratio(self, count: int) -> float | None:
        """Share of ``count`` in the total; None when nothing was counted."""
        return None if self.total == 0 else count / self.total


def clause_givenness(
    record: ClauseRecord,
    classified: Sequence[tuple[ReferentMention, SalienceCategory]],
    part: str,
) -> GivennessCounts:
    """Category counts over the mentions lying inside one clause part."""
    if part == "rc":
        spans = [record.rc_span]
    elif part == "matrix":
        spans = list(record.matrix_spans)
    else:
        raise ValueError(f"unknown part {part!r}")
    by_category = {category: 0 for category in SalienceCategory}
    total = 0
    for mention, category in classified:
        if mention.doc_id != record.doc_id:
            continue
        interval = Span(mention.start, mention.end)
        if any(span.contains(interval) for span in spans):
            by_category[category] += 1
            total += 1
    return GivennessCounts(total, by_category)


def chi_square_2x2(a: int, b: int, c: int, d: int) -> tuple[float, float]:
    """Pearson chi-square without continuity correction on [[a, b], [c, d]].

    Returns the statistic and the upper-tail p-value at one degree of
    freedom, ``erfc(sqrt(statistic / 2))``. All four marginals must be
    positive.
    """
    for count in (a, b, c, d):
        if count < 0:
            raise ValueError("counts must be non-negative")
    if min(a + b, c + d, a + c, b + d) == 0:
        raise ValueError("degenerate table: a marginal is zero")
    n = a + b + c + d
    statistic = n * (a * d - b * c) ** 2 / ((a + b) * (c + d) * (a + c) * (b + d))
    return statistic, math.erfc(math.sqrt(statistic / 2.0))


# --- givenness report ------------------------------------------------------

_GIVENNESS_ROWS = (
    ("rc", Variant.IN_SITU, "Relative clauses: in-situ"),
    ("matrix", Variant.IN_SITU, "Matrix clauses of in-situ rel. cl."),
    ("rc", Variant.EXTRAPOSED, "Relative clauses: extraposed"),
    ("matrix", Variant.EXTRAPOSED, "Matrix clauses of extraposed rel. cl."),
)


@dataclass(frozen=True)
class GivennessRow:
    label: str
    part: str
    variant: Variant
    counts: GivennessCounts


def build_givenness_table(
    records: Sequence[ClauseRecord],
    classified: Sequence[tuple[ReferentMention, SalienceCategory]],
) -> list[GivennessRow]:
    """Pooled per-variant, per-part mention counts in the standard row order."""
    rows = []
    for part, variant, label in _GIVENNESS_ROWS:
        pooled = {category: 0 for category in SalienceCategory}
        total = 0
        for record in records:
            if record.variant is not variant:
                continue
            counts = clause_givenness(record, classified, part)
            total += counts.total
            for category in SalienceCategory:
                pooled[category] += counts.by_category[category]
        rows.append(GivennessRow(label, part, variant, GivennessCounts(total, pooled)))
    return rows


def _pct(ratio: float | None) -> str:
    return "NA" if ratio is None else f"{100.0 * ratio:.1f}%"


def write_givenness_tsv(rows: Iterable[GivennessRow], fh: TextIO) -> None:
    fh.write(
        "row\treferents_total\tnew\tnew_pct\tsalient\tsalient_pct"
        "\tinferable_new\tgiven_non_salient\tgiven_salient\tsalient_topic\n"
    )
    for row in rows:
        c = row.counts
        fh.write(
            f"{row.label}\t{c.total}\t{c.new}\t{_pct(c.ratio(c.new))}"
            f"\t{c.salient}\t{_pct(c.ratio(c.salient))}"
            f"\t{c.by_category[SalienceCategory.INFERABLE_NEW]}"
            f"\t{c.by_category[SalienceCategory.GIVEN_NON_SALIENT]}"
            f"\t{c.by_category[SalienceCategory.GIVEN_SALIENT]}"
            f"\t{c.by_category[SalienceCategory.SALIENT_TOPIC]}\n"
        )


def new_referent_chi_square(rows: Sequence[GivennessRow]) -> tuple[float, float]:
    """Chi-square of new vs. non-new referents across the two relative
    clause rows (in-situ vs. extraposed)."""
    rc_rows = {row.variant: row.counts for row in rows if row.part == "rc"}
    in_situ = rc_rows[Variant.IN_SITU]
    extraposed = rc_rows[Variant.EXTRAPOSED]
    return chi_square_2x2(
        in_situ.new, in_situ.total - in_situ.new,
        extraposed.new, extraposed.total - extraposed.new,
    )
