"""Relative-clause records: span validation, re-linearization between the
adjacent (in-situ) and postfield (extraposed) orders, and additive/average
surprisal metrics per clause part.

Records carry manual annotations as word-position intervals (end
exclusive): the relative clause span, the matrix clause span (two
intervals when an in-situ relative clause splits its matrix), and the
attachment point right after the head noun, where the clause sits in the
in-situ order.

Scoring follows two conventions throughout: the first word of each clause
part is excluded from its sums (the relative pronoun carries no usable
variation, and the matrix initial word is dropped for symmetry), and a
clause is always scored inside a full re-linearized chain so that words
whose neighbor changes between orders get re-contextualized scores.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from statistics import fmean
from typing import Callable, Iterable, Mapping, Sequence, TextIO

from .accommodation import FactorConfig, accommodation_factors
from .corpus import Document, Token
from .errors import ValidationError
from .ngram import START, KneserNeyBigramModel
from .surprisal import annotate_sequence

RC_LABEL = "rel. cl."
MATRIX_LABEL = "matrix cl."
COMBINED_LABEL = "combined"


class Variant(enum.Enum):
    IN_SITU = "in_situ"
    EXTRAPOSED = "extraposed"

    def other(self) -> "Variant":
        return Variant.EXTRAPOSED if self is Variant.IN_SITU else Variant.IN_SITU


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int  # exclusive

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def positions(self) -> range:
        return range(self.start, self.end)

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class ClauseRecord:
    id: str
    doc_id: str
    variant: Variant
    matrix_spans: tuple[Span, ...]
    rc_span: Span
    attachment: int  # word position right after the head noun

    def matrix_positions(self) -> list[int]:
        return [p for span in sorted(self.matrix_spans) for p in span.positions()]

    def all_positions(self) -> list[int]:
        return sorted(self.matrix_positions() + list(self.rc_span.positions()))


def _record_problems(record: ClauseRecord) -> list[str]:
    """Document-independent geometry checks; returns human-readable
    problems prefixed with the record id."""
    problems = []

    def bad(msg: str):
        problems.append(f"{record.id}: {msg}")

    spans = list(record.matrix_spans) + [record.rc_span]
    for a in range(len(spans)):
        for b in range(a + 1, len(spans)):
            if spans[a].overlaps(spans[b]):
                bad(f"overlapping spans {spans[a]} and {spans[b]}")
                return problems

    if record.variant is Variant.IN_SITU:
        if len(record.matrix_spans) != 2:
            bad("in-situ record needs the matrix split into exactly two intervals")
            return problems
        first, second = sorted(record.matrix_spans)
        if first.end != record.rc_span.start or record.rc_span.end != second.start:
            bad(
                "in-situ relative clause must sit exactly between the two "
                "matrix intervals"
            )
        if record.attachment != record.rc_span.start:
            bad("attachment must equal the relative clause start for in-situ records")
    else:
        if len(record.matrix_spans) != 1:
            bad("extraposed record needs one contiguous matrix interval")
            return problems
        matrix = record.matrix_spans[0]
        if record.rc_span.start < matrix.end:
            bad("extraposed relative clause must follow all matrix material")
        if not matrix.start <= record.attachment <= matrix.end:
            bad("attachment must lie inside or at the edge of the matrix interval")
    return problems


def _bounds_problems(record: ClauseRecord, doc: Document) -> list[str]:
    limit = doc.word_count()
    problems = []
    for span in list(record.matrix_spans) + [record.rc_span]:
        if span.end > limit:
            problems.append(
                f"{record.id}: span [{span.start}, {span.end}) exceeds "
                f"document {doc.id!r} with {limit} words"
            )
    return problems


def parse_clause_annotations(
    source: str | TextIO,
    documents: Mapping[str, Document] | None = None,
) -> list[ClauseRecord]:
    """Parse and validate the clause annotation JSON.

    The payload is an array of objects ``{id, doc, variant, matrix, rc,
    attachment}`` with word positions, end exclusive. All validation
    problems are collected and raised together as a
    :class:`ValidationError`; when ``documents`` is given, spans are also
    checked against document bounds.
    """
    raw = json.load(source) if hasattr(source, "read") else json.loads(source)
    if not isinstance(raw, list):
        raise ValidationError(["clause annotations must be a JSON array"])

    records: list[ClauseRecord] = []
    problems: list[str] = []
    seen_ids: set[str] = set()
    for i, item in enumerate(raw):
        label = item.get("id", f"record #{i}") if isinstance(item, dict) else f"record #{i}"
        try:
            variant = Variant(item["variant"])
            record = ClauseRecord(
                id=str(item["id"]),
                doc_id=str(item["doc"]),
                variant=variant,
                matrix_spans=tuple(Span(int(s), int(e)) for s, e in item["matrix"]),
                rc_span=Span(int(item["rc"][0]), int(item["rc"][1])),
                attachment=int(item["attachment"]),
            )
        except (KeyError, TypeError, IndexError) as exc:
            problems.append(f"{label}: missing or malformed field ({exc})")
            continue
        except ValueError as exc:
            problems.append(f"{label}: {exc}")
            continue
        if record.id in seen_ids:
            problems.append(f"{record.id}: duplicate record id")
            continue
        seen_ids.add(record.id)
        record_problems = _record_problems(record)
        if documents is not None and not record_problems:
            if record.doc_id not in documents:
                record_problems = [f"{record.id}: unknown document {record.doc_id!r}"]
            else:
                record_problems = _bounds_problems(record, documents[record.doc_id])
        if record_problems:
            problems.extend(record_problems)
        else:
            records.append(record)
    if problems:
        raise ValidationError(problems)
    return records


@dataclass(frozen=True)
class LinearToken:
    lemma: str
    doc_position: int
    part: str  # "matrix" or "rc"


@dataclass(frozen=True)
class Linearization:
    tokens: tuple[LinearToken, ...]
    initial_context: str

    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]

    def positions(self) -> list[int]:
        return [t.doc_position for t in self.tokens]


def relinearize(record: ClauseRecord, doc: Document, target: Variant) -> Linearization:
    """Order the record's material as the target variant would utter it.

    In-situ: matrix up to the attachment point, the relative clause, the
    rest of the matrix. Extraposed: the full matrix, then the relative
    clause. Re-linearizing to the attested variant reproduces the attested
    word order. The initial context is the lemma preceding the first
    clause word in the document, or the start symbol when that word opens
    its sentence.
    """
    words = doc.word_tokens()
    matrix = [
        LinearToken(words[p].lemma, p, "matrix") for p in record.matrix_positions()
    ]
    rc = [LinearToken(words[p].lemma, p, "rc") for p in record.rc_span.positions()]

    if target is Variant.IN_SITU:
        split = sum(1 for t in matrix if t.doc_position < record.attachment)
        ordered = matrix[:split] + rc + matrix[split:]
    else:
        ordered = matrix + rc

    first_position = ordered[0].doc_position
    if first_position == 0:
        context = START
    else:
        previous = words[first_position - 1]
        current = words[first_position]
        context = START if previous.sentence_index != current.sentence_index else previous.lemma
    return Linearization(tuple(ordered), context)


@dataclass(frozen=True)
class ClauseMetrics:
    adS: float
    avS: float
    n_scored: int
    mode: str           # "bare" or "accommodated"
    linearization: str  # "attested" or "hypothetical"
    part: str           # "rc", "matrix", or "combined"

    @classmethod
    def from_values(
        cls, values: Sequence[float], mode: str, linearization: str, part: str
    ) -> "ClauseMetrics":
        n = len(values)
        if n < 1:
            raise ValueError("no values to score")
        # adS is the once-rounded product of the mean so that
        # avS * n_scored == adS holds bit-for-bit.
        avS = math.fsum(values) / n
        return cls(avS * n, avS, n, mode, linearization, part)


MODES = ("bare", "accommodated")
PARTS = ("rc", "matrix", "combined")
LINEARIZATIONS = ("attested", "hypothetical")


class ClauseScorer:
    """Scores clause records against a trained model, caching the
    per-document accommodation factor maps.

    ``combined_excludes_matrix_first`` keeps the symmetric two-word
    exclusion for the combined metric; set it to False to drop only the
    relative pronoun there.
    """

    def __init__(
        self,
        model: KneserNeyBigramModel,
        accommodation: FactorConfig = FactorConfig(),
        content_predicate: Callable[[Token], bool] | None = None,
        combined_excludes_matrix_first: bool = True,
    ):
        self.model = model
        self.accommodation = accommodation
        self.content_predicate = content_predicate
        self.combined_excludes_matrix_first = combined_excludes_matrix_first
        self._factor_cache: dict[str, dict[int, tuple[int | None, float]]] = {}

    def _factors(self, doc: Document) -> dict[int, tuple[int | None, float]]:
        if doc.id not in self._factor_cache:
            self._factor_cache[doc.id] = accommodation_factors(
                doc, self.content_predicate, self.accommodation
            )
        return self._factor_cache[doc.id]

    def metrics(
        self,
        record: ClauseRecord,
        doc: Document,
        mode: str = "bare",
        part: str = "combined",
        linearization: str = "attested",
    ) -> ClauseMetrics:
        """adS/avS of one clause part in the chosen order and mode.

        The whole re-linearized chain is annotated so excluded words still
        serve as context; their own scores are just left out of the sums.
        In accommodated mode each score is multiplied by the factor at the
        word's attested document position.
        """
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if part not in PARTS:
            raise ValueError(f"unknown part {part!r}")
        if linearization not in LINEARIZATIONS:
            raise ValueError(f"unknown linearization {linearization!r}")

        target = record.variant if linearization == "attested" else record.variant.other()
        linear = relinearize(record, doc, target)
        annotation = annotate_sequence(
            self.model, linear.lemmas(), linear.initial_context, linear.positions()
        )

        rc_first = record.rc_span.start
        matrix_first = min(record.matrix_positions())
        excluded = {rc_first}
        if part != "rc" and (part != "combined" or self.combined_excludes_matrix_first):
            excluded.add(matrix_first)

        values: list[float] = []
        factors = self._factors(doc) if mode == "accommodated" else None
        for token, entry in zip(linear.tokens, annotation.entries):
            if part != "combined" and token.part != part:
                continue
            if token.doc_position in excluded:
                continue
            value = entry.surprisal_bits
            if factors is not None:
                value *= factors[token.doc_position][1]
            values.append(value)
        if not values:
            raise ValueError(f"clause too short to score: {record.id} ({part})")
        return ClauseMetrics.from_values(values, mode, linearization, part)


def clause_metrics(
    record: ClauseRecord,
    doc: Document,
    model: KneserNeyBigramModel,
    mode: str = "bare",
    part: str = "combined",
    linearization: str = "attested",
    **scorer_options,
) -> ClauseMetrics:
    """One-shot convenience wrapper around :class:`ClauseScorer`."""
    return ClauseScorer(model, **scorer_options).metrics(
        record, doc, mode, part, linearization
    )


@dataclass(frozen=True)
class VariantCell:
    n: int
    mean_adS: float | None
    mean_avS: float | None


def aggregate_by_variant(
    metrics: Iterable[tuple[ClauseRecord, ClauseMetrics]],
) -> dict[tuple[Variant, str, str, str], VariantCell]:
    """Mean adS/avS and record counts per
    (variant, part, mode, linearization)."""
    groups: dict[tuple[Variant, str, str, str], list[ClauseMetrics]] = {}
    for record, m in metrics:
        groups.setdefault((record.variant, m.part, m.mode, m.linearization), []).append(m)
    return {
        key: VariantCell(
            len(ms), fmean(m.adS for m in ms), fmean(m.avS for m in ms)
        )
        for key, ms in groups.items()
    }


# --- report tables ---------------------------------------------------------

# Rows of the per-variant surprisal tables. For in-situ records the
# rc/matrix rows are scored in the extraposed (hypothetical) order, so the
# clause-by-itself values are comparable across variants; the combined row
# is their attested bundled order.
_TABLE_PLAN = {
    Variant.EXTRAPOSED: (
        (RC_LABEL, "rc", "attested"),
        (MATRIX_LABEL, "matrix", "attested"),
    ),
    Variant.IN_SITU: (
        (RC_LABEL, "rc", "hypothetical"),
        (MATRIX_LABEL, "matrix", "hypothetical"),
        (COMBINED_LABEL, "combined", "attested"),
    ),
}


@dataclass(frozen=True)
class TableRow:
    variant: Variant
    label: str
    n: int
    mean_adS: float | None
    mean_avS: float | None


def build_surprisal_table(
    records: Sequence[ClauseRecord],
    documents: Mapping[str, Document],
    scorer: ClauseScorer,
    mode: str,
) -> list[TableRow]:
    """Per-variant adS/avS summary rows in the standard layout."""
    rows: list[TableRow] = []
    for variant in (Variant.EXTRAPOSED, Variant.IN_SITU):
        of_variant = [r for r in records if r.variant is variant]
        for label, part, linearization in _TABLE_PLAN[variant]:
            if not of_variant:
                rows.append(TableRow(variant, label, 0, None, None))
                continue
            ms = [
                scorer.metrics(r, documents[r.doc_id], mode, part, linearization)
                for r in of_variant
            ]
            rows.append(
                TableRow(
                    variant, label, len(ms),
                    fmean(m.adS for m in ms), fmean(m.avS for m in ms),
                )
            )
    return rows


def build_hypothetical_table(
    records: Sequence[ClauseRecord],
    documents: Mapping[str, Document],
    scorer: ClauseScorer,
) -> list[TableRow]:
    """Combined metrics of extraposed records re-linearized in-situ, the
    counterfactual bundled reading, in both modes."""
    rows: list[TableRow] = []
    extraposed = [r for r in records if r.variant is Variant.EXTRAPOSED]
    for mode in MODES:
        label = f"{COMBINED_LABEL} (as if in-situ, {mode})"
        if not extraposed:
            rows.append(TableRow(Variant.EXTRAPOSED, label, 0, None, None))
            continue
        ms = [
            scorer.metrics(r, documents[r.doc_id], mode, "combined", "hypothetical")
            for r in extraposed
        ]
        rows.append(
            TableRow(
                Variant.EXTRAPOSED, label, len(ms),
                fmean(m.adS for m in ms), fmean(m.avS for m in ms),
            )
        )
    return rows


def _cell(value: float | None) -> str:
    return "NA" if value is None else f"{value:.4f}"


def write_table_tsv(rows: Iterable[TableRow], fh: TextIO) -> None:
    fh.write("variant\trow\tn\tadS\tavS\n")
    for row in rows:
        fh.write(
            f"{row.variant.value}\t{row.label}\t{row.n}"
            f"\t{_cell(row.mean_adS)}\t{_cell(row.mean_avS)}\n"
        )


def render_table(rows: Sequence[TableRow]) -> str:
    """Aligned human-readable rendering of a summary table."""
    lines = []
    for variant in (Variant.EXTRAPOSED, Variant.IN_SITU):
        block = [r for r in rows if r.variant is variant]
        if not block:
            continue
        name = variant.value.replace("_", "-")
        lines.append(f"{name} relative clauses (n = {block[0].n})")
        for row in block:
            lines.append(
                f"  {row.label:<32} adS {_cell(row.mean_adS):>10}"
                f"   avS {_cell(row.mean_avS):>8}"
            )
    return "\n".join(lines) + "\n"
