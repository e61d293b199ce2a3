"""Corpus ingestion: vertical-format parsing, sentence re-segmentation,
and lemma streams with stable word positions.

The vertical format is UTF-8 text with one token per line
(``surface<TAB>lemma[<TAB>pos]``), ``# doc: <id>`` headers starting a new
document, blank lines marking sentence boundaries, and other ``#`` lines
treated as comments.

Word positions (``doc_position``) count non-punctuation tokens only, so
that distances measured in "words" are not inflated by delimiters such as
the early-modern virgule ``/``. Punctuation tokens carry no position.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .errors import ParseError

# Characters that make a token count as punctuation when they are all it
# consists of. ``/`` is included because the historical texts this toolkit
# targets use the virgule as a comma-like delimiter.
DEFAULT_PUNCTUATION = frozenset('.,;:?!/()„“”"—')

DOC_HEADER = "# doc:"


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str | None
    doc_position: int | None  # None for punctuation tokens
    sentence_index: int
    is_punctuation: bool


@dataclass(frozen=True)
class Document:
    id: str
    tokens: tuple[Token, ...]
    sentence_count: int

    def word_tokens(self) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if not t.is_punctuation)

    def word_count(self) -> int:
        return sum(1 for t in self.tokens if not t.is_punctuation)


def is_punctuation(surface: str, punctuation: frozenset[str] = DEFAULT_PUNCTUATION) -> bool:
    """True iff the surface consists solely of punctuation characters."""
    return bool(surface) and all(ch in punctuation for ch in surface)


class _DocumentBuilder:
    """Accumulates tokens for one document, assigning positions and
    sentence indices on the fly."""

    def __init__(self, doc_id: str, punctuation: frozenset[str]):
        self.doc_id = doc_id
        self.punctuation = punctuation
        self.tokens: list[Token] = []
        self._sentence_index = 0
        self._sentence_open = False
        self._next_position = 0

    def add_token(self, surface: str, lemma: str, pos: str | None):
        punct = is_punctuation(surface, self.punctuation)
        position = None
        if not punct:
            position = self._next_position
            self._next_position += 1
        self.tokens.append(
            Token(surface, lemma, pos, position, self._sentence_index, punct)
        )
        self._sentence_open = True

    def end_sentence(self):
        if self._sentence_open:
            self._sentence_index += 1
            self._sentence_open = False

    def build(self) -> Document:
        self.end_sentence()
        return Document(self.doc_id, tuple(self.tokens), self._sentence_index)


def _iter_lines(source: str | TextIO | Iterable[str]) -> Iterator[str]:
    if isinstance(source, str):
        return iter(io.StringIO(source))
    return iter(source)


def load_vertical(
    source: str | TextIO | Iterable[str],
    punctuation: frozenset[str] = DEFAULT_PUNCTUATION,
) -> list[Document]:
    """Parse vertical-format text into documents.

    ``source`` may be a string, an open text file, or any iterable of
    lines. Raises :class:`ParseError` with a line number on malformed
    token lines, token lines outside any document, and duplicate
    document ids. An empty source yields an empty list.
    """
    docs: list[Document] = []
    seen_ids: set[str] = set()
    builder: _DocumentBuilder | None = None

    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if line.startswith(DOC_HEADER):
            doc_id = line[len(DOC_HEADER):].strip()
            if not doc_id:
                raise ParseError("document header without an id", lineno)
            if doc_id in seen_ids:
                raise ParseError(f"duplicate document id {doc_id!r}", lineno)
            seen_ids.add(doc_id)
            if builder is not None:
                docs.append(builder.build())
            builder = _DocumentBuilder(doc_id, punctuation)
            continue
        if line.startswith("#"):
            continue  # comment
        if not line.strip():
            if builder is not None:
                builder.end_sentence()
            continue
        if builder is None:
            raise ParseError("token line before any '# doc:' header", lineno)
        columns = line.split("\t")
        if len(columns) < 2 or len(columns) > 3:
            raise ParseError(
                f"expected 2 or 3 tab-separated columns, got {len(columns)}", lineno
            )
        surface, lemma = columns[0], columns[1]
        pos = columns[2] if len(columns) == 3 and columns[2] else None
        if not surface:
            raise ParseError("empty surface form", lineno)
        if not lemma and not is_punctuation(surface, punctuation):
            raise ParseError(f"empty lemma for word token {surface!r}", lineno)
        builder.add_token(surface, lemma or surface, pos)

    if builder is not None:
        docs.append(builder.build())
    return docs


def load_vertical_file(
    path: str | Path, punctuation: frozenset[str] = DEFAULT_PUNCTUATION
) -> list[Document]:
    """Load a vertical file from disk. UTF-8 only; invalid bytes are a hard error."""
    with open(path, encoding="utf-8", errors="strict") as fh:
        return load_vertical(fh, punctuation)


def write_vertical(docs: Iterable[Document]) -> str:
    """Serialize documents back to vertical format.

    ``load_vertical`` is the exact inverse for output produced here,
    provided the same punctuation set is used on reload.
    """
    out: list[str] = []
    for doc in docs:
        out.append(f"{DOC_HEADER} {doc.id}")
        previous_sentence = None
        for token in doc.tokens:
            if previous_sentence is not None and token.sentence_index != previous_sentence:
                out.append("")
            previous_sentence = token.sentence_index
            if token.pos is None:
                out.append(f"{token.surface}\t{token.lemma}")
            else:
                out.append(f"{token.surface}\t{token.lemma}\t{token.pos}")
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


def load_plaintext(
    text: str,
    doc_id: str = "doc",
    punctuation: frozenset[str] = DEFAULT_PUNCTUATION,
) -> Document:
    """Tokenize plain text as a fallback when no vertical file exists.

    Whitespace splitting with leading/trailing punctuation peeled off into
    separate tokens; the lemma defaults to the lowercased surface. The
    result is one sentence; run :func:`resegment_sentences` afterwards to
    split at periods.
    """
    builder = _DocumentBuilder(doc_id, punctuation)
    for chunk in text.split():
        leading: list[str] = []
        trailing: list[str] = []
        while chunk and chunk[0] in punctuation:
            leading.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in punctuation:
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        for ch in leading:
            builder.add_token(ch, ch, None)
        if chunk:
            builder.add_token(chunk, chunk.lower(), None)
        for ch in reversed(trailing):
            builder.add_token(ch, ch, None)
    return builder.build()


def resegment_sentences(doc: Document) -> Document:
    """Introduce a sentence boundary after every token whose surface is
    exactly ``"."``, keeping all original boundaries.

    Token order and word positions are unchanged; sentence indices and the
    sentence count are recomputed. Idempotent.
    """
    if not doc.tokens:
        return doc
    new_tokens: list[Token] = []
    sentence_index = 0
    boundary_pending = False
    previous_original = doc.tokens[0].sentence_index
    for token in doc.tokens:
        if token.sentence_index != previous_original:
            boundary_pending = True
        previous_original = token.sentence_index
        if boundary_pending:
            sentence_index += 1
            boundary_pending = False
        new_tokens.append(replace(token, sentence_index=sentence_index))
        if token.surface == ".":
            boundary_pending = True
    return Document(doc.id, tuple(new_tokens), sentence_index + 1)


def lemma_stream(
    doc: Document, include_punctuation: bool = False
) -> Iterator[tuple[str, int | None, int]]:
    """Yield ``(lemma, doc_position, sentence_index)`` in token order."""
    for token in doc.tokens:
        if token.is_punctuation and not include_punctuation:
            continue
        yield token.lemma, token.doc_position, token.sentence_index


def sentences(
    doc: Document, include_punctuation: bool = False, unit: str = "lemma"
) -> Iterator[list[str]]:
    """Yield per-sentence lists of lemmas (or surfaces with ``unit="surface"``)."""
    if unit not in ("lemma", "surface"):
        raise ValueError(f"unknown unit {unit!r}")
    current: list[str] = []
    current_index: int | None = None
    for token in doc.tokens:
        if current_index is not None and token.sentence_index != current_index:
            if current:
                yield current
            current = []
        current_index = token.sentence_index
        if token.is_punctuation and not include_punctuation:
            continue
        current.append(token.lemma if unit == "lemma" else token.surface)
    if current:
        yield current
