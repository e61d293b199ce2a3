#!/usr/bin/env python3
"""Regenerate the bundled mini-corpus fixture under tests/fixtures/minicorpus/.

The fixture is a synthetic German-like corpus (four documents, a few
thousand words) with planted relative clauses in both orders, plus the
matching clause and referent annotation files, so the whole pipeline can
run end to end without any external corpus. Deterministic for a fixed
seed; the committed files come from the default seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rcsurp.clauses import parse_clause_annotations
from rcsurp.corpus import load_vertical, resegment_sentences
from rcsurp.givenness import load_referent_annotations

NOUNS = [
    "Mann", "Frau", "Kind", "Herr", "Gott", "Trost", "Leben", "Tod",
    "Himmel", "Erde", "Wort", "Predigt", "Seele", "Gnade", "Kirche",
    "Stadt", "Wasser", "Licht", "Buch", "Freund", "Vater", "Mutter",
    "Sohn", "Tochter", "Bruder", "Haus", "Herz", "Glaube", "Hoffnung",
    "Schmerz", "Freude", "Ewigkeit", "Stunde", "Jahr", "Name", "Grab",
]
VERBS = [
    "sagen", "geben", "nehmen", "sehen", "kommen", "gehen", "sterben",
    "leben", "loben", "trösten", "glauben", "finden", "halten", "tragen",
    "rufen", "hören", "bleiben", "verlassen", "empfangen", "bewahren",
]
ADJECTIVES = [
    "gut", "groß", "klein", "alt", "neu", "fromm", "selig", "schwer",
    "leicht", "lieb", "ewig", "treu", "heilig", "arm", "reich",
]
ADVERBS = ["sehr", "bald", "oft", "nie", "hier", "dort", "heute", "allzeit"]

ARTICLES = [("der", "ART"), ("die", "ART"), ("das", "ART"), ("ein", "ART")]
PREPOSITIONS = [("in", "APPR"), ("zu", "APPR"), ("mit", "APPR"),
                ("von", "APPR"), ("auf", "APPR"), ("an", "APPR")]
AUXILIARIES = [("ist", "sein", "VAFIN"), ("hat", "haben", "VAFIN"),
               ("war", "sein", "VAFIN"), ("wird", "werden", "VAFIN")]
PRONOUNS = [("er", "er", "PPER"), ("sie", "sie", "PPER"), ("es", "es", "PPER")]
RELATIVE_PRONOUNS = [("der", "der", "PRELS"), ("die", "die", "PRELS"),
                     ("welcher", "welcher", "PRELS")]


class DocBuilder:
    """Accumulates vertical-format lines, word positions, referent rows."""

    def __init__(self, doc_id: str, rng: random.Random):
        self.doc_id = doc_id
        self.rng = rng
        self.lines: list[str] = [f"# doc: {doc_id}"]
        self.position = 0
        self.mentions: list[tuple[int, int, str, int, int]] = []

    def word(self, surface: str, lemma: str, pos: str) -> int:
        self.lines.append(f"{surface}\t{lemma}\t{pos}")
        current = self.position
        self.position += 1
        return current

    def punct(self, ch: str):
        self.lines.append(f"{ch}\t{ch}\t$")

    def end_sentence(self):
        self.punct(".")
        self.lines.append("")

    def noun(self, picker, mention_probability: float) -> int:
        lemma = picker()
        pos = self.word(lemma, lemma, "NN")
        if self.rng.random() < mention_probability:
            inferable = 1 if self.rng.random() < 0.15 else 0
            topic = 1 if self.rng.random() < 0.15 else 0
            self.mentions.append((pos, pos + 1, lemma, inferable, topic))
        return pos


def zipf_picker(rng: random.Random, items: list[str]):
    weights = [1.0 / (rank + 1) for rank in range(len(items))]
    def pick():
        return rng.choices(items, weights)[0]
    return pick


def plain_sentence(b: DocBuilder, pick_noun, rng: random.Random):
    article, _ = rng.choice(ARTICLES)
    b.word(article, article, "ART")
    b.noun(pick_noun, 0.55)
    aux_surface, aux_lemma, aux_pos = rng.choice(AUXILIARIES)
    b.word(aux_surface, aux_lemma, aux_pos)
    if rng.random() < 0.5:
        adjective = rng.choice(ADJECTIVES)
        b.word(adjective, adjective, "ADJA")
    if rng.random() < 0.6:
        preposition, ppos = rng.choice(PREPOSITIONS)
        b.word(preposition, preposition, ppos)
        article2, _ = rng.choice(ARTICLES)
        b.word(article2, article2, "ART")
        b.noun(pick_noun, 0.55)
    if rng.random() < 0.4:
        adverb = rng.choice(ADVERBS)
        b.word(adverb, adverb, "ADV")
    verb = rng.choice(VERBS)
    b.word(verb, verb, "VVFIN")
    b.end_sentence()


def clause_sentence(b: DocBuilder, pick_noun, rng: random.Random,
                    variant: str, record_id: str) -> dict:
    """Emit one clause complex and return its annotation record."""
    matrix_start = b.position
    article, _ = rng.choice(ARTICLES)
    b.word(article, article, "ART")
    b.noun(pick_noun, 0.8)
    aux_surface, aux_lemma, aux_pos = rng.choice(AUXILIARIES)
    b.word(aux_surface, aux_lemma, aux_pos)
    article2, _ = rng.choice(ARTICLES)
    b.word(article2, article2, "ART")
    b.noun(pick_noun, 0.9)  # head noun
    attachment = b.position

    def emit_rc() -> tuple[int, int]:
        b.punct("/")
        rc_start = b.position
        rel_surface, rel_lemma, rel_pos = rng.choice(RELATIVE_PRONOUNS)
        b.word(rel_surface, rel_lemma, rel_pos)
        if rng.random() < 0.6:
            article3, _ = rng.choice(ARTICLES)
            b.word(article3, article3, "ART")
            b.noun(pick_noun, 0.9)
        if rng.random() < 0.5:
            adverb = rng.choice(ADVERBS)
            b.word(adverb, adverb, "ADV")
        rc_verb = rng.choice(VERBS)
        b.word(rc_verb, rc_verb, "VVFIN")
        rc_end = b.position
        b.punct("/")
        return rc_start, rc_end

    def emit_matrix_tail():
        if rng.random() < 0.5:
            preposition, ppos = rng.choice(PREPOSITIONS)
            b.word(preposition, preposition, ppos)
            b.noun(pick_noun, 0.7)
        verb = rng.choice(VERBS)
        b.word(verb, verb, "VVPP")

    if variant == "in_situ":
        rc_start, rc_end = emit_rc()
        emit_matrix_tail()
        matrix_end = b.position
        record = {
            "id": record_id, "doc": b.doc_id, "variant": "in_situ",
            "matrix": [[matrix_start, rc_start], [rc_end, matrix_end]],
            "rc": [rc_start, rc_end], "attachment": rc_start,
        }
    else:
        emit_matrix_tail()
        matrix_end = b.position
        rc_start, rc_end = emit_rc()
        record = {
            "id": record_id, "doc": b.doc_id, "variant": "extraposed",
            "matrix": [[matrix_start, matrix_end]],
            "rc": [rc_start, rc_end], "attachment": attachment,
        }
    b.end_sentence()
    return record


def generate(seed: int):
    rng = random.Random(seed)
    records = []
    vertical_parts = []
    referent_rows = []
    record_counter = 0

    for doc_index in range(4):
        doc_id = f"sermon-{doc_index + 1:02d}"
        b = DocBuilder(doc_id, rng)
        pick_noun = zipf_picker(rng, NOUNS)
        n_sentences = rng.randint(85, 100)
        clause_slots = sorted(rng.sample(range(8, n_sentences - 2), 5))
        for s in range(n_sentences):
            if s in clause_slots:
                record_counter += 1
                variant = "in_situ" if record_counter % 2 else "extraposed"
                records.append(
                    clause_sentence(b, pick_noun, rng, variant, f"rc-{record_counter:03d}")
                )
            else:
                plain_sentence(b, pick_noun, rng)
        vertical_parts.append("\n".join(b.lines) + "\n")
        for start, end, referent, inferable, topic in b.mentions:
            referent_rows.append(
                f"{doc_id}\t{start}\t{end}\t{referent}\t{inferable}\t{topic}"
            )

    vertical = "\n".join(vertical_parts)
    clauses_json = json.dumps(records, indent=2) + "\n"
    referents_tsv = "\n".join(referent_rows) + "\n"
    return vertical, clauses_json, referents_tsv


def verify(vertical: str, clauses_json: str, referents_tsv: str):
    docs = {d.id: resegment_sentences(d) for d in load_vertical(vertical)}
    records = parse_clause_annotations(clauses_json, docs)
    mentions = load_referent_annotations(referents_tsv)
    in_situ = sum(1 for r in records if r.variant.value == "in_situ")
    words = sum(d.word_count() for d in docs.values())
    print(f"{len(docs)} documents, {words} words, "
          f"{len(records)} clause records ({in_situ} in-situ), "
          f"{len(mentions)} referent mentions")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20170303)
    parser.add_argument(
        "--outdir",
        default=Path(__file__).resolve().parent.parent / "tests/fixtures/minicorpus",
        type=Path,
    )
    args = parser.parse_args()

    vertical, clauses_json, referents_tsv = generate(args.seed)
    verify(vertical, clauses_json, referents_tsv)

    args.outdir.mkdir(parents=True, exist_ok=True)
    (args.outdir / "corpus.vert").write_text(vertical, encoding="utf-8")
    (args.outdir / "clauses.json").write_text(clauses_json, encoding="utf-8")
    (args.outdir / "referents.tsv").write_text(referents_tsv, encoding="utf-8")
    print(f"fixture written to {args.outdir}")


if __name__ == "__main__":
    main()
