"""Command-line front end for the measurement pipeline.

Subcommands:

* ``train``      -- count a corpus and write the smoothed bigram model as ARPA
* ``surprisal``  -- per-lemma surprisal TSV with accommodation columns
* ``analyze``    -- full report bundle (givenness, bare and accommodated
                    clause tables, counterfactual orders, chi-square, manifest)
* ``givenness``  -- the givenness table on its own
* ``chi2``       -- chi-square on four raw counts

Exit codes: 0 success, 2 input or I/O error, 3 validation error, 4
internal invariant violation. A ``--config`` file supplies defaults in a
flat ``key = value`` format; command-line flags override it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import accommodation as accom
from . import clauses as cl
from . import givenness as giv
from . import ngram
from .corpus import (
    DEFAULT_PUNCTUATION,
    Document,
    load_plaintext,
    load_vertical_file,
    resegment_sentences,
)
from .errors import DegenerateCountsError, ParseError, PipelineError, ValidationError
from .surprisal import annotate_document


@dataclass
class RunConfig:
    """Resolved settings of one invocation; hashed into the run manifest."""

    corpus: list[str] = field(default_factory=list)
    format: str = "vertical"
    punctuation: str = "".join(sorted(DEFAULT_PUNCTUATION))
    include_punctuation: bool = False
    unit: str = "lemma"
    content_pos: str = ""
    stoplist: str = ""
    bonus: float = 4.0
    wearout: int = 4
    window: int = 200
    floor: int = 2
    salience_window: int = giv.SALIENCE_WINDOW
    count_distinct: bool = False
    combined_single_exclusion: bool = False
    discount: float | None = None
    seed: int | None = None  # reserved; the pipeline is deterministic

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        cfg = cls()
        for name in vars(cfg):
            if hasattr(args, name) and getattr(args, name) is not None:
                setattr(cfg, name, getattr(args, name))
        return cfg

    def factor_config(self) -> accom.FactorConfig:
        return accom.FactorConfig(self.bonus, self.wearout, self.window, self.floor)

    def content_predicate(self):
        pos = (
            frozenset(tag for tag in self.content_pos.split(",") if tag)
            if self.content_pos
            else accom.DEFAULT_CONTENT_POS
        )
        stoplist = accom.load_stoplist(self.stoplist) if self.stoplist else None
        return accom.make_content_predicate(pos, stoplist)

    def sha256(self) -> str:
        canonical = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load_corpus(cfg: RunConfig) -> dict[str, Document]:
    if not cfg.corpus:
        raise FileNotFoundError("no corpus path given")
    punctuation = frozenset(cfg.punctuation)
    docs: dict[str, Document] = {}
    for path in cfg.corpus:
        path = Path(path)
        if cfg.format == "vertical":
            loaded = load_vertical_file(path, punctuation)
        else:
            text = path.read_text(encoding="utf-8", errors="strict")
            loaded = [load_plaintext(text, path.stem, punctuation)]
        for doc in loaded:
            if doc.id in docs:
                raise ValidationError([f"duplicate document id {doc.id!r} across files"])
            docs[doc.id] = resegment_sentences(doc)
    return docs


# --- subcommands ------------------------------------------------------------

def cmd_train(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    docs = _load_corpus(cfg)
    counts = ngram.count_bigrams(docs.values(), cfg.include_punctuation, cfg.unit)
    if counts.total_bigram_types == 0:
        print("error: corpus contains no countable tokens", file=sys.stderr)
        return 2
    model = ngram.train_kn(counts, cfg.discount)
    Path(args.output).write_text(ngram.export_arpa(model), encoding="utf-8")
    report = (
        f"vocabulary={model.vocabulary.corpus_size()}"
        f" (+{len(ngram.RESERVED)} reserved)\n"
        f"tokens={counts.token_count()}\n"
        f"sentences={counts.sentence_count()}\n"
        f"D={model.discount:.6g}\n"
    )
    sys.stdout.write(report)
    if args.report:
        Path(args.report).write_text(report, encoding="utf-8")
    return 0


def cmd_surprisal(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    model = ngram.import_arpa(Path(args.model).read_text(encoding="utf-8"))
    docs = _load_corpus(cfg)
    if args.doc:
        missing = [d for d in args.doc if d not in docs]
        if missing:
            print(f"error: unknown document id(s): {', '.join(missing)}", file=sys.stderr)
            return 2
        selected = [docs[d] for d in args.doc]
    else:
        selected = list(docs.values())

    predicate = cfg.content_predicate()
    factor_cfg = cfg.factor_config()
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        for i, doc in enumerate(selected):
            annotation = annotate_document(model, doc)
            weighted = accom.accommodate_document(annotation, doc, predicate, factor_cfg)
            accom.write_weighted_tsv(weighted, out, header=(i == 0))
    finally:
        if args.output:
            out.close()
    return 0


def _classify_all(
    mentions: list[giv.ReferentMention], docs: dict[str, Document], cfg: RunConfig
) -> list[tuple[giv.ReferentMention, giv.SalienceCategory]]:
    problems = []
    for m in mentions:
        if m.doc_id not in docs:
            problems.append(f"mention of {m.referent_id!r}: unknown document {m.doc_id!r}")
        elif m.end > docs[m.doc_id].word_count():
            problems.append(
                f"mention of {m.referent_id!r} at [{m.start}, {m.end}) exceeds "
                f"document {m.doc_id!r}"
            )
    if problems:
        raise ValidationError(problems)
    classified = []
    by_doc: dict[str, list[giv.ReferentMention]] = {}
    for m in mentions:
        by_doc.setdefault(m.doc_id, []).append(m)
    for doc_mentions in by_doc.values():
        classified.extend(
            giv.classify_document(doc_mentions, cfg.salience_window, cfg.count_distinct)
        )
    return classified


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    model = ngram.import_arpa(Path(args.model).read_text(encoding="utf-8"))
    docs = _load_corpus(cfg)
    with open(args.clauses, encoding="utf-8") as fh:
        records = cl.parse_clause_annotations(fh, docs)
    with open(args.referents, encoding="utf-8") as fh:
        mentions = giv.load_referent_annotations(fh)
    classified = _classify_all(mentions, docs, cfg)

    scorer = cl.ClauseScorer(
        model,
        cfg.factor_config(),
        cfg.content_predicate(),
        combined_excludes_matrix_first=not cfg.combined_single_exclusion,
    )
    givenness_rows = giv.build_givenness_table(records, classified)
    table2 = cl.build_surprisal_table(records, docs, scorer, "bare")
    table3 = cl.build_surprisal_table(records, docs, scorer, "accommodated")
    hypothetical = cl.build_hypothetical_table(records, docs, scorer)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "table1.tsv", "w", encoding="utf-8") as fh:
        giv.write_givenness_tsv(givenness_rows, fh)
    with open(outdir / "table2.tsv", "w", encoding="utf-8") as fh:
        cl.write_table_tsv(table2, fh)
    with open(outdir / "table3.tsv", "w", encoding="utf-8") as fh:
        cl.write_table_tsv(table3, fh)
    with open(outdir / "hypotheticals.tsv", "w", encoding="utf-8") as fh:
        cl.write_table_tsv(hypothetical, fh)
    with open(outdir / "chi_square.tsv", "w", encoding="utf-8") as fh:
        fh.write("comparison\tstatistic\tp\n")
        try:
            statistic, p = giv.new_referent_chi_square(givenness_rows)
            fh.write(f"new referents, in-situ vs. extraposed rc\t{statistic:.4f}\t{p:.4f}\n")
        except (ValueError, KeyError):
            fh.write("new referents, in-situ vs. extraposed rc\tNA\tNA\n")

    inputs = {
        str(name): _sha256_file(Path(name))
        for name in [args.model, args.clauses, args.referents, *cfg.corpus]
    }
    outputs = {
        name: _sha256_file(outdir / name)
        for name in ["table1.tsv", "table2.tsv", "table3.tsv",
                     "hypotheticals.tsv", "chi_square.tsv"]
    }
    manifest = {
        "config": asdict(cfg),
        "config_sha256": cfg.sha256(),
        "inputs": inputs,
        "outputs": outputs,
    }
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")

    print("bare surprisal per clause")
    print(cl.render_table(table2))
    print("accommodated surprisal per clause")
    print(cl.render_table(table3))
    print(f"report bundle written to {outdir}")
    return 0


def cmd_givenness(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    docs = _load_corpus(cfg)
    with open(args.clauses, encoding="utf-8") as fh:
        records = cl.parse_clause_annotations(fh, docs)
    with open(args.referents, encoding="utf-8") as fh:
        mentions = giv.load_referent_annotations(fh)
    classified = _classify_all(mentions, docs, cfg)
    rows = giv.build_givenness_table(records, classified)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            giv.write_givenness_tsv(rows, fh)
    else:
        giv.write_givenness_tsv(rows, sys.stdout)
    return 0


def cmd_chi2(args: argparse.Namespace) -> int:
    statistic, p = giv.chi_square_2x2(args.a, args.b, args.c, args.d)
    print(f"statistic={statistic:.6f}\tp={p:.6f}")
    return 0


# --- argument plumbing ------------------------------------------------------

def _add_corpus_options(parser: argparse.ArgumentParser):
    parser.add_argument("--corpus", action="append", metavar="PATH",
                        help="corpus file; repeatable")
    parser.add_argument("--format", choices=("vertical", "text"),
                        help="corpus file format (default vertical)")
    parser.add_argument("--punctuation", metavar="CHARS",
                        help="characters whose tokens count as punctuation")
    parser.add_argument("--include-punctuation", action="store_const", const=True,
                        dest="include_punctuation",
                        help="keep punctuation tokens in model counts")
    parser.add_argument("--unit", choices=("lemma", "surface"),
                        help="modeling unit (default lemma)")


def _add_accommodation_options(parser: argparse.ArgumentParser):
    parser.add_argument("--bonus", type=float, help="first-mention factor (default 4)")
    parser.add_argument("--wearout", type=int,
                        help="mention count at which the bonus is gone (default 4)")
    parser.add_argument("--window", type=int,
                        help="words of silence per reset point (default 200)")
    parser.add_argument("--floor", type=int,
                        help="lowest count a reset can reach (default 2)")
    parser.add_argument("--content-pos", metavar="TAGS",
                        help="comma-separated POS tags treated as content words")
    parser.add_argument("--stoplist", metavar="PATH",
                        help="function-word lemma list for untagged corpora")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcsurp",
        description="Surprisal and givenness measurements for relative-clause placement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the bigram model and write ARPA")
    p.add_argument("--config", metavar="PATH", help="flat key = value defaults file")
    _add_corpus_options(p)
    p.add_argument("--discount", type=float, help="override the estimated discount")
    p.add_argument("-o", "--output", required=True, metavar="PATH",
                   help="ARPA output path")
    p.add_argument("--report", metavar="PATH", help="also write the report here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("surprisal", help="per-lemma surprisal and accommodation TSV")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--model", required=True, metavar="PATH", help="ARPA model")
    _add_corpus_options(p)
    _add_accommodation_options(p)
    p.add_argument("--doc", action="append", metavar="ID",
                   help="restrict to this document id; repeatable")
    p.add_argument("-o", "--output", metavar="PATH", help="TSV output (default stdout)")
    p.set_defaults(func=cmd_surprisal)

    p = sub.add_parser("analyze", help="emit the full report bundle")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--model", required=True, metavar="PATH", help="ARPA model")
    _add_corpus_options(p)
    _add_accommodation_options(p)
    p.add_argument("--clauses", required=True, metavar="PATH",
                   help="clause annotation JSON")
    p.add_argument("--referents", required=True, metavar="PATH",
                   help="referent annotation TSV")
    p.add_argument("--salience-window", type=int,
                   help="interveners tolerated for a salient re-mention (default 10)")
    p.add_argument("--count-distinct", action="store_const", const=True,
                   dest="count_distinct",
                   help="count distinct referents instead of mention events")
    p.add_argument("--combined-single-exclusion", action="store_const", const=True,
                   dest="combined_single_exclusion",
                   help="exclude only the relative pronoun from combined metrics")
    p.add_argument("--outdir", required=True, metavar="DIR",
                   help="directory for the report bundle")
    p.add_argument("--seed", type=int, help="reserved; the pipeline is deterministic")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("givenness", help="givenness table only")
    p.add_argument("--config", metavar="PATH")
    _add_corpus_options(p)
    p.add_argument("--clauses", required=True, metavar="PATH")
    p.add_argument("--referents", required=True, metavar="PATH")
    p.add_argument("--salience-window", type=int)
    p.add_argument("--count-distinct", action="store_const", const=True,
                   dest="count_distinct")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_givenness)

    p = sub.add_parser("chi2", help="chi-square on a 2x2 table")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)
    p.add_argument("d", type=int)
    p.set_defaults(func=cmd_chi2)

    return parser


_FLAG_KEYS = {"include_punctuation", "count_distinct", "combined_single_exclusion"}


def _expand_config(argv: list[str]) -> list[str]:
    """Splice ``key = value`` pairs from a ``--config`` file into the
    argument list, right after the subcommand so explicit flags win."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            break
        if token.startswith("--config="):
            path = token.split("=", 1)[1]
            break
    if path is None:
        return argv

    tokens: list[str] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        flag = "--" + key.replace("_", "-")
        if key in _FLAG_KEYS:
            if value.lower() in ("1", "true", "yes"):
                tokens.append(flag)
            elif value.lower() not in ("0", "false", "no"):
                raise ParseError(f"boolean expected for {key!r}, got {value!r}", lineno)
        else:
            tokens.extend([flag, value])
    # insert after the subcommand name
    for i, token in enumerate(argv):
        if not token.startswith("-"):
            return argv[: i + 1] + tokens + argv[i + 1:]
    return argv + tokens


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_config(argv)
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        for problem in exc.problems:
            print(f"validation error: {problem}", file=sys.stderr)
        return 3
    except (ParseError, DegenerateCountsError, OSError, UnicodeDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, PipelineError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
