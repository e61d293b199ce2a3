import random

import pytest

import helpers
from rcsurp import (
    ClauseRecord,
    ParseError,
    ReferentMention,
    SalienceCategory,
    Span,
    ValidationError,
    Variant,
    chi_square_2x2,
    classify_document,
    classify_mention,
    clause_givenness,
    load_referent_annotations,
)
from rcsurp.givenness import build_givenness_table, new_referent_chi_square


def _mention(ordinal, referent, inferable=False, topic=False, doc="d"):
    return ReferentMention(doc, ordinal * 2, ordinal * 2 + 1, referent,
                           inferable, topic, ordinal)


def _chain(*referents):
    return [_mention(i, r) for i, r in enumerate(referents)]


# --- classification ---------------------------------------------------------

def test_first_mention_is_new():
    assert classify_mention([], _mention(0, "a")) is SalienceCategory.NEW


def test_first_mention_inferable():
    m = _mention(0, "a", inferable=True)
    assert classify_mention([], m) is SalienceCategory.INFERABLE_NEW


def test_re_mention_within_window_is_salient():
    history = _chain("a", "x1", "x2", "x3", "x4", "x5")
    m = _mention(6, "a")
    assert classify_mention(history, m) is SalienceCategory.GIVEN_SALIENT


def test_re_mention_beyond_window_is_non_salient():
    history = _chain("a", *[f"x{i}" for i in range(11)])
    m = _mention(12, "a")  # 11 interveners
    assert classify_mention(history, m) is SalienceCategory.GIVEN_NON_SALIENT


def test_window_boundary_is_salient():
    history = _chain("a", *[f"x{i}" for i in range(10)])
    m = _mention(11, "a")  # exactly 10 interveners
    assert classify_mention(history, m) is SalienceCategory.GIVEN_SALIENT


def test_salient_topic():
    history = _chain("a", "b")
    m = _mention(2, "a", topic=True)
    assert classify_mention(history, m) is SalienceCategory.SALIENT_TOPIC


def test_topic_flag_ignored_when_not_salient():
    history = _chain("a", *[f"x{i}" for i in range(11)])
    m = _mention(12, "a", topic=True)
    assert classify_mention(history, m) is SalienceCategory.GIVEN_NON_SALIENT


def test_distinct_referent_counting():
    # eleven intervening mention events of only two distinct referents
    history = _chain("a", *(["b", "c"] * 5), "b")
    m = _mention(12, "a")
    assert classify_mention(history, m) is SalienceCategory.GIVEN_NON_SALIENT
    assert classify_mention(history, m, count_distinct=True) is SalienceCategory.GIVEN_SALIENT


def test_classification_depends_only_on_order_and_flags():
    referents = ["a", "b", "a", "c", "b", "a"]
    renamed = {r: f"ref-{i}" for i, r in enumerate(dict.fromkeys(referents))}
    original = classify_document(_chain(*referents))
    bijected = classify_document(_chain(*[renamed[r] for r in referents]))
    assert [c for _, c in original] == [c for _, c in bijected]


def test_classify_document_sequential():
    classified = classify_document(_chain("a", "b", "a"))
    assert [c for _, c in classified] == [
        SalienceCategory.NEW, SalienceCategory.NEW, SalienceCategory.GIVEN_SALIENT,
    ]


# --- referent TSV -----------------------------------------------------------

def test_load_referents():
    mentions = load_referent_annotations(
        "d1\t0\t1\tr1\t0\t0\nd1\t5\t6\tr2\t1\t0\nd2\t0\t1\tr1\t0\t1\n"
    )
    assert len(mentions) == 3
    assert mentions[0].mention_ordinal == 0
    assert mentions[1].mention_ordinal == 1
    assert mentions[1].inferable
    assert mentions[2].doc_id == "d2" and mentions[2].mention_ordinal == 0


def test_load_referents_orders_by_interval():
    mentions = load_referent_annotations("d\t7\t8\tb\t0\t0\nd\t2\t3\ta\t0\t0\n")
    ordered = sorted(mentions, key=lambda m: m.mention_ordinal)
    assert [m.referent_id for m in ordered] == ["a", "b"]


def test_load_referents_field_count_error():
    with pytest.raises(ParseError):
        load_referent_annotations("d1\t0\t1\tr1\t0\n")


def test_load_referents_flag_error():
    with pytest.raises(ParseError):
        load_referent_annotations("d1\t0\t1\tr1\t2\t0\n")


def test_load_referents_overlap_error():
    with pytest.raises(ValidationError):
        load_referent_annotations("d\t0\t3\ta\t0\t0\nd\t2\t4\tb\t0\t0\n")


# --- clause givenness -------------------------------------------------------

def _record(rc=(10, 20), matrix=((0, 10),), variant=Variant.EXTRAPOSED):
    return ClauseRecord("r", "d", variant,
                        tuple(Span(*m) for m in matrix), Span(*rc), matrix[0][1])


def _classified(categories, start=10):
    pairs = []
    for i, category in enumerate(categories):
        mention = ReferentMention("d", start + i, start + i + 1, f"ref{i}",
                                  False, False, i)
        pairs.append((mention, category))
    return pairs


def test_clause_ratios():
    # 40 referents, 4 new -> 10%; 24 salient -> 60%
    categories = (
        [SalienceCategory.NEW] * 4
        + [SalienceCategory.GIVEN_SALIENT] * 20
        + [SalienceCategory.SALIENT_TOPIC] * 4
        + [SalienceCategory.GIVEN_NON_SALIENT] * 12
    )
    record = _record(rc=(10, 60))
    counts = clause_givenness(record, _classified(categories), "rc")
    assert counts.total == 40
    assert counts.new == 4
    assert counts.ratio(counts.new) == pytest.approx(0.10)
    assert counts.salient == 24
    assert counts.ratio(counts.salient) == pytest.approx(0.60)


def test_counts_per_category_sum_to_total():
    categories = [SalienceCategory.NEW, SalienceCategory.GIVEN_SALIENT,
                  SalienceCategory.INFERABLE_NEW]
    counts = clause_givenness(_record(rc=(10, 20)), _classified(categories), "rc")
    assert sum(counts.by_category.values()) == counts.total == 3


def test_empty_part_has_undefined_ratios():
    counts = clause_givenness(_record(), [], "rc")
    assert counts.total == 0
    assert counts.ratio(counts.new) is None
    assert counts.ratio(counts.salient) is None


def test_mentions_outside_spans_ignored():
    record = _record(rc=(10, 12), matrix=((0, 5),))
    classified = _classified([SalienceCategory.NEW], start=7)  # in neither span
    assert clause_givenness(record, classified, "rc").total == 0
    assert clause_givenness(record, classified, "matrix").total == 0


def test_matrix_part_with_split_spans():
    record = _record(rc=(5, 7), matrix=((0, 5), (7, 12)), variant=Variant.IN_SITU)
    mention = ReferentMention("d", 8, 9, "x", False, False, 0)
    counts = clause_givenness(record, [(mention, SalienceCategory.NEW)], "matrix")
    assert counts.total == 1


# --- chi-square -------------------------------------------------------------

def test_chi_square_reference_table():
    statistic, p = chi_square_2x2(2, 20, 11, 35)
    assert statistic == pytest.approx(2.1145, abs=5e-4)
    assert p == pytest.approx(0.1459, abs=5e-4)


def test_chi_square_independence():
    statistic, p = chi_square_2x2(10, 10, 10, 10)
    assert statistic == 0.0
    assert p == 1.0


def test_chi_square_transpose_symmetry():
    assert chi_square_2x2(3, 7, 11, 5) == chi_square_2x2(3, 11, 7, 5)


def test_chi_square_degenerate_marginal():
    with pytest.raises(ValueError, match="degenerate"):
        chi_square_2x2(0, 0, 5, 7)
    with pytest.raises(ValueError):
        chi_square_2x2(-1, 2, 3, 4)


def test_chi_square_against_integration_oracle():
    rng = random.Random(17)
    for _ in range(25):
        a, b, c, d = (rng.randint(1, 60) for _ in range(4))
        statistic, p = chi_square_2x2(a, b, c, d)
        assert statistic >= 0
        assert 0 < p <= 1
        assert p == pytest.approx(helpers.reference_chi2_upper_tail(statistic), abs=1e-6)


# --- pooled table -----------------------------------------------------------

def _two_variant_setup():
    records = [
        _record(rc=(10, 20), matrix=((0, 10),), variant=Variant.EXTRAPOSED),
        ClauseRecord("r2", "d", Variant.IN_SITU,
                     (Span(30, 35), Span(40, 45)), Span(35, 40), 35),
    ]
    categories = [SalienceCategory.NEW] * 3 + [SalienceCategory.GIVEN_SALIENT] * 2
    positions = [11, 13, 36, 37, 38]
    classified = [
        (ReferentMention("d", p, p + 1, f"ref{i}", False, False, i), categories[i])
        for i, p in enumerate(positions)
    ]
    return records, classified


def test_build_givenness_table_rows():
    records, classified = _two_variant_setup()
    rows = build_givenness_table(records, classified)
    assert [r.label for r in rows] == [
        "Relative clauses: in-situ",
        "Matrix clauses of in-situ rel. cl.",
        "Relative clauses: extraposed",
        "Matrix clauses of extraposed rel. cl.",
    ]
    by_label = {r.label: r.counts for r in rows}
    assert by_label["Relative clauses: extraposed"].new == 2
    assert by_label["Relative clauses: in-situ"].total == 3


def test_new_referent_chi_square_uses_rc_rows():
    records, classified = _two_variant_setup()
    rows = build_givenness_table(records, classified)
    statistic, p = new_referent_chi_square(rows)
    in_situ = next(r.counts for r in rows if r.label == "Relative clauses: in-situ")
    extraposed = next(r.counts for r in rows if r.label == "Relative clauses: extraposed")
    expected = chi_square_2x2(
        in_situ.new, in_situ.total - in_situ.new,
        extraposed.new, extraposed.total - extraposed.new,
    )
    assert (statistic, p) == expected
