import pytest

from rcsurp import (
    AccommodationState,
    FactorConfig,
    accommodate_document,
    factor,
    load_vertical,
    next_x,
    observe,
)
from rcsurp.accommodation import (
    accommodation_factors,
    load_stoplist,
    make_content_predicate,
)
from rcsurp.surprisal import SurprisalAnnotation, SurprisalEntry

GOLDEN_POSITIONS = [624, 656, 681, 702, 715, 1267, 2785]
GOLDEN_FACTORS = [4.0, 2.0, 4 / 3, 1.0, 1.0, 4 / 3, 2.0]


# --- factor function --------------------------------------------------------

def test_factor_values():
    assert factor(1) == 4.0
    assert factor(3) == 4 / 3
    assert factor(4) == 1.0  # continuous at the wearout point: 4/4 = 1
    assert factor(7) == 1.0


def test_factor_rejects_nonpositive():
    with pytest.raises(ValueError):
        factor(0)


def test_factor_custom_config():
    cfg = FactorConfig(bonus=6.0, wearout=3)
    assert factor(1, cfg) == 6.0
    assert factor(2, cfg) == 3.0
    assert factor(3, cfg) == 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        FactorConfig(bonus=0)
    with pytest.raises(ValueError):
        FactorConfig(window=0)
    with pytest.raises(ValueError):
        FactorConfig(floor=5, wearout=4)
    with pytest.raises(ValueError):
        FactorConfig(floor=0)


# --- reset rule -------------------------------------------------------------

def test_next_x_within_window_increments():
    assert next_x(1, 32) == 2
    assert next_x(4, 13) == 5


def test_next_x_decay():
    assert next_x(5, 552) == 3  # two full windows elapsed
    assert next_x(3, 1518) == 2  # floored


def test_next_x_boundary_gap_decrements():
    assert next_x(3, 200) == 2
    assert next_x(5, 200) == 4
    assert next_x(1, 199) == 2


def test_next_x_rejects_bad_input():
    with pytest.raises(ValueError):
        next_x(0, 5)
    with pytest.raises(ValueError):
        next_x(2, 0)


# --- occurrence scanning ----------------------------------------------------

def test_golden_trace():
    state = AccommodationState()
    observed = [observe(state, "word", p) for p in GOLDEN_POSITIONS]
    assert [x for x, _ in observed] == [1, 2, 3, 4, 5, 3, 2]
    assert [f for _, f in observed] == GOLDEN_FACTORS


def test_adjacent_mentions():
    state = AccommodationState()
    assert state.observe("w", 10) == (1, 4.0)
    assert state.observe("w", 11) == (2, 2.0)


def test_first_occurrence_gets_bonus_anywhere():
    state = AccommodationState()
    assert state.observe("fresh", 123456)[1] == 4.0


def test_lemmas_tracked_independently():
    state = AccommodationState()
    state.observe("a", 1)
    state.observe("b", 2)
    assert state.observe("a", 3)[0] == 2
    assert state.observe("b", 4)[0] == 2


def test_non_monotone_position_is_error():
    state = AccommodationState()
    state.observe("w", 10)
    with pytest.raises(ValueError, match="scanned in order"):
        state.observe("w", 10)


def test_no_decay_sequence():
    # with an effectively infinite window the factors are exactly
    # bonus/1, bonus/2, ..., then 1 forever
    cfg = FactorConfig(window=10**9)
    state = AccommodationState()
    factors = [state.observe("w", p, cfg)[1] for p in range(1, 9)]
    assert factors == [4.0, 2.0, 4 / 3, 1.0, 1.0, 1.0, 1.0, 1.0]


# --- content predicate ------------------------------------------------------

def _token(doc, i):
    return doc.word_tokens()[i]


def test_pos_based_predicate():
    doc = load_vertical("# doc: d\nder\tder\tART\nMann\tMann\tNN\n")[0]
    is_content = make_content_predicate()
    assert not is_content(_token(doc, 0))
    assert is_content(_token(doc, 1))


def test_stoplist_fallback_without_pos():
    doc = load_vertical("# doc: d\nund\tund\nTrost\ttrost\n")[0]
    is_content = make_content_predicate()
    assert not is_content(_token(doc, 0))  # stoplisted function word
    assert is_content(_token(doc, 1))


def test_custom_stoplist(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment\nfoo\n", encoding="utf-8")
    stoplist = load_stoplist(path)
    assert "foo" in stoplist
    doc = load_vertical("# doc: d\nfoo\tfoo\nbar\tbar\n")[0]
    is_content = make_content_predicate(stoplist=stoplist)
    assert not is_content(_token(doc, 0))
    assert is_content(_token(doc, 1))


# --- document weighting -----------------------------------------------------

def _trace_document():
    """One content lemma at the golden positions, distinct filler at the rest."""
    lines = ["# doc: trace"]
    targets = set(GOLDEN_POSITIONS)
    for position in range(max(GOLDEN_POSITIONS) + 1):
        if position in targets:
            lines.append("Wort\twort\tNN")
        else:
            lines.append(f"f{position}\tf{position}\tART")
    lines.append("")
    return load_vertical("\n".join(lines))[0]


def _flat_annotation(doc, bits=1.0):
    entries = tuple(
        SurprisalEntry(t.lemma, "x", 0.5, bits, t.doc_position, t.sentence_index)
        for t in doc.word_tokens()
    )
    return SurprisalAnnotation(doc.id, entries)


def test_document_trace_weighting():
    doc = _trace_document()
    weighted = accommodate_document(_flat_annotation(doc), doc)
    target = [w for w in weighted.entries if w.base.lemma == "wort"]
    assert [w.factor for w in target] == GOLDEN_FACTORS
    assert [w.weighted_surprisal for w in target] == GOLDEN_FACTORS  # all bases 1.0


def test_content_word_first_mention():
    doc = load_vertical("# doc: d\nTrost\ttrost\tNN\n")[0]
    annotation = _flat_annotation(doc, bits=2.5)
    weighted = accommodate_document(annotation, doc)
    assert weighted.entries[0].weighted_surprisal == 10.0
    assert weighted.entries[0].x == 1


def test_function_word_unweighted():
    doc = load_vertical("# doc: d\nder\tder\tART\nder\tder\tART\n")[0]
    weighted = accommodate_document(_flat_annotation(doc, bits=3.0), doc)
    for w in weighted.entries:
        assert w.x is None
        assert w.factor == 1.0
        assert w.weighted_surprisal == 3.0


def test_weights_lie_in_factor_set():
    doc = _trace_document()
    weighted = accommodate_document(_flat_annotation(doc, bits=2.0), doc)
    allowed = {4.0, 2.0, 4 / 3, 1.0}
    for w in weighted.entries:
        assert w.factor in allowed
        assert w.weighted_surprisal == w.base.surprisal_bits * w.factor


def test_misaligned_annotation_is_error():
    doc = _trace_document()
    annotation = _flat_annotation(doc)
    broken = SurprisalAnnotation(doc.id, annotation.entries[:-1])
    with pytest.raises(ValueError, match="align"):
        accommodate_document(broken, doc)


def test_determinism():
    doc = _trace_document()
    annotation = _flat_annotation(doc)
    assert accommodate_document(annotation, doc) == accommodate_document(annotation, doc)


def test_factor_map_covers_all_words():
    doc = _trace_document()
    factors = accommodation_factors(doc)
    assert set(factors) == {t.doc_position for t in doc.word_tokens()}
    assert factors[GOLDEN_POSITIONS[0]] == (1, 4.0)
    assert factors[0] == (None, 1.0)


def test_counter_ignores_function_word_occurrences():
    # the same lemma as a non-content token must not advance the counter
    doc = load_vertical(
        "# doc: d\nWort\twort\tNN\nWort\twort\tART\nWort\twort\tNN\n"
    )[0]
    factors = accommodation_factors(doc)
    assert factors[0] == (1, 4.0)
    assert factors[1] == (None, 1.0)
    assert factors[2] == (2, 2.0)
