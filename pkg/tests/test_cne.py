from hypothesis import given, settings
from hypothesis import strategies as st

from charnet.cne import (CONFIRMED, PATTERNS, REASONS, confirm_by_presence, confirm_by_title, filter_first_names,
                         filter_locations, filter_lowercase_variant, filter_retag, format_audit, match_patterns,
                         match_sequence, run_cne)
from charnet.corpus_io import load_document
from charnet.tagging import PosTag, attach_layer, baseline_tag

from helpers import LEX, tagged

T = PosTag


def matched(doc):
    return [(m.surface, m.pattern_id) for m in match_patterns(doc)]


def test_title_pattern():
    assert matched(tagged("Sr./TITLE Domingos/PNM")) == [("Sr. Domingos", "title_proper_name")]


def test_connective_pattern_is_one_mention():
    doc = tagged("Domingos/PNM José/PNM Correia/PNM Botelho/PNM de/PREP Mesquita/PNM")
    assert matched(doc) == [("Domingos José Correia Botelho de Mesquita", "proper_names_connectives")]


def test_dangling_connective_not_consumed():
    assert matched(tagged("Palma/PNM de/PREP o/OTHER")) == [("Palma", "proper_name")]
    assert match_sequence([T.PNM, T.DET, T.PREP, T.PNM, T.PREP]) == [(0, 4, "proper_names_connectives")]


def test_title_alone_is_not_a_name():
    assert matched(tagged("O/DET Sr./TITLE chegou/OTHER")) == []


def test_confirm_by_title():
    doc = tagged("Sr./TITLE Domingos/PNM e/OTHER Cascais/PNM")
    ml = confirm_by_title(match_patterns(doc), LEX.titles)
    assert [m.state for m in ml] == ["confirmed", "candidate"]
    assert len(confirm_by_title(match_patterns(tagged(",/PUNCT")), LEX.titles)) == 0


def test_confirm_by_presence():
    doc = tagged("—/PUNCT gritou/VERB Gatinhas/PNM", "perguntou/VERB ,/PUNCT Sagul/PNM", "Sagul/PNM riu/OTHER",
                 "disse/VERB que/OTHER Sagul/PNM")
    ml = confirm_by_presence(match_patterns(doc), LEX.presence, doc)
    assert [(m.surface, m.state) for m in ml] == [
        ("Gatinhas", "confirmed"), ("Sagul", "confirmed"), ("Sagul", "candidate"), ("Sagul", "candidate")]


def test_retag():
    doc = tagged("Livro/PNM aberto/OTHER", "Sr./TITLE Domingos/PNM", secondary={"Livro": "NOUN", "Domingos": "OTHER"})
    ml = confirm_by_title(match_patterns(doc), LEX.titles)
    out = filter_retag(ml, doc.tag_layers["secondary"], doc)
    assert [(m.surface, m.state, m.reason) for m in out] == [
        ("Livro", "removed", "retag"), ("Sr. Domingos", "confirmed", None)]
    assert filter_retag(ml, None, doc) == ml


def test_locations():
    doc = tagged("Cascais/PNM", "Domingos/PNM", "Sr./TITLE Cascais/PNM")
    ml = confirm_by_title(match_patterns(doc), LEX.titles)
    out = filter_locations(ml, LEX.locations)
    assert [m.state for m in out] == ["removed", "candidate", "confirmed"]


def test_lowercase_variant():
    doc = tagged("Livro/PNM aberto/OTHER", "o/DET livro/NOUN", "Domingos/PNM")
    out = filter_lowercase_variant(match_patterns(doc), doc)
    assert [(m.surface, m.state) for m in out] == [("Livro", "removed"), ("Domingos", "candidate")]
    assert len(filter_lowercase_variant(match_patterns(tagged("a/DET")), doc)) == 0


def test_lowercase_variant_shrinks_span():
    doc = tagged("Rosa/PNM Teresa/PNM chegou/OTHER", "uma/OTHER rosa/NOUN")
    (m,) = filter_lowercase_variant(match_patterns(doc), doc).mentions
    assert (m.surface, m.positions, m.pattern_id, m.state) == ("Teresa", (1,), "proper_name", "candidate")


def test_first_names():
    doc = tagged("Domingos/PNM José/PNM Correia/PNM", "Escorpião/PNM de/PREP Jade/PNM",
                 "gritou/VERB Gatinhas/PNM")
    ml = confirm_by_presence(match_patterns(doc), LEX.presence, doc)
    out = filter_first_names(ml, LEX.first_names)
    assert [(m.surface, m.state) for m in out] == [
        ("Domingos José Correia", "candidate"), ("Escorpião de Jade", "removed"), ("Gatinhas", "confirmed")]


def test_run_cne_false_positives_only():
    doc = load_document("Partiram de Cascais no Escorpião de Jade.", "x", LEX.abbreviations())
    doc = attach_layer(doc, baseline_tag(doc, LEX))
    ml = run_cne(doc, LEX)
    assert ml.surfaces == []
    assert format_audit(ml) == "Cascais\tlocation\t0\nEscorpião de Jade\tfirst_name\t0\n"


def test_run_cne_empty_document():
    doc = tagged(",/PUNCT")
    assert len(run_cne(doc, LEX)) == 0


# properties

TAGS = [T.PNM, T.TITLE, T.PREP, T.DET, T.OTHER, T.VERB, T.PUNCT, T.NOUN]
WORDS = {T.PNM: ["Domingos", "Cascais", "Livro", "Gatinhas", "Jade", "Teresa"], T.TITLE: ["Sr.", "Senhora"],
         T.PREP: ["de"], T.DET: ["da", "o"], T.OTHER: ["livro", "casa"], T.VERB: ["gritou"], T.PUNCT: [","],
         T.NOUN: ["livro"]}


@st.composite
def documents(draw):
    sents = []
    for _ in range(draw(st.integers(1, 4))):
        n = draw(st.integers(1, 8))
        toks = []
        for _ in range(n):
            tag = draw(st.sampled_from(TAGS))
            toks.append(f"{draw(st.sampled_from(WORDS[tag]))}/{tag.value}")
        sents.append(" ".join(toks))
    second = draw(st.sampled_from([None, {"Livro": "NOUN"}, {"Domingos": "OTHER", "Jade": "NOUN"}]))
    return tagged(*sents, secondary=second)


def _steps(doc):
    return [
        lambda ml: confirm_by_title(ml, LEX.titles),
        lambda ml: confirm_by_presence(ml, LEX.presence, doc),
        lambda ml: filter_retag(ml, doc.tag_layers["secondary"], doc),
        lambda ml: filter_locations(ml, LEX.locations),
        lambda ml: filter_lowercase_variant(ml, doc),
        lambda ml: filter_first_names(ml, LEX.first_names),
    ]


@settings(max_examples=300, deadline=None)
@given(documents())
def test_each_step_idempotent(doc):
    base = match_patterns(doc)
    for step in _steps(doc):
        once = step(base)
        assert step(once) == once


@settings(max_examples=300, deadline=None)
@given(documents())
def test_confirmed_never_removed_and_invariants(doc):
    ml = match_patterns(doc)
    confirmed = set()
    for i, step in enumerate(_steps(doc)):
        ml = step(ml)
        if i == 1:
            confirmed = {m.sort_key() for m in ml if m.state == CONFIRMED}
    final = {m.sort_key(): m for m in ml}
    for key in confirmed:
        assert final[key].state == CONFIRMED
    for m in ml:
        assert m.pattern_id in PATTERNS
        assert (m.reason in REASONS) == (m.state == "removed")
    out = run_cne(doc, LEX)
    assert out == run_cne(doc, LEX)
    by_sentence = {}
    for m in out:
        by_sentence.setdefault(m.sentence_index, []).append(set(m.positions))
    for spans in by_sentence.values():
        for a in spans:
            assert not any(a < b for b in spans)
