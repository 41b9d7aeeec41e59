import random

import pytest

from charnet.corpus_io import load_document
from charnet.coref import (CharacterGroup, Mention, NameSequence, assign_narrator, find_group,
                           format_roster, group_by_token_match, infer_gender, initial_groups, merge_diminutives,
                           prune_rare, resolve, select_representation, sort_by_token_count, token_frequencies)
from charnet.errors import EmptyGroup, UnknownGroup
from charnet.lexicons import parse_lexicon

from helpers import LEX


def seq(surface, freq=1):
    return NameSequence.parse(surface, LEX.titles, freq)


def mentions(*surfaces):
    return [Mention(i, 0, len(s.split()), s) for i, s in enumerate(surfaces)]


FULL = "Domingos José Correia Botelho de Mesquita"


def test_sort_longest_first():
    out = sort_by_token_count([seq("Domingos"), seq("Sr. Domingos"), seq(FULL)])
    assert [s.surface for s in out] == [FULL, "Domingos", "Sr. Domingos"]
    out = sort_by_token_count([seq("Rui", 1), seq("Ana", 5), seq("Eva", 5)])
    assert [s.surface for s in out] == ["Ana", "Eva", "Rui"]
    assert sort_by_token_count([]) == []


def test_titles_and_connectives_not_counted():
    assert seq("Sr. Domingos").name_tokens == ("Domingos",)
    assert seq(FULL).key_set == {"domingos", "josé", "correia", "botelho", "mesquita"}


def test_group_by_token_match():
    groups = group_by_token_match(sort_by_token_count([seq(FULL), seq("Sr. Domingos"), seq("Gatinhas")]))
    assert [[s.surface for s in g] for g in groups] == [[FULL, "Sr. Domingos"], ["Gatinhas"]]
    assert len(group_by_token_match([seq("Ana")])) == 1


def test_token_frequencies_weighted():
    freqs = token_frequencies([seq("Domingos", 10), seq("Sr. Domingos", 3)])
    assert freqs == [("Domingos", 13)]
    assert token_frequencies([seq("Ana Rita")]) == [("Ana", 1), ("Rita", 1)]
    with pytest.raises(EmptyGroup):
        token_frequencies([])


def test_select_representation():
    assert select_representation([seq("Domingos", 9), seq(FULL, 1), seq("Sr. Domingos", 4)]) == "Domingos Mesquita"
    assert select_representation([seq("Gatinhas")]) == "Gatinhas"
    # the top token only occurs alone; it still becomes the representation
    assert select_representation([seq("Sagul", 5), seq("António Sagul", 1)]) == "Sagul"
    with pytest.raises(EmptyGroup):
        select_representation([])


def test_merge_diminutives():
    groups = initial_groups(mentions("Zé", "José Dias", "Zé", "Teresa"), LEX)
    merged = merge_diminutives(groups, LEX.diminutives)
    reps = {g.representation: g.aliases for g in merged}
    assert reps == {"José Dias": ("José Dias", "Zé"), "Teresa": ("Teresa",)}
    plain = initial_groups(mentions("Teresa", "Mariana"), LEX)
    assert merge_diminutives(plain, LEX.diminutives) == plain


def test_two_diminutives_same_canonical():
    dims = parse_lexicon("Zé\tJosé\nZezinho\tJosé\n", "diminutives")
    merged = merge_diminutives(initial_groups(mentions("Zé", "Zezinho", "Zé"), LEX), dims)
    assert len(merged) == 1 and merged[0].occurrence_count == 3
    # representation stays a form that occurs in the text
    assert merged[0].representation == "Zé"


def test_assign_narrator():
    doc = load_document("Eu vi o Bento. Ele olhou para mim e sorriu-me.", "x")
    groups = initial_groups([Mention(0, 3, 4, "Bento")], LEX)
    out = assign_narrator(groups, doc, 0, LEX.narrator_pronouns)
    assert [m.surface for m in out[0].mentions] == ["Eu", "Bento", "mim"]
    assert assign_narrator(groups, doc, None, LEX.narrator_pronouns) == groups
    with pytest.raises(UnknownGroup):
        assign_narrator(groups, doc, 7, LEX.narrator_pronouns)


def test_narrator_counts_toward_pruning():
    doc = load_document("Eu vi o Bento. Eu sei.", "x")
    ms = [Mention(0, 3, 4, "Bento")]
    assert resolve(ms, LEX, doc) == []
    (g,) = resolve(ms, LEX, doc, narrator="Bento")
    assert g.occurrence_count == 3


def test_prune_rare():
    groups = initial_groups(mentions("Luís de Camões", "Luís de Camões", "Teresa", "Teresa", "Teresa"), LEX)
    assert [g.representation for g in prune_rare(groups)] == ["Teresa"]
    assert prune_rare(groups, 1) == groups


def test_infer_gender():
    doc = load_document("O Gatinhas riu. O Gatinhas. A Gatinhas. O Gatinhas. O Gatinhas. O Gatinhas.", "x")
    ms = [Mention(s, 1, 2, "Gatinhas") for s in range(6)]
    (g,) = initial_groups(ms, LEX)
    assert infer_gender(g, LEX.first_names, LEX.gender_markers, doc) == "M"
    (d,) = initial_groups([Mention(0, 1, 2, "Domingos")], LEX)
    doc2 = load_document("a Domingos .", "x")
    # the names database overrides marker votes
    assert infer_gender(d, LEX.first_names, LEX.gender_markers, doc2) == "M"
    (u,) = initial_groups([Mention(0, 0, 1, "Xpto")], LEX)
    assert infer_gender(u, LEX.first_names, LEX.gender_markers, load_document("Xpto .", "x")) == "U"


def test_find_group():
    groups = initial_groups(mentions("José Dias", "Teresa"), LEX)
    assert find_group(groups, "teresa") == 1
    assert find_group(groups, "1") == 1
    assert find_group(groups, "José Dias") == 0
    with pytest.raises(UnknownGroup):
        find_group(groups, "Ninguém")


def test_resolve_renumbers_and_roster():
    ms = mentions("Zé", "José Dias", "Zé", "Teresa", "Teresa", "Teresa", "Camões")
    out = resolve(ms, LEX)
    assert [(g.group_id, g.representation, g.gender, g.occurrence_count) for g in out] == [
        (0, "José Dias", "M", 3), (1, "Teresa", "F", 3)]
    assert format_roster(out) == (
        "group_id,representation,gender,occurrences,aliases\n"
        "0,José Dias,M,3,José Dias|Zé\n1,Teresa,F,3,Teresa\n")


def test_structural_invariants():
    rng = random.Random(3)
    names = ["Ana", "Ana Rita", "Rita", "Zé", "José", "Toninho", "Sr. Rui", "Rui Dias", "D. Rita"]
    for _ in range(300):
        ms = [Mention(i, 0, 1, rng.choice(names)) for i in range(rng.randint(1, 25))]
        out = resolve(ms, LEX)
        assert sum(g.occurrence_count for g in out) <= len(ms)
        for g in out:
            assert g.occurrence_count >= 3
            first = g.representation.split()[0]
            assert any(first in a.split() for a in g.aliases)
        aliases = [a for g in out for a in g.aliases]
        assert len(aliases) == len(set(aliases))


def test_group_dataclass_defaults():
    g = CharacterGroup(0)
    assert g.occurrence_count == 0 and g.gender == "U"
