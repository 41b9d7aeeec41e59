"""Co-reference resolution over extracted name mentions.

Distinct surfaces are sorted longest-first and grouped greedily: a surface
joins the first group whose seed contains all of its name tokens (titles and
connectives ignored). Each group then gets a "First Last" representation,
diminutives are folded into their canonical names, narrator pronouns can be
attached to one group, and rare groups are pruned.
"""

from __future__ import annotations

import csv
import io
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .cne import CandidateMention
from .corpus_io import Document
from .errors import EmptyGroup, UnknownGroup
from .lexicons import Lexicon, LexiconSet, normalize

log = logging.getLogger(__name__)

CONNECTIVES = frozenset({"de", "da", "do", "dos", "das", "e"})
DEFAULT_PRUNE_THRESHOLD = 3


@dataclass(frozen=True, order=True)
class Mention:
    sentence_index: int
    start: int
    end: int
    surface: str
    narrator: bool = False

    @classmethod
    def from_candidate(cls, m: CandidateMention) -> "Mention":
        return cls(m.sentence_index, m.start, m.end, m.surface)


@dataclass(frozen=True)
class NameSequence:
    surface: str
    tokens: tuple[str, ...]
    is_title: tuple[bool, ...]
    frequency: int = 1

    @classmethod
    def parse(cls, surface: str, titles: Lexicon, frequency: int = 1) -> "NameSequence":
        toks = tuple(surface.split())
        return cls(surface, toks, tuple(t in titles for t in toks), frequency)

    @property
    def name_tokens(self) -> tuple[str, ...]:
        """Tokens that identify the person: no titles, no connectives."""
        return tuple(
            t for t, title in zip(self.tokens, self.is_title)
            if not title and normalize(t) not in CONNECTIVES
        )

    @property
    def key_set(self) -> frozenset[str]:
        return frozenset(normalize(t) for t in self.name_tokens)


@dataclass
class CharacterGroup:
    group_id: int
    representation: str = ""
    aliases: tuple[str, ...] = ()
    mentions: tuple[Mention, ...] = ()
    gender: str = "U"
    sequences: tuple[NameSequence, ...] = field(default=(), repr=False, compare=False)

    @property
    def occurrence_count(self) -> int:
        return len(self.mentions)

    @property
    def seed(self) -> NameSequence:
        return self.sequences[0]


def sort_by_token_count(surfaces: Iterable[NameSequence]) -> list[NameSequence]:
    return sorted(surfaces, key=lambda s: (-len(s.name_tokens), -s.frequency, s.surface))


def group_by_token_match(ordered: Sequence[NameSequence]) -> list[list[NameSequence]]:
    groups: list[list[NameSequence]] = []
    for entry in ordered:
        keys = entry.key_set
        target = None
        joined = [g for g in groups if keys <= g[0].key_set]
        if joined:
            target = joined[0]
            if len(joined) > 1:
                log.info("surface %r fits %d groups; joined %r", entry.surface, len(joined), target[0].surface)
        if target is None:
            groups.append([entry])
        else:
            target.append(entry)
    return groups


def _rewrite(tok: str, diminutives: Lexicon | None) -> str:
    if diminutives is None:
        return tok
    return diminutives.get(tok) or tok


def token_frequencies(group: Sequence[NameSequence] | CharacterGroup,
                      diminutives: Lexicon | None = None) -> list[tuple[str, int]]:
    """Name-token counts weighted by surface frequency, most frequent first."""
    seqs = group.sequences if isinstance(group, CharacterGroup) else group
    if not seqs:
        raise EmptyGroup("group has no surfaces")
    counts: Counter[str] = Counter()
    for s in seqs:
        for t in s.name_tokens:
            counts[_rewrite(t, diminutives)] += s.frequency
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def select_representation(group: Sequence[NameSequence] | CharacterGroup,
                          diminutives: Lexicon | None = None) -> str:
    """First + last name token of the longest alias that starts with the top token."""
    seqs = group.sequences if isinstance(group, CharacterGroup) else group
    freqs = token_frequencies(seqs, diminutives)
    top = normalize(freqs[0][0])
    names = [
        ([_rewrite(t, diminutives) for t in s.name_tokens], s.frequency) for s in seqs if s.name_tokens
    ]
    starting = [n for n in names if normalize(n[0][0]) == top] or names
    longest = min(starting, key=lambda n: (-len(n[0]), -n[1], " ".join(n[0])))[0]
    if len(longest) == 1:
        return longest[0]
    return f"{longest[0]} {longest[-1]}"


def _make_group(gid: int, seqs: Sequence[NameSequence], mentions_by_surface, diminutives=None) -> CharacterGroup:
    seqs = tuple(seqs)
    mentions = sorted(m for s in seqs for m in mentions_by_surface.get(s.surface, ()))
    return CharacterGroup(
        group_id=gid,
        representation=select_representation(seqs, diminutives),
        aliases=tuple(sorted(s.surface for s in seqs)),
        mentions=tuple(mentions),
        sequences=tuple(sort_by_token_count(seqs)),
    )


def _merged_representation(seqs, diminutives) -> str:
    rep = select_representation(seqs, diminutives)
    first = normalize(rep.split()[0])
    if any(normalize(t) == first for s in seqs for t in s.name_tokens):
        return rep
    # only nicknames in the group: keep a form that actually occurs
    return select_representation(seqs)


def merge_diminutives(groups: Sequence[CharacterGroup], diminutives: Lexicon) -> list[CharacterGroup]:
    """Fold diminutives into canonical names and join groups they now share.

    A group whose tokens were rewritten is linked to every other group whose
    (rewritten) representation contains one of its canonical tokens; linked
    groups are merged transitively, so the result does not depend on order.
    """
    by_id = {g.group_id: g for g in groups}
    parent = {gid: gid for gid in by_id}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    rep_tokens = {
        gid: {normalize(t) for t in select_representation(g.sequences, diminutives).split()}
        for gid, g in by_id.items()
    }
    for gid, g in by_id.items():
        canon = {
            normalize(diminutives.get(t))
            for s in g.sequences for t in s.name_tokens if t in diminutives
        }
        if not canon:
            continue
        for other, toks in rep_tokens.items():
            if other != gid and canon & toks:
                a, b = find(gid), find(other)
                if a != b:
                    parent[max(a, b)] = min(a, b)

    members = defaultdict(list)
    for gid in sorted(by_id):
        members[find(gid)].append(by_id[gid])
    out = []
    for root in sorted(members):
        parts = members[root]
        seqs = [s for g in parts for s in g.sequences]
        mentions = tuple(sorted(m for g in parts for m in g.mentions))
        out.append(CharacterGroup(
            group_id=root,
            representation=_merged_representation(seqs, diminutives),
            aliases=tuple(sorted(s.surface for s in seqs)),
            mentions=mentions,
            gender=parts[0].gender,
            sequences=tuple(sort_by_token_count(seqs)),
        ))
        if len(parts) > 1:
            log.info("merged groups %s via diminutives", [p.representation for p in parts])
    return out


def assign_narrator(groups: Sequence[CharacterGroup], document: Document | None,
                    narrator_group_id: int | None, narrator_pronouns: Lexicon) -> list[CharacterGroup]:
    if narrator_group_id is None:
        return list(groups)
    if not any(g.group_id == narrator_group_id for g in groups):
        raise UnknownGroup(narrator_group_id)
    extra = []
    if document is not None:
        for tok in document.tokens:
            if tok.surface in narrator_pronouns:
                extra.append(Mention(tok.sentence_index, tok.token_index, tok.token_index + 1,
                                     tok.surface, narrator=True))
    out = []
    for g in groups:
        if g.group_id == narrator_group_id:
            g = replace(g, mentions=tuple(sorted(g.mentions + tuple(extra))))
        out.append(g)
    return out


def prune_rare(groups: Sequence[CharacterGroup], threshold: int = DEFAULT_PRUNE_THRESHOLD) -> list[CharacterGroup]:
    kept = []
    for g in groups:
        if g.occurrence_count < threshold:
            log.info("pruned %r (%d occurrences)", g.representation, g.occurrence_count)
        else:
            kept.append(g)
    return kept


def infer_gender(group: CharacterGroup, first_names: Lexicon, gender_markers: Lexicon,
                 document: Document | None) -> str:
    first = group.representation.split()[0] if group.representation else ""
    known = first_names.get(first) if first else None
    if known in ("M", "F"):
        return known
    votes: Counter[str] = Counter()
    if document is not None:
        for m in group.mentions:
            if m.narrator or m.start == 0:
                continue
            prev = document.sentences[m.sentence_index][m.start - 1].surface
            g = gender_markers.get(prev)
            if g:
                votes[g] += 1
    if votes["M"] > votes["F"]:
        return "M"
    if votes["F"] > votes["M"]:
        return "F"
    return "U"


def build_sequences(surface_counts: Mapping[str, int], titles: Lexicon) -> list[NameSequence]:
    return [NameSequence.parse(s, titles, c) for s, c in surface_counts.items()]


def find_group(groups: Sequence[CharacterGroup], key: int | str) -> int:
    """Resolve a group id or representation (case-insensitive) to an id."""
    if isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
        gid = int(key)
        if any(g.group_id == gid for g in groups):
            return gid
        raise UnknownGroup(key)
    hits = [g.group_id for g in groups if normalize(g.representation) == normalize(key)]
    if not hits:
        hits = [g.group_id for g in groups if any(normalize(a) == normalize(key) for a in g.aliases)]
    if len(hits) != 1:
        raise UnknownGroup(key)
    return hits[0]


def initial_groups(mentions: Iterable[CandidateMention | Mention], lexicons: LexiconSet) -> list[CharacterGroup]:
    """Steps up to representation selection, before diminutives."""
    by_surface: dict[str, list[Mention]] = defaultdict(list)
    for m in mentions:
        mm = m if isinstance(m, Mention) else Mention.from_candidate(m)
        by_surface[mm.surface].append(mm)
    seqs = build_sequences({s: len(v) for s, v in by_surface.items()}, lexicons.titles)
    grouped = group_by_token_match(sort_by_token_count(seqs))
    return [_make_group(i, g, by_surface) for i, g in enumerate(grouped)]


def resolve(mentions: Iterable[CandidateMention | Mention], lexicons: LexiconSet,
            document: Document | None = None, narrator: int | str | None = None,
            threshold: int = DEFAULT_PRUNE_THRESHOLD) -> list[CharacterGroup]:
    """Full co-reference stage; returns surviving groups renumbered 0..n-1."""
    groups = initial_groups(mentions, lexicons)
    groups = merge_diminutives(groups, lexicons.diminutives)
    if narrator is not None:
        groups = assign_narrator(groups, document, find_group(groups, narrator), lexicons.narrator_pronouns)
    groups = prune_rare(groups, threshold)
    out = []
    for i, g in enumerate(sorted(groups, key=lambda g: g.group_id)):
        gender = infer_gender(g, lexicons.first_names, lexicons.gender_markers, document)
        out.append(replace(g, group_id=i, gender=gender))
    return out


def alias_partition(groups: Iterable[CharacterGroup]) -> frozenset[frozenset[str]]:
    return frozenset(frozenset(g.aliases) for g in groups)


def format_roster(groups: Sequence[CharacterGroup]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group_id", "representation", "gender", "occurrences", "aliases"])
    for g in groups:
        w.writerow([g.group_id, g.representation, g.gender, g.occurrence_count, "|".join(g.aliases)])
    return buf.getvalue()
