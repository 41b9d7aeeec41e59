"""Character-name extraction: tag-pattern matching plus the cleaning filters.

Candidates are contiguous runs matching one of five tag patterns::

    proper_name                      PNM
    title_proper_name                TITLE PNM
    proper_name_sequence             PNM PNM+
    proper_names_connectives         PNM (PREP|DET)* ... PNM   (with connectives)
    title_proper_names_connectives   TITLE PNM ... PNM

A connective run is only consumed when another PNM follows it. At each start
position the longest match wins and matching resumes after it.

Two steps (title, presence) *confirm* candidates; confirmed mentions are
exempt from the four removal filters that follow.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus_io import Document
from .lexicons import Lexicon, LexiconSet, normalize
from .tagging import CONNECTIVE_TAGS, PosTag, TagLayer, is_punct

log = logging.getLogger(__name__)

PATTERNS = (
    "proper_name",
    "title_proper_name",
    "proper_name_sequence",
    "proper_names_connectives",
    "title_proper_names_connectives",
)

CANDIDATE = "candidate"
CONFIRMED = "confirmed"
REMOVED = "removed"

REASONS = ("retag", "location", "lowercase_variant", "first_name")


@dataclass(frozen=True)
class CandidateMention:
    sentence_index: int
    positions: tuple[int, ...]  # token indices within the sentence, ascending
    tokens: tuple[str, ...]
    tags: tuple[PosTag, ...]
    pattern_id: str
    state: str = CANDIDATE
    reason: str | None = None

    @property
    def start(self) -> int:
        return self.positions[0]

    @property
    def end(self) -> int:
        return self.positions[-1] + 1

    @property
    def surface(self) -> str:
        return " ".join(self.tokens)

    @property
    def active(self) -> bool:
        return self.state != REMOVED

    def confirm(self) -> "CandidateMention":
        return dataclasses.replace(self, state=CONFIRMED)

    def remove(self, reason: str) -> "CandidateMention":
        assert reason in REASONS
        return dataclasses.replace(self, state=REMOVED, reason=reason)

    def sort_key(self):
        return (self.sentence_index, self.positions)


@dataclass(frozen=True)
class MentionList:
    document_id: str
    mentions: tuple[CandidateMention, ...]
    audit: tuple[CandidateMention, ...] = ()

    def __iter__(self):
        return iter(self.mentions)

    def __len__(self):
        return len(self.mentions)

    @property
    def surfaces(self) -> list[str]:
        return [m.surface for m in self.mentions]

    def replace(self, mentions: Iterable[CandidateMention]) -> "MentionList":
        return dataclasses.replace(self, mentions=tuple(mentions))

    def pruned(self) -> "MentionList":
        """Active mentions only; removed ones move to ``audit``."""
        removed = tuple(m for m in self.mentions if not m.active)
        return MentionList(
            self.document_id,
            tuple(m for m in self.mentions if m.active),
            self.audit + removed,
        )


def classify(tags: Sequence[PosTag]) -> str:
    titled = tags[0] == PosTag.TITLE
    names = sum(t == PosTag.PNM for t in tags)
    if names == 1:
        return PATTERNS[1] if titled else PATTERNS[0]
    if titled:
        return PATTERNS[4]
    if any(t in CONNECTIVE_TAGS for t in tags):
        return PATTERNS[3]
    return PATTERNS[2]


def _longest_at(tags: Sequence[PosTag], i: int) -> int:
    """End (exclusive) of the longest pattern match starting at ``i``, or ``i``."""
    n = len(tags)
    j = i
    if tags[j] == PosTag.TITLE:
        j += 1
    if j >= n or tags[j] != PosTag.PNM:
        return i
    j += 1
    end = j
    while j < n:
        k = j
        while k < n and tags[k] in CONNECTIVE_TAGS:
            k += 1
        if k < n and tags[k] == PosTag.PNM:
            j = end = k + 1
        else:
            break
    return end


def match_sequence(tags: Sequence[PosTag]) -> list[tuple[int, int, str]]:
    """Non-overlapping ``(start, end, pattern_id)`` matches over one sentence."""
    out = []
    i, n = 0, len(tags)
    while i < n:
        e = _longest_at(tags, i)
        if e > i:
            out.append((i, e, classify(tags[i:e])))
            i = e
        else:
            i += 1
    return out


def match_patterns(document: Document, layer: str | TagLayer = "primary") -> MentionList:
    if isinstance(layer, TagLayer):
        tags_all = layer.tags
    else:
        tags_all = document.tag_layers[layer].tags
    mentions = []
    for si, sent in enumerate(document.sentences):
        off = document.sentence_offsets[si]
        tags = tags_all[off:off + len(sent)]
        for a, b, pid in match_sequence(tags):
            mentions.append(CandidateMention(
                si, tuple(range(a, b)), tuple(t.surface for t in sent[a:b]), tuple(tags[a:b]), pid,
            ))
    return MentionList(document.id, tuple(mentions))


def _map_candidates(mentions: MentionList, fn) -> MentionList:
    return mentions.replace(fn(m) if m.state == CANDIDATE else m for m in mentions.mentions)


def confirm_by_title(mentions: MentionList, titles: Lexicon) -> MentionList:
    def step(m):
        return m.confirm() if any(t in titles for t in m.tokens) else m
    return _map_candidates(mentions, step)


def confirm_by_presence(mentions: MentionList, presence: Lexicon, document: Document) -> MentionList:
    """Confirm candidates whose nearest preceding non-punctuation token is a presence verb."""
    def step(m):
        sent = document.sentences[m.sentence_index]
        k = m.start - 1
        while k >= 0 and is_punct(sent[k].surface):
            k -= 1
        if k >= 0 and sent[k].surface in presence:
            return m.confirm()
        return m
    return _map_candidates(mentions, step)


def filter_retag(mentions: MentionList, second_layer: TagLayer | None, document: Document) -> MentionList:
    if second_layer is None:
        log.warning("no second tag layer for %s; re-tag filter skipped", document.id)
        return mentions
    tags = second_layer.tags

    def step(m):
        off = document.sentence_offsets[m.sentence_index]
        if any(tags[off + p] == PosTag.PNM for p in m.positions):
            return m
        return m.remove("retag")
    return _map_candidates(mentions, step)


def filter_locations(mentions: MentionList, locations: Lexicon) -> MentionList:
    return _map_candidates(
        mentions, lambda m: m.remove("location") if m.surface in locations else m
    )


def lowercase_vocabulary(document: Document) -> frozenset[str]:
    return frozenset(normalize(t.surface) for t in document.tokens if t.surface.islower())


def _trim(positions, tokens, tags):
    keep = list(zip(positions, tokens, tags))
    while keep and keep[-1][2] != PosTag.PNM:
        keep.pop()
    # a leading title stays only when a name directly follows it
    while keep and keep[0][2] != PosTag.PNM and not (
        keep[0][2] == PosTag.TITLE and len(keep) > 1 and keep[1][2] == PosTag.PNM
    ):
        keep.pop(0)
    return keep


def filter_lowercase_variant(mentions: MentionList, document: Document,
                             vocabulary: frozenset[str] | None = None) -> MentionList:
    """Drop name tokens that also occur in all-lowercase form in the document."""
    lower = lowercase_vocabulary(document) if vocabulary is None else vocabulary

    def step(m):
        kept = [
            (p, s, t) for p, s, t in zip(m.positions, m.tokens, m.tags)
            if not (t == PosTag.PNM and normalize(s) in lower)
        ]
        if len(kept) == len(m.positions):
            return m
        kept = _trim(*zip(*kept)) if kept else []
        if not kept:
            return m.remove("lowercase_variant")
        pos, toks, tags = (tuple(x) for x in zip(*kept))
        return dataclasses.replace(m, positions=pos, tokens=toks, tags=tags, pattern_id=classify(tags))
    return _map_candidates(mentions, step)


def first_name_token(m: CandidateMention) -> str | None:
    for tok, tag in zip(m.tokens, m.tags):
        if tag != PosTag.TITLE:
            return tok
    return None


def filter_first_names(mentions: MentionList, first_names: Lexicon) -> MentionList:
    def step(m):
        first = first_name_token(m)
        if first is not None and first in first_names:
            return m
        return m.remove("first_name")
    return _map_candidates(mentions, step)


def run_cne(document: Document, lexicons: LexiconSet, primary: str = "primary",
            secondary: str | None = "secondary") -> MentionList:
    """Match, confirm and filter; returns active mentions with removals in ``audit``."""
    mentions = match_patterns(document, primary)
    mentions = confirm_by_title(mentions, lexicons.titles)
    mentions = confirm_by_presence(mentions, lexicons.presence, document)
    second = document.tag_layers.get(secondary) if secondary else None
    mentions = filter_retag(mentions, second, document)
    mentions = filter_locations(mentions, lexicons.locations)
    mentions = filter_lowercase_variant(mentions, document)
    mentions = filter_first_names(mentions, lexicons.first_names)
    return mentions.pruned()


def format_audit(mentions: MentionList) -> str:
    lines = [f"{m.surface}\t{m.reason}\t{m.sentence_index}" for m in mentions.audit]
    return "".join(line + "\n" for line in lines)
