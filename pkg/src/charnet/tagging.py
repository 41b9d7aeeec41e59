"""POS tag vocabulary, tag layers and the baseline rule tagger."""

from __future__ import annotations

import dataclasses
import enum
import logging
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Protocol, Sequence

from .errors import AlignmentError, DuplicateLayer, MalformedInput, UnknownTag

if TYPE_CHECKING:
    from .corpus_io import Document
    from .lexicons import LexiconSet

log = logging.getLogger(__name__)


class PosTag(str, enum.Enum):
    PNM = "PNM"
    TITLE = "TITLE"
    PREP = "PREP"
    DET = "DET"
    VERB = "VERB"
    NOUN = "NOUN"
    PUNCT = "PUNCT"
    OTHER = "OTHER"

    def __str__(self):
        return self.value


CONNECTIVE_TAGS = frozenset({PosTag.PREP, PosTag.DET})

PREPOSITIONS = frozenset({"de"})
DETERMINERS = frozenset({"o", "a", "os", "as", "do", "da", "dos", "das"})


@dataclass(frozen=True)
class TagLayer:
    layer_name: str
    tags: tuple[PosTag, ...]

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(PosTag(t) for t in self.tags))

    def __len__(self):
        return len(self.tags)


class Tagger(Protocol):
    """Anything that produces one tag layer for a document."""

    def __call__(self, document: Document) -> TagLayer: ...


def is_punct(surface: str) -> bool:
    return bool(surface) and all(unicodedata.category(ch)[0] in "PS" for ch in surface)


def baseline_tag(document: Document, lexicons: LexiconSet, layer_name: str = "primary") -> TagLayer:
    """Deterministic lexicon-and-capitalization tagger.

    A capitalized token counts as a proper-name part unless it opens its
    sentence; sentence openers need first-name evidence, since common nouns
    are capitalized there too.
    """
    tags: list[PosTag] = []
    for sentence in document.sentences:
        seen_word = False
        for tok in sentence:
            s = tok.surface
            low = s.casefold()
            if is_punct(s):
                tags.append(PosTag.PUNCT)
                continue
            initial = not seen_word
            seen_word = True
            if s in lexicons.titles:
                tags.append(PosTag.TITLE)
            elif low in PREPOSITIONS:
                tags.append(PosTag.PREP)
            elif low in DETERMINERS:
                tags.append(PosTag.DET)
            elif s in lexicons.presence:
                tags.append(PosTag.VERB)
            elif s[0].isupper() and (not initial or s in lexicons.first_names):
                tags.append(PosTag.PNM)
            else:
                tags.append(PosTag.OTHER)
    return TagLayer(layer_name, tuple(tags))


class BaselineTagger:
    def __init__(self, lexicons: LexiconSet, layer_name: str = "primary"):
        self.lexicons = lexicons
        self.layer_name = layer_name

    def __call__(self, document: Document) -> TagLayer:
        return baseline_tag(document, self.lexicons, self.layer_name)


def attach_layer(document: Document, layer: TagLayer) -> Document:
    n = len(document.tokens)
    if len(layer) != n:
        raise AlignmentError(
            f"layer {layer.layer_name!r} has {len(layer)} tags for {n} tokens"
        )
    if layer.layer_name in document.tag_layers:
        raise DuplicateLayer(layer.layer_name)
    layers = dict(document.tag_layers)
    layers[layer.layer_name] = layer
    return dataclasses.replace(document, tag_layers=layers)


def map_external_tagset(raw_tags: Sequence[str], mapping: Mapping[str, PosTag | str]) -> list[PosTag]:
    """Project a foreign tagset onto :class:`PosTag`; ``"*"`` is the default row."""
    default = mapping.get("*")
    out = []
    for raw in raw_tags:
        tag = mapping.get(raw, default)
        if tag is None:
            raise UnknownTag(raw)
        out.append(PosTag(tag))
    return out


def parse_tagset_mapping(text: str) -> dict[str, PosTag]:
    mapping = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise MalformedInput(lineno, "expected raw_tag<TAB>PosTag")
        try:
            mapping[cols[0].strip()] = PosTag(cols[1].strip())
        except ValueError:
            raise MalformedInput(lineno, f"unknown PosTag {cols[1]!r}") from None
    return mapping


def load_tagset_mapping(path) -> dict[str, PosTag]:
    return parse_tagset_mapping(Path(path).read_text(encoding="utf-8"))
