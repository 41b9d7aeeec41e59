"""Documents: loading, sentence segmentation, tokenization, pre-tagged input."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import EmptyDocument, MalformedInput, UnbalancedMarkers, UnknownTag
from .lexicons import load_default, normalize
from .tagging import PosTag, TagLayer, is_punct, map_external_tagset

TERMINALS = frozenset(".!?…")
OPENERS = frozenset("—–-«“\"'([¿¡")
CLOSERS = frozenset("»”\"')]")


@dataclass(frozen=True)
class Token:
    surface: str
    sentence_index: int
    token_index: int
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[tuple[Token, ...], ...]
    source_text: str
    tag_layers: Mapping[str, TagLayer] = field(default_factory=dict)

    @cached_property
    def tokens(self) -> tuple[Token, ...]:
        return tuple(t for s in self.sentences for t in s)

    @cached_property
    def sentence_offsets(self) -> tuple[int, ...]:
        """Flat index of each sentence's first token."""
        out, n = [], 0
        for s in self.sentences:
            out.append(n)
            n += len(s)
        return tuple(out)

    def flat_index(self, sentence_index: int, token_index: int) -> int:
        return self.sentence_offsets[sentence_index] + token_index

    def layer_tags(self, name: str, sentence_index: int) -> tuple[PosTag, ...]:
        start = self.sentence_offsets[sentence_index]
        return self.tag_layers[name].tags[start:start + len(self.sentences[sentence_index])]

    @property
    def token_count(self) -> int:
        return len(self.tokens)


_default_abbrevs: frozenset[str] | None = None


def default_abbreviations() -> frozenset[str]:
    global _default_abbrevs
    if _default_abbrevs is None:
        titles = load_default("titles")
        _default_abbrevs = frozenset(k for k in titles.entries if k.endswith("."))
    return _default_abbrevs


def _is_p(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


_TRAILING = re.compile(r"\.{2,}|[!?]+|.", re.S)


def _split_chunk(chunk: str, offset: int, abbrevs: frozenset[str]) -> list[tuple[str, int, int]]:
    """Split one whitespace-delimited chunk into tokens with absolute spans."""
    out = []
    i, j = 0, len(chunk)
    while i < j and _is_p(chunk[i]):
        out.append((chunk[i], offset + i, offset + i + 1))
        i += 1
    k = j
    while k > i and _is_p(chunk[k - 1]):
        k -= 1
    if k > i and k < j and chunk[k] == "." and normalize(chunk[i:k + 1], keep_period=True) in abbrevs:
        k += 1
    if k > i:
        out.append((chunk[i:k], offset + i, offset + k))
    for m in _TRAILING.finditer(chunk, k, j):
        out.append((m.group(), offset + m.start(), offset + m.end()))
    return out


def tokenize(text: str, abbreviations: Iterable[str] | None = None) -> list[tuple[str, int, int]]:
    abbrevs = frozenset(abbreviations) if abbreviations is not None else default_abbreviations()
    toks = []
    for m in re.finditer(r"\S+", text):
        toks.extend(_split_chunk(m.group(), m.start(), abbrevs))
    return toks


def _is_terminal(surface: str) -> bool:
    return all(ch in TERMINALS for ch in surface)


def segment(text: str, toks: Sequence[tuple[str, int, int]]) -> list[list[tuple[str, int, int]]]:
    """Group tokens into sentences.

    A sentence ends at terminal punctuation (plus any closing quotes glued to
    it) when the next word starts with a capital, or when a line break comes
    before a dialogue dash or opening quote. A blank line always ends one.
    """
    sentences: list[list] = []
    cur: list = []
    for idx, tok in enumerate(toks):
        if cur and _blank_line(text[cur[-1][2]:tok[1]]):
            sentences.append(cur)
            cur = []
        cur.append(tok)
        if idx + 1 == len(toks) or not _closes(cur):
            continue
        nxt = toks[idx + 1]
        if _is_closer(nxt, tok):
            continue
        if _ends_here(text, tok, nxt):
            sentences.append(cur)
            cur = []
    if cur:
        sentences.append(cur)
    return sentences


def _is_closer(tok, prev) -> bool:
    return len(tok[0]) == 1 and tok[0] in CLOSERS and tok[1] == prev[2]


def _closes(cur) -> bool:
    j = len(cur) - 1
    while j > 0 and _is_closer(cur[j], cur[j - 1]):
        j -= 1
    return _is_terminal(cur[j][0])


def _blank_line(gap: str) -> bool:
    return re.search(r"\n[ \t\r]*\n", gap) is not None


def _ends_here(text: str, tok, nxt) -> bool:
    gap = text[tok[2]:nxt[1]]
    if not gap:
        return False
    first = nxt[0][0]
    if first.isupper():
        return True
    return "\n" in gap and first in OPENERS


def _build(doc_id, text, sentences) -> Document:
    built = tuple(
        tuple(Token(s, si, ti, (a, b)) for ti, (s, a, b) in enumerate(sent))
        for si, sent in enumerate(sentences)
    )
    return Document(doc_id, built, text, {})


def load_document(source: str, id: str = "document", abbreviations: Iterable[str] | None = None) -> Document:
    toks = tokenize(source, abbreviations)
    if not toks:
        raise EmptyDocument(f"document {id!r} contains no tokens")
    return _build(id, source, segment(source, toks))


def _line_start(text: str, pos: int) -> int:
    return text.rfind("\n", 0, pos) + 1


def _line_end(text: str, pos: int) -> int:
    nl = text.find("\n", pos)
    return len(text) if nl < 0 else nl + 1


def strip_text(text: str, markers: Sequence[tuple[str, str]]) -> str:
    """Keep only text between begin/end marker lines (markers are regexes).

    Marker pairs that never match leave the text alone; a begin marker with no
    end marker after it is an error.
    """
    for begin, end in markers:
        b_re, e_re = re.compile(begin), re.compile(end)
        kept, pos, found = [], 0, False
        while True:
            b = b_re.search(text, pos)
            if b is None:
                break
            found = True
            start = _line_end(text, b.end() - 1 if b.end() > b.start() else b.end())
            e = e_re.search(text, start)
            if e is None:
                raise UnbalancedMarkers(f"begin marker {begin!r} at offset {b.start()} has no end marker")
            kept.append(text[start:_line_start(text, e.start())])
            pos = e.end()
        if found:
            text = "\n".join(kept)
    return text


def strip_nonliterary(document: Document, markers: Sequence[tuple[str, str]],
                      abbreviations: Iterable[str] | None = None) -> Document:
    """Drop front/back matter outside marker pairs; tag layers are not carried over."""
    if not markers:
        return document
    text = strip_text(document.source_text, markers)
    if text == document.source_text:
        return document
    return load_document(text, document.id, abbreviations)


_LAYERS_HEADER = re.compile(r"^#layers:\s*(.+)$")


def load_pretagged(source: str, id: str = "document",
                   mappings: Mapping[str, Mapping[str, PosTag | str]] | None = None) -> Document:
    """Read ``surface<TAB>tag[<TAB>tag2...]`` lines; blank lines end sentences.

    An optional first line ``#layers: primary,secondary`` names the tag
    columns (defaults: primary, secondary, layer3, ...). ``mappings`` maps a
    layer name to a foreign-tagset projection; unmapped layers must already
    use :class:`PosTag` values.
    """
    lines = source.splitlines()
    names = None
    first = 0
    if lines:
        m = _LAYERS_HEADER.match(lines[0].strip())
        if m:
            names = [n.strip() for n in m.group(1).split(",") if n.strip()]
            first = 1
    sentences: list[list[str]] = []
    raw_cols: list[list[str]] = []
    cur: list[str] = []
    for lineno in range(first, len(lines)):
        line = lines[lineno].rstrip("\r")
        if not line.strip():
            if cur:
                sentences.append(cur)
                cur = []
            continue
        cols = line.split("\t")
        if names is None:
            default = ["primary", "secondary"]
            n = len(cols) - 1
            if n < 1:
                raise MalformedInput(lineno + 1, "expected surface<TAB>tag")
            names = (default + [f"layer{i + 1}" for i in range(2, n)])[:n]
        if len(cols) != len(names) + 1:
            raise MalformedInput(lineno + 1, f"expected {len(names) + 1} columns, got {len(cols)}")
        if not cols[0] or cols[0] != cols[0].strip():
            raise MalformedInput(lineno + 1, "empty or padded surface")
        cur.append(cols[0])
        raw_cols.append([c.strip() for c in cols[1:]] + [str(lineno + 1)])
    if cur:
        sentences.append(cur)
    if not sentences:
        raise EmptyDocument(f"document {id!r} contains no tokens")

    # tokens joined by spaces, sentences by newlines
    pieces, spans, pos = [], [], 0
    for si, sent in enumerate(sentences):
        if si:
            pieces.append("\n")
            pos += 1
        row = []
        for ti, surf in enumerate(sent):
            if ti:
                pieces.append(" ")
                pos += 1
            row.append((surf, pos, pos + len(surf)))
            pieces.append(surf)
            pos += len(surf)
        spans.append(row)
    doc = _build(id, "".join(pieces), spans)

    mappings = mappings or {}
    layers = {}
    for li, name in enumerate(names):
        raw = [r[li] for r in raw_cols]
        mapping = mappings.get(name)
        if mapping is not None:
            try:
                tags = map_external_tagset(raw, mapping)
            except UnknownTag as exc:
                line = raw_cols[raw.index(exc.raw)][-1]
                raise MalformedInput(int(line), f"unmapped tag {exc.raw!r} in layer {name}") from None
        else:
            tags = []
            for r in raw_cols:
                try:
                    tags.append(PosTag(r[li]))
                except ValueError:
                    raise MalformedInput(int(r[-1]), f"unknown tag {r[li]!r} in layer {name}") from None
        layers[name] = TagLayer(name, tuple(tags))
    return Document(doc.id, doc.sentences, doc.source_text, layers)


def dump_pretagged(document: Document, layer_names: Sequence[str] | None = None) -> str:
    names = list(layer_names or document.tag_layers)
    lines = [f"#layers: {','.join(names)}"]
    layers = [document.tag_layers[n].tags for n in names]
    flat = 0
    for si, sent in enumerate(document.sentences):
        if si:
            lines.append("")
        for tok in sent:
            lines.append("\t".join([tok.surface] + [layer[flat].value for layer in layers]))
            flat += 1
    return "\n".join(lines) + "\n\n"


__all__ = [
    "Token", "Document", "load_document", "strip_nonliterary", "strip_text",
    "load_pretagged", "dump_pretagged", "tokenize", "segment", "is_punct",
]
