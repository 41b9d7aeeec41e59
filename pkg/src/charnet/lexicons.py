"""Word lists the extraction rules depend on.

Each lexicon is a plain UTF-8 file with one entry per line and ``#`` comments.
Map-valued kinds carry a second, tab-separated column::

    first_names      name<TAB>M|F|U
    diminutives      diminutive<TAB>canonical
    gender_markers   marker<TAB>M|F

Keys are stored normalized (see :func:`normalize`), so lookups are
insensitive to case, Unicode composition and surrounding punctuation.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import MalformedLexicon

log = logging.getLogger(__name__)

SET_KINDS = frozenset({"titles", "presence", "locations", "narrator_pronouns"})
MAP_KINDS = frozenset({"first_names", "diminutives", "gender_markers"})
KINDS = SET_KINDS | MAP_KINDS

GENDERS = ("M", "F", "U")


def _is_edge_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return ch.isspace() or cat[0] in "PS"


def normalize(text: str, keep_period: bool = False) -> str:
    """NFC + case-fold + strip surrounding punctuation and whitespace.

    With ``keep_period`` a trailing ``.`` directly after the word survives,
    which keeps title abbreviations (``Sr.``) distinct from bare words.
    """
    s = unicodedata.normalize("NFC", unicodedata.normalize("NFC", text).casefold())
    start, end = 0, len(s)
    while start < end and _is_edge_char(s[start]):
        start += 1
    while end > start and _is_edge_char(s[end - 1]):
        end -= 1
    core = " ".join(s[start:end].split())
    if keep_period and core and end < len(s) and s[end] == ".":
        core += "."
    return core


@dataclass(frozen=True)
class Lexicon:
    kind: str
    entries: frozenset | Mapping[str, str] = frozenset()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown lexicon kind {self.kind!r}")
        if isinstance(self.entries, Mapping):
            object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))
        else:
            object.__setattr__(self, "entries", frozenset(self.entries))

    @property
    def is_map(self) -> bool:
        return self.kind in MAP_KINDS

    def key(self, text: str) -> str:
        return normalize(text, keep_period=self.kind == "titles")

    def __contains__(self, text: str) -> bool:
        return self.key(text) in self.entries

    def get(self, text: str, default=None):
        if not self.is_map:
            raise TypeError(f"{self.kind} lexicon carries no payload")
        return self.entries.get(self.key(text), default)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, Lexicon):
            return NotImplemented
        return self.kind == other.kind and dict_or_set(self.entries) == dict_or_set(other.entries)

    def __hash__(self):
        return hash((self.kind, len(self.entries)))


def dict_or_set(entries):
    return dict(entries) if isinstance(entries, Mapping) else entries


def lookup(lexicon: Lexicon, key: str) -> tuple[bool, str | None]:
    """Return ``(found, payload)``; payload is ``None`` for set-valued kinds."""
    k = lexicon.key(key)
    if lexicon.is_map:
        value = lexicon.entries.get(k)
        return value is not None, value
    return k in lexicon.entries, None


def parse_lexicon(text: str, kind: str, source: str = "<string>") -> Lexicon:
    if kind not in KINDS:
        raise ValueError(f"unknown lexicon kind {kind!r}")
    keep_period = kind == "titles"
    keys: set[str] = set()
    mapped: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cols = [c.strip() for c in line.split("\t")]
        key = normalize(cols[0], keep_period=keep_period)
        if not key:
            raise MalformedLexicon(lineno, f"empty entry in {source}")
        if kind in SET_KINDS:
            keys.add(key)
            continue
        value = cols[1] if len(cols) > 1 and cols[1] else None
        if kind == "first_names":
            value = (value or "U").upper()
            if value not in GENDERS:
                raise MalformedLexicon(lineno, f"unknown gender code {cols[1]!r} in {source}")
            if mapped.get(key, value) != value:
                # the same name registered under two genders
                value = "U"
        elif kind == "gender_markers":
            if value is None or value.upper() not in ("M", "F"):
                raise MalformedLexicon(lineno, f"gender marker needs M or F in {source}")
            value = value.upper()
            if mapped.get(key, value) != value:
                raise MalformedLexicon(lineno, f"conflicting gender for marker {cols[0]!r}")
        else:
            if value is None:
                raise MalformedLexicon(lineno, f"diminutive without canonical form in {source}")
            if key in mapped and normalize(mapped[key]) != normalize(value):
                raise MalformedLexicon(lineno, f"conflicting canonical forms for {cols[0]!r}")
            value = unicodedata.normalize("NFC", value)
            if key in mapped:
                value = min(value, mapped[key])
        mapped[key] = value
    if kind in SET_KINDS:
        lex = Lexicon(kind, frozenset(keys))
    else:
        lex = Lexicon(kind, mapped)
    if not len(lex):
        log.warning("lexicon %s (%s) is empty", source, kind)
    return lex


def load_lexicon(path, kind: str) -> Lexicon:
    path = Path(path)
    return parse_lexicon(path.read_text(encoding="utf-8"), kind, source=str(path))


DEFAULT_FILES = {
    "titles": "titles.txt",
    "presence": "presence.txt",
    "locations": "locations.txt",
    "first_names": "first_names.tsv",
    "diminutives": "diminutives.tsv",
    "narrator_pronouns": "narrator_pronouns.txt",
    "gender_markers": "gender_markers.tsv",
}


def load_default(kind: str) -> Lexicon:
    data = resources.files("charnet") / "data" / DEFAULT_FILES[kind]
    return parse_lexicon(data.read_text(encoding="utf-8"), kind, source=f"seed:{kind}")


@dataclass(frozen=True)
class LexiconSet:
    titles: Lexicon = field(default_factory=lambda: Lexicon("titles"))
    presence: Lexicon = field(default_factory=lambda: Lexicon("presence"))
    locations: Lexicon = field(default_factory=lambda: Lexicon("locations"))
    first_names: Lexicon = field(default_factory=lambda: Lexicon("first_names"))
    diminutives: Lexicon = field(default_factory=lambda: Lexicon("diminutives"))
    narrator_pronouns: Lexicon = field(default_factory=lambda: Lexicon("narrator_pronouns"))
    gender_markers: Lexicon = field(default_factory=lambda: Lexicon("gender_markers"))

    @classmethod
    def load(cls, paths: Mapping[str, str | Path | None] | None = None) -> "LexiconSet":
        """Seed lexicons, with any kind in ``paths`` replaced by that file."""
        paths = paths or {}
        unknown = set(paths) - KINDS
        if unknown:
            raise ValueError(f"unknown lexicon kinds: {sorted(unknown)}")
        loaded = {}
        for f in fields(cls):
            p = paths.get(f.name)
            loaded[f.name] = load_lexicon(p, f.name) if p else load_default(f.name)
        lexset = cls(**loaded)
        for dim in lexset.unknown_canonicals():
            log.warning("diminutive target %r is not a known first name", dim)
        return lexset

    def unknown_canonicals(self) -> list[str]:
        """Diminutive targets that the first-names lexicon does not know."""
        return sorted(
            {v for v in self.diminutives.entries.values() if v not in self.first_names}
        )

    def abbreviations(self) -> frozenset[str]:
        return frozenset(k for k in self.titles.entries if k.endswith("."))
