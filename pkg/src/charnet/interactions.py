"""Sentence-window co-occurrence between character groups.

Two mentions of different groups interact when their sentence indices differ
by less than ``window_sentences``. Every unordered mention pair counts once.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

from .coref import CharacterGroup

DEFAULT_WINDOW = 3


@dataclass(frozen=True)
class WindowConfig:
    window_sentences: int = DEFAULT_WINDOW

    def __post_init__(self):
        if int(self.window_sentences) < 1:
            raise ValueError("window_sentences must be >= 1")


@dataclass(frozen=True)
class InteractionRecord:
    group_a: int
    group_b: int
    count: int
    evidence: tuple[tuple[int, int], ...]


def detect_interactions(groups: Sequence[CharacterGroup], config: WindowConfig | int = WindowConfig()
                        ) -> list[InteractionRecord]:
    window = config if isinstance(config, int) else config.window_sentences
    WindowConfig(window)
    by_sentence: dict[int, list[int]] = defaultdict(list)
    for g in groups:
        for m in g.mentions:
            by_sentence[m.sentence_index].append(g.group_id)

    evidence: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    sentences = sorted(by_sentence)
    for i, s in enumerate(sentences):
        here = by_sentence[s]
        # pairs inside sentence s
        for x in range(len(here)):
            for y in range(x + 1, len(here)):
                _add(evidence, here[x], s, here[y], s)
        # pairs with later sentences inside the window
        for j in range(i + 1, len(sentences)):
            t = sentences[j]
            if t - s >= window:
                break
            for a in here:
                for b in by_sentence[t]:
                    _add(evidence, a, s, b, t)

    return [
        InteractionRecord(a, b, len(ev), tuple(sorted(ev)))
        for (a, b), ev in sorted(evidence.items())
    ]


def _add(evidence, ga, sa, gb, sb):
    if ga == gb:
        return
    if ga < gb:
        evidence[(ga, gb)].append((sa, sb))
    else:
        evidence[(gb, ga)].append((sb, sa))


HEADER = ("character_a", "character_b", "interactions")


def to_table(records: Sequence[InteractionRecord], groups: Sequence[CharacterGroup] | Mapping[int, str]
             ) -> list[tuple[str, str, int]]:
    names = groups if isinstance(groups, Mapping) else {g.group_id: g.representation for g in groups}
    rows = [(names[r.group_a], names[r.group_b], r.count) for r in records]
    return sorted(rows, key=lambda r: (-r[2], r[0], r[1]))


def format_table(rows: Sequence[tuple[str, str, int]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    w.writerows(rows)
    return buf.getvalue()


def parse_table(text: str) -> list[tuple[str, str, int]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != HEADER:
        raise ValueError(f"interaction table header must be {','.join(HEADER)}")
    return [(a, b, int(n)) for a, b, n in reader]
