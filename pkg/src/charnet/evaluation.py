"""Scoring system output against gold annotations.

Gold files are JSON::

    {"document": "ch1",
     "characters": [{"id": "sagul", "canonical": "António Sagul",
                     "mentions": [{"surface": "Sagul", "sentence": 4}]}],
     "interactions": [{"a": "sagul", "b": "gatinhas", "count": 2}]}

``count`` is optional; without it an interaction is scored by presence.
All scores are percentages.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Any, Iterable, Sequence

import jsonschema

from .coref import CONNECTIVES, CharacterGroup
from .errors import DanglingReference, DocumentMismatch, EmptyReportSet, MalformedGold
from .interactions import InteractionRecord
from .lexicons import normalize

GOLD_SCHEMA = {
    "type": "object",
    "required": ["document", "characters", "interactions"],
    "properties": {
        "document": {"type": "string"},
        "characters": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "canonical", "mentions"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "canonical": {"type": "string"},
                    "mentions": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["surface", "sentence"],
                            "properties": {
                                "surface": {"type": "string", "minLength": 1},
                                "sentence": {"type": "integer", "minimum": 0},
                            },
                        },
                    },
                },
            },
        },
        "interactions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b"],
                "properties": {
                    "a": {"type": "string"},
                    "b": {"type": "string"},
                    "count": {"type": "integer", "minimum": 1},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class GoldMention:
    surface: str
    sentence: int


@dataclass(frozen=True)
class GoldCharacter:
    id: str
    canonical: str
    mentions: tuple[GoldMention, ...]

    def surfaces(self) -> set[str]:
        return {normalize(self.canonical)} | {normalize(m.surface) for m in self.mentions}


@dataclass(frozen=True)
class GoldInteraction:
    a: str
    b: str
    count: int | None = None


@dataclass(frozen=True)
class GoldAnnotation:
    document: str
    characters: tuple[GoldCharacter, ...]
    interactions: tuple[GoldInteraction, ...]

    def character(self, cid: str) -> GoldCharacter:
        return next(c for c in self.characters if c.id == cid)


def parse_gold(data: Any) -> GoldAnnotation:
    try:
        jsonschema.validate(data, GOLD_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise MalformedGold(f"{path or '<root>'}: {exc.message}") from None
    chars = []
    seen = set()
    for c in data["characters"]:
        if c["id"] in seen:
            raise MalformedGold(f"duplicate character id {c['id']!r}")
        seen.add(c["id"])
        chars.append(GoldCharacter(
            c["id"], c["canonical"],
            tuple(GoldMention(m["surface"], m["sentence"]) for m in c["mentions"]),
        ))
    inters = []
    for it in data["interactions"]:
        for end in (it["a"], it["b"]):
            if end not in seen:
                raise DanglingReference(f"interaction endpoint {end!r} is not a declared character")
        if it["a"] == it["b"]:
            raise MalformedGold(f"self-interaction for {it['a']!r}")
        inters.append(GoldInteraction(it["a"], it["b"], it.get("count")))
    return GoldAnnotation(data["document"], tuple(chars), tuple(inters))


def load_gold(path) -> GoldAnnotation:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedGold(f"{path}: invalid JSON ({exc})") from None
    return parse_gold(data)


def f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _pct(num: int, den: int) -> float:
    return 100.0 * num / den if den else 0.0


@dataclass
class EvalReport:
    task: str
    precision: float
    recall: float
    f1: float
    true_positives: int | None = None
    false_positives: int | None = None
    false_negatives: int | None = None
    document: str = ""
    matched: list = field(default_factory=list)
    missed: list = field(default_factory=list)
    spurious: list = field(default_factory=list)
    # set when nothing was predicted, so precision 0 is a convention, not a score
    empty_prediction: bool = False

    @classmethod
    def from_counts(cls, task, tp, fp, fn, **kw) -> "EvalReport":
        p, r = _pct(tp, tp + fp), _pct(tp, tp + fn)
        return cls(task, p, r, f1(p, r), tp, fp, fn, empty_prediction=(tp + fp == 0), **kw)

    def summary(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in ("matched", "missed", "spurious")}


def _check_doc(gold, document_id):
    if document_id is not None and document_id != gold.document:
        raise DocumentMismatch(f"system output is for {document_id!r}, gold is for {gold.document!r}")


def eval_mentions(system: Sequence[CharacterGroup], gold: GoldAnnotation,
                  document_id: str | None = None) -> EvalReport:
    """Mention-instance scoring that also checks the grouping.

    A system mention matches a gold mention in the same sentence with the
    same normalized surface. A group earns credit only if all of its matched
    mentions belong to one gold character, and each gold character credits at
    most one group (the one with most matches); everything else is a false
    positive.
    """
    _check_doc(gold, document_id)
    slots: dict[tuple[int, str], list[str]] = defaultdict(list)
    for c in gold.characters:
        for m in c.mentions:
            slots[(m.sentence, normalize(m.surface))].append(c.id)
    total_gold = sum(len(c.mentions) for c in gold.characters)

    per_group: dict[int, list[tuple[Any, str]]] = {}
    spurious = []
    for g in sorted(system, key=lambda g: g.group_id):
        hits = []
        for m in sorted(g.mentions):
            key = (m.sentence_index, normalize(m.surface))
            if slots.get(key):
                hits.append((m, slots[key].pop(0)))
            else:
                spurious.append({"group": g.group_id, "surface": m.surface,
                                 "sentence": m.sentence_index, "why": "no gold mention"})
        per_group[g.group_id] = hits

    best: dict[str, int] = {}
    for gid, hits in per_group.items():
        chars = {cid for _, cid in hits}
        if len(chars) != 1:
            continue
        cid = chars.pop()
        if cid not in best or len(hits) > len(per_group[best[cid]]):
            best[cid] = gid
    credited = set(best.values())

    matched, credited_keys = [], Counter()
    for gid, hits in per_group.items():
        for m, cid in hits:
            item = {"group": gid, "surface": m.surface, "sentence": m.sentence_index, "character": cid}
            if gid in credited:
                matched.append(item)
                credited_keys[(cid, m.sentence_index, normalize(m.surface))] += 1
            else:
                item["why"] = "grouping"
                spurious.append(item)

    missed = []
    for c in gold.characters:
        for m in c.mentions:
            k = (c.id, m.sentence, normalize(m.surface))
            if credited_keys[k]:
                credited_keys[k] -= 1
            else:
                missed.append({"character": c.id, "surface": m.surface, "sentence": m.sentence})
    tp = len(matched)
    return EvalReport.from_counts(
        "mentions", tp, len(spurious), total_gold - tp, document=gold.document,
        matched=matched, missed=missed, spurious=spurious,
    )


def _tokens(surfaces: Iterable[str]) -> set[str]:
    return {t for s in surfaces for t in normalize(s).split() if t not in CONNECTIVES}


def resolve_endpoint(surfaces: set[str], representation: str, gold: GoldAnnotation) -> str | None:
    """Map a system character (its aliases) to one gold character id, if unambiguous."""
    norm = {normalize(s) for s in surfaces}
    scores = {c.id: len(norm & c.surfaces()) for c in gold.characters}
    top = max(scores.values(), default=0)
    if top > 0:
        winners = [cid for cid, s in scores.items() if s == top]
        return winners[0] if len(winners) == 1 else None
    want = _tokens([representation])
    if not want:
        return None
    fits = [c.id for c in gold.characters if want <= _tokens(c.surfaces())]
    return fits[0] if len(fits) == 1 else None


def eval_interactions(system: Sequence[InteractionRecord | tuple[str, str, int]], gold: GoldAnnotation,
                      groups: Sequence[CharacterGroup] | None = None,
                      document_id: str | None = None) -> EvalReport:
    """Pair-level scoring, insensitive to which name variant the system used."""
    _check_doc(gold, document_id)
    by_id = {g.group_id: g for g in groups or ()}
    by_rep: dict[str, list[CharacterGroup]] = defaultdict(list)
    for g in groups or ():
        by_rep[g.representation].append(g)

    def endpoint(x):
        if isinstance(x, int):
            g = by_id[x]
        else:
            cands = by_rep.get(x, [])
            if len(cands) != 1:
                return resolve_endpoint({x}, x, gold), x
            g = cands[0]
        return resolve_endpoint(set(g.aliases) | {g.representation}, g.representation, gold), g.representation

    sys_counts: Counter[tuple[str, str]] = Counter()
    spurious = []
    for row in system:
        if isinstance(row, InteractionRecord):
            a, b, n = row.group_a, row.group_b, row.count
        else:
            a, b, n = row
        (ga, na), (gb, nb) = endpoint(a), endpoint(b)
        if ga is None or gb is None or ga == gb:
            spurious.append({"a": na, "b": nb, "count": n, "why": "unresolved endpoint"})
            continue
        sys_counts[tuple(sorted((ga, gb)))] += n

    gold_pairs: dict[tuple[str, str], int | None] = {}
    for it in gold.interactions:
        pair = tuple(sorted((it.a, it.b)))
        if pair not in gold_pairs:
            gold_pairs[pair] = it.count
        elif gold_pairs[pair] is None or it.count is None:
            gold_pairs[pair] = None  # any presence-only row makes the pair presence-scored
        else:
            gold_pairs[pair] += it.count

    tp = fp = fn = 0
    matched, missed = [], []
    for pair, gcount in sorted(gold_pairs.items()):
        scount = sys_counts.get(pair, 0)
        if gcount is None:
            if scount:
                tp += 1
                matched.append({"a": pair[0], "b": pair[1]})
            else:
                fn += 1
                missed.append({"a": pair[0], "b": pair[1]})
            continue
        hit = min(scount, gcount)
        tp += hit
        fp += max(0, scount - gcount)
        fn += max(0, gcount - scount)
        if hit:
            matched.append({"a": pair[0], "b": pair[1], "count": hit})
        if gcount > scount:
            missed.append({"a": pair[0], "b": pair[1], "count": gcount - scount})
        if scount > gcount:
            spurious.append({"a": pair[0], "b": pair[1], "count": scount - gcount, "why": "excess count"})
    for pair, n in sorted(sys_counts.items()):
        if pair not in gold_pairs:
            fp += 1
            spurious.append({"a": pair[0], "b": pair[1], "count": n, "why": "not in gold"})
    fp += sum(1 for s in spurious if s["why"] == "unresolved endpoint")
    return EvalReport.from_counts(
        "interactions", tp, fp, fn, document=gold.document,
        matched=matched, missed=missed, spurious=spurious,
    )


def aggregate_reports(reports: Sequence[EvalReport]) -> EvalReport:
    """Unweighted mean of per-document precision, recall and F1."""
    if not reports:
        raise EmptyReportSet("no reports to aggregate")
    tasks = {r.task for r in reports}
    counts = [(r.true_positives, r.false_positives, r.false_negatives) for r in reports]
    summed: tuple = (None, None, None)
    if all(None not in c for c in counts):
        summed = tuple(sum(c[i] for c in counts) for i in range(3))
    return EvalReport(
        task=tasks.pop() if len(tasks) == 1 else "mixed",
        precision=fmean(r.precision for r in reports),
        recall=fmean(r.recall for r in reports),
        f1=fmean(r.f1 for r in reports),
        true_positives=summed[0], false_positives=summed[1], false_negatives=summed[2],
        document="average",
    )


def format_reports(reports: Sequence[EvalReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["document", "task", "precision", "recall", "f1"])
    for r in reports:
        w.writerow([r.document, r.task, f"{r.precision:.2f}", f"{r.recall:.2f}", f"{r.f1:.2f}"])
    return buf.getvalue()


def report_details(reports: Sequence[EvalReport]) -> str:
    return json.dumps([asdict(r) for r in reports], ensure_ascii=False, indent=2) + "\n"
