"""End-to-end composition, configuration and the on-disk stage files.

Each stage reads the previous stage's files from the output directory:

    extract       -> mentions.json, audit.tsv
    coref         -> groups.json, roster.csv
    interactions  -> interactions.json, interactions.csv
    graph         -> graph.dot, graph.graphml, graph.json
    eval          -> eval.csv, eval.json           (only with a gold file)

``run`` chains all of them and adds manifest.json.
"""

from __future__ import annotations

import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Sequence

from . import cne, coref, corpus_io, evaluation, interactions, network, tagging
from .errors import CharnetError, ConfigError, StageError
from .lexicons import KINDS, LexiconSet

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

TAGGER_MODES = ("baseline", "pretagged")


@dataclass
class PipelineConfig:
    lexicons: dict[str, str | None] = field(default_factory=dict)
    window_sentences: int = interactions.DEFAULT_WINDOW
    prune_threshold: int = coref.DEFAULT_PRUNE_THRESHOLD
    narrator: str | None = None
    tagger: str = "baseline"
    output_dir: str = "out"
    markers: list[tuple[str, str]] = field(default_factory=list)
    primary_layer: str = "primary"
    secondary_layer: str | None = "secondary"
    tagset_mapping: str | None = None
    gold: str | None = None
    formats: tuple[str, ...] = network.FORMATS

    def validate(self) -> "PipelineConfig":
        unknown = set(self.lexicons) - KINDS
        if unknown:
            raise ConfigError(f"unknown lexicon kinds: {', '.join(sorted(unknown))}")
        for kind, path in sorted(self.lexicons.items()):
            if path and not Path(path).is_file():
                raise ConfigError(f"{kind} lexicon not found: {path}")
        for label, path in (("tagset mapping", self.tagset_mapping), ("gold", self.gold)):
            if path and not Path(path).is_file():
                raise ConfigError(f"{label} file not found: {path}")
        if self.tagger not in TAGGER_MODES:
            raise ConfigError(f"tagger must be one of {TAGGER_MODES}, got {self.tagger!r}")
        if int(self.window_sentences) < 1:
            raise ConfigError("window_sentences must be >= 1")
        if int(self.prune_threshold) < 1:
            raise ConfigError("prune_threshold must be >= 1")
        bad = set(self.formats) - set(network.FORMATS)
        if bad:
            raise ConfigError(f"unsupported graph formats: {', '.join(sorted(bad))}")
        for pair in self.markers:
            if len(pair) != 2:
                raise ConfigError(f"marker entries need a begin and an end pattern: {pair!r}")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["markers"] = [list(p) for p in self.markers]
        d["formats"] = list(self.formats)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def load_config(path) -> dict:
    """Read a TOML config file into keyword overrides for :class:`PipelineConfig`.

    Top-level keys match the dataclass fields; lexicon paths may sit in a
    ``[lexicons]`` table or as top-level ``<kind> = "path"`` keys. Relative
    paths are resolved against the config file's directory.
    """
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    base = path.parent
    known = {f.name for f in fields(PipelineConfig)}
    out: dict = {}
    lex = dict(data.pop("lexicons", {}) or {})
    for kind in list(data):
        if kind in KINDS:
            lex[kind] = data.pop(kind)
    if lex:
        out["lexicons"] = {k: str(base / v) if v else None for k, v in lex.items()}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r} in {path}")
        if key in ("tagset_mapping", "gold") and value:
            value = str(base / value)
        if key == "markers":
            value = [tuple(p) for p in value]
        if key == "formats":
            value = tuple(value)
        out[key] = value
    return out


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write(out_dir: Path, name: str, text: str, written: dict) -> Path:
    p = out_dir / name
    data = text.encode("utf-8")
    p.write_bytes(data)
    written[name] = _sha(data)
    return p


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=1, sort_keys=False) + "\n"


# --- stage file codecs -----------------------------------------------------

def document_to_dict(doc: corpus_io.Document) -> dict:
    return {
        "id": doc.id,
        "source_text": doc.source_text,
        "sentences": [[[t.surface, *t.char_span] for t in s] for s in doc.sentences],
    }


def document_from_dict(d: dict) -> corpus_io.Document:
    sentences = tuple(
        tuple(corpus_io.Token(surf, si, ti, (a, b)) for ti, (surf, a, b) in enumerate(s))
        for si, s in enumerate(d["sentences"])
    )
    return corpus_io.Document(d["id"], sentences, d["source_text"], {})


def mention_to_dict(m: cne.CandidateMention) -> dict:
    return {
        "sentence": m.sentence_index, "positions": list(m.positions), "tokens": list(m.tokens),
        "tags": [t.value for t in m.tags], "pattern": m.pattern_id, "state": m.state,
    }


def mention_from_dict(d: dict) -> cne.CandidateMention:
    return cne.CandidateMention(
        d["sentence"], tuple(d["positions"]), tuple(d["tokens"]),
        tuple(tagging.PosTag(t) for t in d["tags"]), d["pattern"], d["state"],
    )


def group_to_dict(g: coref.CharacterGroup) -> dict:
    return {
        "group_id": g.group_id, "representation": g.representation, "gender": g.gender,
        "aliases": list(g.aliases),
        "mentions": [[m.sentence_index, m.start, m.end, m.surface, m.narrator] for m in g.mentions],
    }


def group_from_dict(d: dict) -> coref.CharacterGroup:
    return coref.CharacterGroup(
        group_id=d["group_id"], representation=d["representation"], gender=d["gender"],
        aliases=tuple(d["aliases"]),
        mentions=tuple(coref.Mention(s, a, b, surf, bool(n)) for s, a, b, surf, n in d["mentions"]),
    )


def record_to_dict(r: interactions.InteractionRecord) -> dict:
    return {"group_a": r.group_a, "group_b": r.group_b, "count": r.count,
            "evidence": [list(e) for e in r.evidence]}


def record_from_dict(d: dict) -> interactions.InteractionRecord:
    return interactions.InteractionRecord(
        d["group_a"], d["group_b"], d["count"], tuple(tuple(e) for e in d["evidence"])
    )


def _read_json(path: Path, stage: str):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise StageError(stage, ConfigError(f"cannot read {path}: {exc}")) from None


# --- stages ------------------------------------------------------------------

class Pipeline:
    def __init__(self, config: PipelineConfig,
                 choose_narrator: Callable[[list[coref.CharacterGroup]], str | int | None] | None = None):
        self.config = config.validate()
        self.choose_narrator = choose_narrator
        try:
            self.lexicons = LexiconSet.load(config.lexicons)
        except (CharnetError, OSError) as exc:
            raise StageError("lexicons", exc) from exc
        self.out = Path(config.output_dir)

    def _outdir(self) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out

    def load(self, input_path) -> corpus_io.Document:
        cfg = self.config
        try:
            path = Path(input_path)
            text = path.read_text(encoding="utf-8")
            doc_id = path.stem.split(".")[0]
            if cfg.tagger == "pretagged":
                mappings = None
                if cfg.tagset_mapping:
                    m = tagging.load_tagset_mapping(cfg.tagset_mapping)
                    mappings = {cfg.primary_layer: m, cfg.secondary_layer: m}
                doc = corpus_io.load_pretagged(text, doc_id, mappings)
                if cfg.markers:
                    log.warning("marker stripping does not apply to pre-tagged input")
                if cfg.primary_layer not in doc.tag_layers:
                    raise ConfigError(f"pre-tagged input has no {cfg.primary_layer!r} layer")
                return doc
            abbrevs = self.lexicons.abbreviations()
            doc = corpus_io.load_document(text, doc_id, abbrevs)
            doc = corpus_io.strip_nonliterary(doc, cfg.markers, abbrevs)
        except (CharnetError, OSError, UnicodeDecodeError) as exc:
            raise StageError("load", exc) from exc
        try:
            layer = tagging.baseline_tag(doc, self.lexicons, cfg.primary_layer)
            return tagging.attach_layer(doc, layer)
        except CharnetError as exc:
            raise StageError("tag", exc) from exc

    def extract(self, doc: corpus_io.Document, written: dict | None = None) -> cne.MentionList:
        written = {} if written is None else written
        try:
            mentions = cne.run_cne(doc, self.lexicons, self.config.primary_layer, self.config.secondary_layer)
        except CharnetError as exc:
            raise StageError("extract", exc) from exc
        out = self._outdir()
        _write(out, "mentions.json", _dumps({
            "document": document_to_dict(doc),
            "mentions": [mention_to_dict(m) for m in mentions],
        }), written)
        _write(out, "audit.tsv", cne.format_audit(mentions), written)
        return mentions

    def coref(self, doc: corpus_io.Document, mentions: cne.MentionList,
              written: dict | None = None) -> list[coref.CharacterGroup]:
        written = {} if written is None else written
        cfg = self.config
        try:
            narrator = cfg.narrator
            if narrator is None and self.choose_narrator is not None:
                pre = coref.merge_diminutives(coref.initial_groups(mentions, self.lexicons),
                                              self.lexicons.diminutives)
                narrator = self.choose_narrator(pre)
            groups = coref.resolve(mentions, self.lexicons, doc, narrator, int(cfg.prune_threshold))
        except CharnetError as exc:
            raise StageError("coref", exc) from exc
        out = self._outdir()
        _write(out, "groups.json", _dumps({
            "document": doc.id, "groups": [group_to_dict(g) for g in groups],
        }), written)
        _write(out, "roster.csv", coref.format_roster(groups), written)
        return groups

    def interactions(self, doc_id: str, groups, written: dict | None = None):
        written = {} if written is None else written
        try:
            records = interactions.detect_interactions(
                groups, interactions.WindowConfig(int(self.config.window_sentences)))
            rows = interactions.to_table(records, groups)
        except (CharnetError, ValueError) as exc:
            raise StageError("interactions", exc) from exc
        out = self._outdir()
        _write(out, "interactions.json", _dumps({
            "document": doc_id, "records": [record_to_dict(r) for r in records],
        }), written)
        _write(out, "interactions.csv", interactions.format_table(rows), written)
        return records

    def graph(self, groups, records, written: dict | None = None) -> network.CharacterNetwork:
        written = {} if written is None else written
        try:
            net = network.build_network(groups, records)
            exports = {fmt: network.export_graph(net, fmt) for fmt in self.config.formats}
        except CharnetError as exc:
            raise StageError("graph", exc) from exc
        out = self._outdir()
        for fmt, text in exports.items():
            _write(out, f"graph.{fmt}", text, written)
        return net

    def evaluate(self, doc_id: str, groups, records, written: dict | None = None):
        written = {} if written is None else written
        try:
            gold = evaluation.load_gold(self.config.gold)
            reports = [
                evaluation.eval_mentions(groups, gold, doc_id),
                evaluation.eval_interactions(records, gold, groups, doc_id),
            ]
        except CharnetError as exc:
            raise StageError("eval", exc) from exc
        out = self._outdir()
        _write(out, "eval.csv", evaluation.format_reports(reports), written)
        _write(out, "eval.json", evaluation.report_details(reports), written)
        return reports

    # stage entry points that read the previous stage's files

    def load_mentions(self):
        d = _read_json(self.out / "mentions.json", "coref")
        doc = document_from_dict(d["document"])
        return doc, cne.MentionList(doc.id, tuple(mention_from_dict(m) for m in d["mentions"]))

    def load_groups(self, stage: str):
        d = _read_json(self.out / "groups.json", stage)
        return d["document"], [group_from_dict(g) for g in d["groups"]]

    def load_records(self, stage: str):
        d = _read_json(self.out / "interactions.json", stage)
        return [record_from_dict(r) for r in d["records"]]

    def run(self, input_path) -> dict:
        """Every stage in order; returns ``{file name: sha256}`` for the outputs."""
        written: dict = {}
        doc = self.load(input_path)
        mentions = self.extract(doc, written)
        groups = self.coref(doc, mentions, written)
        records = self.interactions(doc.id, groups, written)
        self.graph(groups, records, written)
        if self.config.gold:
            self.evaluate(doc.id, groups, records, written)
        input_bytes = Path(input_path).read_bytes()
        manifest = {
            "document": doc.id,
            "inputs": {str(input_path): _sha(input_bytes)},
            "config": self.config.to_dict(),
            "config_sha256": self.config.digest(),
            "outputs": dict(sorted(written.items())),
        }
        _write(self._outdir(), "manifest.json", _dumps(manifest), {})
        return written


def run_pipeline(config: PipelineConfig, input_path, **kw) -> dict:
    return Pipeline(config, **kw).run(input_path)


def _run_one(args):
    config, path = args
    return str(path), run_pipeline(config, path)


def run_many(config: PipelineConfig, paths: Sequence, jobs: int = 1) -> dict:
    """One pipeline per input, each writing to ``output_dir/<document id>/``."""
    tasks = []
    for p in paths:
        sub = PipelineConfig(**{**config.__dict__, "output_dir": str(Path(config.output_dir) / Path(p).stem.split(".")[0])})
        tasks.append((sub, p))
    if jobs <= 1 or len(tasks) <= 1:
        return dict(_run_one(t) for t in tasks)
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return dict(pool.map(_run_one, tasks))
