"""Command-line interface.

    charnet run INPUT... [options]
    charnet extract INPUT -o DIR
    charnet coref -o DIR [--narrator NAME]
    charnet interactions -o DIR [--window N]
    charnet graph -o DIR [--format dot --format json]
    charnet eval -o DIR --gold GOLD.json

Values come from built-in defaults, then ``--config FILE`` (TOML), then
flags. Exit status: 0 on success, 1 for bad input or configuration, 2 when a
pipeline stage fails.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import coref as coref_mod
from .errors import CharnetError, InputError, StageError
from .lexicons import KINDS
from .network import FORMATS
from .pipeline import Pipeline, PipelineConfig, load_config, run_many

log = logging.getLogger("charnet")


def _common(p: argparse.ArgumentParser):
    p.add_argument("-c", "--config", help="TOML config file")
    p.add_argument("-o", "--output-dir", dest="output_dir", help="directory for stage files (default: out)")
    p.add_argument("-v", "--verbose", action="count", default=0)
    g = p.add_argument_group("lexicons")
    for kind in sorted(KINDS):
        g.add_argument(f"--{kind.replace('_', '-')}", dest=kind, metavar="PATH",
                       help=f"{kind} lexicon file (default: bundled seed list)")


def _loading(p):
    p.add_argument("inputs", nargs="+", metavar="INPUT")
    p.add_argument("--tagger", choices=("baseline", "pretagged"),
                   help="baseline: plain text tagged by rules; pretagged: TSV token stream")
    p.add_argument("--tagset-mapping", dest="tagset_mapping", metavar="PATH",
                   help="raw_tag<TAB>PosTag file for pre-tagged input")
    p.add_argument("--primary-layer", dest="primary_layer")
    p.add_argument("--secondary-layer", dest="secondary_layer")
    p.add_argument("--marker", dest="markers", nargs=2, action="append", metavar=("BEGIN", "END"),
                   help="regex pair delimiting the literary text; repeatable")


def _coref_opts(p):
    p.add_argument("--narrator", help="group representation (or id) of a first-person narrator")
    p.add_argument("--ask-narrator", action="store_true",
                   help="print the roster and ask for the narrator interactively")
    p.add_argument("--prune-threshold", dest="prune_threshold", type=int)


def _window_opts(p):
    p.add_argument("--window", dest="window_sentences", type=int, help="co-occurrence window in sentences")


def _graph_opts(p):
    p.add_argument("--format", dest="formats", action="append", choices=FORMATS,
                   help="graph export format; repeatable (default: all)")


def _gold_opts(p):
    p.add_argument("--gold", help="gold annotation JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charnet", description="Character network extraction from literary text.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="all stages end to end")
    _common(p); _loading(p); _coref_opts(p); _window_opts(p); _graph_opts(p); _gold_opts(p)
    p.add_argument("-j", "--jobs", type=int, default=1, help="process several inputs in parallel")

    p = sub.add_parser("extract", help="character-name mentions -> mentions.json")
    _common(p); _loading(p)

    p = sub.add_parser("coref", help="mentions.json -> groups.json, roster.csv")
    _common(p); _coref_opts(p)

    p = sub.add_parser("interactions", help="groups.json -> interactions.json, interactions.csv")
    _common(p); _window_opts(p)

    p = sub.add_parser("graph", help="groups.json + interactions.json -> graph files")
    _common(p); _graph_opts(p)

    p = sub.add_parser("eval", help="score groups.json + interactions.json against gold")
    _common(p); _gold_opts(p)
    return parser


def config_from_args(args) -> PipelineConfig:
    values: dict = {}
    if args.config:
        values.update(load_config(args.config))
    lex = dict(values.get("lexicons", {}))
    for kind in KINDS:
        if getattr(args, kind, None):
            lex[kind] = getattr(args, kind)
    values["lexicons"] = lex
    for name in ("output_dir", "tagger", "tagset_mapping", "primary_layer", "secondary_layer",
                 "narrator", "prune_threshold", "window_sentences", "gold"):
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if getattr(args, "markers", None):
        values["markers"] = [tuple(m) for m in args.markers]
    if getattr(args, "formats", None):
        values["formats"] = tuple(dict.fromkeys(args.formats))
    return PipelineConfig(**values)


def prompt_narrator(groups):
    """Show the roster and ask which group narrates; empty answer means none."""
    sys.stdout.write(coref_mod.format_roster(groups))
    sys.stdout.write("Is the book written in the first person? Narrator group id or name (blank for none): ")
    sys.stdout.flush()
    answer = sys.stdin.readline().strip()
    return answer or None


def _dispatch(args):
    config = config_from_args(args)
    chooser = prompt_narrator if getattr(args, "ask_narrator", False) else None
    cmd = args.command
    if cmd == "run":
        if len(args.inputs) == 1:
            Pipeline(config, chooser).run(args.inputs[0])
        else:
            if chooser is not None:
                raise InputError("--ask-narrator needs a single input")
            run_many(config.validate(), args.inputs, args.jobs)
        return
    pipe = Pipeline(config, chooser)
    if cmd == "extract":
        if len(args.inputs) != 1:
            raise InputError("extract takes one input")
        pipe.extract(pipe.load(args.inputs[0]))
    elif cmd == "coref":
        doc, mentions = pipe.load_mentions()
        pipe.coref(doc, mentions)
    elif cmd == "interactions":
        doc_id, groups = pipe.load_groups("interactions")
        pipe.interactions(doc_id, groups)
    elif cmd == "graph":
        _, groups = pipe.load_groups("graph")
        pipe.graph(groups, pipe.load_records("graph"))
    elif cmd == "eval":
        if not config.gold:
            raise InputError("eval needs --gold")
        doc_id, groups = pipe.load_groups("eval")
        for r in pipe.evaluate(doc_id, groups, pipe.load_records("eval")):
            print(f"{r.task}: P={r.precision:.1f} R={r.recall:.1f} F1={r.f1:.1f}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        _dispatch(args)
    except StageError as exc:
        log.error("%s", exc)
        return 1 if isinstance(exc.cause, (InputError, OSError)) else 2
    except (InputError, OSError) as exc:
        log.error("%s", exc)
        return 1
    except CharnetError as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
