"""Character social-network extraction from Portuguese literary text.

The stages are plain functions over immutable values:

>>> from charnet import LexiconSet, load_document, baseline_tag, attach_layer, run_cne
>>> lex = LexiconSet.load()
>>> doc = load_document("Sr. Domingos chegou. — Vem cá! — gritou Gatinhas.", "ch1")
>>> doc = attach_layer(doc, baseline_tag(doc, lex))
>>> [m.surface for m in run_cne(doc, lex)]
['Sr. Domingos', 'Gatinhas']
"""

from .cne import CandidateMention, MentionList, match_patterns, run_cne
from .coref import CharacterGroup, resolve
from .corpus_io import Document, Token, load_document, load_pretagged, strip_nonliterary
from .evaluation import EvalReport, aggregate_reports, eval_interactions, eval_mentions, f1, load_gold
from .interactions import InteractionRecord, WindowConfig, detect_interactions, to_table
from .lexicons import Lexicon, LexiconSet, load_lexicon, lookup, normalize
from .network import CharacterNetwork, build_network, export_graph
from .pipeline import Pipeline, PipelineConfig, run_pipeline
from .tagging import PosTag, TagLayer, attach_layer, baseline_tag, map_external_tagset

__version__ = "0.1.0"

__all__ = [
    "CandidateMention", "MentionList", "match_patterns", "run_cne",
    "CharacterGroup", "resolve",
    "Document", "Token", "load_document", "load_pretagged", "strip_nonliterary",
    "EvalReport", "aggregate_reports", "eval_interactions", "eval_mentions", "f1", "load_gold",
    "InteractionRecord", "WindowConfig", "detect_interactions", "to_table",
    "Lexicon", "LexiconSet", "load_lexicon", "lookup", "normalize",
    "CharacterNetwork", "build_network", "export_graph",
    "Pipeline", "PipelineConfig", "run_pipeline",
    "PosTag", "TagLayer", "attach_layer", "baseline_tag", "map_external_tagset",
]
