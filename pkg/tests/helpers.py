from charnet import LexiconSet
from charnet.corpus_io import load_pretagged

LEX = LexiconSet.load()


def tagged(*sentences, secondary=None):
    """Build a document from ``"Sr./TITLE Domingos/PNM chegou/OTHER"`` strings.

    ``secondary`` optionally overrides tags for the second layer as
    ``{surface: tag}``; otherwise the second layer copies the first.
    """
    lines = ["#layers: primary,secondary"]
    for s in sentences:
        for item in s.split():
            surf, tag = item.rsplit("/", 1)
            tag2 = (secondary or {}).get(surf, tag)
            lines.append(f"{surf}\t{tag}\t{tag2}")
        lines.append("")
    return load_pretagged("\n".join(lines), "t")
