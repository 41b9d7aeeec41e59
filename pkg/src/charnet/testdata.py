"""Bundled test fixture: a short annotated novel with expected outputs.

``fixtures/mini_novel/`` holds the raw text, a pre-tagged TSV with two tag
layers, the gold annotation and ``expected/`` (the stage files a default run
produces plus ``checksums.json``).
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

from . import evaluation
from .errors import CharnetError, FixtureError

FIXTURE = "mini_novel"
EXPECTED_FILES = ("mentions.json", "audit.tsv", "groups.json", "roster.csv", "interactions.json",
                  "interactions.csv", "graph.json", "eval.csv")


def fixture_dir(name: str = FIXTURE) -> Path:
    return Path(str(resources.files("charnet") / "fixtures" / name))


def fixture_paths(root: Path | None = None) -> dict[str, Path]:
    root = Path(root) if root else fixture_dir()
    return {
        "text": root / f"{root.name}.txt",
        "tagged": root / f"{root.name}.tsv",
        "gold": root / f"{root.name}.gold.json",
        "expected": root / "expected",
    }


def _sha(p: Path) -> str:
    return hashlib.sha256(p.read_bytes()).hexdigest()


def validate_fixture(root: Path | None = None) -> dict[str, Path]:
    """Check the fixture is internally consistent; raise FixtureError if not.

    Gold must parse (which checks interaction endpoints), expected JSON files
    must parse and every file listed in ``checksums.json`` must match.
    """
    paths = fixture_paths(root)
    for key in ("text", "tagged", "gold"):
        if not paths[key].is_file():
            raise FixtureError(f"fixture file missing: {paths[key]}")
    try:
        evaluation.load_gold(paths["gold"])
    except CharnetError as exc:
        raise FixtureError(f"gold annotation invalid: {exc}") from exc
    exp = paths["expected"]
    for name in EXPECTED_FILES:
        p = exp / name
        if not p.is_file():
            raise FixtureError(f"expected output missing: {p}")
        if p.suffix == ".json":
            try:
                json.loads(p.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise FixtureError(f"{p} is not valid JSON: {exc}") from exc
    sums_path = exp / "checksums.json"
    if not sums_path.is_file():
        raise FixtureError(f"checksums missing: {sums_path}")
    sums = json.loads(sums_path.read_text(encoding="utf-8"))
    root_dir = paths["text"].parent
    for rel, digest in sorted(sums.items()):
        p = root_dir / rel
        if not p.is_file():
            raise FixtureError(f"checksummed file missing: {rel}")
        if _sha(p) != digest:
            raise FixtureError(f"checksum mismatch for {rel}")
    return paths


def write_checksums(root: Path | None = None) -> dict[str, str]:
    """Regenerate ``expected/checksums.json`` (maintainer helper)."""
    paths = fixture_paths(root)
    root_dir = paths["text"].parent
    files = [paths["text"], paths["tagged"], paths["gold"]] + [paths["expected"] / n for n in EXPECTED_FILES]
    sums = {str(p.relative_to(root_dir)): _sha(p) for p in files}
    (paths["expected"] / "checksums.json").write_text(json.dumps(sums, indent=1, sort_keys=True) + "\n",
                                                     encoding="utf-8")
    return sums
