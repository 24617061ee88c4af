"""JSONL corpus records: pre-annotated expressions with their AMR parses.

Each line holds an id, the expression, the token/POS/dependency annotation,
and the PENMAN text. Records may carry a hand-labeled "oracle" object used by
the verification suite; readers ignore unknown keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .amr import SyntaxAnnotation, Token

__all__ = ["CorpusRecord", "load_corpus", "parse_record", "mini_corpus_path"]


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    expression: str
    annotation: SyntaxAnnotation
    penman: str
    oracle: dict | None = None


class CorpusError(ValueError):
    pass


def parse_record(line: str, lineno: int = 0) -> CorpusRecord:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"line {lineno}: invalid JSON: {exc}") from exc
    try:
        tokens = tuple(
            Token(index=t["index"], surface=t["surface"], lemma=t["lemma"])
            for t in doc["tokens"]
        )
        ann = SyntaxAnnotation(
            tokens=tokens,
            pos=tuple(doc["pos"]),
            deps=tuple((d[0], d[1], d[2]) for d in doc.get("deps", [])),
        )
        return CorpusRecord(
            id=str(doc["id"]),
            expression=str(doc["expression"]),
            annotation=ann,
            penman=str(doc["penman"]),
            oracle=doc.get("oracle"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"line {lineno}: bad record: {exc}") from exc


def load_corpus(path) -> list[CorpusRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            records.append(parse_record(line, lineno))
    return records


def mini_corpus_path():
    """Path to the bundled 30-sentence corpus."""
    return resources.files("regreason").joinpath("data/mini_corpus.jsonl")
