"""Corpus ingestion: JSON-lines documents with id, title, and abstract."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from .errors import DuplicateId, ParseError


@dataclass(frozen=True)
class DocumentRecord:
    """One corpus item; retrieval treats it as title + abstract."""

    id: str
    title: str
    abstract: str

    @property
    def text(self) -> str:
        return f"{self.title} {self.abstract}".strip()


def iter_corpus(path) -> Iterator[DocumentRecord]:
    """Stream documents from a JSON-lines corpus file.

    Each line is an object with fields ``id``, ``title``, ``abstract``;
    other fields are ignored.
    """
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line_no=line_no, path=path) from None
            if not isinstance(obj, dict) or "id" not in obj:
                raise ParseError("document object lacks an 'id' field",
                                 line_no=line_no, path=path)
            yield DocumentRecord(
                id=str(obj["id"]),
                title=str(obj.get("title", "")),
                abstract=str(obj.get("abstract", "")),
            )


def load_corpus(path) -> dict[str, DocumentRecord]:
    """Read a whole corpus into an id-keyed map, rejecting duplicate ids."""
    docs: dict[str, DocumentRecord] = {}
    for record in iter_corpus(path):
        if record.id in docs:
            raise DuplicateId(f"duplicate document id {record.id!r} in {path}")
        docs[record.id] = record
    return docs
