"""Tokenization and dictionary-based entity normalization.

The entity dictionary maps lowercased surface phrases (1..5 tokens) to
canonical entity ids.  Replacement is longest-match, left-to-right, so a
multiword synonym collapses to one id token and overlapping candidates are
resolved leftmost-longest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .corpus import Document
from .mesh import MeshVocabulary
from .stopwords import STOPWORDS

ENTITY_TYPES = ("gene", "disease", "drug", "species", "mutation", "other")

MAX_PHRASE_TOKENS = 5

# Word characters without underscore: entity id and MeSH tokens are injected
# after this split and never pass through it.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace/punctuation, drop stopwords.

    Numerals are retained; punctuation-only fragments disappear because the
    split keeps only word characters.
    """
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in STOPWORDS]


def phrase_tokens(surface: str) -> tuple[str, ...]:
    """Tokenize a dictionary surface form (no stopword removal)."""
    return tuple(_TOKEN_RE.findall(surface.lower()))


def mesh_token(name: str) -> str:
    """Render a MeSH descriptor name as a single underscore-joined token."""
    return "_".join(_TOKEN_RE.findall(name.lower()))


@dataclass(frozen=True)
class EntityDictionary:
    """Surface phrase -> entity id mapping plus per-id entity types."""

    surface_to_id: dict[tuple[str, ...], str]
    id_to_type: dict[str, str]
    _max_len: int = field(init=False, default=1)

    def __post_init__(self):
        max_len = 1
        for surface, eid in self.surface_to_id.items():
            if not surface:
                raise ValueError("empty surface form in entity dictionary")
            if len(surface) > MAX_PHRASE_TOKENS:
                raise ValueError(f"surface {' '.join(surface)!r} exceeds {MAX_PHRASE_TOKENS} tokens")
            if eid not in self.id_to_type:
                raise ValueError(f"entity id {eid!r} missing from id_to_type")
            max_len = max(max_len, len(surface))
        object.__setattr__(self, "_max_len", max_len)

    @property
    def ids(self) -> set[str]:
        return set(self.id_to_type)

    @staticmethod
    def empty() -> "EntityDictionary":
        return EntityDictionary({}, {})

    @staticmethod
    def from_entries(entries: Iterable[tuple[str, str, str]]) -> "EntityDictionary":
        """Build from (surface, entity id, type) triples."""
        surface_to_id: dict[tuple[str, ...], str] = {}
        id_to_type: dict[str, str] = {}
        for surface, eid, etype in entries:
            if etype not in ENTITY_TYPES:
                raise ValueError(f"unknown entity type {etype!r} for {eid!r}")
            surface_to_id[phrase_tokens(surface)] = eid
            id_to_type[eid] = etype
        return EntityDictionary(surface_to_id, id_to_type)

    @staticmethod
    def load(stream: TextIO) -> "EntityDictionary":
        """Load the TAB-separated dictionary file: surface, entity id, type."""
        entries = []
        for lineno, line in enumerate(stream, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"entity dictionary line {lineno}: expected 3 TAB-separated fields")
            entries.append((parts[0], parts[1], parts[2]))
        return EntityDictionary.from_entries(entries)


def normalize_entities(tokens: list[str], dictionary: EntityDictionary) -> list[str]:
    """Longest-match left-to-right replacement of surface phrases by entity ids.

    Idempotent: tokens that already are entity ids pass through untouched.
    """
    if not dictionary.surface_to_id:
        return list(tokens)
    out: list[str] = []
    ids = dictionary.ids
    i = 0
    n = len(tokens)
    max_len = dictionary._max_len
    while i < n:
        if tokens[i] in ids:
            out.append(tokens[i])
            i += 1
            continue
        matched = False
        for length in range(min(max_len, n - i), 0, -1):
            eid = dictionary.surface_to_id.get(tuple(tokens[i : i + length]))
            if eid is not None:
                out.append(eid)
                i += length
                matched = True
                break
        if not matched:
            out.append(tokens[i])
            i += 1
    return out


def text_tokens(doc: Document, dictionary: EntityDictionary) -> list[str]:
    """Tokenized and entity-normalized title + abstract (no MeSH tokens)."""
    return normalize_entities(tokenize(doc.title + " " + doc.abstract), dictionary)


def extract_entity_set(doc: Document, dictionary: EntityDictionary) -> set[str]:
    """Deduplicated entity ids mentioned in the title or abstract."""
    ids = dictionary.ids
    return {t for t in text_tokens(doc, dictionary) if t in ids}


def training_tokens(
    doc: Document, dictionary: EntityDictionary, vocab: MeshVocabulary | None = None
) -> list[str]:
    """Entity-level training stream: normalized text plus one token per MeSH term.

    MeSH terms are appended in listed order as underscore-joined tokens.
    ``vocab`` is accepted for interface symmetry; MeSH headings are carried on
    the document itself and need no vocabulary lookup.
    """
    tokens = text_tokens(doc, dictionary)
    tokens.extend(mesh_token(m) for m in doc.mesh_terms if mesh_token(m))
    return tokens
