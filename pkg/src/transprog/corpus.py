"""Bibliographic corpus parsing.

Two input formats produce the same canonical :class:`Document`:

* MEDLINE/PubMed citation XML (streamed with ``iterparse``), and
* a line-delimited format with one JSON object per line
  (required keys ``id`` and ``title``; optional ``abstract``, ``year``,
  ``pub_types``, ``mesh``).
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, TextIO

from .errors import ParseError

YEAR_MIN = 1500
YEAR_MAX = 2100

_YEAR_RE = re.compile(r"\b(1[5-9]\d\d|20\d\d|2100)\b")
_WS_RE = re.compile(r"\s+")


def _norm_ws(s: str) -> str:
    return _WS_RE.sub(" ", s).strip()


@dataclass(frozen=True)
class Document:
    """One bibliographic record.

    ``year`` is 0 when unknown; ``mesh_terms`` keeps the listed order but
    never contains duplicates.
    """

    id: str
    title: str
    abstract: str = ""
    year: int = 0
    pub_types: frozenset[str] = frozenset()
    mesh_terms: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("Document.id must be non-empty")
        if self.year != 0 and not (YEAR_MIN <= self.year <= YEAR_MAX):
            raise ValueError(f"Document.year {self.year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        if len(set(self.mesh_terms)) != len(self.mesh_terms):
            raise ValueError("Document.mesh_terms contains duplicates")


def make_document(
    id: str,
    title: str,
    abstract: str = "",
    year: int = 0,
    pub_types: Iterable[str] = (),
    mesh_terms: Iterable[str] = (),
) -> Document:
    """Build a Document, normalizing collection types and dropping duplicate MeSH terms."""
    seen: dict[str, None] = {}
    for m in mesh_terms:
        seen.setdefault(m)
    if year != 0 and not (YEAR_MIN <= year <= YEAR_MAX):
        year = 0
    return Document(
        id=id,
        title=title,
        abstract=abstract,
        year=year,
        pub_types=frozenset(pub_types),
        mesh_terms=tuple(seen),
    )


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of Documents. Iteration equals input order."""

    documents: tuple[Document, ...]
    source: str = ""

    def __post_init__(self):
        ids = [d.id for d in self.documents]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise ParseError(f"duplicate document id {dup!r} in corpus")

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __getitem__(self, i: int) -> Document:
        return self.documents[i]


@dataclass
class RecordIssue:
    """A non-fatal per-record problem collected during parsing."""

    message: str
    line: int | None = None


# ---------------------------------------------------------------------------
# PubMed XML


def _citation_year(citation: ET.Element) -> int:
    # Prefer the explicit PubDate Year; fall back to any 4-digit year in
    # MedlineDate; else unknown.
    year_el = citation.find(".//Journal/JournalIssue/PubDate/Year")
    if year_el is not None and year_el.text:
        try:
            y = int(year_el.text.strip())
            if YEAR_MIN <= y <= YEAR_MAX:
                return y
        except ValueError:
            pass
    for el in citation.iter():
        if el.tag in ("MedlineDate", "PubDate") and el.text:
            m = _YEAR_RE.search(el.text)
            if m:
                return int(m.group(1))
    return 0


def _citation_abstract(citation: ET.Element) -> str:
    # Structured abstracts join their sections in document order with single
    # spaces; section labels are dropped.
    parts = []
    for el in citation.findall(".//Abstract/AbstractText"):
        text = "".join(el.itertext()).strip()
        if text:
            parts.append(_norm_ws(text))
    return " ".join(parts)


def _citation_to_document(citation: ET.Element) -> Document:
    pmid_el = citation.find("PMID")
    pmid = (pmid_el.text or "").strip() if pmid_el is not None else ""
    if not pmid:
        raise ValueError("citation lacks a PMID")
    title_el = citation.find(".//Article/ArticleTitle")
    title = _norm_ws("".join(title_el.itertext())) if title_el is not None else ""
    pub_types = [
        _norm_ws("".join(el.itertext()))
        for el in citation.findall(".//PublicationTypeList/PublicationType")
    ]
    mesh = [
        _norm_ws("".join(el.itertext()))
        for el in citation.findall(".//MeshHeadingList/MeshHeading/DescriptorName")
    ]
    return make_document(
        id=pmid,
        title=title,
        abstract=_citation_abstract(citation),
        year=_citation_year(citation),
        pub_types=[p for p in pub_types if p],
        mesh_terms=[m for m in mesh if m],
    )


def parse_pubmed_xml(
    stream: BinaryIO, *, source: str = "", issues: list[RecordIssue] | None = None
) -> Corpus:
    """Parse MEDLINE/PubMed citation XML into a Corpus.

    Malformed XML raises :class:`ParseError` with the byte offset; a citation
    lacking a PMID is collected into ``issues`` and parsing continues.
    """
    docs: list[Document] = []
    try:
        for event, elem in ET.iterparse(stream, events=("end",)):
            if elem.tag != "MedlineCitation":
                continue
            try:
                docs.append(_citation_to_document(elem))
            except ValueError as exc:
                if issues is not None:
                    issues.append(RecordIssue(str(exc)))
            elem.clear()
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc.msg if hasattr(exc, 'msg') else exc}",
                         offset=getattr(exc, "position", (None, None))[1]) from exc
    return Corpus(tuple(docs), source=source)


# ---------------------------------------------------------------------------
# Line-delimited records


def parse_records(
    stream: TextIO, *, source: str = "", issues: list[RecordIssue] | None = None
) -> Corpus:
    """Parse the line-delimited record format (one JSON object per line).

    A line failing the schema is reported with its line number and skipped;
    a duplicate id is a corpus-level :class:`ParseError`.
    """
    docs: list[Document] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("record is not an object")
            if "id" not in obj or not isinstance(obj["id"], str) or not obj["id"]:
                raise ValueError('missing or empty "id" field')
            if "title" not in obj or not isinstance(obj["title"], str):
                raise ValueError('missing "title" field')
            doc = make_document(
                id=obj["id"],
                title=obj["title"],
                abstract=obj.get("abstract", "") or "",
                year=int(obj.get("year", 0) or 0),
                pub_types=obj.get("pub_types", []) or [],
                mesh_terms=obj.get("mesh", []) or [],
            )
        except (ValueError, json.JSONDecodeError) as exc:
            if issues is not None:
                issues.append(RecordIssue(str(exc), line=lineno))
            continue
        if doc.id in seen_ids:
            raise ParseError(f"duplicate document id {doc.id!r}", line=lineno)
        seen_ids.add(doc.id)
        docs.append(doc)
    return Corpus(tuple(docs), source=source)


def write_records(corpus: Corpus, stream: TextIO) -> None:
    """Serialize a Corpus to the line-delimited record format (round-trips exactly)."""
    for doc in corpus:
        obj = {"id": doc.id, "title": doc.title}
        if doc.abstract:
            obj["abstract"] = doc.abstract
        if doc.year:
            obj["year"] = doc.year
        if doc.pub_types:
            obj["pub_types"] = sorted(doc.pub_types)
        if doc.mesh_terms:
            obj["mesh"] = list(doc.mesh_terms)
        stream.write(json.dumps(obj, ensure_ascii=False) + "\n")


def select_by_pubtype(corpus: Corpus, patterns: Iterable[str]) -> Corpus:
    """Subcorpus of documents whose publication types intersect ``patterns``.

    Matching is exact string equality after whitespace normalization.
    """
    wanted = {_norm_ws(p) for p in patterns}
    docs = tuple(
        d for d in corpus if wanted & {_norm_ws(t) for t in d.pub_types}
    )
    return Corpus(docs, source=corpus.source)
