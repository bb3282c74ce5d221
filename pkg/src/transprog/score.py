"""Translational progression scoring: paper vectors and cosine projection.

A paper's entity-level vector is the plain sum of its unique entity vectors;
both levels score as the cosine between the paper vector and the axis.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .axis import AxisVector
from .corpus import Corpus
from .embed_doc import DocModel
from .embed_entity import EntityModel
from .errors import NoInformationError, ScoreError
from .mesh import MeshVocabulary
from .textprep import EntityDictionary, extract_entity_set

CLAMP_SLACK = 1e-12

SCORES_CSV_HEADER = ["doc_id", "tpe", "tpd", "ach", "year", "entity_count"]


@dataclass(frozen=True)
class TpRecord:
    doc_id: str
    tpe: float | None
    tpd: float | None
    ach: str
    year: int
    entity_count: int
    tpe_reason: str | None = None  # set iff tpe is None
    tpd_reason: str | None = None  # set iff tpd is None


def paper_vector_entity(model: EntityModel, entities: set[str]) -> np.ndarray:
    """Componentwise sum of entity vectors over the deduplicated set."""
    if not entities:
        raise ScoreError("no entities: cannot build an entity-level paper vector")
    vec = np.zeros(model.dim, dtype=np.float64)
    for ent in sorted(entities):
        vec += np.asarray(model.vector(ent), dtype=np.float64)
    return vec


def tp_project(paper_vec: np.ndarray, axis: AxisVector) -> float:
    """Cosine similarity between the paper vector and the translational axis.

    Values spilling past +/-1 by at most 1e-12 (floating-point rounding) are
    clamped; anything larger is an error.
    """
    paper_vec = np.asarray(paper_vec, dtype=np.float64)
    if paper_vec.shape != axis.axis.shape:
        raise ScoreError(
            f"dimension mismatch: paper vector has {paper_vec.shape[0]} dims, "
            f"axis has {axis.dim}"
        )
    p_norm = float(np.linalg.norm(paper_vec))
    a_norm = float(np.linalg.norm(axis.axis))
    if p_norm == 0.0:
        raise ScoreError("zero paper vector cannot be projected")
    if a_norm == 0.0:
        raise ScoreError("degenerate axis vector")
    value = float(paper_vec @ axis.axis) / (p_norm * a_norm)
    if value > 1.0 or value < -1.0:
        if abs(value) > 1.0 + CLAMP_SLACK:
            raise ScoreError(f"cosine {value!r} out of range beyond rounding slack")
        value = max(-1.0, min(1.0, value))
    return value


def score_corpus(
    corpus: Corpus,
    dictionary: EntityDictionary,
    vocab: MeshVocabulary,
    entity_model: EntityModel | None,
    doc_model: DocModel | None,
    entity_axis_vec: AxisVector | None,
    doc_axis_vec: AxisVector | None,
) -> list[TpRecord]:
    """One TpRecord per document, in corpus order.

    Either level may be disabled by passing its model/axis as None; per-level
    failures become reason codes, never NaNs.
    """
    if entity_model is not None and entity_axis_vec is not None:
        if entity_model.dim != entity_axis_vec.dim:
            raise ScoreError(
                f"entity model dim {entity_model.dim} != entity axis dim {entity_axis_vec.dim}"
            )
    if doc_model is not None and doc_axis_vec is not None:
        if doc_model.dim != doc_axis_vec.dim:
            raise ScoreError(
                f"doc model dim {doc_model.dim} != doc axis dim {doc_axis_vec.dim}"
            )

    records: list[TpRecord] = []
    for doc in corpus:
        entities = extract_entity_set(doc, dictionary)
        tpe = tpd = None
        tpe_reason = tpd_reason = None

        if entity_model is None or entity_axis_vec is None:
            tpe_reason = "entity-level-disabled"
        elif not entities:
            tpe_reason = "no-entities"
        else:
            paper_vec = paper_vector_entity(entity_model, entities)
            if not np.any(paper_vec):
                tpe_reason = "zero-paper-vector"
            else:
                tpe = tp_project(paper_vec, entity_axis_vec)

        if doc_model is None or doc_axis_vec is None:
            tpd_reason = "document-level-disabled"
        else:
            try:
                if doc.id in doc_model:
                    dvec = doc_model.doc_vector(doc.id)
                else:
                    dvec = doc_model.infer(doc, dictionary)
                tpd = tp_project(dvec, doc_axis_vec)
            except NoInformationError:
                tpd_reason = "empty-document"
            except ScoreError:
                tpd_reason = "zero-doc-vector"

        records.append(
            TpRecord(
                doc_id=doc.id,
                tpe=tpe,
                tpd=tpd,
                ach=vocab.classify_paper(doc),
                year=doc.year,
                entity_count=len(entities),
                tpe_reason=tpe_reason,
                tpd_reason=tpd_reason,
            )
        )
    return records


def write_scores_csv(records: Sequence[TpRecord], path: str) -> None:
    """Atomically write the scores CSV; absent scores serialize as empty fields."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(SCORES_CSV_HEADER)
            for r in records:
                writer.writerow(
                    [
                        r.doc_id,
                        "" if r.tpe is None else repr(r.tpe),
                        "" if r.tpd is None else repr(r.tpd),
                        r.ach,
                        r.year,
                        r.entity_count,
                    ]
                )
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_scores_csv(stream: TextIO) -> list[TpRecord]:
    """Read a scores CSV back into TpRecords (reason codes are not persisted)."""
    reader = csv.reader(stream)
    header = next(reader)
    if header != SCORES_CSV_HEADER:
        raise ScoreError(f"unexpected scores CSV header {header!r}")
    records = []
    for row in reader:
        doc_id, tpe, tpd, ach, year, entity_count = row
        records.append(
            TpRecord(
                doc_id=doc_id,
                tpe=float(tpe) if tpe else None,
                tpd=float(tpd) if tpd else None,
                ach=ach,
                year=int(year),
                entity_count=int(entity_count),
                tpe_reason=None if tpe else "unscored",
                tpd_reason=None if tpd else "unscored",
            )
        )
    return records
