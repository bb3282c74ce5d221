"""Translational axis construction at the entity and document levels.

The axis is the difference between two centroids: the mean vector of the
basic anchors (A/C MeSH terms, or A/C-only papers) and the mean vector of
the clinical anchors (H MeSH terms, or clinical-trial/guideline papers).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus
from .embed_doc import DocModel
from .embed_entity import EntityModel
from .errors import AxisError, ModelFormatError
from .mesh import MeshVocabulary
from .textprep import mesh_token

MAGIC = b"TAX1"
FORMAT_VERSION = 1

DEGENERATE_NORM = 1e-12

# Publication types counted as clinical papers for the document-level axis.
# "contains" patterns match as substrings; "exact" patterns match whole types.
CLINICAL_TYPE_CONTAINS = ("Clinical Trial",)
CLINICAL_TYPE_EXACT = ("Guideline", "Practice Guideline")

BASIC_ACH_LABELS = frozenset({"A", "C", "AC"})


@dataclass(frozen=True)
class AxisVector:
    level: str  # "entity" or "document"
    basic_centroid: np.ndarray
    clinical_centroid: np.ndarray
    axis: np.ndarray
    basic_count: int
    clinical_count: int
    excluded_basic: int = 0
    excluded_clinical: int = 0

    def __post_init__(self):
        if self.level not in ("entity", "document"):
            raise ValueError(f"unknown axis level {self.level!r}")
        if not (
            self.basic_centroid.shape == self.clinical_centroid.shape == self.axis.shape
        ):
            raise ValueError("axis and centroids must share one dimension")

    @property
    def dim(self) -> int:
        return int(self.axis.shape[0])


def _centroid_axis(
    level: str,
    basic_vecs: list[np.ndarray],
    clinical_vecs: list[np.ndarray],
    excluded_basic: int,
    excluded_clinical: int,
) -> AxisVector:
    if not basic_vecs or not clinical_vecs:
        missing = [
            name
            for name, vecs in (("basic", basic_vecs), ("clinical", clinical_vecs))
            if not vecs
        ]
        raise AxisError(f"empty anchor set(s): {', '.join(missing)}")
    basic = np.mean(np.asarray(basic_vecs, dtype=np.float64), axis=0)
    clinical = np.mean(np.asarray(clinical_vecs, dtype=np.float64), axis=0)
    axis = clinical - basic
    if float(np.linalg.norm(axis)) < DEGENERATE_NORM:
        raise AxisError("degenerate axis: basic and clinical centroids coincide")
    return AxisVector(
        level=level,
        basic_centroid=basic,
        clinical_centroid=clinical,
        axis=axis,
        basic_count=len(basic_vecs),
        clinical_count=len(clinical_vecs),
        excluded_basic=excluded_basic,
        excluded_clinical=excluded_clinical,
    )


def entity_axis(model: EntityModel, vocab: MeshVocabulary) -> AxisVector:
    """Axis from basic/clinical MeSH term centroids in the entity space.

    Terms resolving to the zero "no information" vector are excluded from the
    centroid and counted in ``excluded_basic``/``excluded_clinical``.
    """
    sets = {
        "basic": sorted(vocab.basic_terms()),
        "clinical": sorted(vocab.clinical_terms()),
    }
    vecs: dict[str, list[np.ndarray]] = {"basic": [], "clinical": []}
    excluded = {"basic": 0, "clinical": 0}
    for kind, names in sets.items():
        for name in names:
            token = mesh_token(name)
            vec = model.vector(token) if token else None
            if vec is None or not np.any(vec):
                excluded[kind] += 1
                continue
            vecs[kind].append(np.asarray(vec, dtype=np.float64))
    return _centroid_axis(
        "entity", vecs["basic"], vecs["clinical"], excluded["basic"], excluded["clinical"]
    )


def is_clinical_pubtype(
    pub_types: frozenset[str],
    *,
    contains: tuple[str, ...] = CLINICAL_TYPE_CONTAINS,
    exact: tuple[str, ...] = CLINICAL_TYPE_EXACT,
) -> bool:
    return any(
        any(pat in t for pat in contains) or t in exact for t in pub_types
    )


def doc_axis(
    model: DocModel,
    corpus: Corpus,
    vocab: MeshVocabulary,
    *,
    clinical_contains: tuple[str, ...] = CLINICAL_TYPE_CONTAINS,
    clinical_exact: tuple[str, ...] = CLINICAL_TYPE_EXACT,
) -> AxisVector:
    """Axis from basic-paper and clinical-paper centroids in the document space.

    Basic papers carry only A/C MeSH categories (any H-labeled paper is
    excluded); clinical papers match the clinical publication-type patterns.
    Documents without a trained vector are skipped and counted as excluded.
    """
    basic_vecs: list[np.ndarray] = []
    clinical_vecs: list[np.ndarray] = []
    excluded_basic = excluded_clinical = 0
    for doc in corpus:
        label = vocab.classify_paper(doc)
        in_basic = label in BASIC_ACH_LABELS
        in_clinical = is_clinical_pubtype(
            doc.pub_types, contains=clinical_contains, exact=clinical_exact
        )
        if not (in_basic or in_clinical):
            continue
        if doc.id not in model:
            if in_basic:
                excluded_basic += 1
            if in_clinical:
                excluded_clinical += 1
            continue
        vec = np.asarray(model.doc_vector(doc.id), dtype=np.float64)
        if in_basic:
            basic_vecs.append(vec)
        if in_clinical:
            clinical_vecs.append(vec)
    return _centroid_axis(
        "document", basic_vecs, clinical_vecs, excluded_basic, excluded_clinical
    )


def save_axis(axis: AxisVector, path: str) -> None:
    header = {
        "level": axis.level,
        "dim": axis.dim,
        "basic_count": axis.basic_count,
        "clinical_count": axis.clinical_count,
        "excluded_basic": axis.excluded_basic,
        "excluded_clinical": axis.excluded_clinical,
    }
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", FORMAT_VERSION))
        blob = json.dumps(header).encode("utf-8")
        f.write(struct.pack("<Q", len(blob)))
        f.write(blob)
        for vec in (axis.basic_centroid, axis.clinical_centroid, axis.axis):
            f.write(np.ascontiguousarray(vec, dtype="<f8").tobytes())


def load_axis(path: str) -> AxisVector:
    with open(path, "rb") as f:
        got = f.read(4)
        if got != MAGIC:
            raise ModelFormatError(f"bad magic bytes {got!r}: not a TAX1 axis file")
        (version,) = struct.unpack("<I", f.read(4))
        if version != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported axis format version {version}")
        (hlen,) = struct.unpack("<Q", f.read(8))
        header = json.loads(f.read(hlen).decode("utf-8"))
        dim = header["dim"]
        vecs = []
        for _ in range(3):
            raw = f.read(8 * dim)
            if len(raw) != 8 * dim:
                raise ModelFormatError("truncated axis file")
            vecs.append(np.frombuffer(raw, dtype="<f8").copy())
    return AxisVector(
        level=header["level"],
        basic_centroid=vecs[0],
        clinical_centroid=vecs[1],
        axis=vecs[2],
        basic_count=header["basic_count"],
        clinical_count=header["clinical_count"],
        excluded_basic=header.get("excluded_basic", 0),
        excluded_clinical=header.get("excluded_clinical", 0),
    )


def export_axis_text(axis: AxisVector, path: str) -> None:
    """Text vector dump of the three axis vectors for inspection."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"3 {axis.dim}\n")
        for name, vec in (
            ("basic_centroid", axis.basic_centroid),
            ("clinical_centroid", axis.clinical_centroid),
            ("axis", axis.axis),
        ):
            f.write(name + " " + " ".join(repr(float(x)) for x in vec) + "\n")
