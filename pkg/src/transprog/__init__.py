"""Translational progression scoring for biomedical papers.

Pipeline: parse a bibliographic corpus and the MeSH vocabulary, train
entity-level (CBOW + subwords) and document-level (PV-DM) embeddings, build
the bench-to-bedside axis from basic/clinical centroids, and score every
paper's cosine position on that axis (TPE and TPD).
"""

from .axis import AxisVector, doc_axis, entity_axis, load_axis, save_axis
from .corpus import Corpus, Document, make_document, parse_pubmed_xml, parse_records, select_by_pubtype, write_records
from .embed_doc import DocHyperparams, DocModel, train_pvdm
from .embed_entity import EntityHyperparams, EntityModel, train_cbow
from .errors import (
    AxisError,
    ModelFormatError,
    NoInformationError,
    ParseError,
    ReportError,
    ScoreError,
    TrainingError,
    TransprogError,
)
from .mesh import CategoryRules, MeshDescriptor, MeshVocabulary, parse_mesh
from .score import TpRecord, paper_vector_entity, score_corpus, tp_project, write_scores_csv
from .textprep import EntityDictionary, extract_entity_set, normalize_entities, tokenize, training_tokens

__version__ = "0.1.0"
