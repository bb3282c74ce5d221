"""Shared fixtures: synthetic corpora and the trained models built from them.

The expensive artifacts (the full 10,000-document fixture corpus and its
trained models) are session-scoped so the validation tests share one
training run.
"""

from __future__ import annotations

import time

import pytest

from transprog.axis import doc_axis, entity_axis
from transprog.embed_doc import DocHyperparams, train_pvdm
from transprog.embed_entity import EntityHyperparams, train_cbow
from transprog.score import score_corpus
from transprog.synth import (
    FixtureSizes,
    synthetic_corpus,
    synthetic_entities,
    synthetic_mesh_vocab,
    write_fixture,
)
from transprog.textprep import training_tokens

SEED = 42

# One line per acceptance criterion, echoed in the terminal summary so the
# verdicts are visible even when per-test output is captured.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log() -> list[str]:
    return ACCEPTANCE_LINES


class Pipeline:
    """End-to-end artifacts for one synthetic corpus: models, axes, scores."""

    def __init__(self, sizes: FixtureSizes):
        self.corpus = synthetic_corpus(SEED, sizes)
        self.dictionary = synthetic_entities()
        self.mesh_vocab = synthetic_mesh_vocab()
        t0 = time.perf_counter()
        streams = [training_tokens(d, self.dictionary) for d in self.corpus]
        self.entity_model = train_cbow(streams, EntityHyperparams.desk())
        self.doc_model = train_pvdm(self.corpus, self.dictionary, DocHyperparams.desk())
        self.entity_axis = entity_axis(self.entity_model, self.mesh_vocab)
        self.doc_axis = doc_axis(self.doc_model, self.corpus, self.mesh_vocab)
        self.records = score_corpus(
            self.corpus, self.dictionary, self.mesh_vocab,
            self.entity_model, self.doc_model, self.entity_axis, self.doc_axis,
        )
        self.elapsed = time.perf_counter() - t0
        self.pub_types = {d.id: d.pub_types for d in self.corpus}


@pytest.fixture(scope="session")
def dictionary():
    return synthetic_entities()


@pytest.fixture(scope="session")
def mesh_vocab():
    return synthetic_mesh_vocab()


@pytest.fixture(scope="session")
def full_pipeline() -> Pipeline:
    """Pipeline over the full 10,000-document fixture corpus."""
    return Pipeline(FixtureSizes())


@pytest.fixture(scope="session")
def two_cluster_pipeline() -> Pipeline:
    """Pipeline over a corpus of only the two pure clusters (no mixes)."""
    return Pipeline(FixtureSizes(n_basic=860, n_clinical=660, n_mixed=0, docs_per_phase=0))


@pytest.fixture(scope="session")
def small_fixture_dir(tmp_path_factory):
    """On-disk scaled-down fixture (records.jsonl / mesh.xml / entities.tsv).

    Sized at ~30% of the full corpus: large enough that the end-to-end
    validation orderings hold, small enough to train in well under a minute.
    """
    out = tmp_path_factory.mktemp("fixture-small")
    sizes = FixtureSizes(n_basic=1290, n_clinical=990, n_mixed=120, docs_per_phase=150)
    paths = write_fixture(str(out), seed=SEED, sizes=sizes)
    return paths


@pytest.fixture(scope="session")
def full_fixture_dir(tmp_path_factory):
    """The full 10,000-document fixture written to disk for CLI training runs."""
    out = tmp_path_factory.mktemp("fixture-full")
    return write_fixture(str(out), seed=SEED, sizes=FixtureSizes())


@pytest.fixture(scope="session")
def tiny_fixture_dir(tmp_path_factory):
    """Very small on-disk fixture for fast CLI plumbing tests."""
    out = tmp_path_factory.mktemp("fixture-tiny")
    sizes = FixtureSizes(n_basic=30, n_clinical=30, n_mixed=4, docs_per_phase=2)
    paths = write_fixture(str(out), seed=SEED, sizes=sizes)
    return paths
