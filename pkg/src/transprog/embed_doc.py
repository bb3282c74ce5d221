"""Document-level paragraph vectors (PV-DM) over title+abstract streams.

Each training document owns a vector that joins the averaged context-word
representation when predicting a target word.  Unseen documents get vectors
by gradient descent on a fresh vector against the frozen model.

Documents are always trained in sorted-id order with per-document seeds, so
permuting the input corpus changes only the row assignment, never the vector
any given id ends up with.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, asdict, replace

import numpy as np

from .corpus import Corpus, Document
from .errors import ModelFormatError, NoInformationError, TrainingError
from .kernels import pvdm_infer_stream, pvdm_stream
from .sgns import NegativeSampler, build_vocab, fnv1a
from .textprep import EntityDictionary, text_tokens
from .embed_entity import _read_container, _write_container

MAGIC = b"TPD1"


@dataclass(frozen=True)
class DocHyperparams:
    dim: int = 700
    lr: float = 0.0001
    window: int = 30
    epochs: int = 30
    threads: int = 12
    negatives: int = 5
    min_count: int = 5
    infer_epochs: int = 50
    seed: int = 42
    norm_bound: float = 1e3

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.epochs < 1:
            raise ValueError("dim, window, and epochs must all be >= 1")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.threads < 1 or self.infer_epochs < 1:
            raise ValueError("threads and infer_epochs must be >= 1")

    @staticmethod
    def desk(**overrides) -> "DocHyperparams":
        """Reduced test-suite preset."""
        base = DocHyperparams(
            dim=10, lr=0.2, window=5, epochs=60, threads=1, min_count=1
        )
        return replace(base, **overrides)


def _doc_seed(global_seed: int, doc_id: str) -> int:
    return global_seed ^ fnv1a(doc_id.encode("utf-8"))


class DocModel:
    """Trained PV-DM model: word vectors, per-document vectors, output weights."""

    def __init__(
        self,
        hyperparams: DocHyperparams,
        word_vocab: dict[str, int],
        counts: np.ndarray,
        word_vectors: np.ndarray,
        doc_vectors: np.ndarray,
        output_vectors: np.ndarray,
        doc_ids: dict[str, int],
    ):
        self.hyperparams = hyperparams
        self.word_vocab = word_vocab
        self.counts = counts
        self.word_vectors = word_vectors
        self.doc_vectors = doc_vectors
        self.output_vectors = output_vectors
        self.doc_ids = doc_ids
        self._sampler = NegativeSampler(counts)

    @property
    def dim(self) -> int:
        return self.hyperparams.dim

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.doc_ids

    def doc_vector(self, doc_id: str) -> np.ndarray:
        return self.doc_vectors[self.doc_ids[doc_id]]

    # -- inference ----------------------------------------------------------

    def infer(
        self,
        doc: Document,
        dictionary: EntityDictionary,
        *,
        seed: int | None = None,
    ) -> np.ndarray:
        """Vector for an arbitrary document against the frozen model.

        Deterministic: the default seed derives from the document id, so the
        same document always infers the same vector.
        """
        tokens = text_tokens(doc, dictionary)
        ids = np.array(
            [self.word_vocab[t] for t in tokens if t in self.word_vocab], dtype=np.int64
        )
        if len(ids) == 0:
            raise NoInformationError(
                f"document {doc.id!r} is empty after preprocessing; no vector can be inferred"
            )
        hp = self.hyperparams
        rng = np.random.default_rng(
            _doc_seed(hp.seed, doc.id) if seed is None else seed
        )
        dvec = ((rng.random(hp.dim) - 0.5) / hp.dim).astype(np.float32)
        total = hp.infer_epochs * len(ids)
        progress = np.zeros(1, dtype=np.int64)
        for _ in range(hp.infer_epochs):
            reduced = rng.integers(1, hp.window + 1, size=len(ids))
            negs = self._sampler.draw_block(rng, len(ids), hp.negatives)
            pvdm_infer_stream(
                self.word_vectors, self.output_vectors, dvec, ids,
                reduced, negs, hp.lr, total, progress,
            )
        return dvec

    # -- persistence --------------------------------------------------------

    def save(self, path: str) -> None:
        header = {
            "hyperparams": asdict(self.hyperparams),
            "tokens": [t for t, _ in sorted(self.word_vocab.items(), key=lambda kv: kv[1])],
            "counts": [int(c) for c in self.counts],
            "doc_ids": [d for d, _ in sorted(self.doc_ids.items(), key=lambda kv: kv[1])],
        }
        with open(path, "wb") as f:
            _write_container(
                f, MAGIC, header,
                [self.word_vectors, self.doc_vectors, self.output_vectors],
            )

    @staticmethod
    def load(path: str) -> "DocModel":
        with open(path, "rb") as f:
            header, matrices = _read_container(f, MAGIC, n_matrices=3)
        hp = DocHyperparams(**header["hyperparams"])
        vocab = {t: i for i, t in enumerate(header["tokens"])}
        doc_ids = {d: i for i, d in enumerate(header["doc_ids"])}
        counts = np.array(header["counts"], dtype=np.int64)
        words, docs, outputs = matrices
        return DocModel(
            hp, vocab, counts,
            words.reshape(len(vocab), hp.dim),
            docs.reshape(len(doc_ids), hp.dim),
            outputs.reshape(len(vocab), hp.dim),
            doc_ids,
        )


def train_pvdm(
    corpus: Corpus,
    dictionary: EntityDictionary,
    hp: DocHyperparams | None = None,
    *,
    warnings: list[str] | None = None,
) -> DocModel:
    """Train PV-DM paragraph vectors over a corpus.

    Documents that are empty after preprocessing are skipped with a warning.
    Deterministic at ``threads=1`` with a fixed seed.
    """
    hp = hp or DocHyperparams()
    if len(corpus) == 0:
        raise TrainingError("cannot train on an empty corpus")

    streams = {doc.id: text_tokens(doc, dictionary) for doc in corpus}
    vocab, counts = build_vocab(list(streams.values()), hp.min_count)
    if not vocab:
        raise TrainingError("empty vocabulary: every token fell below min_count")

    encoded: dict[str, np.ndarray] = {}
    kept_ids: list[str] = []
    for doc in corpus:
        ids = np.array([vocab[t] for t in streams[doc.id] if t in vocab], dtype=np.int64)
        if len(ids) == 0:
            if warnings is not None:
                warnings.append(f"document {doc.id!r} empty after preprocessing; skipped")
            continue
        encoded[doc.id] = ids
        kept_ids.append(doc.id)
    if not encoded:
        raise TrainingError("all documents empty after preprocessing")

    n_words = len(vocab)
    doc_ids = {d: i for i, d in enumerate(kept_ids)}  # row order follows corpus order
    rng = np.random.default_rng(hp.seed)
    # Word and document vectors live in one matrix so the shared SGNS step
    # applies; document rows start at n_words.
    inputs = np.empty((n_words + len(kept_ids), hp.dim), dtype=np.float32)
    inputs[:n_words] = (rng.random((n_words, hp.dim), dtype=np.float32) - 0.5) / hp.dim
    for did, row in doc_ids.items():
        doc_rng = np.random.default_rng(_doc_seed(hp.seed, did))
        inputs[n_words + row] = ((doc_rng.random(hp.dim) - 0.5) / hp.dim).astype(np.float32)
    outputs = np.zeros((n_words, hp.dim), dtype=np.float32)
    sampler = NegativeSampler(counts)

    train_order = sorted(kept_ids)  # id order, not corpus order: permutation invariance
    total = hp.epochs * sum(len(encoded[d]) for d in train_order)
    progress = np.zeros(1, dtype=np.int64)

    def run(order: list[str]) -> None:
        for epoch in range(hp.epochs):
            for did in order:
                arr = encoded[did]
                doc_rng = np.random.default_rng((hp.seed, fnv1a(did.encode("utf-8")), epoch))
                reduced = doc_rng.integers(1, hp.window + 1, size=len(arr))
                negs = sampler.draw_block(doc_rng, len(arr), hp.negatives)
                pvdm_stream(
                    inputs, outputs, arr, n_words + doc_ids[did],
                    reduced, negs, hp.lr, total, progress,
                )

    if hp.threads == 1:
        run(train_order)
    else:
        chunks = [train_order[i :: hp.threads] for i in range(hp.threads)]
        workers = [
            threading.Thread(target=run, args=(chunk,)) for chunk in chunks if chunk
        ]
        for w in workers:
            w.start()
        for w in workers:
            w.join()

    max_norm = float(np.linalg.norm(inputs, axis=1).max())
    if not np.isfinite(inputs).all() or max_norm > hp.norm_bound:
        raise TrainingError(
            f"training diverged: max input norm {max_norm:.3g} exceeds bound {hp.norm_bound:.3g}"
        )
    return DocModel(
        hp, vocab, counts,
        inputs[:n_words], inputs[n_words:], outputs, doc_ids,
    )
