"""Entity-level CBOW embeddings with hashed character n-gram subwords.

Each vocabulary token owns one word vector plus the bucket vectors of its
character n-grams; its input representation is the mean of all of them, so
never-seen terms still get a vector from their n-gram buckets alone.
Training is plain negative-sampling SGD with a linearly decaying learning
rate and is bit-reproducible at ``threads=1`` with a fixed seed.
"""

from __future__ import annotations

import io
import json
import struct
import threading
from dataclasses import dataclass, asdict, replace

import numpy as np

from .errors import ModelFormatError, TrainingError
from .kernels import cbow_stream
from .sgns import NegativeSampler, build_vocab, fnv1a, subword_ngrams

MAGIC = b"TPE1"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class EntityHyperparams:
    dim: int = 200
    lr: float = 0.0001
    min_subword: int = 3
    max_subword: int = 6
    window: int = 5
    epochs: int = 5
    negatives: int = 5
    min_count: int = 5
    buckets: int = 2_000_000
    threads: int = 12
    seed: int = 42
    norm_bound: float = 1e3

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not (1 <= self.min_subword <= self.max_subword):
            raise ValueError("need 1 <= min_subword <= max_subword")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.buckets < 1 or self.threads < 1 or self.epochs < 1:
            raise ValueError("buckets, threads, and epochs must be >= 1")

    @staticmethod
    def desk(**overrides) -> "EntityHyperparams":
        """Reduced test-suite preset: small matrices, a learning rate that
        actually moves vectors at toy corpus sizes."""
        base = EntityHyperparams(
            dim=30, lr=0.05, buckets=50_000, threads=1, epochs=5, min_count=1
        )
        return replace(base, **overrides)


def bucket_for_ngram(ngram: str, buckets: int) -> int:
    return fnv1a(ngram.encode("utf-8")) % buckets


class EntityModel:
    """Trained CBOW model: vocabulary, word rows, and shared n-gram buckets.

    ``input_vectors`` stacks the per-word rows (first ``len(vocab)``) and the
    bucket rows.  Immutable after training.
    """

    def __init__(
        self,
        hyperparams: EntityHyperparams,
        vocab: dict[str, int],
        counts: np.ndarray,
        input_vectors: np.ndarray,
        output_vectors: np.ndarray,
    ):
        self.hyperparams = hyperparams
        self.vocab = vocab
        self.counts = counts
        self.input_vectors = input_vectors
        self.output_vectors = output_vectors
        self._rows = _token_row_table(vocab, hyperparams)

    @property
    def dim(self) -> int:
        return self.hyperparams.dim

    def token_counts(self) -> dict[str, int]:
        return {tok: int(self.counts[i]) for tok, i in self.vocab.items()}

    def _oov_rows(self, term: str) -> np.ndarray:
        hp = self.hyperparams
        grams = subword_ngrams(term, hp.min_subword, hp.max_subword)
        base = len(self.vocab)
        return np.array(
            [base + bucket_for_ngram(g, hp.buckets) for g in grams], dtype=np.int64
        )

    def vector(self, term: str) -> np.ndarray:
        """Composite vector for any term.

        In-vocab terms average their word vector with their subword bucket
        vectors; out-of-vocab terms use buckets alone.  A term with no
        extractable n-grams yields the all-zero "no information" vector.
        """
        if not term:
            raise ValueError("term must be non-empty")
        idx = self.vocab.get(term)
        if idx is not None:
            rows = self._rows[idx]
        else:
            rows = self._oov_rows(term)
            if len(rows) == 0:
                return np.zeros(self.dim, dtype=np.float32)
        return self.input_vectors[rows].mean(axis=0)

    def has_information(self, term: str) -> bool:
        return bool(np.any(self.vector(term)))

    # -- persistence --------------------------------------------------------

    def save(self, path: str) -> None:
        header = {
            "hyperparams": asdict(self.hyperparams),
            "vocab_size": len(self.vocab),
            "tokens": [t for t, _ in sorted(self.vocab.items(), key=lambda kv: kv[1])],
            "counts": [int(c) for c in self.counts],
        }
        with open(path, "wb") as f:
            _write_container(f, MAGIC, header, [self.input_vectors, self.output_vectors])

    @staticmethod
    def load(path: str) -> "EntityModel":
        with open(path, "rb") as f:
            header, matrices = _read_container(f, MAGIC, n_matrices=2)
        hp = EntityHyperparams(**header["hyperparams"])
        vocab = {t: i for i, t in enumerate(header["tokens"])}
        counts = np.array(header["counts"], dtype=np.int64)
        inputs, outputs = matrices
        inputs = inputs.reshape(len(vocab) + hp.buckets, hp.dim)
        outputs = outputs.reshape(len(vocab), hp.dim)
        return EntityModel(hp, vocab, counts, inputs, outputs)

    def export_text(self, path: str) -> None:
        """Standard text vector format: "count dim" header, then one token per line."""
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"{len(self.vocab)} {self.dim}\n")
            for tok, idx in sorted(self.vocab.items(), key=lambda kv: kv[1]):
                vec = self.input_vectors[self._rows[idx]].mean(axis=0)
                f.write(tok + " " + " ".join(repr(float(x)) for x in vec) + "\n")


# ---------------------------------------------------------------------------
# container format shared with the document model


def _write_container(f, magic: bytes, header: dict, matrices: list[np.ndarray]) -> None:
    f.write(magic)
    f.write(struct.pack("<I", FORMAT_VERSION))
    blob = json.dumps(header).encode("utf-8")
    f.write(struct.pack("<Q", len(blob)))
    f.write(blob)
    for m in matrices:
        data = np.ascontiguousarray(m, dtype=np.float32)
        raw = data.tobytes()
        f.write(struct.pack("<Q", len(raw)))
        f.write(raw)


def _read_container(f, magic: bytes, n_matrices: int) -> tuple[dict, list[np.ndarray]]:
    got = f.read(4)
    if got != magic:
        raise ModelFormatError(
            f"bad magic bytes {got!r}: not a {magic.decode('ascii')} model file"
        )
    (version,) = struct.unpack("<I", f.read(4))
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    (hlen,) = struct.unpack("<Q", f.read(8))
    header = json.loads(f.read(hlen).decode("utf-8"))
    matrices = []
    for _ in range(n_matrices):
        size_bytes = f.read(8)
        if len(size_bytes) != 8:
            raise ModelFormatError("truncated model file")
        (nbytes,) = struct.unpack("<Q", size_bytes)
        raw = f.read(nbytes)
        if len(raw) != nbytes:
            raise ModelFormatError("truncated model file")
        matrices.append(np.frombuffer(raw, dtype="<f4").copy())
    return header, matrices


# ---------------------------------------------------------------------------
# training


def _token_row_table(vocab: dict[str, int], hp: EntityHyperparams) -> list[np.ndarray]:
    """Per-token input row lists: the word row plus its n-gram bucket rows."""
    base = len(vocab)
    table: list[np.ndarray] = [None] * len(vocab)  # type: ignore[list-item]
    for tok, idx in vocab.items():
        grams = subword_ngrams(tok, hp.min_subword, hp.max_subword)
        rows = [idx] + [base + bucket_for_ngram(g, hp.buckets) for g in grams]
        table[idx] = np.array(rows, dtype=np.int64)
    return table


def train_cbow(
    corpus_tokens: list[list[str]], hp: EntityHyperparams | None = None
) -> EntityModel:
    """Train the entity-level CBOW model over pre-tokenized streams.

    Deterministic (bit-exact across runs) at ``threads=1`` with a fixed seed;
    lock-free racy updates are tolerated at higher thread counts.
    """
    hp = hp or EntityHyperparams()
    if not corpus_tokens or all(not s for s in corpus_tokens):
        raise TrainingError("cannot train on an empty corpus")
    vocab, counts = build_vocab(corpus_tokens, hp.min_count)
    if not vocab:
        raise TrainingError("empty vocabulary: every token fell below min_count")

    rows_table = _token_row_table(vocab, hp)
    rows_off = np.zeros(len(rows_table) + 1, dtype=np.int64)
    np.cumsum([len(r) for r in rows_table], out=rows_off[1:])
    rows_flat = np.concatenate(rows_table) if rows_table else np.zeros(0, dtype=np.int64)
    encoded = [
        np.array([vocab[t] for t in stream if t in vocab], dtype=np.int64)
        for stream in corpus_tokens
    ]
    encoded = [e for e in encoded if len(e) > 0]

    rng = np.random.default_rng(hp.seed)
    n_rows = len(vocab) + hp.buckets
    inputs = (rng.random((n_rows, hp.dim), dtype=np.float32) - 0.5) / hp.dim
    outputs = np.zeros((len(vocab), hp.dim), dtype=np.float32)
    sampler = NegativeSampler(counts)

    total = hp.epochs * sum(len(e) for e in encoded)
    progress = np.zeros(1, dtype=np.int64)  # shared across workers; races tolerated

    def run(streams: list[np.ndarray], worker_rng: np.random.Generator) -> None:
        for epoch in range(hp.epochs):
            for arr in streams:
                reduced = worker_rng.integers(1, hp.window + 1, size=len(arr))
                negs = sampler.draw_block(worker_rng, len(arr), hp.negatives)
                cbow_stream(
                    inputs, outputs, arr, rows_flat, rows_off,
                    reduced, negs, hp.lr, total, progress,
                )

    if hp.threads == 1:
        run(encoded, rng)
    else:
        chunks = [encoded[i :: hp.threads] for i in range(hp.threads)]
        workers = [
            threading.Thread(
                target=run, args=(chunk, np.random.default_rng(hp.seed + 1 + i))
            )
            for i, chunk in enumerate(chunks)
            if chunk
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
    return EntityModel(hp, vocab, counts, inputs, outputs)
