"""Shared helpers for the negative-sampling trainers.

The hot loops live in :mod:`transprog.kernels`; this module owns the pure
pieces: the bucket hash, subword extraction, vocabulary building, and the
unigram^0.75 negative-sampling distribution.
"""

from __future__ import annotations

import numpy as np

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a(data: bytes) -> int:
    """64-bit FNV-1a hash over bytes. Pure function, the bucket hash everywhere."""
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & _MASK64
    return h


def subword_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of the boundary-wrapped word, lengths in [min_n, max_n]."""
    wrapped = f"<{word}>"
    n_chars = len(wrapped)
    return [
        wrapped[i : i + n]
        for n in range(min_n, max_n + 1)
        for i in range(n_chars - n + 1)
    ]


class NegativeSampler:
    """Draws negatives from the unigram^0.75 distribution.

    Collisions with the target are skipped inside the kernels, not redrawn.
    """

    def __init__(self, counts: np.ndarray):
        probs = counts.astype(np.float64) ** 0.75
        total = probs.sum()
        if total <= 0:
            raise ValueError("cannot build a negative sampler from zero counts")
        self._cum = np.cumsum(probs / total)

    def draw_block(self, rng: np.random.Generator, n_positions: int, k: int) -> np.ndarray:
        """(n_positions, k) matrix of negatives."""
        return np.searchsorted(self._cum, rng.random((n_positions, k))).astype(np.int64)


def build_vocab(
    token_streams: list[list[str]], min_count: int
) -> tuple[dict[str, int], np.ndarray]:
    """Frequency-filtered vocabulary, deterministically ordered by (-count, token)."""
    counts: dict[str, int] = {}
    for stream in token_streams:
        for tok in stream:
            counts[tok] = counts.get(tok, 0) + 1
    kept = sorted(
        ((tok, c) for tok, c in counts.items() if c >= min_count),
        key=lambda item: (-item[1], item[0]),
    )
    vocab = {tok: i for i, (tok, _) in enumerate(kept)}
    return vocab, np.array([c for _, c in kept], dtype=np.int64)
