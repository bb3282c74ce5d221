"""Numba inner loops for negative-sampling SGD.

One kernel processes one pre-encoded token stream.  Randomness (reduced
window sizes, negative draws) is generated outside with seeded numpy
generators, so the kernels themselves are pure and deterministic.  A
negative equal to the target is skipped.  All updates are applied
sequentially per touched row, which makes the applied step the exact
analytic gradient of the negative-sampling loss whenever the touched output
rows are distinct (the gradient-check tests exercise exactly this).

Kernels are dtype-generic: training runs float32, gradient checks float64.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True, fastmath=False)
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(cache=True, nogil=True, fastmath=False)
def cbow_stream(
    inputs, outputs, arr, rows_flat, rows_off, reduced, negs, lr0, total, progress
):
    """CBOW update pass over one stream.

    ``rows_flat``/``rows_off`` is a CSR table of input rows per vocabulary
    token (its word row plus subword bucket rows); each token's rows share
    its representation weight equally.
    """
    length = arr.shape[0]
    dim = inputs.shape[1]
    n_neg = negs.shape[1]
    h = np.zeros(dim, dtype=inputs.dtype)
    grad_h = np.zeros(dim, dtype=inputs.dtype)
    for pos in range(length):
        progress[0] += 1
        b = reduced[pos]
        lo = pos - b
        if lo < 0:
            lo = 0
        hi = pos + 1 + b
        if hi > length:
            hi = length
        nctx = hi - lo - 1
        if nctx <= 0:
            continue
        lr = lr0 * (1.0 - progress[0] / total)
        if lr <= 0.0:
            continue
        target = arr[pos]

        for d in range(dim):
            h[d] = 0.0
        for c in range(lo, hi):
            if c == pos:
                continue
            t = arr[c]
            start = rows_off[t]
            end = rows_off[t + 1]
            w = 1.0 / ((end - start) * nctx)
            for r in range(start, end):
                row = rows_flat[r]
                for d in range(dim):
                    h[d] += w * inputs[row, d]

        for d in range(dim):
            grad_h[d] = 0.0
        for j in range(n_neg + 1):
            if j == 0:
                o = target
                label = 1.0
            else:
                o = negs[pos, j - 1]
                if o == target:
                    continue
                label = 0.0
            dot = 0.0
            for d in range(dim):
                dot += outputs[o, d] * h[d]
            g = (label - _sigmoid(dot)) * lr
            for d in range(dim):
                grad_h[d] += g * outputs[o, d]
                outputs[o, d] += g * h[d]

        for c in range(lo, hi):
            if c == pos:
                continue
            t = arr[c]
            start = rows_off[t]
            end = rows_off[t + 1]
            w = 1.0 / ((end - start) * nctx)
            for r in range(start, end):
                row = rows_flat[r]
                for d in range(dim):
                    inputs[row, d] += w * grad_h[d]


@njit(cache=True, nogil=True, fastmath=False)
def pvdm_stream(
    inputs, outputs, arr, doc_row, reduced, negs, lr0, total, progress
):
    """PV-DM update pass over one document.

    ``inputs`` stacks word rows and document rows; the document row joins
    every context with the same weight as one context word.
    """
    length = arr.shape[0]
    dim = inputs.shape[1]
    n_neg = negs.shape[1]
    h = np.zeros(dim, dtype=inputs.dtype)
    grad_h = np.zeros(dim, dtype=inputs.dtype)
    for pos in range(length):
        progress[0] += 1
        b = reduced[pos]
        lo = pos - b
        if lo < 0:
            lo = 0
        hi = pos + 1 + b
        if hi > length:
            hi = length
        nctx = hi - lo - 1
        lr = lr0 * (1.0 - progress[0] / total)
        if lr <= 0.0:
            continue
        target = arr[pos]
        share = 1.0 / (nctx + 1)

        for d in range(dim):
            h[d] = share * inputs[doc_row, d]
        for c in range(lo, hi):
            if c == pos:
                continue
            row = arr[c]
            for d in range(dim):
                h[d] += share * inputs[row, d]

        for d in range(dim):
            grad_h[d] = 0.0
        for j in range(n_neg + 1):
            if j == 0:
                o = target
                label = 1.0
            else:
                o = negs[pos, j - 1]
                if o == target:
                    continue
                label = 0.0
            dot = 0.0
            for d in range(dim):
                dot += outputs[o, d] * h[d]
            g = (label - _sigmoid(dot)) * lr
            for d in range(dim):
                grad_h[d] += g * outputs[o, d]
                outputs[o, d] += g * h[d]

        for d in range(dim):
            inputs[doc_row, d] += share * grad_h[d]
        for c in range(lo, hi):
            if c == pos:
                continue
            row = arr[c]
            for d in range(dim):
                inputs[row, d] += share * grad_h[d]


@njit(cache=True, nogil=True, fastmath=False)
def pvdm_infer_stream(
    word_vectors, outputs, dvec, arr, reduced, negs, lr0, total, progress
):
    """One inference pass: word and output vectors frozen, only ``dvec`` moves."""
    length = arr.shape[0]
    dim = word_vectors.shape[1]
    n_neg = negs.shape[1]
    h = np.zeros(dim, dtype=dvec.dtype)
    grad_h = np.zeros(dim, dtype=dvec.dtype)
    for pos in range(length):
        progress[0] += 1
        b = reduced[pos]
        lo = pos - b
        if lo < 0:
            lo = 0
        hi = pos + 1 + b
        if hi > length:
            hi = length
        nctx = hi - lo - 1
        lr = lr0 * (1.0 - progress[0] / total)
        if lr <= 0.0:
            continue
        target = arr[pos]
        share = 1.0 / (nctx + 1)

        for d in range(dim):
            h[d] = share * dvec[d]
        for c in range(lo, hi):
            if c == pos:
                continue
            row = arr[c]
            for d in range(dim):
                h[d] += share * word_vectors[row, d]

        for d in range(dim):
            grad_h[d] = 0.0
        for j in range(n_neg + 1):
            if j == 0:
                o = target
                label = 1.0
            else:
                o = negs[pos, j - 1]
                if o == target:
                    continue
                label = 0.0
            dot = 0.0
            for d in range(dim):
                dot += outputs[o, d] * h[d]
            g = (label - _sigmoid(dot)) * lr
            for d in range(dim):
                grad_h[d] += g * outputs[o, d]

        for d in range(dim):
            dvec[d] += share * grad_h[d]
