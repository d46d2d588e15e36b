"""Small numpy helpers shared by the loss modules."""

import numpy as np


def scatter_add_rows(index: np.ndarray, values: np.ndarray, n_rows: int) -> np.ndarray:
    """Row-indexed scatter-add: out[index[m]] += values[m] for 2-D values.

    Implemented with a single flattened bincount; np.add.at is an order of
    magnitude slower on large pair lists.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    m, k = values.shape
    if m == 0:
        return np.zeros((n_rows, k))
    flat_index = (index[:, None] * k + np.arange(k)[None, :]).ravel()
    out = np.bincount(flat_index, weights=values.ravel(), minlength=n_rows * k)
    return out.reshape(n_rows, k)


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Numerically stable softmax over the last axis."""
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_vjp(probs: np.ndarray, grad_probs: np.ndarray) -> np.ndarray:
    """Pull a gradient w.r.t. softmax outputs back to the logits."""
    dot = (grad_probs * probs).sum(axis=-1, keepdims=True)
    return probs * (grad_probs - dot)
