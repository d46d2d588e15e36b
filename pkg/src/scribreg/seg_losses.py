"""Segmentation-head losses with analytic gradients w.r.t. pre-softmax logits.

Both losses are differentiated through the softmax analytically, so a
trainer can add their gradients directly onto the logit gradient.  The
regularized loss treats the feature map as a constant: its value depends on
the features through the kernel, but no gradient flows back into them.
"""

from dataclasses import dataclass

import numpy as np

from ._nputil import scatter_add_rows, softmax_vjp
from .grid import IGNORE, PairWindow
from .kernels import KernelParams, pair_kernel

# Floor for probabilities inside logs; keeps the loss finite without
# measurably biasing training.
LOG_EPS = 1e-8


@dataclass
class LossResult:
    """Scalar loss plus its gradient, shaped like the differentiated input."""

    value: float
    grad: np.ndarray


def partial_ce(probs: np.ndarray, scribbles: np.ndarray) -> LossResult:
    """Cross-entropy averaged over annotated pixels only; grad w.r.t. logits.

    Unannotated pixels (label IGNORE) contribute nothing to either the value
    or the gradient.
    """
    probs = np.asarray(probs, dtype=np.float64)
    scribbles = np.asarray(scribbles)
    h, w, c = probs.shape
    if scribbles.shape != (h, w):
        raise ValueError(f"scribble shape {scribbles.shape} != grid {(h, w)}")
    flat_p = probs.reshape(-1, c)
    flat_s = scribbles.ravel()
    annotated = np.flatnonzero(flat_s != IGNORE)
    if annotated.size == 0:
        raise ValueError("partial cross-entropy needs at least one annotated pixel")
    labels = flat_s[annotated].astype(np.int64)
    if labels.max() >= c:
        raise ValueError(f"scribble label {labels.max()} out of range for C={c}")
    n_s = annotated.size
    p_true = flat_p[annotated, labels]
    value = -np.log(np.maximum(p_true, LOG_EPS)).mean()
    grad = np.zeros_like(flat_p)
    grad[annotated] = flat_p[annotated] / n_s
    grad[annotated, labels] -= 1.0 / n_s
    return LossResult(float(value), grad.reshape(h, w, c))


def pair_phi(i: int, j: int, probs: np.ndarray, k: float) -> float:
    """Pair penalty k * (1 - <P(i), P(j)>)."""
    flat = np.asarray(probs, dtype=np.float64).reshape(-1, probs.shape[-1])
    return float(k * (1.0 - flat[i] @ flat[j]))


def dfr_loss(
    probs: np.ndarray,
    image: np.ndarray,
    feat: np.ndarray,
    win: PairWindow,
    params: KernelParams,
    use_rgb: bool = True,
    use_feature: bool = True,
) -> LossResult:
    """Dynamic feature-regularized loss over the ordered window pair set.

    value = (1/hw) * sum over ordered in-window pairs of K(i,j) * (1 - <P_i, P_j>),
    normalised by the pixel count, not the pair count, so border pixels
    contribute fewer pairs.  The gradient is returned w.r.t. the logits; the
    feature map only enters the kernel and receives no gradient.
    """
    probs = np.asarray(probs, dtype=np.float64)
    h, w, c = probs.shape
    if (h, w) != (win.shape.h, win.shape.w):
        raise ValueError(f"probs grid {(h, w)} != window grid {win.shape}")
    hw = h * w
    flat_p = probs.reshape(hw, c)
    hi, hj = win.half_i, win.half_j
    k = pair_kernel(
        win.half_sq, np.asarray(image, dtype=np.float64), feat, hi, hj, params,
        use_rgb=use_rgb, use_feature=use_feature,
    )
    inner = np.einsum("mc,mc->m", flat_p[hi], flat_p[hj])
    # ordered sum = twice the half-pair sum (symmetric summand)
    value = 2.0 / hw * float(k @ (1.0 - inner))
    grad_p = scatter_add_rows(hi, k[:, None] * flat_p[hj], hw)
    grad_p += scatter_add_rows(hj, k[:, None] * flat_p[hi], hw)
    grad_p *= -2.0 / hw
    grad = softmax_vjp(flat_p, grad_p)
    return LossResult(value, grad.reshape(h, w, c))
