"""Gaussian affinity kernels over position, colour and deep-feature channels.

The full kernel multiplies three Gaussian terms, one per channel, each with
its own bandwidth; the shallow variant drops the feature term.  Deep features
enter as constants: no gradient ever flows through a kernel value.  All
kernel math runs in float64 so oracle comparisons hold at 1e-12.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KernelParams:
    """Bandwidths for the spatial, colour and feature kernel terms."""

    sigma1: float = 6.0  # spatial, pixels
    sigma2: float = 0.5  # colour, normalised RGB units
    sigma3: float = 50.0  # deep feature units

    def __post_init__(self):
        for name in ("sigma1", "sigma2", "sigma3"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


def _coords(i, w):
    return i % w, i // w


def pair_kernel(
    spatial_sq: np.ndarray,
    image: np.ndarray,
    feat,
    pi: np.ndarray,
    pj: np.ndarray,
    params: KernelParams,
    use_rgb: bool = True,
    use_feature: bool = True,
) -> np.ndarray:
    """Vectorised kernel over pair index arrays.

    spatial_sq is the per-pair squared spatial distance (precomputed; it is
    static for a given grid and radius).  Channel toggles drop the matching
    exponent term entirely, which is how the kernel ablations are run.
    """
    exponent = spatial_sq / (-2.0 * params.sigma1**2)
    if use_rgb:
        rgb = image.reshape(-1, 3)
        d = rgb[pi] - rgb[pj]
        exponent = exponent - (d * d).sum(axis=1) / (2.0 * params.sigma2**2)
    if use_feature:
        f = np.asarray(feat, dtype=np.float64)
        f = f.reshape(-1, f.shape[-1])
        d = f[pi] - f[pj]
        exponent = exponent - (d * d).sum(axis=1) / (2.0 * params.sigma3**2)
    return np.exp(exponent)


def kernel_full(i: int, j: int, image: np.ndarray, feat: np.ndarray, params: KernelParams) -> float:
    """Three-term affinity for one pixel pair; features treated as constants."""
    w = image.shape[1]
    ix, iy = _coords(i, w)
    jx, jy = _coords(j, w)
    sq = float((ix - jx) ** 2 + (iy - jy) ** 2)
    k = pair_kernel(
        np.array([sq]),
        np.asarray(image, dtype=np.float64),
        feat,
        np.array([i]),
        np.array([j]),
        params,
    )
    return float(k[0])


def kernel_shallow(i: int, j: int, image: np.ndarray, params: KernelParams) -> float:
    """Position + colour affinity, the feature term removed."""
    w = image.shape[1]
    ix, iy = _coords(i, w)
    jx, jy = _coords(j, w)
    sq = float((ix - jx) ** 2 + (iy - jy) ** 2)
    k = pair_kernel(
        np.array([sq]),
        np.asarray(image, dtype=np.float64),
        None,
        np.array([i]),
        np.array([j]),
        params,
        use_feature=False,
    )
    return float(k[0])
