"""Window geometry and ordered pixel-pair enumeration for the pairwise losses.

Pixels are addressed by their flat row-major index ``i``; the column/row
coordinates are ``(x, y) = (i % w, i // w)``.  A pair ``(i, j)`` belongs to
the radius-``r`` window when ``|ix - jx| <= r`` and ``|iy - jy| <= r`` and
``i != j``.  Pairs are ordered: ``(i, j)`` and ``(j, i)`` are distinct
entries, so each unordered pair contributes twice to a pairwise sum.
"""

from dataclasses import dataclass

import numpy as np

# Label value marking unannotated pixels and ignored pairs.
IGNORE = 255


@dataclass(frozen=True)
class GridShape:
    """Height/width of a pixel grid."""

    h: int
    w: int

    def __post_init__(self):
        if self.h < 1 or self.w < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.h}x{self.w}")

    @property
    def n(self) -> int:
        return self.h * self.w


def as_shape(shape) -> GridShape:
    if isinstance(shape, GridShape):
        return shape
    h, w = shape
    return GridShape(int(h), int(w))


def _offsets(r):
    # (dy, dx) in row-major order with (0, 0) removed
    return [
        (dy, dx)
        for dy in range(-r, r + 1)
        for dx in range(-r, r + 1)
        if (dy, dx) != (0, 0)
    ]


def _offset_block(shape: GridShape, dy: int, dx: int) -> np.ndarray:
    """Flat indices i for which the neighbour at (dy, dx) stays on the grid."""
    rows = np.arange(max(0, -dy), shape.h - max(0, dy), dtype=np.int64)
    cols = np.arange(max(0, -dx), shape.w - max(0, dx), dtype=np.int64)
    if rows.size == 0 or cols.size == 0:
        return np.empty(0, dtype=np.int64)
    return (rows[:, None] * shape.w + cols[None, :]).ravel()


def enumerate_pairs(shape, r: int) -> np.ndarray:
    """Every ordered in-window pair exactly once, as an (n, 2) index array.

    Order is deterministic: row-major over the first pixel i, then row-major
    over the window offsets.  Border pixels simply have fewer partners.
    """
    shape = as_shape(shape)
    if r < 1:
        raise ValueError(f"window radius must be >= 1, got {r}")
    firsts, seconds, rank = [], [], []
    for k, (dy, dx) in enumerate(_offsets(r)):
        i = _offset_block(shape, dy, dx)
        firsts.append(i)
        seconds.append(i + dy * shape.w + dx)
        rank.append(np.full(i.size, k, dtype=np.int64))
    i = np.concatenate(firsts)
    j = np.concatenate(seconds)
    k = np.concatenate(rank)
    order = np.lexsort((k, i))
    return np.stack([i[order], j[order]], axis=1)


def filter_pairs(pairs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Keep the pairs whose endpoints are both annotated (label != IGNORE)."""
    labels = np.asarray(labels)
    flat = labels.ravel()
    pairs = np.asarray(pairs)
    if pairs.size and int(pairs.max()) >= flat.size:
        raise ValueError(
            f"label mask of shape {labels.shape} does not cover pair indices"
        )
    keep = (flat[pairs[:, 0]] != IGNORE) & (flat[pairs[:, 1]] != IGNORE)
    return pairs[keep]


class PairWindow:
    """Pair bookkeeping for one grid shape and radius.

    Besides the full ordered pair set (``pairs()``), the window exposes the
    half set ``(half_i, half_j)`` listing each unordered pair once with
    ``half_j > half_i``, plus the squared spatial distance per half pair.
    Both kernels and all pairwise summands here are symmetric, so a sum over
    the ordered set is exactly twice the half-set sum; the loss modules rely
    on that to halve the work.
    """

    def __init__(self, shape, r: int):
        self.shape = as_shape(shape)
        if r < 1:
            raise ValueError(f"window radius must be >= 1, got {r}")
        self.r = int(r)
        firsts, seconds, sq = [], [], []
        for dy, dx in _offsets(self.r):
            if (dy, dx) <= (0, 0):  # one direction per unordered pair
                continue
            i = _offset_block(self.shape, dy, dx)
            firsts.append(i)
            seconds.append(i + dy * self.shape.w + dx)
            sq.append(np.full(i.size, float(dy * dy + dx * dx)))
        self.half_i = np.concatenate(firsts) if firsts else np.empty(0, np.int64)
        self.half_j = np.concatenate(seconds) if seconds else np.empty(0, np.int64)
        self.half_sq = np.concatenate(sq) if sq else np.empty(0, np.float64)
        self._pairs = None

    @property
    def n_pixels(self) -> int:
        return self.shape.n

    @property
    def n_half(self) -> int:
        return self.half_i.size

    def pairs(self) -> np.ndarray:
        """Full ordered pair set in the enumerate_pairs contract order."""
        if self._pairs is None:
            self._pairs = enumerate_pairs(self.shape, self.r)
        return self._pairs


_window_cache: dict = {}


def window(shape, r: int) -> PairWindow:
    """Memoized PairWindow; grids recur every training step."""
    shape = as_shape(shape)
    key = (shape.h, shape.w, int(r))
    win = _window_cache.get(key)
    if win is None:
        win = _window_cache[key] = PairWindow(shape, r)
    return win
