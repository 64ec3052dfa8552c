"""Hot per-pixel kernels with numba-jitted and pure-numpy implementations.

The jitted path is used when numba imports cleanly and the environment
variable ``DVPS_NO_NUMBA`` is unset (or set to ``0``). Both implementations
are kept importable so they can be compared directly; they must agree
bit-for-bit, which the test suite and ``benchmarks/bench_kernels.py`` check.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("DVPS_NO_NUMBA", "0").lower() in ("1", "true", "yes")

try:  # pragma: no cover - exercised indirectly via dispatch
    if _DISABLE:
        raise ImportError("numba disabled via DVPS_NO_NUMBA")
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def using_numba() -> bool:
    """True when the jitted kernel path is active."""
    return _HAVE_NUMBA


# ---------------------------------------------------------------------------
# Local peak detection (window-maximal pixels with row-major tie-breaking).
# A pixel survives iff no neighbour in its Chebyshev window has a strictly
# larger score, and no earlier (row-major) neighbour ties its score.
# ---------------------------------------------------------------------------


def local_peaks_numpy(score: np.ndarray, radius: int) -> np.ndarray:
    h, w = score.shape
    padded = np.full((h + 2 * radius, w + 2 * radius), -np.inf, dtype=np.float64)
    padded[radius : radius + h, radius : radius + w] = score
    dominated = np.zeros((h, w), dtype=bool)
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dy == 0 and dx == 0:
                continue
            neigh = padded[radius + dy : radius + dy + h, radius + dx : radius + dx + w]
            earlier = dy < 0 or (dy == 0 and dx < 0)
            if earlier:
                dominated |= neigh >= score
            else:
                dominated |= neigh > score
    return ~dominated


if _HAVE_NUMBA:

    @njit(cache=True)
    def _local_peaks_jit(score, radius):  # pragma: no cover - jitted
        h, w = score.shape
        out = np.zeros((h, w), dtype=np.bool_)
        for y in range(h):
            for x in range(w):
                s = score[y, x]
                keep = True
                for ny in range(max(0, y - radius), min(h, y + radius + 1)):
                    for nx in range(max(0, x - radius), min(w, x + radius + 1)):
                        if ny == y and nx == x:
                            continue
                        v = score[ny, nx]
                        if v > s:
                            keep = False
                        elif v == s and (ny < y or (ny == y and nx < x)):
                            keep = False
                        if not keep:
                            break
                    if not keep:
                        break
                out[y, x] = keep
        return out

    def local_peaks_numba(score: np.ndarray, radius: int) -> np.ndarray:
        return _local_peaks_jit(np.ascontiguousarray(score, dtype=np.float64), radius)

else:
    local_peaks_numba = local_peaks_numpy


# ---------------------------------------------------------------------------
# Nearest-center assignment. Returns, for each target point, the index of
# the closest center by squared euclidean distance; ties resolve to the
# lowest center index.
# ---------------------------------------------------------------------------

_CHUNK = 1 << 16


def nearest_center_numpy(
    ty: np.ndarray, tx: np.ndarray, cy: np.ndarray, cx: np.ndarray
) -> np.ndarray:
    n = ty.shape[0]
    out = np.empty(n, dtype=np.int64)
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        dy = ty[sl, None] - cy[None, :]
        dx = tx[sl, None] - cx[None, :]
        out[sl] = np.argmin(dy * dy + dx * dx, axis=1)
    return out


if _HAVE_NUMBA:

    @njit(cache=True)
    def _nearest_center_jit(ty, tx, cy, cx):  # pragma: no cover - jitted
        n = ty.shape[0]
        c = cy.shape[0]
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            best = 0
            dy = ty[i] - cy[0]
            dx = tx[i] - cx[0]
            best_d = dy * dy + dx * dx
            for j in range(1, c):
                dy = ty[i] - cy[j]
                dx = tx[i] - cx[j]
                d = dy * dy + dx * dx
                if d < best_d:
                    best_d = d
                    best = j
            out[i] = best
        return out

    def nearest_center_numba(
        ty: np.ndarray, tx: np.ndarray, cy: np.ndarray, cx: np.ndarray
    ) -> np.ndarray:
        return _nearest_center_jit(
            np.ascontiguousarray(ty, dtype=np.float64),
            np.ascontiguousarray(tx, dtype=np.float64),
            np.ascontiguousarray(cy, dtype=np.float64),
            np.ascontiguousarray(cx, dtype=np.float64),
        )

else:
    nearest_center_numba = nearest_center_numpy


# ---------------------------------------------------------------------------
# Sliding Chebyshev-window minimum with +inf outside the raster. Used for
# foreground-occlusion tests and for binary erosion (a mask eroded by radius
# r is the window minimum of its 0/1 indicator).
# ---------------------------------------------------------------------------


def sliding_min_numpy(values: np.ndarray, radius: int) -> np.ndarray:
    h, w = values.shape
    rows = np.full((h, w + 2 * radius), np.inf, dtype=np.float64)
    rows[:, radius : radius + w] = values
    row_min = rows[:, 0:w].copy()
    for dx in range(1, 2 * radius + 1):
        np.minimum(row_min, rows[:, dx : dx + w], out=row_min)
    cols = np.full((h + 2 * radius, w), np.inf, dtype=np.float64)
    cols[radius : radius + h, :] = row_min
    out = cols[0:h, :].copy()
    for dy in range(1, 2 * radius + 1):
        np.minimum(out, cols[dy : dy + h, :], out=out)
    return out


if _HAVE_NUMBA:

    @njit(cache=True)
    def _sliding_min_jit(values, radius):  # pragma: no cover - jitted
        h, w = values.shape
        row_min = np.empty((h, w), dtype=np.float64)
        for y in range(h):
            for x in range(w):
                m = np.inf
                for nx in range(max(0, x - radius), min(w, x + radius + 1)):
                    v = values[y, nx]
                    if v < m:
                        m = v
                row_min[y, x] = m
        out = np.empty((h, w), dtype=np.float64)
        for y in range(h):
            for x in range(w):
                m = np.inf
                for ny in range(max(0, y - radius), min(h, y + radius + 1)):
                    v = row_min[ny, x]
                    if v < m:
                        m = v
                out[y, x] = m
        return out

    def sliding_min_numba(values: np.ndarray, radius: int) -> np.ndarray:
        return _sliding_min_jit(np.ascontiguousarray(values, dtype=np.float64), radius)

else:
    sliding_min_numba = sliding_min_numpy


if _HAVE_NUMBA:
    local_peaks = local_peaks_numba
    nearest_center = nearest_center_numba
    sliding_min = sliding_min_numba
else:
    local_peaks = local_peaks_numpy
    nearest_center = nearest_center_numpy
    sliding_min = sliding_min_numpy
