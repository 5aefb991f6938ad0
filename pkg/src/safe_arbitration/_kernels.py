"""Numeric inner loops: grid BFS, worst-case occupancy bounds, overlap search.

Each kernel has a numba implementation and a pure-numpy one.  The numba path
is used when numba imports and ``SAFE_ARBITRATION_DISABLE_NUMBA`` is unset or
"0"; both paths return identical results and are tested against each other.
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "SAFE_ARBITRATION_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get(ENV_FLAG, "0") in ("", "0")

UNREACHABLE = -1


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# -- breadth-first distance field ------------------------------------------


@_njit
def _bfs_field_loop(open_mask, sources):
    h, w = open_mask.shape
    dist = np.full((h, w), -1, dtype=np.int32)
    qy = np.empty(h * w, dtype=np.int64)
    qx = np.empty(h * w, dtype=np.int64)
    head = 0
    tail = 0
    for y in range(h):
        for x in range(w):
            if sources[y, x] and open_mask[y, x]:
                dist[y, x] = 0
                qy[tail] = y
                qx[tail] = x
                tail += 1
    while head < tail:
        y = qy[head]
        x = qx[head]
        head += 1
        d = dist[y, x] + 1
        for k in range(4):
            if k == 0:
                ny, nx = y - 1, x
            elif k == 1:
                ny, nx = y, x - 1
            elif k == 2:
                ny, nx = y + 1, x
            else:
                ny, nx = y, x + 1
            if 0 <= ny < h and 0 <= nx < w and open_mask[ny, nx] and dist[ny, nx] < 0:
                dist[ny, nx] = d
                qy[tail] = ny
                qx[tail] = nx
                tail += 1
    return dist


def _bfs_field_numpy(open_mask, sources):
    open_mask = np.asarray(open_mask, dtype=bool)
    dist = np.full(open_mask.shape, UNREACHABLE, dtype=np.int32)
    frontier = np.asarray(sources, dtype=bool) & open_mask
    visited = frontier.copy()
    d = 0
    while frontier.any():
        dist[frontier] = d
        grown = np.zeros_like(frontier)
        grown[1:, :] |= frontier[:-1, :]
        grown[:-1, :] |= frontier[1:, :]
        grown[:, 1:] |= frontier[:, :-1]
        grown[:, :-1] |= frontier[:, 1:]
        frontier = grown & open_mask & ~visited
        visited |= frontier
        d += 1
    return dist


def bfs_field(open_mask: np.ndarray, sources: np.ndarray) -> np.ndarray:
    """Shortest 4-connected path length from the nearest source to every cell.

    Cells that cannot be reached (or are closed) hold ``UNREACHABLE``.
    """
    if USE_NUMBA:
        return _bfs_field_loop(np.ascontiguousarray(open_mask, dtype=np.bool_), np.ascontiguousarray(sources, dtype=np.bool_))
    return _bfs_field_numpy(open_mask, sources)


# -- worst-case longitudinal occupancy ------------------------------------


@_njit
def _occupancy_bounds_loop(s0, v0, a_max, v_max, half_length, times):
    n = s0.shape[0]
    m = times.shape[0]
    lo = np.empty((n, m))
    hi = np.empty((n, m))
    for i in range(n):
        v = v0[i]
        a = a_max[i]
        t_stop = v / a
        t_cap = (v_max[i] - v) / a
        for j in range(m):
            t = times[j]
            if t <= t_cap:
                fwd = v * t + 0.5 * a * t * t
            else:
                fwd = v * t_cap + 0.5 * a * t_cap * t_cap + v_max[i] * (t - t_cap)
            if t <= t_stop:
                back = v * t - 0.5 * a * t * t
            else:
                back = v * v / (2.0 * a)
            lo[i, j] = s0[i] + back - half_length[i]
            hi[i, j] = s0[i] + fwd + half_length[i]
    return lo, hi


def _occupancy_bounds_numpy(s0, v0, a_max, v_max, half_length, times):
    s0, v0, a, vmax, half = (np.asarray(x, dtype=float)[:, None] for x in (s0, v0, a_max, v_max, half_length))
    t = np.asarray(times, dtype=float)[None, :]
    t_cap = (vmax - v0) / a
    tc = np.minimum(t, t_cap)
    fwd = v0 * tc + 0.5 * a * tc * tc + vmax * np.maximum(t - t_cap, 0.0)
    ts = np.minimum(t, v0 / a)
    back = v0 * ts - 0.5 * a * ts * ts
    return s0 + back - half, s0 + fwd + half


def occupancy_bounds(s0, v0, a_max, v_max, half_length, times):
    """Longitudinal interval [lo, hi] each vehicle could occupy at each time.

    The upper edge assumes full acceleration ``a_max`` until ``v_max``, the
    lower edge full braking with ``a_max`` down to standstill.  Both edges
    include half the vehicle length.  Inputs are per-vehicle arrays of equal
    length; outputs have shape ``(n_vehicles, len(times))``.
    """
    args = [np.ascontiguousarray(x, dtype=np.float64) for x in (s0, v0, a_max, v_max, half_length, times)]
    if USE_NUMBA:
        return _occupancy_bounds_loop(*args)
    return _occupancy_bounds_numpy(*args)


# -- overlap search -------------------------------------------------------


@_njit
def _first_overlap_loop(ego_lo, ego_hi, ego_lanes, lo, hi, lanes):
    n, m = lo.shape
    for j in range(m):
        for i in range(n):
            if (ego_lanes[j] & lanes[i, j]) != 0 and ego_lo[j] <= hi[i, j] and lo[i, j] <= ego_hi[j]:
                return i, j
    return -1, -1


def _first_overlap_numpy(ego_lo, ego_hi, ego_lanes, lo, hi, lanes):
    hit = ((ego_lanes[None, :] & lanes) != 0) & (ego_lo[None, :] <= hi) & (lo <= ego_hi[None, :])
    if not hit.any():
        return -1, -1
    j = int(np.argmax(hit.any(axis=0)))
    i = int(np.argmax(hit[:, j]))
    return i, j


def first_overlap(ego_lo, ego_hi, ego_lanes, lo, hi, lanes) -> tuple[int, int]:
    """Earliest sample at which the ego footprint meets another occupancy.

    Lanes are bit masks (bit k set = lane k occupied).  Returns
    ``(vehicle, sample)`` or ``(-1, -1)`` when everything is disjoint; among
    simultaneous hits the lowest vehicle index wins.
    """
    ego_lo = np.ascontiguousarray(ego_lo, dtype=np.float64)
    ego_hi = np.ascontiguousarray(ego_hi, dtype=np.float64)
    ego_lanes = np.ascontiguousarray(ego_lanes, dtype=np.int64)
    lo = np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ascontiguousarray(hi, dtype=np.float64)
    lanes = np.ascontiguousarray(lanes, dtype=np.int64)
    if lo.shape[0] == 0:
        return -1, -1
    if USE_NUMBA:
        i, j = _first_overlap_loop(ego_lo, ego_hi, ego_lanes, lo, hi, lanes)
        return int(i), int(j)
    return _first_overlap_numpy(ego_lo, ego_hi, ego_lanes, lo, hi, lanes)


def warmup() -> None:
    """Compile the numba kernels on tiny inputs."""
    grid = np.ones((3, 3), dtype=bool)
    src = np.zeros((3, 3), dtype=bool)
    src[1, 1] = True
    bfs_field(grid, src)
    one = np.ones(1)
    lo, hi = occupancy_bounds(one, one, one, one * 2, one, np.linspace(0, 1, 3))
    first_overlap(lo[0], hi[0], np.ones(3, dtype=np.int64), lo, hi, np.ones((1, 3), dtype=np.int64))
