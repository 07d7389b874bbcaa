"""Swept axis-aligned box tests for straight-line TCP motions."""
import numpy as np


def pose_aabb(pose, half_extents):
    """World AABB (lo, hi) of a box of ``half_extents`` carried by ``pose``."""
    half = np.abs(pose.rotation) @ np.asarray(half_extents, dtype=float)
    c = pose.translation
    return c - half, c + half


def sweep_first_hit(start, end, half, obstacles, steps=64):
    """First obstacle touched by a box of half-size ``half`` moved start->end.

    The box is sampled at ``t = i/steps`` for ``i = 1..steps``; the start
    sample is skipped because the previous motion already validated it.
    Boxes touching face-to-face do not collide.  ``obstacles`` is a list
    of ``(name, lo, hi)``.  Returns ``(step, name)`` or ``None``.
    """
    if not obstacles:
        return None
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    half = np.broadcast_to(np.asarray(half, dtype=float), (3,))
    t = np.arange(1, steps + 1) / steps
    centers = start + (end - start) * t[:, None]
    lo = centers - half
    hi = centers + half
    o_lo = np.array([o[1] for o in obstacles], dtype=float)
    o_hi = np.array([o[2] for o in obstacles], dtype=float)
    hit = np.all((lo[:, None, :] < o_hi[None]) & (o_lo[None] < hi[:, None, :]), axis=2)
    rows = np.flatnonzero(hit.any(axis=1))
    if rows.size == 0:
        return None
    step = int(rows[0])
    return step + 1, obstacles[int(np.flatnonzero(hit[step])[0])][0]
