"""Synthetic observation masks: random voxels, missing slices, occlusions."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import check_shape

PATTERNS = ("random-voxel", "slices", "random-slices", "rectangles")


def make_mask(shape: Sequence[int], pattern: str, seed=0, *,
              fraction: float | None = None,
              mode: int | None = None,
              start: int | None = None,
              count: int | None = None,
              rects: Sequence[Sequence[int]] | None = None) -> np.ndarray:
    """Build a boolean observation mask (True = observed) for one of:

    random-voxel   ``fraction`` of entries missing, drawn without replacement
                   so the realized fraction matches the request exactly
                   (up to rounding to a whole voxel count)
    slices         ``count`` contiguous slices missing along ``mode``
                   starting at ``start``
    random-slices  ``fraction`` of the slices along ``mode`` missing
    rectangles     axis-aligned boxes ``(row0, col0, height, width)`` in the
                   first two modes missing across all remaining modes

    Randomized patterns are deterministic given ``seed``.
    """
    shape = check_shape(shape)
    q = np.ones(shape, dtype=bool)
    if pattern == "random-voxel":
        if fraction is None or not 0.0 <= fraction <= 1.0:
            raise ValueError(f"random-voxel needs fraction in [0, 1], got {fraction}")
        size = q.size
        n_missing = int(round(fraction * size))
        rng = np.random.default_rng(seed)
        hit = rng.choice(size, size=n_missing, replace=False)
        flat = q.ravel()
        flat[hit] = False
        return flat.reshape(shape)
    if pattern == "slices":
        if mode is None or start is None or count is None:
            raise ValueError("slices needs mode, start and count")
        if not 0 <= mode < len(shape):
            raise ValueError(f"mode {mode} out of range for shape {shape}")
        if count < 0 or start < 0 or start + count > shape[mode]:
            raise ValueError(f"slice range [{start}, {start + count}) out of bounds "
                             f"for mode size {shape[mode]}")
        sl = [slice(None)] * len(shape)
        sl[mode] = slice(start, start + count)
        q[tuple(sl)] = False
        return q
    if pattern == "random-slices":
        if mode is None or fraction is None or not 0.0 <= fraction <= 1.0:
            raise ValueError("random-slices needs mode and fraction in [0, 1]")
        if not 0 <= mode < len(shape):
            raise ValueError(f"mode {mode} out of range for shape {shape}")
        rng = np.random.default_rng(seed)
        n_missing = int(round(fraction * shape[mode]))
        hit = rng.choice(shape[mode], size=n_missing, replace=False)
        sl = [slice(None)] * len(shape)
        sl[mode] = hit
        q[tuple(sl)] = False
        return q
    if pattern == "rectangles":
        if rects is None:
            raise ValueError("rectangles needs a list of (row0, col0, height, width)")
        if len(shape) < 2:
            raise ValueError("rectangles needs at least a 2-way shape")
        for rect in rects:
            r0, c0, h, w = (int(v) for v in rect)
            if r0 < 0 or c0 < 0 or h < 0 or w < 0 or r0 + h > shape[0] or c0 + w > shape[1]:
                raise ValueError(f"rectangle {tuple(rect)} out of bounds for shape {shape}")
            q[(slice(r0, r0 + h), slice(c0, c0 + w)) + (slice(None),) * (len(shape) - 2)] = False
        return q
    raise ValueError(f"unknown pattern {pattern!r}; choose from {PATTERNS}")
