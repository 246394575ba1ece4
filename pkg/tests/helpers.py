"""Shared fixtures builders and oracles used across the test modules."""

import numpy as np

from hankelfill import multilinear_product


def random_orthonormal(rng, rows, cols):
    q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q


def planted_tucker(shape, ranks, data_seed):
    """Exact low-multilinear-rank tensor with a known generating model."""
    rng = np.random.default_rng(data_seed)
    factors = [random_orthonormal(rng, j, r) for j, r in zip(shape, ranks)]
    core = rng.standard_normal(tuple(ranks))
    return multilinear_product(core, factors)


def random_mask(shape, missing_fraction, seed):
    rng = np.random.default_rng(seed)
    return rng.random(shape) >= missing_fraction


def is_non_increasing(trace, slack=1e-12):
    values = [v for _, v in trace]
    return all(b <= a + slack for a, b in zip(values, values[1:]))


def orthonormality_defect(u):
    r = u.shape[1]
    return float(np.abs(u.T @ u - np.eye(r)).max())


def texture_image(side=64, channels=3):
    """Synthetic recursive texture: sums of 2-D sinusoids, scaled to [0, 255]."""
    hh, ww = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    base = (np.sin(0.35 * hh + 0.55 * ww + 0.4)
            + np.sin(0.9 * hh - 0.25 * ww + 1.1)
            + 0.5 * np.sin(0.15 * hh + 1.4 * ww + 2.0))
    alt = np.sin(0.35 * hh + 0.55 * ww + 1.2) + np.sin(0.9 * hh - 0.25 * ww + 0.2)
    planes = [base, alt, 0.8 * base + 0.3][:channels]
    img = np.stack(planes, axis=2)
    return (img - img.min()) / (img.max() - img.min()) * 255.0


def naive_ssim_map(reference, estimate, params):
    """Plain sliding-window SSIM, one window at a time; the test oracle."""
    kernel = params.kernel()
    w = params.window
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2
    rows = reference.shape[0] - w + 1
    cols = reference.shape[1] - w + 1
    out = np.empty((rows, cols))
    for i in range(rows):
        for j in range(cols):
            x = reference[i:i + w, j:j + w]
            y = estimate[i:i + w, j:j + w]
            mx = float((kernel * x).sum())
            my = float((kernel * y).sum())
            vx = float((kernel * (x - mx) ** 2).sum())
            vy = float((kernel * (y - my) ** 2).sum())
            cxy = float((kernel * (x - mx) * (y - my)).sum())
            out[i, j] = ((2 * mx * my + c1) * (2 * cxy + c2)
                         / ((mx * mx + my * my + c1) * (vx + vy + c2)))
    return out
