"""Dense N-way tensor algebra: unfolding, folding and multi-linear products.

Value carriers are plain ``numpy.ndarray`` objects: float64 arrays for data
tensors and bool arrays for observation masks. One linearization convention is
used everywhere in this package and by the on-disk tensor format:

    the first index varies fastest (column-major / Fortran vectorization).

Under this convention the mode-k unfolding of a tensor of shape
(I_0, ..., I_{N-1}) is the I_k x prod(I_n, n != k) matrix whose row i_k lists
all entries with the k-th index fixed, the remaining indices enumerated with
the lowest-numbered mode varying fastest.  Modes are 0-based throughout.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

Shape = tuple[int, ...]

# Largest element count we accept for a dense tensor; keeps index arithmetic
# safely inside int64.
_MAX_ELEMENTS = 2**62


def check_shape(dims: Iterable[int]) -> Shape:
    """Validate a tensor shape: order >= 1, all dims >= 1, no index overflow."""
    shape = tuple(int(d) for d in dims)
    if len(shape) == 0:
        raise ValueError("tensor shape must have at least one mode")
    if any(d < 1 for d in shape):
        raise ValueError(f"all dimensions must be >= 1, got {shape}")
    count = 1
    for d in shape:
        count *= d
        if count > _MAX_ELEMENTS:
            raise ValueError(f"element count of shape {shape} overflows the supported range")
    return shape


def as_tensor(values, shape: Sequence[int] | None = None) -> np.ndarray:
    """Coerce input to a float64 dense tensor, rejecting NaN/Inf entries."""
    t = np.asarray(values, dtype=np.float64)
    if shape is not None:
        t = t.reshape(check_shape(shape))
    else:
        check_shape(t.shape)
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor values must be finite (no NaN/Inf)")
    return t


def as_mask(flags, shape: Sequence[int] | None = None) -> np.ndarray:
    """Coerce input to a boolean observation mask (True = observed)."""
    q = np.asarray(flags)
    if q.dtype != np.bool_:
        q = q != 0
    if shape is not None:
        q = q.reshape(check_shape(shape))
    else:
        check_shape(q.shape)
    return q


def _require_same_shape(a: np.ndarray, b: np.ndarray, op: str) -> None:
    if a.shape != b.shape:
        raise ValueError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def frobenius_norm(t: np.ndarray) -> float:
    """sqrt of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(t, dtype=np.float64).ravel()))


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product; bool masks are promoted to 0/1."""
    a = np.asarray(a)
    b = np.asarray(b)
    _require_same_shape(a, b, "hadamard")
    if a.dtype == np.bool_:
        a = a.astype(np.float64)
    if b.dtype == np.bool_:
        b = b.astype(np.float64)
    return a * b


def unfold(t: np.ndarray, mode: int) -> np.ndarray:
    """Mode-k unfolding into an I_k x prod(other dims) matrix.

    Columns follow the package linearization: remaining modes in increasing
    order, the lowest one varying fastest.
    """
    t = np.asarray(t)
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range for order-{t.ndim} tensor")
    return np.reshape(np.moveaxis(t, mode, 0), (t.shape[mode], -1), order="F")


def fold(m: np.ndarray, mode: int, shape: Sequence[int]) -> np.ndarray:
    """Exact inverse of :func:`unfold` under the same linearization."""
    shape = check_shape(shape)
    m = np.asarray(m)
    if not 0 <= mode < len(shape):
        raise ValueError(f"mode {mode} out of range for order-{len(shape)} tensor")
    rest = tuple(s for i, s in enumerate(shape) if i != mode)
    expected = (shape[mode], int(np.prod(rest, dtype=np.int64)) if rest else 1)
    if m.ndim != 2 or m.shape != expected:
        raise ValueError(f"fold: matrix shape {m.shape} inconsistent with target {shape} at mode {mode}"
                         f" (expected {expected})")
    return np.moveaxis(np.reshape(m, (shape[mode],) + rest, order="F"), 0, mode)


def mode_multiply(t: np.ndarray, a: np.ndarray, mode: int) -> np.ndarray:
    """Mode-k product: contracts a R x I_k matrix against the k-th mode.

    Satisfies unfold(result, k) = a @ unfold(t, k).
    """
    t = np.asarray(t, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range for order-{t.ndim} tensor")
    if a.ndim != 2 or a.shape[1] != t.shape[mode]:
        raise ValueError(f"mode_multiply: matrix {a.shape} does not match mode-{mode} size "
                         f"{t.shape[mode]} of tensor {t.shape}")
    return np.moveaxis(np.tensordot(a, t, axes=(1, mode)), 0, mode)


def _check_factors(g: np.ndarray, factors: Sequence[np.ndarray]) -> None:
    if len(factors) != g.ndim:
        raise ValueError(f"expected {g.ndim} factor matrices, got {len(factors)}")
    for n, u in enumerate(factors):
        u = np.asarray(u)
        if u.ndim != 2 or u.shape[1] != g.shape[n]:
            raise ValueError(f"factor {n} has shape {u.shape}, needs {g.shape[n]} columns")


def multilinear_product(g: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """Apply one factor matrix per mode: g x_0 U0 x_1 U1 ... (order-independent)."""
    g = np.asarray(g, dtype=np.float64)
    _check_factors(g, factors)
    out = g
    for n, u in enumerate(factors):
        out = mode_multiply(out, u, n)
    return out


def multilinear_product_excluding(g: np.ndarray, factors: Sequence[np.ndarray],
                                  skip: int) -> np.ndarray:
    """Multi-linear product applying every factor except mode ``skip``."""
    g = np.asarray(g, dtype=np.float64)
    _check_factors(g, factors)
    if not 0 <= skip < g.ndim:
        raise ValueError(f"skip mode {skip} out of range for order-{g.ndim} tensor")
    out = g
    for n, u in enumerate(factors):
        if n == skip:
            continue
        out = mode_multiply(out, u, n)
    return out


def squeeze_modes(t: np.ndarray, modes: Sequence[int] | None = None) -> np.ndarray:
    """Drop singleton modes (all of them, or the ones listed).

    Singleton modes are carried through every operation in this package;
    squeezing is only ever an explicit request, typically for reporting.
    """
    t = np.asarray(t)
    if modes is None:
        keep = [i for i, s in enumerate(t.shape) if s != 1]
    else:
        for m in modes:
            if t.shape[m] != 1:
                raise ValueError(f"mode {m} has size {t.shape[m]}, cannot squeeze")
        drop = set(int(m) for m in modes)
        keep = [i for i in range(t.ndim) if i not in drop]
    if not keep:
        keep = [0]  # never squeeze away the last mode
    return t.reshape(tuple(t.shape[i] for i in keep))
