"""Leading singular vectors of a dense matrix, deterministic by construction.

The only matrix kernel the completion sweep needs.  Works on the Gram matrix
of the smaller side: eigendecomposition of A A^T when the matrix is wide
(J <= K), of A^T A plus a back-multiplication when it is tall.  Mode sizes in
this package are window lengths, so J stays small while K can be the product
of every other mode; the Gram trick keeps the decomposition at J x J.
"""

from __future__ import annotations

import numpy as np


def apply_sign_convention(u: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-magnitude entry is nonnegative.

    First occurrence wins on ties, which makes the output deterministic.
    """
    u = np.array(u, dtype=np.float64, copy=True)
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def complete_orthonormal_basis(u: np.ndarray, total: int) -> np.ndarray:
    """Extend an orthonormal J x k basis to J x total columns, deterministically.

    The added columns come from a QR pass over [u | I], so they depend only
    on the input.  The span of the first k columns is preserved.
    """
    rows, have = u.shape
    if not have <= total <= rows:
        raise ValueError(f"cannot extend {u.shape} basis to {total} columns")
    if total == have:
        return u
    q, _ = np.linalg.qr(np.hstack([u, np.eye(rows)]))
    return apply_sign_convention(q[:, :total])


def leading_singular_vectors(a: np.ndarray, r: int) -> np.ndarray:
    """Orthonormal J x r basis of the dominant left singular subspace of a J x K matrix.

    Maximizes the captured energy ||U^T A||_F^2 over all rank-r orthonormal
    bases.  Near-degenerate singular values are taken as the eigensolver
    returns them; the caller gets a valid dominant subspace either way.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    rows, cols = a.shape
    if not 1 <= r <= min(rows, cols):
        raise ValueError(f"r={r} out of range [1, {min(rows, cols)}] for shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")

    if rows <= cols:
        _, vecs = np.linalg.eigh(a @ a.T)
        u = vecs[:, ::-1][:, :r]
    else:
        vals, vecs = np.linalg.eigh(a.T @ a)
        vals = vals[::-1][:r]
        v = vecs[:, ::-1][:, :r]
        u = a @ v
        sigma = np.sqrt(np.clip(vals, 0.0, None))
        ok = sigma > np.finfo(np.float64).tiny
        u[:, ok] /= sigma[ok]
        u[:, ~ok] = 0.0
        # QR pass restores orthonormality lost to tiny singular values and
        # fills rank-deficient directions deterministically.
        u, _ = np.linalg.qr(u)
    return apply_sign_convention(np.ascontiguousarray(u))
