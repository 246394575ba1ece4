"""Tucker completion of a tensor with missing entries at fixed multilinear rank.

The fit alternates two steps until the masked cost stops moving:

1. impute: overwrite the missing entries with the current model's values,
   which majorizes the masked cost by a surrogate that touches it at the
   current iterate;
2. one ALS cycle on the imputed (complete) tensor: per mode, project onto
   the other factors, take leading singular vectors of the unfolding, then
   refresh the core.

Each ALS sub-step solves its subproblem globally, so the masked cost is
monotonically non-increasing; there is no step size to tune.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import check_shape, mode_multiply, multilinear_product
from .linalg import apply_sign_convention, complete_orthonormal_basis, leading_singular_vectors

# (sweep index, masked squared-Frobenius cost) per outer iteration
CostTrace = list[tuple[int, float]]


@dataclass
class TuckerModel:
    """Core tensor plus one orthonormal factor matrix per mode.

    Arrays are shared, never copied; treat a model as immutable and build a
    new one instead of mutating in place.
    """

    core: np.ndarray
    factors: list[np.ndarray]

    @property
    def ranks(self) -> tuple[int, ...]:
        return self.core.shape

    @property
    def output_shape(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.factors)

    def reconstruct(self) -> np.ndarray:
        return multilinear_product(self.core, self.factors)


@dataclass
class FitConfig:
    max_sweeps: int = 500
    seed: int = 0
    cost_record: bool = True
    # Stop when |f_k - f_{k+1}| <= conv_tol * max(1, initial cost).
    conv_tol: float = 1e-8

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


def cost(t: np.ndarray, q: np.ndarray, x: np.ndarray) -> float:
    """Squared Frobenius norm of the residual restricted to observed entries."""
    t = np.asarray(t)
    x = np.asarray(x)
    if t.shape != q.shape or t.shape != x.shape:
        raise ValueError(f"cost: shapes differ: data {t.shape}, mask {np.asarray(q).shape}, "
                         f"model {x.shape}")
    e = (t - x)[np.asarray(q, dtype=bool)]
    return float(e @ e)


def auxiliary_fill(t: np.ndarray, q: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Observed entries from t, missing entries from the model reconstruction x."""
    t = np.asarray(t)
    x = np.asarray(x)
    if t.shape != q.shape or t.shape != x.shape:
        raise ValueError(f"auxiliary_fill: shapes differ: data {t.shape}, "
                         f"mask {np.asarray(q).shape}, model {x.shape}")
    return np.where(np.asarray(q, dtype=bool), t, x)


def init_model(ranks: Sequence[int], shape: Sequence[int], seed) -> TuckerModel:
    """Seeded random start: orthonormalized Gaussian factors, Gaussian core.

    Singleton modes get a fixed 1x1 identity factor (they are never updated
    by the sweep either).
    """
    shape = check_shape(shape)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != len(shape):
        raise ValueError(f"need one rank per mode: {len(ranks)} ranks for shape {shape}")
    for m, (r, j) in enumerate(zip(ranks, shape)):
        if not 1 <= r <= j:
            raise ValueError(f"rank {r} out of range [1, {j}] on mode {m}")
    rng = np.random.default_rng(seed)
    factors = []
    for j, r in zip(shape, ranks):
        if j == 1:
            factors.append(np.ones((1, 1)))
            continue
        raw = rng.standard_normal((j, r))
        basis, _ = np.linalg.qr(raw)
        factors.append(apply_sign_convention(basis))
    core = rng.standard_normal(ranks)
    return TuckerModel(core, factors)


def als_sweep(z: np.ndarray, model: TuckerModel) -> TuckerModel:
    """One ALS cycle on a complete tensor z: every factor once, then the core.

    Mode m's update projects z onto all other (already updated) factors and
    keeps the top-R_m left singular vectors of the mode-m unfolding; modes of
    size 1 keep their identity factor.  The residual ||z - reconstruction||^2
    never increases.
    """
    if z.shape != model.output_shape:
        raise ValueError(f"tensor shape {z.shape} does not match model's "
                         f"factor rows {model.output_shape}")
    z = np.asarray(z, dtype=np.float64)
    factors = list(model.factors)
    ranks = model.ranks
    for m in range(z.ndim):
        if z.shape[m] == 1:
            continue
        y = z
        for n, u in enumerate(factors):
            if n != m:
                y = mode_multiply(y, u.T, n)
        flat = np.reshape(np.moveaxis(y, m, 0), (y.shape[m], -1), order="F")
        # A rank above the projected width (possible right after an increment,
        # while the other modes are still small) adds columns orthogonal to the
        # data; complete the basis deterministically, the energy is unchanged.
        r_eff = min(ranks[m], flat.shape[1])
        basis = leading_singular_vectors(flat, r_eff)
        if r_eff < ranks[m]:
            basis = complete_orthonormal_basis(basis, ranks[m])
        factors[m] = basis
    core = z
    for n, u in enumerate(factors):
        core = mode_multiply(core, u.T, n)
    return TuckerModel(core, factors)


def tucker_complete(t_h: np.ndarray, q_h: np.ndarray, ranks: Sequence[int],
                    cfg: FitConfig | None = None) -> tuple[TuckerModel, CostTrace]:
    """Fit a fixed-rank Tucker model to the observed entries of t_h.

    Parameters
    ----------
    t_h : data tensor (values at unobserved positions are ignored)
    q_h : observation mask, True where t_h is known
    ranks : target multilinear rank, one entry per mode
    cfg : loop control; see :class:`FitConfig`

    Returns the fitted model and the cost trace, one ``(sweep, cost)`` entry
    per outer iteration starting at sweep 0 (the random initialization).  The
    trace is monotonically non-increasing.
    """
    cfg = cfg or FitConfig()
    t_h = np.asarray(t_h, dtype=np.float64)
    q_h = np.asarray(q_h, dtype=bool)
    model = init_model(ranks, t_h.shape, cfg.seed)
    x = model.reconstruct()
    f = cost(t_h, q_h, x)
    f_first = f
    trace: CostTrace = [(0, f)] if cfg.cost_record else []
    for sweep in range(1, cfg.max_sweeps + 1):
        z = auxiliary_fill(t_h, q_h, x)
        model = als_sweep(z, model)
        x = model.reconstruct()
        f_new = cost(t_h, q_h, x)
        if cfg.cost_record:
            trace.append((sweep, f_new))
        converged = abs(f - f_new) <= cfg.conv_tol * max(1.0, f_first)
        f = f_new
        if converged:
            break
    return model, trace
