"""Rank-increment driver: grows multilinear ranks mode by mode.

Fitting starts at rank one everywhere.  Whenever the masked cost plateaus,
the mode whose projected residual is largest gets its rank advanced along a
per-mode sequence, the factor is padded with fresh orthonormal columns and
the core with zeros (so the reconstruction is untouched), and sweeping
resumes from that warm start.  The run stops when the cost drops below the
noise threshold, the sequences are exhausted, or the sweep budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import check_shape, mode_multiply
from .completion import CostTrace, TuckerModel, als_sweep, auxiliary_fill, cost, init_model
from .linalg import apply_sign_convention

# Terminal statuses of a rank-increment run.
CONVERGED = "converged"            # masked cost reached epsilon
SCHEDULE_EXHAUSTED = "schedule_exhausted"  # every sequence at its last entry, epsilon not reached
SWEEP_BUDGET = "sweep_budget"      # max_total_sweeps spent

# Stopping thresholds as fractions of the observed energy, used when the
# caller does not supply absolute values.
DEFAULT_EPSILON_REL = 1e-4
DEFAULT_TOL_REL = 1e-6
DEFAULT_MAX_TOTAL_SWEEPS = 10_000


class ScheduleExhaustedError(RuntimeError):
    """Raised when an increment is requested but no mode has rank headroom."""


@dataclass
class RankSchedule:
    """Per-mode rank sequences with a cursor into each."""

    sequences: tuple[tuple[int, ...], ...]
    cursors: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.sequences = tuple(tuple(int(r) for r in seq) for seq in self.sequences)
        for m, seq in enumerate(self.sequences):
            if not seq:
                raise ValueError(f"mode {m} has an empty rank sequence")
            if any(b <= a for a, b in zip(seq, seq[1:])):
                raise ValueError(f"mode {m} sequence {seq} is not strictly increasing")
        if not self.cursors:
            self.cursors = [0] * len(self.sequences)
        if len(self.cursors) != len(self.sequences):
            raise ValueError("one cursor per sequence required")
        for m, k in enumerate(self.cursors):
            if not 0 <= k < len(self.sequences[m]):
                raise ValueError(f"cursor {k} out of range for mode {m}")

    @property
    def order(self) -> int:
        return len(self.sequences)

    def current_ranks(self) -> tuple[int, ...]:
        return tuple(seq[k] for seq, k in zip(self.sequences, self.cursors))

    def has_headroom(self, mode: int) -> bool:
        return self.cursors[mode] < len(self.sequences[mode]) - 1

    def advance(self, mode: int) -> int:
        """Move one mode's cursor forward; returns the new rank."""
        if not self.has_headroom(mode):
            raise ScheduleExhaustedError(f"mode {mode} already at its final rank "
                                         f"{self.sequences[mode][-1]}")
        self.cursors[mode] += 1
        return self.sequences[mode][self.cursors[mode]]

    def copy(self) -> "RankSchedule":
        return RankSchedule(self.sequences, list(self.cursors))


@dataclass
class StoppingCriteria:
    """Thresholds for the rank-increment loop.

    epsilon: terminal masked-cost threshold (squared Frobenius units).
    tol: plateau detector |f_after - f_before| <= tol triggers an increment.
    """

    epsilon: float
    tol: float
    max_total_sweeps: int = DEFAULT_MAX_TOTAL_SWEEPS

    def __post_init__(self):
        if self.epsilon < 0 or self.tol < 0:
            raise ValueError("epsilon and tol must be nonnegative")
        if self.max_total_sweeps < 1:
            raise ValueError("max_total_sweeps must be >= 1")


def default_stopping_criteria(t_h: np.ndarray, q_h: np.ndarray,
                              epsilon_rel: float = DEFAULT_EPSILON_REL,
                              tol_rel: float = DEFAULT_TOL_REL,
                              max_total_sweeps: int = DEFAULT_MAX_TOTAL_SWEEPS,
                              ) -> StoppingCriteria:
    """Thresholds scaled to the observed energy, so they transfer across data scales."""
    t_h = np.asarray(t_h, dtype=np.float64)
    observed = t_h[np.asarray(q_h, dtype=bool)]
    energy = float(observed @ observed)
    return StoppingCriteria(epsilon=epsilon_rel * energy, tol=tol_rel * energy,
                            max_total_sweeps=max_total_sweeps)


def default_rank_sequences(embedded_shape: Sequence[int]) -> RankSchedule:
    """Doubling sequences 1, 2, 4, ... capped at each mode size.

    Early increments stay small where the spectrum falls fastest; singleton
    modes get the one-element sequence (1,).
    """
    shape = check_shape(embedded_shape)
    sequences = []
    for j in shape:
        seq = [1]
        while seq[-1] * 2 < j:
            seq.append(seq[-1] * 2)
        if seq[-1] < j:
            seq.append(j)
        sequences.append(tuple(seq))
    return RankSchedule(tuple(sequences))


def mode_residuals(t_h: np.ndarray, q_h: np.ndarray, x: np.ndarray,
                   factors: Sequence[np.ndarray]) -> list[float]:
    """Masked residual energy visible through every factor except one.

    value_m = || masked residual projected onto all factors but mode m ||_F^2,
    a proxy for how much cost reduction a rank bump on mode m can buy.
    """
    t_h = np.asarray(t_h)
    x = np.asarray(x)
    if t_h.shape != x.shape or t_h.shape != np.asarray(q_h).shape:
        raise ValueError(f"mode_residuals: shapes differ: data {t_h.shape}, "
                         f"mask {np.asarray(q_h).shape}, model {x.shape}")
    r = np.where(np.asarray(q_h, dtype=bool), t_h - x, 0.0)
    values = []
    for m in range(r.ndim):
        w = r
        for n, u in enumerate(factors):
            if n != m:
                w = mode_multiply(w, np.asarray(u).T, n)
        flat = w.ravel()
        values.append(float(flat @ flat))
    return values


def select_increment_mode(residuals: Sequence[float], schedule: RankSchedule) -> int:
    """Pick the mode to grow: largest residual among growable modes.

    A mode must have sequence headroom, and is skipped while its current rank
    already reaches the product of the other modes' ranks (a Tucker core
    cannot use rank beyond that bound, so growing it cannot reduce the cost;
    unchecked, such no-op increments re-trigger the plateau detector and
    cascade one mode to saturation).  If the bound excludes every growable
    mode, as at the all-ones start, plain headroom applies.  Ties go to the
    lowest mode index.
    """
    if len(residuals) != schedule.order:
        raise ValueError(f"{len(residuals)} residuals for {schedule.order} modes")
    headroom = [m for m in range(schedule.order) if schedule.has_headroom(m)]
    if not headroom:
        raise ScheduleExhaustedError("schedule exhausted: every mode is at its final rank")
    ranks = schedule.current_ranks()
    total = int(np.prod(ranks, dtype=np.int64))
    eligible = [m for m in headroom if ranks[m] < total // ranks[m]]
    if not eligible:
        eligible = headroom
    best = max(residuals[m] for m in eligible)
    return min(m for m in eligible if residuals[m] == best)


def pad_model(model: TuckerModel, mode: int, new_rank: int, seed) -> TuckerModel:
    """Warm start at a higher rank: extend one factor, zero-pad the core.

    The added factor columns are random, orthonormalized against the existing
    ones; the matching core slices are zero, so the padded model reconstructs
    exactly the same tensor as the input model.
    """
    u = model.factors[mode]
    rows, r_old = u.shape
    if not r_old < new_rank <= rows:
        raise ValueError(f"new rank {new_rank} out of range ({r_old}, {rows}] on mode {mode}")
    rng = np.random.default_rng(seed)
    extra = rng.standard_normal((rows, new_rank - r_old))
    extra -= u @ (u.T @ extra)
    extra, _ = np.linalg.qr(extra)
    # second projection pass guards against loss of orthogonality to u
    extra -= u @ (u.T @ extra)
    extra, _ = np.linalg.qr(extra)
    padded = np.hstack([u, apply_sign_convention(extra)])

    pad_shape = list(model.core.shape)
    pad_shape[mode] = new_rank - r_old
    core = np.concatenate([model.core, np.zeros(pad_shape)], axis=mode)
    factors = list(model.factors)
    factors[mode] = padded
    return TuckerModel(core, factors)


@dataclass
class RankIncrementResult:
    model: TuckerModel
    cost_trace: CostTrace
    # (sweep index at which the increment fired, mode, new rank)
    rank_history: list[tuple[int, int, int]]
    status: str

    @property
    def terminal_ranks(self) -> tuple[int, ...]:
        return self.model.ranks


def complete_with_rank_increment(t_h: np.ndarray, q_h: np.ndarray,
                                 schedule: RankSchedule,
                                 criteria: StoppingCriteria,
                                 seed=0) -> RankIncrementResult:
    """Complete t_h by Tucker fitting with automatic rank growth.

    Runs single sweeps of the fixed-rank fit; when two consecutive costs
    differ by at most ``criteria.tol``, one mode's rank is advanced (see
    :func:`select_increment_mode`) and the model is padded in place of a cold
    restart.  Stops as soon as the masked cost is <= ``criteria.epsilon``,
    returning status ``converged``; running out of rank headroom or sweeps
    gives ``schedule_exhausted`` / ``sweep_budget`` instead of an error.

    The cost trace spans the whole run and is monotonically non-increasing,
    including across increments (padding preserves the reconstruction).
    """
    t_h = np.asarray(t_h, dtype=np.float64)
    q_h = np.asarray(q_h, dtype=bool)
    if t_h.shape != q_h.shape:
        raise ValueError(f"data shape {t_h.shape} differs from mask shape {q_h.shape}")
    if schedule.order != t_h.ndim:
        raise ValueError(f"schedule covers {schedule.order} modes, tensor has {t_h.ndim}")
    for m, seq in enumerate(schedule.sequences):
        if seq[-1] > t_h.shape[m]:
            raise ValueError(f"mode {m} sequence tops out at {seq[-1]} but the mode "
                             f"has size {t_h.shape[m]}")

    schedule = schedule.copy()
    model = init_model(schedule.current_ranks(), t_h.shape, seed)
    x = model.reconstruct()
    f_before = cost(t_h, q_h, x)
    trace: CostTrace = [(0, f_before)]
    history: list[tuple[int, int, int]] = []
    if f_before <= criteria.epsilon:
        return RankIncrementResult(model, trace, history, CONVERGED)

    status = SWEEP_BUDGET
    pads = 0
    for sweep in range(1, criteria.max_total_sweeps + 1):
        z = auxiliary_fill(t_h, q_h, x)
        model = als_sweep(z, model)
        x = model.reconstruct()
        f_after = cost(t_h, q_h, x)
        trace.append((sweep, f_after))
        if f_after <= criteria.epsilon:
            status = CONVERGED
            break
        if abs(f_after - f_before) <= criteria.tol:
            if not any(schedule.has_headroom(m) for m in range(schedule.order)):
                status = SCHEDULE_EXHAUSTED
                break
            residuals = mode_residuals(t_h, q_h, x, model.factors)
            mode = select_increment_mode(residuals, schedule)
            new_rank = schedule.advance(mode)
            pads += 1
            model = pad_model(model, mode, new_rank, seed=(seed, pads))
            history.append((sweep, mode, new_rank))
        # Padding leaves the reconstruction (hence the cost) unchanged, so the
        # post-pad reference cost equals f_after either way.
        f_before = f_after
    return RankIncrementResult(model, trace, history, status)
