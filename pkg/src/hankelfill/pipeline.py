"""End-to-end recovery: embed, complete in embedded space, invert.

The three steps are (1) multi-way delay embedding of the data and its mask,
(2) Tucker completion of the embedded tensor, at a fixed multilinear rank or
with automatic rank growth, and (3) the inverse embedding of the completed
tensor back to the input shape.  Observed entries also pass through the
model, so the output is everywhere the model's explanation of the data
rather than a patchwork of input and fill.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .completion import CostTrace, FitConfig, tucker_complete
from .core import as_mask, as_tensor
from .embedding import EmbeddingSpec, inverse_mdt, mdt, mdt_mask
from .metrics import psnr, snr
from .ranking import (RankSchedule, StoppingCriteria, complete_with_rank_increment,
                      default_rank_sequences, default_stopping_criteria)

FIXED_RANK = "fixed_rank"

# Default ceiling on the embedded element count; delay embedding expands the
# data volume by roughly prod(tau_n), which gets out of hand quickly.
DEFAULT_EMBEDDED_CAP = 200_000_000


@dataclass
class RecoveryRequest:
    """Inputs of one recovery run.

    ``schedule`` selects the completion strategy: a :class:`RankSchedule`
    (or None for the default doubling sequences) runs rank increment; a
    plain tuple of ints runs the fixed-rank fit at exactly those embedded
    ranks.  ``criteria`` defaults to thresholds relative to the observed
    energy.
    """

    data: np.ndarray
    mask: np.ndarray
    taus: tuple[int, ...]
    schedule: RankSchedule | Sequence[int] | None = None
    criteria: StoppingCriteria | None = None
    seed: int = 0
    max_embedded_elements: int = DEFAULT_EMBEDDED_CAP


@dataclass
class RecoveryReport:
    estimate: np.ndarray
    ranks: tuple[int, ...]
    cost_trace: CostTrace
    rank_history: list[tuple[int, int, int]]
    status: str
    wall_time_s: float
    metrics: dict[str, float] | None = None


def recover(req: RecoveryRequest, ground_truth: np.ndarray | None = None,
            peak: float | None = None) -> RecoveryReport:
    """Run the full pipeline and return the estimate plus run diagnostics.

    With ``ground_truth`` given, the report carries rmse/snr against it
    (and psnr when ``peak`` is set).  The estimate has the input shape and
    is guaranteed finite.
    """
    started = time.perf_counter()
    data = as_tensor(req.data)
    mask = as_mask(req.mask)
    if data.shape != mask.shape:
        raise ValueError(f"data shape {data.shape} differs from mask shape {mask.shape}")
    spec = EmbeddingSpec(data.shape, tuple(req.taus))
    count = spec.embedded_element_count()
    if count > req.max_embedded_elements:
        expansion = int(np.prod(spec.taus, dtype=np.int64))
        raise ValueError(
            f"embedded tensor would hold {count} elements (a roughly {expansion}x "
            f"expansion of the input via windows {spec.taus}); the cap is "
            f"{req.max_embedded_elements}. Reduce the windows or raise "
            "max_embedded_elements.")

    t_h, spec = mdt(np.where(mask, data, 0.0), spec.taus)
    q_h = mdt_mask(mask, spec.taus)
    criteria = req.criteria or default_stopping_criteria(t_h, q_h)

    if req.schedule is not None and not isinstance(req.schedule, RankSchedule):
        fixed_ranks = tuple(int(r) for r in req.schedule)
        cfg = FitConfig(max_sweeps=criteria.max_total_sweeps, seed=req.seed)
        model, trace = tucker_complete(t_h, q_h, fixed_ranks, cfg)
        rank_history: list[tuple[int, int, int]] = []
        status = FIXED_RANK
    else:
        schedule = req.schedule if isinstance(req.schedule, RankSchedule) \
            else default_rank_sequences(t_h.shape)
        result = complete_with_rank_increment(t_h, q_h, schedule, criteria, seed=req.seed)
        model, trace = result.model, result.cost_trace
        rank_history, status = result.rank_history, result.status

    estimate = inverse_mdt(model.reconstruct(), spec)
    if not np.all(np.isfinite(estimate)):
        raise RuntimeError("recovery produced non-finite values")

    report = RecoveryReport(estimate=estimate, ranks=model.ranks, cost_trace=trace,
                            rank_history=rank_history, status=status,
                            wall_time_s=time.perf_counter() - started)
    if ground_truth is not None:
        truth = as_tensor(ground_truth)
        if truth.shape != estimate.shape:
            raise ValueError(f"ground truth shape {truth.shape} differs from "
                             f"estimate shape {estimate.shape}")
        scores = {"rmse": float(np.sqrt(np.mean((estimate - truth) ** 2))),
                  "snr_db": snr(truth, estimate)}
        if peak is not None:
            scores["psnr_db"] = psnr(truth, estimate, peak)
        report.metrics = scores
    return report
