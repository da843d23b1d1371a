"""Anytime performance metrics.

The core score is the area over the convergence curve (AOCC) of a best-so-far
precision trajectory: precisions are log10-scaled, clipped to [1e-8, 1e2],
normalized to [0, 1] and averaged over the evaluation budget. Higher is
better. Aggregation is an unweighted mean over function-instance cells, then
mean and population standard deviation over independent repetitions.

Empirical attainment functions (EAF) over a log-spaced target grid give the
same picture as a curve; their area under the curve converges to the AOCC as
the grid gets dense.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .benchmarks import DomainError, group_of

AOCC_LB = 1e-8
AOCC_UB = 1e2
N_GROUPS = 5


@dataclass(frozen=True)
class AoccBounds:
    """Clip bounds and budget for trajectory scoring."""

    lb: float = AOCC_LB
    ub: float = AOCC_UB
    budget: int = 0

    def __post_init__(self):
        if not 0 < self.lb < self.ub:
            raise DomainError(f"need 0 < lb < ub, got lb={self.lb}, ub={self.ub}")
        if self.budget < 1:
            raise DomainError(f"budget must be >= 1, got {self.budget}")


@dataclass(frozen=True)
class Trajectory:
    """Best-so-far precision per evaluation, with run routing metadata."""

    best_precision: np.ndarray
    fid: int = 0
    iid: int = 0
    run_seed: int = 0

    def __len__(self) -> int:
        return len(self.best_precision)


@dataclass(frozen=True)
class QualityReport:
    """Mean/std of the aggregated score, optional per-group breakdown."""

    mean: float
    std: float
    per_group_mean: tuple[float, ...] | None = None
    per_group_std: tuple[float, ...] | None = None
    error_text: str | None = None


@dataclass(frozen=True)
class EafCurve:
    budgets: np.ndarray
    fraction: np.ndarray
    target_grid: np.ndarray


def _values(traj) -> np.ndarray:
    vals = getattr(traj, "best_precision", traj)
    arr = np.asarray(vals, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"trajectory must be 1-d, got shape {arr.shape}")
    return arr


def pad_trajectory(values, budget: int) -> np.ndarray:
    """Extend a short trajectory to full budget with its final best value."""
    arr = _values(values)
    if arr.size == 0:
        raise DomainError("cannot pad an empty trajectory")
    if arr.size > budget:
        raise DomainError(f"trajectory length {arr.size} exceeds budget {budget}")
    if arr.size == budget:
        return arr
    return np.concatenate([arr, np.full(budget - arr.size, arr[-1])])


def aocc(traj, bounds: AoccBounds | None = None) -> float:
    """Area over the convergence curve of one trajectory, in [0, 1].

    Each best-so-far precision is clipped to [lb, ub], log10-scaled, mapped
    to a [0, 1] closeness-to-target score and averaged over the budget. A
    trajectory shorter than the budget counts as if its last value persisted.
    """
    arr = _values(traj)
    if arr.size == 0:
        raise DomainError("aocc of an empty trajectory")
    if bounds is None:
        bounds = AoccBounds(budget=arr.size)
    arr = pad_trajectory(arr, bounds.budget)
    llb, lub = np.log10(bounds.lb), np.log10(bounds.ub)
    scaled = np.log10(np.clip(arr, bounds.lb, bounds.ub))
    return float(np.mean(1.0 - (scaled - llb) / (lub - llb)))


def aggregate_aocc(
    cells: Mapping[tuple[int, int], float],
    instances: Sequence[int] | None = None,
    fids: Sequence[int] | None = None,
) -> float:
    """Unweighted mean over the (function, instance) grid.

    By default every function id 1..24 must be present for every instance
    index (the full-suite aggregation); a smaller experiment passes its own
    fid list. The instance set is taken from the mapping itself when not
    given explicitly, and holes in the grid are an error either way.
    """
    if not cells:
        raise DomainError("no cells to aggregate")
    if instances is None:
        instances = sorted({iid for _, iid in cells})
    if fids is None:
        fids = range(1, 25)
    holes = [
        (fid, iid)
        for fid in fids
        for iid in instances
        if (fid, iid) not in cells
    ]
    if holes:
        raise DomainError(f"missing cells: {holes[:6]}{'...' if len(holes) > 6 else ''}")
    grid = [cells[(fid, iid)] for fid in fids for iid in instances]
    return float(np.mean(grid))


def _group_fids(group: int) -> list[int]:
    return [fid for fid in range(1, 25) if group_of(fid) == group]


def _mean_std(values) -> tuple[float, float]:
    """Mean and population std; bit-identical inputs give exactly (v, 0.0)."""
    arr = np.asarray(values, dtype=float)
    if np.ptp(arr) == 0.0:
        return float(arr[0]), 0.0
    return float(np.mean(arr)), float(np.std(arr))


def quality(
    repetitions: Sequence,
    detailed: bool = False,
    instances: Sequence[int] | None = None,
    fids: Sequence[int] | None = None,
) -> QualityReport:
    """Mean and population std of the aggregate score over k repetitions.

    Accepts either k pre-aggregated scalars, or k cell mappings
    (fid, iid) -> score; cell mappings are required for the detailed
    per-group breakdown (5 means, 5 stds, in group order).
    """
    if len(repetitions) == 0:
        raise DomainError("need at least one repetition")
    scalar_reps = not isinstance(repetitions[0], Mapping)
    if scalar_reps:
        if detailed:
            raise DomainError("detailed quality needs per-cell scores, got scalars")
        return QualityReport(*_mean_std(repetitions))

    scores = [aggregate_aocc(cells, instances, fids) for cells in repetitions]
    if not detailed:
        return QualityReport(*_mean_std(scores))

    group_means, group_stds = [], []
    for group in range(1, N_GROUPS + 1):
        members = set(_group_fids(group))
        per_rep = []
        for cells in repetitions:
            vals = [v for (fid, _), v in cells.items() if fid in members]
            if not vals:
                raise DomainError(
                    f"detailed quality needs cells in every group; group {group} is empty"
                )
            per_rep.append(float(np.mean(vals)))
        m, s = _mean_std(per_rep)
        group_means.append(m)
        group_stds.append(s)
    mean, std = _mean_std(scores)
    return QualityReport(mean, std, tuple(group_means), tuple(group_stds))


def target_grid(lb: float = AOCC_LB, ub: float = AOCC_UB, n_targets: int = 101) -> np.ndarray:
    """Log-spaced precision targets, endpoints inclusive."""
    if n_targets < 2:
        raise DomainError(f"need at least 2 targets, got {n_targets}")
    return np.logspace(np.log10(lb), np.log10(ub), n_targets)


def eaf(
    trajectories: Sequence,
    bounds: AoccBounds,
    n_targets: int = 101,
) -> EafCurve:
    """Empirical attainment: fraction of (run, target) pairs attained by budget b.

    A run attains a target t at budget b when its best precision after b
    evaluations is <= t. Short runs are padded with their final value.
    """
    if len(trajectories) == 0:
        raise DomainError("eaf of an empty run set")
    targets = target_grid(bounds.lb, bounds.ub, n_targets)
    budgets = np.arange(1, bounds.budget + 1)
    total = np.zeros(bounds.budget)
    for traj in trajectories:
        arr = pad_trajectory(traj, bounds.budget)
        total += np.sum(arr[:, None] <= targets[None, :], axis=1)
    fraction = total / (len(trajectories) * n_targets)
    return EafCurve(budgets=budgets, fraction=fraction, target_grid=targets)


def eaf_auc(curve: EafCurve) -> float:
    """Area under the attainment curve on the evaluation axis, in [0, 1].

    The EAF is a step function that changes at the listed budgets; the
    integral sums fraction[i] over the step ending at budgets[i] and is
    normalized by the final budget, so a fraction constantly 1 gives exactly 1.
    """
    budgets = np.asarray(curve.budgets, dtype=float)
    fraction = np.asarray(curve.fraction, dtype=float)
    if budgets.size == 0:
        raise DomainError("empty curve")
    widths = np.diff(np.concatenate([[0.0], budgets]))
    return float(np.sum(fraction * widths) / budgets[-1])
