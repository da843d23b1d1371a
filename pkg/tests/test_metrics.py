"""Metrics: AOCC against a direct-sum oracle, aggregation, EAF brute force."""

from __future__ import annotations

import math
import statistics

import numpy as np
import pytest

from llmopt import metrics as mx
from llmopt.benchmarks import DomainError


def aocc_oracle(values, lb=1e-8, ub=1e2, budget=None):
    """Straight transcription of the score: flat loop, no numpy."""
    vals = list(values)
    budget = budget or len(vals)
    while len(vals) < budget:
        vals.append(vals[-1])
    total = 0.0
    for y in vals:
        ly = math.log10(min(max(y, lb), ub))
        total += 1.0 - (ly - math.log10(lb)) / (math.log10(ub) - math.log10(lb))
    return total / budget


def test_aocc_trivial_levels():
    b = mx.AoccBounds(budget=10)
    assert mx.aocc([200.0] * 10, b) == 0.0
    assert mx.aocc([1e2] * 10, b) == 0.0
    assert mx.aocc([1e-8] * 10, b) == 1.0
    assert mx.aocc([1e-12] * 10, b) == 1.0
    assert mx.aocc([1e-3] * 10, b) == pytest.approx(0.5, abs=1e-12)
    assert mx.aocc([1e-3] * 3, mx.AoccBounds(budget=3)) == pytest.approx(0.5, abs=1e-12)


def test_aocc_matches_direct_sum_oracle():
    rng = np.random.default_rng(123)
    for _ in range(100):
        n = int(rng.integers(1, 50))
        raw = 10.0 ** rng.uniform(-10, 4, n)
        traj = np.minimum.accumulate(raw)
        got = mx.aocc(traj, mx.AoccBounds(budget=n))
        assert got == pytest.approx(aocc_oracle(traj), abs=1e-12)


def test_aocc_pads_short_trajectories():
    b = mx.AoccBounds(budget=8)
    assert mx.aocc([1e-3, 1e-4], b) == pytest.approx(
        aocc_oracle([1e-3, 1e-4], budget=8), abs=1e-12
    )


def test_aocc_monotone_under_domination():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 40))
        y = np.minimum.accumulate(10.0 ** rng.uniform(-9, 3, n))
        better = y * rng.uniform(0.1, 1.0, n)
        better = np.minimum.accumulate(better)
        assert mx.aocc(better) >= mx.aocc(y) - 1e-15


def test_aocc_clipping_invariance():
    base = [50.0, 1.0, 1e-3]
    moved = [5e4, 1.0, 1e-3]
    b = mx.AoccBounds(budget=3)
    # values above ub can move around freely without changing the score
    assert mx.aocc(base, b) != mx.aocc(moved, b)  # 50 is inside the window
    assert mx.aocc([1e3, 1.0, 1e-3], b) == mx.aocc([1e8, 1.0, 1e-3], b)
    assert mx.aocc([1e3, 1.0, 1e-12], b) == mx.aocc([1e3, 1.0, 1e-8], b)


def test_aocc_takes_trajectory_objects():
    t = mx.Trajectory(np.array([1e-2, 1e-4]), fid=3, iid=1, run_seed=5)
    assert mx.aocc(t) == pytest.approx(aocc_oracle([1e-2, 1e-4]), abs=1e-12)
    assert len(t) == 2


def test_aocc_rejects_empty():
    with pytest.raises(DomainError):
        mx.aocc([])


def test_pad_trajectory_contract():
    assert list(mx.pad_trajectory([3.0, 1.0], 4)) == [3.0, 1.0, 1.0, 1.0]
    assert list(mx.pad_trajectory([3.0], 1)) == [3.0]
    with pytest.raises(DomainError):
        mx.pad_trajectory([], 3)
    with pytest.raises(DomainError):
        mx.pad_trajectory([1.0, 1.0], 1)


def test_bounds_validation():
    with pytest.raises(DomainError):
        mx.AoccBounds(lb=1.0, ub=0.5, budget=3)
    with pytest.raises(DomainError):
        mx.AoccBounds(budget=0)


# --- aggregation -------------------------------------------------------------


def full_grid(value_fn, instances=(1, 2, 3)):
    return {
        (fid, iid): value_fn(fid, iid) for fid in range(1, 25) for iid in instances
    }


def test_aggregate_flat_mean():
    cells = full_grid(lambda f, i: 0.5)
    assert mx.aggregate_aocc(cells) == 0.5
    cells = full_grid(lambda f, i: 1.0 if f <= 12 else 0.0)
    assert mx.aggregate_aocc(cells) == 0.5


def test_aggregate_matches_flat_loop_oracle():
    rng = np.random.default_rng(99)
    cells = full_grid(lambda f, i: float(rng.random()))
    oracle = sum(cells.values()) / len(cells)
    assert mx.aggregate_aocc(cells) == pytest.approx(oracle, abs=1e-14)


def test_aggregate_reports_holes():
    cells = full_grid(lambda f, i: 0.5)
    del cells[(13, 2)]
    with pytest.raises(DomainError, match=r"\(13, 2\)"):
        mx.aggregate_aocc(cells)
    with pytest.raises(DomainError):
        mx.aggregate_aocc({})


def test_aggregate_permutation_invariant():
    rng = np.random.default_rng(3)
    cells = full_grid(lambda f, i: float(rng.random()))
    shuffled = dict(reversed(list(cells.items())))
    assert mx.aggregate_aocc(cells) == mx.aggregate_aocc(shuffled)


# --- quality over repetitions -------------------------------------------------


def test_quality_population_std():
    r = mx.quality([0.7])
    assert (r.mean, r.std) == (0.7, 0.0)
    r = mx.quality([0.4, 0.6])
    assert r.mean == pytest.approx(0.5)
    assert r.std == pytest.approx(0.1)  # population, not sample
    assert r.std == pytest.approx(statistics.pstdev([0.4, 0.6]))
    assert r.per_group_mean is None


def test_quality_rejects_empty_and_detailed_scalars():
    with pytest.raises(DomainError):
        mx.quality([])
    with pytest.raises(DomainError):
        mx.quality([0.5], detailed=True)


def test_quality_detailed_groups_match_flat_oracle():
    rng = np.random.default_rng(17)
    reps = [full_grid(lambda f, i: float(rng.random())) for _ in range(3)]
    r = mx.quality(reps, detailed=True)
    assert len(r.per_group_mean) == 5
    assert len(r.per_group_std) == 5
    group_fids = {
        1: range(1, 6), 2: range(6, 10), 3: range(10, 15),
        4: range(15, 20), 5: range(20, 25),
    }
    for g, fids in group_fids.items():
        per_rep = [
            statistics.mean(v for (f, _), v in rep.items() if f in fids)
            for rep in reps
        ]
        assert r.per_group_mean[g - 1] == pytest.approx(statistics.mean(per_rep))
        assert r.per_group_std[g - 1] == pytest.approx(statistics.pstdev(per_rep))
    overall = [statistics.mean(rep.values()) for rep in reps]
    assert r.mean == pytest.approx(statistics.mean(overall))
    assert r.std == pytest.approx(statistics.pstdev(overall))


def test_quality_identical_repetitions_have_zero_std():
    cells = full_grid(lambda f, i: 0.25 + f / 100)
    r = mx.quality([cells, dict(cells), dict(cells)], detailed=True)
    assert r.std == 0.0
    assert all(s == 0.0 for s in r.per_group_std)


# --- EAF ----------------------------------------------------------------------


def eaf_oracle(trajs, lb, ub, budget, n_targets):
    """Brute-force double loop over runs and targets."""
    targets = np.logspace(math.log10(lb), math.log10(ub), n_targets)
    frac = []
    for b in range(1, budget + 1):
        hits = 0
        for traj in trajs:
            vals = list(traj) + [traj[-1]] * (budget - len(traj))
            best = min(vals[:b])
            for t in targets:
                if best <= t:
                    hits += 1
        frac.append(hits / (len(trajs) * n_targets))
    return np.asarray(frac)


def test_eaf_run_hitting_lb_attains_everything():
    b = mx.AoccBounds(budget=5)
    curve = mx.eaf([np.full(5, 1e-8)], b, n_targets=11)
    assert np.all(curve.fraction == 1.0)
    assert curve.budgets.tolist() == [1, 2, 3, 4, 5]


def test_eaf_run_stuck_above_ub_attains_nothing():
    b = mx.AoccBounds(budget=5)
    curve = mx.eaf([np.full(5, 300.0)], b, n_targets=11)
    assert np.all(curve.fraction == 0.0)


def test_eaf_matches_brute_force_oracle():
    rng = np.random.default_rng(31)
    trajs = [
        np.minimum.accumulate(10.0 ** rng.uniform(-9, 3, 20)) for _ in range(2)
    ]
    b = mx.AoccBounds(budget=20)
    curve = mx.eaf(trajs, b, n_targets=7)
    oracle = eaf_oracle(trajs, 1e-8, 1e2, 20, 7)
    assert np.allclose(curve.fraction, oracle, atol=1e-14)


def test_eaf_fraction_nondecreasing():
    rng = np.random.default_rng(8)
    trajs = [np.minimum.accumulate(10.0 ** rng.uniform(-9, 3, 30)) for _ in range(5)]
    curve = mx.eaf(trajs, mx.AoccBounds(budget=30))
    assert np.all(np.diff(curve.fraction) >= -1e-15)
    assert np.all((curve.fraction >= 0) & (curve.fraction <= 1))


def test_eaf_validation():
    with pytest.raises(DomainError):
        mx.eaf([], mx.AoccBounds(budget=5))
    with pytest.raises(DomainError):
        mx.eaf([np.ones(5)], mx.AoccBounds(budget=5), n_targets=1)


def test_eaf_auc_constant_curves():
    b = mx.AoccBounds(budget=9)
    assert mx.eaf_auc(mx.eaf([np.full(9, 1e-8)], b)) == 1.0
    assert mx.eaf_auc(mx.eaf([np.full(9, 500.0)], b)) == 0.0


def test_eaf_auc_sparse_grid_step_integral():
    curve = mx.EafCurve(
        budgets=np.array([2, 4]), fraction=np.array([0.5, 1.0]),
        target_grid=np.array([1e-8, 1e2]),
    )
    # steps: fraction 0.5 over budgets 1-2, fraction 1.0 over 3-4
    assert mx.eaf_auc(curve) == pytest.approx((0.5 * 2 + 1.0 * 2) / 4)


def test_eaf_auc_dense_grid_approaches_aocc():
    rng = np.random.default_rng(4)
    for _ in range(10):
        traj = np.minimum.accumulate(10.0 ** rng.uniform(-9, 3, 40))
        b = mx.AoccBounds(budget=40)
        auc = mx.eaf_auc(mx.eaf([traj], b, n_targets=1001))
        assert abs(auc - mx.aocc(traj, b)) <= 1e-2
