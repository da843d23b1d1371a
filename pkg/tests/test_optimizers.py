"""Optimizers: unit oracles for the pieces, reduction equivalence, determinism."""

from __future__ import annotations

import numpy as np
import pytest

from llmopt import benchmarks as bm
from llmopt import optimizers as op
from llmopt.metrics import AoccBounds, aocc


def fresh(fid=1, iid=0, d=2, budget=200, seed=0):
    return bm.BudgetedEvaluator(bm.make_instance(fid, iid, d, master_seed=seed), budget)


def test_default_parameters():
    p = op.EradsParams()
    assert (p.pop_size, p.cr, p.f_init, p.f_final, p.memory_factor) == (
        50, 0.95, 0.55, 0.85, 0.3,
    )
    assert p.memory_on_best_improvement is False


def test_optimized_presets_exact():
    t5 = op.ERADS_PRESETS["5d"]
    t10 = op.ERADS_PRESETS["10d"]
    t20 = op.ERADS_PRESETS["20d"]
    assert (t5.pop_size, t5.cr, t5.f_init, t5.f_final, t5.memory_factor) == (
        48, 0.9893, 0.7469, 0.1636, 0.1043,
    )
    assert (t10.pop_size, t10.cr, t10.f_init, t10.f_final, t10.memory_factor) == (
        77, 0.8511, 0.5500, 0.7587, 0.7501,
    )
    assert (t20.pop_size, t20.cr, t20.f_init, t20.f_final, t20.memory_factor) == (
        75, 0.8556, 0.5605, 0.7317, 0.7534,
    )
    assert op.ERADS_PRESETS["default"] == op.EradsParams()


def test_params_validation():
    with pytest.raises(bm.DomainError):
        op.EradsParams(pop_size=3)
    with pytest.raises(bm.DomainError):
        op.EradsParams(cr=1.5)
    with pytest.raises(bm.DomainError):
        op.EradsParams(memory_factor=-0.1)


def test_f_schedule_endpoints_and_midpoint():
    p = op.EradsParams()
    assert op.f_schedule(0, 1000, p) == 0.55
    assert op.f_schedule(1000, 1000, p) == 0.85
    assert op.f_schedule(500, 1000, p) == pytest.approx(0.70)
    with pytest.raises(bm.DomainError):
        op.f_schedule(0, 0, p)


def test_schedule_stays_between_endpoints():
    p = op.EradsParams(f_init=0.9, f_final=0.2)  # decreasing is fine too
    vals = [op.f_schedule(t, 100, p) for t in range(101)]
    assert all(0.2 - 1e-12 <= v <= 0.9 + 1e-12 for v in vals)


def test_mutant_formula():
    x = np.array([1.0, -2.0])
    assert np.array_equal(op.erads_mutant(x, x, x, x, np.zeros(2), 0.7, 0.3), x)
    got = op.erads_mutant(
        np.zeros(2), np.zeros(2), np.zeros(2), np.array([1.0, 0.0]),
        np.zeros(2), 0.5, 0.0,
    )
    assert np.allclose(got, [0.5, 0.0])
    # memory enters scaled by both factors
    got = op.erads_mutant(
        np.zeros(2), np.zeros(2), np.zeros(2), np.zeros(2),
        np.array([2.0, 0.0]), 0.5, 0.3,
    )
    assert np.allclose(got, [0.3, 0.0])


def test_mutant_clipped_to_box():
    big = np.array([7.0, -9.0])
    got = op.erads_mutant(big, big, big, big, np.zeros(2), 0.5, 0.0)
    assert np.array_equal(got, [5.0, -5.0])
    with pytest.raises(bm.DomainError):
        op.erads_mutant(np.zeros(2), np.zeros(3), np.zeros(2), np.zeros(2), np.zeros(2), 0.5, 0.0)


def test_crossover_extremes():
    rng = np.random.default_rng(0)
    m = np.ones(8)
    t = np.zeros(8)
    assert np.array_equal(op.binomial_crossover(m, t, 1.0, rng), m)
    trial = op.binomial_crossover(m, t, 0.0, rng)
    assert trial.sum() == 1.0  # forced index only


def test_crossover_rate_concentration():
    rng = np.random.default_rng(42)
    trial = op.binomial_crossover(np.ones(1000), np.zeros(1000), 0.5, rng)
    assert 0.45 <= trial.mean() <= 0.55


def test_memory_update_formula():
    z = np.zeros(2)
    assert np.array_equal(op.erads_memory_update(z, 0.3, 0.5, z, z), z)
    got = op.erads_memory_update(
        np.array([1.0, 1.0]), 0.3, 0.5, np.array([2.0, 0.0]), np.array([0.0, 0.0])
    )
    assert np.allclose(got, [1.0, 0.7])
    m = np.array([0.4, -0.2])
    assert np.array_equal(op.erads_memory_update(m, 0.0, 0.9, np.ones(2), np.zeros(2)), m)


# --- full runs ----------------------------------------------------------------


def rand_to_best_oracle(instance, budget, seed, n=50, f=0.5, cr=0.95):
    """Independent flat-loop DE/rand-to-best/1/bin with fixed F.

    Mirrors the documented draw order: init population, then per candidate
    three partners via choice(pool-without-i), crossover mask, forced index.
    """
    rng = np.random.default_rng(seed)
    d = instance.dimension
    pop = rng.uniform(-5.0, 5.0, (n, d))
    fit = np.empty(n)
    trace = []
    best = np.inf
    for i, row in enumerate(pop):
        fit[i] = bm.evaluate(instance, row)
        best = min(best, fit[i])
        trace.append(best)
    used = n
    bi = int(np.argmin(fit))
    f_opt = fit[bi]
    while used < budget:
        for i in range(n):
            pool = np.array([j for j in range(n) if j != i])
            a, b, c = rng.choice(pool, size=3, replace=False)
            v = pop[a] + f * (pop[bi] - pop[a] + pop[b] - pop[c])
            v = np.clip(v, -5.0, 5.0)
            mask = rng.random(d) < cr
            mask[int(rng.integers(d))] = True
            trial = np.where(mask, v, pop[i])
            ft = bm.evaluate(instance, trial)
            used += 1
            best = min(best, ft)
            trace.append(best)
            if ft < fit[i]:
                pop[i] = trial
                fit[i] = ft
                if ft < f_opt:
                    f_opt = ft
                    bi = i
            if used >= budget:
                break
    return np.asarray(trace)


def test_erads_reduces_to_rand_to_best():
    p = op.EradsParams(memory_factor=0.0, f_init=0.5, f_final=0.5)
    for seed in range(5):
        inst = bm.make_instance(3, 1, 2, master_seed=11)
        ev = bm.BudgetedEvaluator(inst, 200)
        got = op.run_erads(p, ev, seed).trajectory.best_precision
        want = rand_to_best_oracle(inst, 200, seed)
        assert np.array_equal(got, want), f"seed {seed} diverged"


def test_erads_deterministic_and_monotone():
    a = op.run_erads(None, fresh(fid=15, iid=2, d=4, seed=5), seed=9)
    b = op.run_erads(None, fresh(fid=15, iid=2, d=4, seed=5), seed=9)
    assert np.array_equal(a.trajectory.best_precision, b.trajectory.best_precision)
    assert np.array_equal(a.best_x, b.best_x)
    trace = a.trajectory.best_precision
    assert len(trace) == 200
    assert np.all(np.diff(trace) <= 0)
    c = op.run_erads(None, fresh(fid=15, iid=2, d=4, seed=5), seed=10)
    assert not np.array_equal(a.trajectory.best_precision, c.trajectory.best_precision)


def test_erads_budget_equal_population_only_initializes():
    res = op.run_erads(None, fresh(budget=50), seed=1)
    assert len(res.trajectory.best_precision) == 50


def test_erads_rejects_budget_below_population():
    with pytest.raises(bm.DomainError):
        op.run_erads(None, fresh(budget=49), seed=1)
    with pytest.raises(bm.DomainError):
        op.run_de(fresh(budget=10), seed=1)


def test_best_f_matches_trace_minimum():
    res = op.run_erads(None, fresh(fid=8, iid=1, d=3, budget=300), seed=2)
    assert res.best_f == pytest.approx(res.trajectory.best_precision.min())
    assert res.trajectory.fid == 8
    assert res.trajectory.iid == 1
    assert res.trajectory.run_seed == 2


class _RecordingEvaluator(bm.BudgetedEvaluator):
    def __init__(self, *a, **k):
        super().__init__(*a, **k)
        self.points = []

    def spend(self, x):
        self.points.append(np.array(x, dtype=float))
        return super().spend(x)


def test_all_queried_points_stay_in_bounds():
    for runner in (
        lambda ev: op.run_erads(None, ev, 3),
        lambda ev: op.run_de(ev, 3),
        lambda ev: op.run_random_search(ev, 3),
    ):
        ev = _RecordingEvaluator(bm.make_instance(6, 1, 3, master_seed=2), 180)
        runner(ev)
        pts = np.vstack(ev.points)
        assert np.all(pts >= -5.0) and np.all(pts <= 5.0)


def test_erads_solves_sphere_at_full_budget():
    ev = fresh(fid=1, iid=0, d=5, budget=10_000)
    res = op.run_erads(None, ev, seed=0)
    assert res.trajectory.best_precision[-1] < 1e-8


def test_de_solves_sphere_reasonably():
    ev = fresh(fid=1, iid=0, d=5, budget=10_000)
    res = op.run_de(ev, seed=0)
    assert res.trajectory.best_precision[-1] < 1e-6
    b = op.run_de(fresh(fid=1, iid=0, d=5, budget=10_000), seed=0)
    assert np.array_equal(res.trajectory.best_precision, b.trajectory.best_precision)


def test_random_search_contract():
    ev = fresh(fid=5, iid=1, d=3, budget=400)
    res = op.run_random_search(ev, seed=7)
    trace = res.trajectory.best_precision
    assert len(trace) == 400
    assert np.all(np.diff(trace) <= 0)
    again = op.run_random_search(fresh(fid=5, iid=1, d=3, budget=400), seed=7)
    assert np.array_equal(trace, again.trajectory.best_precision)


def test_random_search_loses_to_erads_on_linear_slope():
    bounds = AoccBounds(budget=500)
    rs, er = [], []
    for seed in range(5):
        rs.append(aocc(op.run_random_search(fresh(5, 1, 5, 500), seed).trajectory, bounds))
        er.append(aocc(op.run_erads(None, fresh(5, 1, 5, 500), seed).trajectory, bounds))
    assert np.mean(rs) < np.mean(er)


def test_run_named_dispatch():
    a = op.run_named("random_search", fresh(budget=60), seed=4)
    b = op.run_random_search(fresh(budget=60), seed=4)
    assert np.array_equal(a.trajectory.best_precision, b.trajectory.best_precision)
    op.run_named("erads", fresh(budget=60), seed=4, erads_params=op.EradsParams(pop_size=10))
    op.run_named("de", fresh(budget=60), seed=4)
    with pytest.raises(bm.DomainError):
        op.run_named("cma", fresh(budget=60), seed=4)


def test_memory_trigger_flag_changes_search():
    ps = op.EradsParams()
    flipped = op.EradsParams(memory_on_best_improvement=True)
    a = op.run_erads(ps, fresh(fid=10, iid=1, d=4, budget=300), seed=6)
    b = op.run_erads(flipped, fresh(fid=10, iid=1, d=4, budget=300), seed=6)
    # same draws, different memory dynamics -> different search paths
    assert not np.array_equal(a.trajectory.best_precision, b.trajectory.best_precision)
