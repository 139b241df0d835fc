import numpy as np
import pytest

from quadtune import harness
from quadtune.bbo import BboConfig
from quadtune.config import ConfigError, ExperimentConfig
from quadtune.pareto import ParetoFront, is_antichain
from quadtune.pso import PsoConfig


def small(alg="bbo", **kw):
    base = dict(
        algorithm=alg,
        trials=2,
        seed=5,
        t_final=3.0,
        pso=PsoConfig(population=8, iterations=3),
        bbo=BboConfig(population=8, iterations=3),
    )
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.fixture(scope="module")
def bbo_report():
    return harness.run_campaign(small())


@pytest.fixture(scope="module")
def nsbbo_report():
    return harness.run_campaign(small("nsbbo"))


def test_single_trial_stats_degenerate():
    rep = harness.run_campaign(small(trials=1))
    s = rep.stats
    assert s["min"] == s["max"] == s["mean"] and s["std"] == 0


def test_stats_recomputable(bbo_report):
    c = np.array([t.final_cost for t in bbo_report.trials])
    assert bbo_report.stats == {"min": c.min(), "max": c.max(), "mean": c.mean(), "std": c.std()}
    for t in bbo_report.trials:
        assert len(t.history) == 3 and t.seconds > 0
        assert t.history[-1] == t.final_cost


def test_campaign_deterministic(bbo_report):
    again = harness.run_campaign(small())
    assert np.array_equal(again.histories, bbo_report.histories)
    for a, b in zip(again.trials, bbo_report.trials):
        assert np.array_equal(a.best_genes, b.best_genes)
    for k in bbo_report.trajectories:
        assert np.array_equal(again.trajectories[k], bbo_report.trajectories[k], equal_nan=True)


def test_trials_use_distinct_seeds(bbo_report):
    assert bbo_report.trials[0].seed != bbo_report.trials[1].seed


def test_trajectory_stats_shape(bbo_report):
    mean, std = bbo_report.trajectory_stats("z")
    assert mean.shape == (301,) and std.shape == (301,)
    assert set(bbo_report.trajectories) == {"z", "theta", "phi", "thrust"}
    assert mean[0] == -1.0 and std[0] == 0


def test_pareto_campaign_front(nsbbo_report):
    front = nsbbo_report.combined_front()
    assert len(front) >= 1 and is_antichain(front.objectives)
    assert all(t.front is not None for t in nsbbo_report.trials)


def test_csv_round_trips(tmp_path, bbo_report, nsbbo_report):
    harness.write_campaign(bbo_report, tmp_path)
    table = harness.read_campaign_csv(tmp_path / "campaign.csv")
    H = bbo_report.histories
    assert np.array_equal(table[:, 1], H.mean(axis=0))
    assert np.array_equal(table[:, 2], H.std(axis=0))

    trials = harness.read_trials_csv(tmp_path / "trials.csv")
    for row, t in zip(trials, bbo_report.trials):
        assert row["final_cost"] == t.final_cost and row["seed"] == t.seed
        assert row["kp_phi"] == t.best_genes[0]

    header, data = harness.read_table_csv(tmp_path / "traj_thrust.csv")
    mean, std = bbo_report.trajectory_stats("thrust")
    assert header == ["t", "mean", "std", "log10_mean"]
    assert np.array_equal(data[:, 1], mean) and np.array_equal(data[:, 3], np.log10(mean))

    harness.write_campaign(nsbbo_report, tmp_path)
    front = nsbbo_report.combined_front()
    back = harness.read_front_csv(tmp_path / "front_nsbbo.csv")
    assert np.array_equal(back.objectives, front.objectives)
    assert np.array_equal(back.genes, front.genes)


def test_metrics_csv_round_trip(tmp_path):
    a = ParetoFront.from_arrays([[1, 3], [3, 1]])
    b = ParetoFront.from_arrays([[2, 4], [0.5, 5]])
    cmp = harness.compare_fronts({"a": a, "b": b})
    harness.write_metrics_csv(cmp, tmp_path / "m.csv")
    back = harness.read_metrics_csv(tmp_path / "m.csv")
    assert back.coverage == cmp.coverage and back.dominated == cmp.dominated
    assert back.hypervolume == cmp.hypervolume and back.sizes == cmp.sizes


def test_compare_identical_and_better_fronts():
    a = ParetoFront.from_arrays([[1, 3], [2, 2], [3, 1]])
    cmp = harness.compare_fronts({"a": a, "b": a})
    assert cmp.coverage[("a", "b")] == (3, 3) and cmp.coverage[("b", "a")] == (3, 3)
    worse = ParetoFront.from_arrays([[2, 4], [4, 2]])
    cmp = harness.compare_fronts({"a": a, "w": worse})
    assert cmp.coverage[("a", "w")] == (2, 2)
    assert cmp.coverage[("w", "a")] == (0, 3)
    assert cmp.dominated_percent("w") == 100 and cmp.dominated_percent("a") == 0
    table = harness.format_coverage_table(cmp)
    assert table[1][1] == "-" and table[-1][0] == "dominated %"


def test_dominated_percent_is_union_over_fronts():
    target = ParetoFront.from_arrays([[1, 5], [3, 3], [5, 1]])
    x = ParetoFront.from_arrays([[0.5, 4]])
    y = ParetoFront.from_arrays([[4, 0.5]])
    cmp = harness.compare_fronts({"t": target, "x": x, "y": y})
    assert cmp.dominated["t"] == (2, 3)


def test_compare_needs_two():
    with pytest.raises(ValueError):
        harness.compare_fronts({"a": ParetoFront.from_arrays([[1, 1]])})


def test_sweep_single_value_matches_campaign():
    cfg = small()
    rows = harness.sensitivity_sweep(cfg, "population", [8])
    stats = harness.run_campaign(cfg).stats
    assert len(rows) == 1 and rows[0].mean == stats["mean"] and rows[0].std == stats["std"]


def test_sweep_unknown_axis():
    with pytest.raises(ConfigError):
        harness.sensitivity_sweep(small(), "temperature", [1])


def test_sweep_axes_apply():
    cfg = harness._apply_axis(small(), "w", -0.2)
    assert cfg.pso.inertia == -0.2
    assert harness._apply_axis(small(), "emigration", "sinusoidal").bbo.emigration == "sinusoidal"
    assert harness._apply_axis(small(), "population", 12).bbo.population == 12


def test_timing_rows_identical_results():
    rows = harness.timing_comparison(small(trials=1), [1, 1, 3])
    assert all(np.array_equal(r.final_costs, rows[0].final_costs) for r in rows)
    assert all(r.seconds > 0 for r in rows)


def test_work_split_per_worker():
    assert harness.evaluations_per_worker(32, 4) == [8, 8, 8, 8]
    assert harness.evaluations_per_worker(3, 8) == [1, 1, 1]


def test_nsbbo_least_dominated_among_four_fronts():
    cfg = ExperimentConfig(trials=1, seed=2021)
    fronts = {alg: harness.run_campaign(cfg.with_(algorithm=alg)).combined_front()
              for alg in ("vebbo", "vepso", "nsbbo", "nspso")}
    cmp = harness.compare_fronts(fronts)
    pct = {n: cmp.dominated_percent(n) for n in cmp.names}
    assert min(pct, key=pct.get) == "nsbbo"
    assert len(harness.format_coverage_table(cmp)) == 6
