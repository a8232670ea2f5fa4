"""End-to-end smoke tests for the pathgat Python bindings."""

import json

import pytest

import pathgat


def test_simulate_and_roundtrip():
    cfg = pathgat.SimConfig()
    cfg.seed = 7
    trajs = pathgat.generate_dataset(cfg, 1)
    assert len(trajs) == 3
    assert sorted(t.condition for t in trajs) == ["Nutlin", "TP53sh", "WT"]
    for t in trajs:
        assert len(t.times_h) == 9
        assert all(v > 0 for row in t.values for v in row)

    csv = pathgat.trajectories_to_csv(trajs)
    back = pathgat.trajectories_from_csv(csv)
    assert len(back) == 3
    assert back[0].times_h == trajs[0].times_h


def test_simulation_is_deterministic():
    cfg = pathgat.SimConfig()
    cfg.seed = 11
    a = pathgat.generate_dataset(cfg, 1)
    b = pathgat.generate_dataset(cfg, 1)
    assert pathgat.trajectories_to_csv(a) == pathgat.trajectories_to_csv(b)


def test_errors_surface_as_python_exceptions():
    with pytest.raises(pathgat.DataError):
        pathgat.trajectories_from_csv("not,a,valid,header\n")
    cfg = pathgat.SimConfig()
    cfg.sample_times = [0.0, 2.0, 1.0]
    with pytest.raises(pathgat.DataError):
        pathgat.simulate(cfg)


def test_pathway_config():
    cfg = pathgat.PathwayConfig.canonical_p53()
    assert cfg.genes == ["TP53", "MDM2", "MDM4"]
    parsed = json.loads(cfg.to_json())
    assert len(parsed["edges"]) == 5


def _tiny_config():
    return json.dumps(
        {
            "sim_replicates": 1,
            "train": {
                "epochs": 25,
                "patience": 0,
                "validation_fraction": 0.0,
                "seeds": [0],
            },
            "gat": {"heads": 2, "head_dim": 2},
        }
    )


def test_run_loco_smoke():
    report = pathgat.run_loco(_tiny_config(), model_kind="mlp", seeds=1)
    csv = report.to_csv()
    assert csv.startswith("fold,seed,test_mse\n")
    assert report.overall_mean() > 0.0
    for cond in ["WT", "TP53sh", "Nutlin"]:
        assert report.fold_mean(cond) > 0.0


def test_discover_smoke():
    learned, report = pathgat.discover(_tiny_config(), seeds=1)
    assert learned.genes == ["TP53", "MDM2", "MDM4"]
    assert len(learned.score) == 3
    assert all(-1.0 <= v <= 1.0 for row in learned.score for v in row)
    assert report.num_edges == 5
    assert "true edges correct" in report.to_text()
