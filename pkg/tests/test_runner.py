import json
from itertools import product

import pytest
import yaml

from minorbench import runner
from minorbench.errors import ConfigError, CorruptCheckpoint
from minorbench.presets import PRESETS

BASE = {
    "name": "unit",
    "graphs": [{"family": "path", "params": {"n": 5}},
               {"family": "complete", "params": {"n": 4}}],
    "topologies": ["chimera-2-2-4"],
    "algorithms": ["clique", "pathfinder", "pssa"],
    "timeout_s": 5,
}


def config(tmp_path, **changes):
    raw = {**BASE, "output_dir": str(tmp_path / "out"), **changes}
    return runner.resolve_config(raw)


def stripped(out_dir):
    return [runner.strip_timing(line) for line in open(out_dir / runner.RESULTS_NAME)]


def test_defaults():
    cfg = runner.resolve_config({k: v for k, v in BASE.items() if k != "timeout_s"})
    assert cfg.master_seed == 42
    assert cfg.timeout_s == 30.0
    assert [f.label for f in cfg.faults] == ["rate=0.0"]


@pytest.mark.parametrize("change, path", [
    ({"algorithms": []}, "algorithms"),
    ({"graphs": [], "presets": []}, "graphs"),
    ({"topologies": []}, "topologies"),
    ({"timeout_s": 0}, "timeout_s"),
    ({"master_seed": "x"}, "master_seed"),
    ({"colour": "blue"}, "colour"),
    ({"presets": ["nope"]}, "presets[0]"),
    ({"algorithms": ["pssa{speed:9}"]}, "algorithms[0]"),
    ({"algorithms": ["oct"]}, "algorithms[0]"),
    ({"topologies": ["torus-4"]}, "topologies[0]"),
    ({"faults": {"rates": [2.0]}}, "faults.rates[0]"),
    ({"faults": {"rate": [0.1]}}, "faults.rate"),
])
def test_config_errors_name_the_key(change, path):
    with pytest.raises(ConfigError) as info:
        runner.resolve_config({**BASE, **change})
    assert info.value.path == path


def test_override_reflected_in_resolved_file(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(yaml.safe_dump({**BASE, "output_dir": str(tmp_path / "o")}))
    cfg = runner.load_config(path, {"timeout_s": 7, "master_seed": 3})
    runner.run(cfg, max_tasks=0)
    resolved = yaml.safe_load((tmp_path / "o" / runner.RESOLVED_NAME).read_text())
    assert resolved["timeout_s"] == 7 and resolved["master_seed"] == 3
    assert resolved["artifact_version"] and resolved["resolved_at"]


def test_task_counts_and_dedup(tmp_path):
    cfg = config(tmp_path)
    assert len(runner.build_tasks(cfg)) == 2 * 1 * 1 * 3 * 1
    dup = config(tmp_path, graphs=BASE["graphs"] + [{"family": "path", "params": {"n": 5}, "seed": 9}])
    assert len(dup.graphs) == 2
    assert len(runner.resolve_config({**BASE, "presets": ["sensitivity"], "graphs": []}).graphs) == 30


def test_presets_documented_sizes():
    assert {k: len(v) for k, v in PRESETS.items()} == {"smoke": 6, "sensitivity": 30, "medium": 30, "faults": 40}
    for specs in PRESETS.values():
        assert len({s.id for s in specs}) == len(specs)


def test_applicability_filter(tmp_path):
    cfg = config(tmp_path, graphs=[
        {"family": "complete", "params": {"n": 40}},  # more nodes than chimera-2-2-4 has qubits
        {"family": "planted", "params": {"target": "chimera-2-2-4", "chain_count": 5}, "seed": 1},
        {"family": "planted", "params": {"target": "chimera-3-3-4", "chain_count": 5}, "seed": 1},
    ], algorithms=["pathfinder"])
    tasks = runner.build_tasks(cfg)
    assert [t.graph.params["target"] for t in tasks] == ["chimera-2-2-4"]


def test_seed_derivation():
    key = {"graph": "g", "topology": "t", "fault": "f", "algorithm": "a", "trial": 0}
    assert runner.derive_trial_seed(42, key) == runner.derive_trial_seed(42, dict(reversed(list(key.items()))))
    assert runner.derive_trial_seed(42, key) != runner.derive_trial_seed(43, key)
    assert 0 <= runner.derive_trial_seed(42, key) < 2**64


def test_seed_distinct_over_grid():
    seeds = set()
    grid = list(product(range(20), ("chimera-16-16-4", "pegasus-16"), ("rate=0.0", "rate=0.1"),
                        ("clique", "pathfinder", "pssa"), range(10)))
    for g, t, f, a, i in grid:
        seeds.add(runner.derive_trial_seed(42, {"graph": f"g{g}", "topology": t, "fault": f,
                                                "algorithm": a, "trial": i}))
    assert len(seeds) == len(grid)


def test_run_records(tmp_path):
    cfg = config(tmp_path)
    summary = runner.run(cfg)
    assert summary.finished and summary.executed == 6
    out = tmp_path / "out"
    records = list(runner.read_results(out / runner.RESULTS_NAME))
    assert len(records) == 6
    for rec in records:
        assert rec["seed"] == runner.derive_trial_seed(42, rec["key"])
        assert rec["wall_time_s"] >= 0
        if rec["status"] == "SUCCESS":
            assert {"max_chain_length", "mean_chain_length", "qubit_count", "embedding"} <= set(rec)
    assert runner.verify_results(out) == []
    checkpoint = json.loads((out / runner.CHECKPOINT_NAME).read_text())
    assert len(checkpoint["completed"]) == 6


def test_run_twice_identical(tmp_path):
    a = config(tmp_path / "a")
    b = config(tmp_path / "b")
    runner.run(a)
    runner.run(b)
    assert stripped(tmp_path / "a" / "out") == stripped(tmp_path / "b" / "out")


def test_worker_count_does_not_change_results(tmp_path):
    runner.run(config(tmp_path / "a"), workers=1)
    runner.run(config(tmp_path / "b"), workers=2)
    assert stripped(tmp_path / "a" / "out") == stripped(tmp_path / "b" / "out")


def test_interrupt_and_resume_three_times(tmp_path):
    full = config(tmp_path / "full")
    runner.run(full)
    part = config(tmp_path / "part")
    runner.run(part, max_tasks=1)
    runner.resume(tmp_path / "part" / "out", max_tasks=2)
    runner.resume(tmp_path / "part" / "out", max_tasks=1)
    runner.resume(tmp_path / "part" / "out")
    assert stripped(tmp_path / "full" / "out") == stripped(tmp_path / "part" / "out")


def test_resume_complete_is_noop(tmp_path):
    runner.run(config(tmp_path))
    out = tmp_path / "out"
    before = (out / runner.RESULTS_NAME).read_text()
    summary = runner.resume(out)
    assert summary.executed == 0
    assert (out / runner.RESULTS_NAME).read_text() == before


def test_resume_after_zero_equals_fresh(tmp_path):
    runner.run(config(tmp_path / "a"))
    runner.run(config(tmp_path / "b"), max_tasks=0)
    runner.resume(tmp_path / "b" / "out")
    assert stripped(tmp_path / "a" / "out") == stripped(tmp_path / "b" / "out")


def test_resume_drops_lines_past_checkpoint(tmp_path):
    runner.run(config(tmp_path / "a"))
    runner.run(config(tmp_path / "b"), max_tasks=2)
    out = tmp_path / "b" / "out"
    # simulate a crash after a write but before the checkpoint
    with open(out / runner.RESULTS_NAME, "a") as fh:
        fh.write('{"key": {"partial": true}}\n')
    runner.resume(out)
    assert stripped(tmp_path / "a" / "out") == stripped(out)


def test_corrupt_checkpoint(tmp_path):
    runner.run(config(tmp_path), max_tasks=2)
    out = tmp_path / "out"
    (out / runner.CHECKPOINT_NAME).write_text("{not json")
    with pytest.raises(CorruptCheckpoint):
        runner.resume(out)


def test_checkpoint_for_other_config(tmp_path):
    runner.run(config(tmp_path), max_tasks=2)
    out = tmp_path / "out"
    resolved = yaml.safe_load((out / runner.RESOLVED_NAME).read_text())
    resolved["master_seed"] = 1
    (out / runner.RESOLVED_NAME).write_text(yaml.safe_dump(resolved))
    with pytest.raises(CorruptCheckpoint):
        runner.resume(out)


def test_missing_results_lines(tmp_path):
    runner.run(config(tmp_path), max_tasks=3)
    out = tmp_path / "out"
    (out / runner.RESULTS_NAME).write_text("")
    with pytest.raises(CorruptCheckpoint):
        runner.resume(out)


def test_sidecar_embeddings(tmp_path):
    cfg = config(tmp_path, inline_embedding_limit=3, algorithms=["clique"])
    runner.run(cfg)
    out = tmp_path / "out"
    records = list(runner.read_results(out / runner.RESULTS_NAME))
    assert all("embedding_file" in r and "embedding" not in r for r in records)
    assert all((out / r["embedding_file"]).exists() for r in records)
    assert runner.verify_results(out) == []


def test_faults_and_patterns(tmp_path):
    pattern = tmp_path / "broken.txt"
    pattern.write_text("0\n1\n")
    cfg = config(tmp_path, faults={"rates": [0.0, 0.25], "patterns": [str(pattern)]},
                 algorithms=["pathfinder"])
    runner.run(cfg)
    records = list(runner.read_results(tmp_path / "out" / runner.RESULTS_NAME))
    sizes = {(r["fault"], r["target_nodes"]) for r in records}
    assert sizes == {("rate=0.0", 32), ("rate=0.25", 24), ("pattern=broken.txt", 30)}
    assert runner.verify_results(tmp_path / "out") == []


def test_invalid_success_downgraded(tmp_path, monkeypatch):
    from minorbench.algorithms import AlgorithmResult, Status
    from minorbench.embedding import Embedding

    def bogus(algorithm_id, source, target, params):
        return AlgorithmResult(Embedding({v: [0] for v in source.nodes}), Status.SUCCESS, {}, "x")

    monkeypatch.setattr(runner, "embed", bogus)
    runner.run(config(tmp_path, algorithms=["clique"]))
    records = list(runner.read_results(tmp_path / "out" / runner.RESULTS_NAME))
    assert all(r["status"] == "FAILURE" for r in records)
    assert all(r["counters"]["validator_violations"] > 0 for r in records)


def test_workers_env(monkeypatch):
    monkeypatch.setenv("MINORBENCH_WORKERS", "3")
    assert runner.default_workers() == 3
    monkeypatch.setenv("MINORBENCH_WORKERS", "many")
    with pytest.raises(ConfigError):
        runner.default_workers()
