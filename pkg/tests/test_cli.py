import json
import subprocess
import sys

import pytest
import yaml

from minorbench import runner
from minorbench.cli import main

C16 = "chimera-16-16-4"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_topology_stats(capsys):
    assert run_cli(capsys, "gen", "--topology", "chimera", "--m", "16", "--n", "16", "--t", "4",
                   "--stats")[:2] == (0, "2048 6016\n")
    assert run_cli(capsys, "gen", "--topology", "pegasus-16", "--stats")[1] == "5640 40484\n"


def test_gen_family(capsys, tmp_path):
    assert run_cli(capsys, "gen", "--family", "path", "--n", "5", "--stats")[:2] == (0, "5 4\n")
    out = tmp_path / "g.txt"
    assert run_cli(capsys, "gen", "--family", "erdos_renyi", "--n", "30", "--p", "0.2",
                   "--seed", "4", "--out", str(out))[0] == 0
    first = out.read_text()
    run_cli(capsys, "gen", "--family", "erdos_renyi", "--n", "30", "--p", "0.2", "--seed", "4",
            "--out", str(out))
    assert out.read_text() == first


def test_gen_bad_params(capsys):
    code, _, err = run_cli(capsys, "gen", "--family", "d_regular", "--n", "5", "--d", "3")
    assert code == 1 and "even" in err
    assert run_cli(capsys, "gen", "--family", "path")[0] == 1
    assert run_cli(capsys, "gen", "--family", "nosuch", "--n", "3")[0] == 1
    assert run_cli(capsys, "gen", "--stats")[0] == 1


def test_unknown_flags_rejected(capsys):
    assert run_cli(capsys, "embed", "--family", "path", "--param", "n=3", "--topology", C16,
                   "--colour", "red")[0] == 1
    assert run_cli(capsys, "report", "x.jsonl", "--bogus")[0] == 1
    assert run_cli(capsys, "frobnicate")[0] == 1
    assert run_cli(capsys, "gen", "--topology", "chimera", "--m", "2", "--k", "3")[0] == 1


def test_embed_clique_capacity(capsys):
    code, out, _ = run_cli(capsys, "embed", "--family", "complete", "--param", "n=64",
                           "--topology", C16, "--algorithm", "clique", "--validate")
    body = json.loads(out)
    assert code == 0 and body["status"] == "SUCCESS" and body["valid"] is True
    assert body["metrics"]["max_chain_length"] == 17
    code, out, _ = run_cli(capsys, "embed", "--family", "complete", "--param", "n=65",
                           "--topology", C16, "--algorithm", "clique")
    assert code == 3 and json.loads(out)["status"] == "FAILURE"


def test_embed_from_files(capsys, tmp_path):
    src, tgt = tmp_path / "s.txt", tmp_path / "t.txt"
    run_cli(capsys, "gen", "--family", "cycle", "--n", "6", "--out", str(src))
    run_cli(capsys, "gen", "--topology", "chimera-2-2-4", "--out", str(tgt))
    argv = ["embed", "--source", str(src), "--target", str(tgt), "--seed", "3", "--validate"]
    code, out, _ = run_cli(capsys, *argv)
    assert code == 0 and json.loads(out)["valid"] is True
    assert run_cli(capsys, *argv)[1] == out
    assert run_cli(capsys, "embed", "--source", str(tmp_path / "missing"), "--target", str(tgt))[0] == 2


def test_faults_command(capsys):
    code, out, _ = run_cli(capsys, "faults", "--topology", "chimera", "--m", "4", "--rate", "0.25",
                           "--seed", "2", "--stats")
    removed, nodes, _ = map(int, out.split())
    assert code == 0 and removed == 32 and nodes == 96
    _, again, _ = run_cli(capsys, "faults", "--topology", "chimera-4-4-4", "--rate", "0.25",
                          "--seed", "2", "--stats")
    assert again == out


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(yaml.safe_dump({
        "graphs": [{"family": "path", "params": {"n": 4}}, {"family": "complete", "params": {"n": 3}}],
        "topologies": ["chimera-2-2-4"],
        "algorithms": ["clique", "pathfinder"],
        "output_dir": str(tmp_path / "out"),
        "timeout_s": 5,
    }))
    return path


def test_run_resume_report(capsys, config_file, tmp_path):
    out = tmp_path / "out"
    assert run_cli(capsys, "run", str(config_file), "--seed", "9")[0] == 0
    assert (out / "experiment_resolved.yaml").exists() and (out / "results.jsonl").exists()
    assert yaml.safe_load((out / "experiment_resolved.yaml").read_text())["master_seed"] == 9
    before = (out / "results.jsonl").read_text()
    code, msg, _ = run_cli(capsys, "run", str(out), "--resume")
    assert code == 0 and msg.startswith("0 trials run, 4/4")
    assert (out / "results.jsonl").read_text() == before
    code, msg, _ = run_cli(capsys, "report", str(out))
    assert code == 0 and msg.startswith("4 records, 0 warnings")
    assert (out / "report" / "overall.csv").exists()


def test_run_interrupted_then_resumed(capsys, config_file, tmp_path):
    assert run_cli(capsys, "run", str(config_file), "--max-tasks", "1")[0] == 0
    assert run_cli(capsys, "run", str(config_file), "--resume")[0] == 0
    assert len(list(runner.read_results(tmp_path / "out" / "results.jsonl"))) == 4


def test_run_errors(capsys, config_file, tmp_path):
    assert run_cli(capsys, "run", str(tmp_path / "none.yaml"))[0] == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text("graphs: []\ntopologies: [x]\nalgorithms: [clique]\n")
    assert run_cli(capsys, "run", str(bad))[0] == 1
    run_cli(capsys, "run", str(config_file), "--max-tasks", "2")
    (tmp_path / "out" / "checkpoint.json").write_text("garbage")
    assert run_cli(capsys, "run", str(tmp_path / "out"), "--resume")[0] == 2


def test_report_empty_and_malformed(capsys, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert run_cli(capsys, "report", str(empty), "--out", str(tmp_path / "r"))[0] == 0
    assert (tmp_path / "r" / "overall.csv").read_text().count("\n") == 1
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n")
    code, out, err = run_cli(capsys, "report", str(bad), "--out", str(tmp_path / "r2"))
    assert code == 0 and "1 warnings" in out and "bad.jsonl:1" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "minorbench", "gen", "--family", "path", "--n", "5",
                           "--stats"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "5 4\n"
