"""A seeded experiment end to end: config, run, interrupt, resume, report."""
import csv
import shutil
import tempfile
from pathlib import Path

from minorbench import runner
from minorbench.analysis import report

out = Path(tempfile.mkdtemp(prefix="minorbench-demo-"))
config = runner.resolve_config({
    "name": "demo",
    "presets": ["smoke"],
    "graphs": [{"family": "barabasi_albert", "params": {"n": 30, "m": 2}, "seed": 4}],
    "topologies": ["chimera-4-4-4", "pegasus-3", "zephyr-2-4"],
    "algorithms": ["pathfinder", "pssa{variant:fast}", "clique"],
    "trials_per_pair": 2,
    "timeout_s": 10,
    "output_dir": str(out / "run"),
})

# Stop early on purpose, then pick up where it left off
first = runner.run(config, max_tasks=20)
print(f"interrupted after {first.completed} of {first.total}")
done = runner.resume(out / "run")
print(f"resumed: {done.executed} more, {done.completed}/{done.total} complete")
print("embeddings re-validated, bad keys:", runner.verify_results(out / "run"))

summary = report(out / "run" / runner.RESULTS_NAME, out / "tables")
print(f"\n{summary.records} records -> {sorted(summary.files)}")
with open(summary.files["overall"]) as fh:
    for row in csv.DictReader(fh):
        acl = float(row["mean_acl"]) if row["mean_acl"] else float("nan")
        print(f"{row['topology']:14s} {row['algorithm']:20s} "
              f"success {row['successes']:>2s}/{row['trials']:<2s} ACL {acl:.2f}")
with open(summary.files["rank_tests"]) as fh:
    for row in csv.DictReader(fh):
        if row["test"] == "friedman":
            print(f"{row['topology']}: Friedman p={float(row['p']):.3g}, W={float(row['kendall_w']):.2f}")

shutil.rmtree(out)
