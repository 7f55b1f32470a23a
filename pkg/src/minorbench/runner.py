"""Seeded, resumable benchmark runs driven by a YAML config.

An output directory holds

* ``experiment_resolved.yaml``: the config with defaults filled in and
  presets expanded, written before the first trial;
* ``results.jsonl``: one trial record per line, in task order;
* ``checkpoint.json``: keys of the trials already in the log;
* ``embeddings/``: embeddings too large to store inline.

Trial seeds are hashed from the master seed and the trial key, so results
do not depend on task order, worker count or interruptions. Records are
written in task order whatever the worker count, so the completed trials
always form a prefix of the task list.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path
from typing import Any, Iterable

import yaml

from . import __version__
from .algorithms import AlgorithmParams, Status, embed, get_algorithm, parse_algorithm_id
from .embedding import Embedding, compute_metrics, validate_embedding
from .errors import ConfigError, CorruptCheckpoint, MinorBenchError
from .faults import FaultSpec, inject_faults, read_pattern
from .generators import GraphSpec, generate
from .graph import Graph
from .presets import preset
from .topology import TopologyDescriptor, build

RESOLVED_NAME = "experiment_resolved.yaml"
RESULTS_NAME = "results.jsonl"
CHECKPOINT_NAME = "checkpoint.json"
SIDECAR_DIR = "embeddings"

DEFAULT_MASTER_SEED = 42
DEFAULT_TIMEOUT_S = 30.0
INLINE_EMBEDDING_LIMIT = 10_000  # qubits
CHECKPOINT_EVERY = 10  # records between checkpoint writes

# record fields that depend on the clock; everything else is reproducible
TIMING_FIELDS = ("wall_time_s", "overrun")

_CONFIG_KEYS = {"name", "master_seed", "timeout_s", "trials_per_pair", "graphs", "presets",
                "topologies", "faults", "algorithms", "output_dir", "store_embeddings",
                "inline_embedding_limit"}
_FAULT_KEYS = {"rates", "patterns"}


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    master_seed: int
    timeout_s: float
    trials_per_pair: int
    graphs: tuple[GraphSpec, ...]
    topologies: tuple[TopologyDescriptor, ...]
    faults: tuple[FaultSpec, ...]
    algorithms: tuple[str, ...]
    output_dir: str
    store_embeddings: bool = True
    inline_embedding_limit: int = INLINE_EMBEDDING_LIMIT
    presets: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        rates = [f.rate for f in self.faults if f.mode == "rate"]
        patterns = [f.source for f in self.faults if f.mode == "pattern"]
        faults = {"rates": rates}
        if patterns:
            faults["patterns"] = patterns
        return {
            "name": self.name,
            "master_seed": self.master_seed,
            "timeout_s": self.timeout_s,
            "trials_per_pair": self.trials_per_pair,
            "presets": list(self.presets),
            "graphs": [g.to_dict() for g in self.graphs],
            "topologies": [t.label for t in self.topologies],
            "faults": faults,
            "algorithms": list(self.algorithms),
            "output_dir": self.output_dir,
            "store_embeddings": self.store_embeddings,
            "inline_embedding_limit": self.inline_embedding_limit,
        }

    def fingerprint(self) -> str:
        """Hash of everything that determines the task list and its results."""
        body = self.to_dict()
        # presets are already expanded into graphs
        for key in ("output_dir", "presets", "name"):
            body.pop(key)
        text = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.blake2b(text.encode(), digest_size=16).hexdigest()


def _require(cond: bool, message: str, path: str):
    if not cond:
        raise ConfigError(message, path)


def resolve_config(raw: dict | None, overrides: dict | None = None, base_dir=".") -> ExperimentConfig:
    """Validate a raw config mapping, fill defaults and apply ``overrides``.

    ``overrides`` uses the same keys as the file (``master_seed``,
    ``timeout_s``, ``output_dir``, ...) and wins over it. Graph entries from
    ``presets`` are appended to the explicit ``graphs`` list and duplicates
    (same graph id) are dropped, keeping the first occurrence. Relative
    pattern paths are resolved against ``base_dir``.
    """
    raw = dict(raw or {})
    _require(isinstance(raw, dict), "config must be a mapping", "<root>")
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    unknown = sorted(set(raw) - _CONFIG_KEYS)
    _require(not unknown, f"unknown keys {unknown}", unknown[0] if unknown else "")

    name = str(raw.get("name", "experiment"))
    seed = raw.get("master_seed", DEFAULT_MASTER_SEED)
    _require(isinstance(seed, int) and not isinstance(seed, bool), "must be an integer", "master_seed")
    timeout = raw.get("timeout_s", DEFAULT_TIMEOUT_S)
    _require(isinstance(timeout, (int, float)) and timeout > 0, "must be a number > 0", "timeout_s")
    trials = raw.get("trials_per_pair", 1)
    _require(isinstance(trials, int) and trials >= 1, "must be an integer >= 1", "trials_per_pair")

    graphs: list[GraphSpec] = []
    for i, entry in enumerate(raw.get("graphs") or []):
        try:
            graphs.append(GraphSpec.from_dict(entry))
        except (MinorBenchError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), f"graphs[{i}]") from None
    presets = [str(p) for p in raw.get("presets") or []]
    for i, name_ in enumerate(presets):
        try:
            graphs.extend(preset(name_))
        except ConfigError as exc:
            raise ConfigError(str(exc).split(": ", 1)[-1], f"presets[{i}]") from None
    seen, unique = set(), []
    for g in graphs:
        if g.id not in seen:
            seen.add(g.id)
            unique.append(g)
    _require(bool(unique), "at least one graph (or preset) is required", "graphs")

    topologies = []
    for i, entry in enumerate(raw.get("topologies") or []):
        try:
            topologies.append(TopologyDescriptor.from_dict(entry))
        except (MinorBenchError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), f"topologies[{i}]") from None
    _require(bool(topologies), "at least one topology is required", "topologies")

    faults_raw = raw.get("faults") or {}
    _require(isinstance(faults_raw, dict), "must be a mapping with rates/patterns", "faults")
    bad = sorted(set(faults_raw) - _FAULT_KEYS)
    _require(not bad, f"unknown keys {bad}", f"faults.{bad[0]}" if bad else "faults")
    faults: list[FaultSpec] = []
    rates = faults_raw.get("rates", [0.0] if "patterns" not in faults_raw else [])
    for i, rate in enumerate(rates):
        _require(isinstance(rate, (int, float)) and 0 <= rate <= 1, "fault rate must be in [0, 1]",
                 f"faults.rates[{i}]")
        faults.append(FaultSpec("rate", float(rate)))
    for i, path in enumerate(faults_raw.get("patterns") or []):
        full = Path(base_dir, path) if not Path(path).is_absolute() else Path(path)
        try:
            read_pattern(full)
        except (OSError, MinorBenchError) as exc:
            raise ConfigError(str(exc), f"faults.patterns[{i}]") from None
        faults.append(FaultSpec.from_pattern_file(full))
    _require(bool(faults), "at least one fault setting is required", "faults")

    algorithms = [str(a) for a in raw.get("algorithms") or []]
    _require(bool(algorithms), "at least one algorithm is required", "algorithms")
    for i, algo in enumerate(algorithms):
        try:
            name_, options = parse_algorithm_id(algo)
            impl = get_algorithm(name_)
        except MinorBenchError as exc:
            raise ConfigError(str(exc), f"algorithms[{i}]") from None
        unknown_opts = sorted(set(options) - set(impl.defaults))
        _require(not unknown_opts, f"unknown options {unknown_opts}", f"algorithms[{i}]")

    store = raw.get("store_embeddings", True)
    _require(isinstance(store, bool), "must be true or false", "store_embeddings")
    limit = raw.get("inline_embedding_limit", INLINE_EMBEDDING_LIMIT)
    _require(isinstance(limit, int) and limit >= 0, "must be an integer >= 0", "inline_embedding_limit")

    return ExperimentConfig(
        name=name, master_seed=seed, timeout_s=float(timeout), trials_per_pair=trials,
        graphs=tuple(unique), topologies=tuple(topologies), faults=tuple(faults),
        algorithms=tuple(algorithms), output_dir=str(raw.get("output_dir", "results")),
        store_embeddings=store, inline_embedding_limit=limit, presets=tuple(presets))


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}", str(path)) from None
    if raw is not None and not isinstance(raw, dict):
        raise ConfigError("config must be a mapping", "<root>")
    return resolve_config(raw, overrides, base_dir=path.parent)


def write_resolved(config: ExperimentConfig, out_dir: Path):
    body = {"artifact_version": __version__,
            "resolved_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "fingerprint": config.fingerprint(),
            **config.to_dict()}
    _atomic_write(out_dir / RESOLVED_NAME, yaml.safe_dump(body, sort_keys=False))


def read_resolved(out_dir) -> ExperimentConfig:
    path = Path(out_dir) / RESOLVED_NAME
    raw = yaml.safe_load(path.read_text())
    for key in ("artifact_version", "resolved_at", "fingerprint"):
        raw.pop(key, None)
    # presets were expanded into graphs when the file was written
    raw.pop("presets", None)
    return resolve_config(raw, {"output_dir": str(out_dir)})


# ---------------------------------------------------------------------------
# tasks and seeds


@dataclass(frozen=True)
class Task:
    graph: GraphSpec
    topology: TopologyDescriptor
    fault: FaultSpec
    algorithm: str
    trial: int

    @property
    def key(self) -> dict:
        return {"graph": self.graph.id, "topology": self.topology.label,
                "fault": self.fault.label, "algorithm": self.algorithm, "trial": self.trial}

    @property
    def key_text(self) -> str:
        return canonical(self.key)


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def derive_seed(master_seed: int, key) -> int:
    """Stable 64-bit seed from the master seed and a JSON-serializable key."""
    text = f"{int(master_seed)}|{canonical(key)}"
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def derive_trial_seed(master_seed: int, trial_key: dict) -> int:
    return derive_seed(master_seed, trial_key)


def fault_seed(master_seed: int, topology: TopologyDescriptor, fault: FaultSpec) -> int:
    # one faulted lattice per (topology, fault setting), shared by every graph and algorithm
    return derive_seed(master_seed, {"faults": fault.label, "topology": topology.label})


@lru_cache(maxsize=64)
def _source_graph(spec: GraphSpec) -> Graph:
    return generate(spec)


@lru_cache(maxsize=32)
def _target_graph(topology: TopologyDescriptor, fault: FaultSpec, master_seed: int) -> Graph:
    base = build(topology)
    if fault.mode == "rate":
        fault = FaultSpec("rate", fault.rate, fault_seed(master_seed, topology, fault))
    elif not fault.nodes:
        fault = FaultSpec("pattern", nodes=tuple(read_pattern(fault.source)), source=fault.source)
    return inject_faults(base, fault)


def _applicable(spec: GraphSpec, topology: TopologyDescriptor) -> bool:
    target = spec.params.get("target")
    if target is not None:
        # planted and sampled graphs only make sense on the lattice they came from
        try:
            return TopologyDescriptor.from_dict(target) == topology
        except MinorBenchError:
            return False
    return _source_graph(spec).node_count <= build(topology).node_count


def build_tasks(config: ExperimentConfig) -> list[Task]:
    """Cartesian product graphs x topologies x faults x algorithms x trials, in that nesting order.

    Graphs that cannot fit a topology (more nodes than qubits, or planted on
    a different lattice) are skipped for that topology.
    """
    tasks = []
    for spec in config.graphs:
        for topo in config.topologies:
            if not _applicable(spec, topo):
                continue
            for fault in config.faults:
                for algo in config.algorithms:
                    for trial in range(config.trials_per_pair):
                        tasks.append(Task(spec, topo, fault, algo, trial))
    return tasks


# ---------------------------------------------------------------------------
# execution


def run_task(task: Task, config: ExperimentConfig) -> dict:
    """Execute one trial and return its record (embedding inline, sidecar decided later)."""
    source = _source_graph(task.graph)
    target = _target_graph(task.topology, task.fault, config.master_seed)
    seed = derive_trial_seed(config.master_seed, task.key)
    params = AlgorithmParams(seed=seed, deadline=config.timeout_s, topology=task.topology)
    record: dict[str, Any] = {
        "key": task.key,
        "graph": task.graph.id,
        "category": task.graph.category,
        "topology": task.topology.label,
        "fault": task.fault.label,
        "fault_rate": task.fault.rate if task.fault.mode == "rate" else None,
        "algorithm": task.algorithm,
        "trial": task.trial,
        "seed": seed,
        "source_nodes": source.node_count,
        "source_edges": source.edge_count,
        "target_nodes": target.node_count,
        "target_edges": target.edge_count,
    }
    start = time.perf_counter()
    try:
        result = embed(task.algorithm, source, target, params)
        error = None
    except MinorBenchError as exc:
        result, error = None, f"{type(exc).__name__}: {exc}"
    wall = time.perf_counter() - start

    if result is None:
        record.update(status=Status.FAILURE.value, version=None, counters={}, error=error)
    else:
        record.update(status=result.status.value, version=result.version, counters=dict(result.counters))
        if result.success:
            report = validate_embedding(source, target, result.embedding)
            if report.valid:
                m = compute_metrics(result.embedding)
                record.update(max_chain_length=m.max_chain_length,
                              mean_chain_length=m.mean_chain_length_decimal,
                              qubit_count=m.qubit_count,
                              embedding=result.embedding.to_json())
            else:
                record["status"] = Status.FAILURE.value
                record["counters"]["validator_violations"] = len(report.violations)
    record["wall_time_s"] = round(wall, 6)
    if wall > config.timeout_s + 1.0:
        record["overrun"] = True
    return record


def _worker(args):
    task, config = args
    return run_task(task, config)


def default_workers() -> int:
    env = os.environ.get("MINORBENCH_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"MINORBENCH_WORKERS must be an integer, got {env!r}") from None
    return 1


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _write_checkpoint(out_dir: Path, config: ExperimentConfig, done: list[str], total: int):
    body = {"fingerprint": config.fingerprint(), "total": total, "completed": done}
    _atomic_write(out_dir / CHECKPOINT_NAME, json.dumps(body, indent=0))


def _finalize_record(record: dict, out_dir: Path, config: ExperimentConfig) -> dict:
    emb = record.pop("embedding", None)
    if emb is None or not config.store_embeddings:
        return record
    if record.get("qubit_count", 0) <= config.inline_embedding_limit:
        record["embedding"] = emb
    else:
        name = hashlib.blake2b(canonical(record["key"]).encode(), digest_size=10).hexdigest() + ".json"
        side = out_dir / SIDECAR_DIR
        side.mkdir(exist_ok=True)
        _atomic_write(side / name, canonical(emb))
        record["embedding_file"] = f"{SIDECAR_DIR}/{name}"
    return record


@dataclass
class RunSummary:
    output_dir: Path
    total: int
    completed: int
    executed: int

    @property
    def finished(self) -> bool:
        return self.completed == self.total


def _execute(config: ExperimentConfig, out_dir: Path, tasks: list[Task], done: list[str],
             workers: int, max_tasks: int | None) -> RunSummary:
    pending = tasks[len(done):]
    if max_tasks is not None:
        pending = pending[:max_tasks]
    executed = 0
    results_path = out_dir / RESULTS_NAME
    with open(results_path, "a") as log:
        if workers > 1 and len(pending) > 1:
            pool = ProcessPoolExecutor(max_workers=workers)
            records = pool.map(_worker, [(t, config) for t in pending], chunksize=1)
        else:
            pool = None
            records = (run_task(t, config) for t in pending)
        try:
            for task, record in zip(pending, records):
                record = _finalize_record(record, out_dir, config)
                log.write(canonical(record) + "\n")
                log.flush()
                done.append(task.key_text)
                executed += 1
                if executed % CHECKPOINT_EVERY == 0:
                    os.fsync(log.fileno())
                    _write_checkpoint(out_dir, config, done, len(tasks))
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
        os.fsync(log.fileno())
    _write_checkpoint(out_dir, config, done, len(tasks))
    return RunSummary(out_dir, len(tasks), len(done), executed)


def run(config: ExperimentConfig, workers: int | None = None, max_tasks: int | None = None) -> RunSummary:
    """Start a fresh run in ``config.output_dir`` (an existing log there is replaced).

    ``max_tasks`` stops after that many trials, leaving a resumable
    directory; it exists to exercise interruption.
    """
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_resolved(config, out_dir)
    tasks = build_tasks(config)
    (out_dir / RESULTS_NAME).write_text("")
    _write_checkpoint(out_dir, config, [], len(tasks))
    return _execute(config, out_dir, tasks, [], workers or default_workers(), max_tasks)


def resume(output_dir, workers: int | None = None, max_tasks: int | None = None) -> RunSummary:
    """Continue an interrupted run from its resolved config and checkpoint.

    Log lines written after the last checkpoint are discarded and their
    trials re-run. Raises :class:`CorruptCheckpoint` when the checkpoint
    does not match the config or the log.
    """
    out_dir = Path(output_dir)
    try:
        config = read_resolved(out_dir)
        state = json.loads((out_dir / CHECKPOINT_NAME).read_text())
        done = list(state["completed"])
        fingerprint = state["fingerprint"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CorruptCheckpoint(f"cannot read checkpoint in {out_dir}: {exc}; start a fresh run") from None
    if fingerprint != config.fingerprint():
        raise CorruptCheckpoint("checkpoint was written for a different config; start a fresh run")
    tasks = build_tasks(config)
    expected = [t.key_text for t in tasks[:len(done)]]
    if done != expected:
        raise CorruptCheckpoint("checkpoint keys do not match the task list; start a fresh run")

    kept = []
    results_path = out_dir / RESULTS_NAME
    lines = results_path.read_text().splitlines() if results_path.exists() else []
    for line in lines[:len(done)]:
        try:
            key = canonical(json.loads(line)["key"])
        except (ValueError, KeyError, TypeError):
            raise CorruptCheckpoint("results log has an unreadable line before the checkpoint") from None
        kept.append((key, line))
    if [k for k, _ in kept] != done:
        raise CorruptCheckpoint("results log is missing trials listed in the checkpoint")
    _atomic_write(results_path, "".join(line + "\n" for _, line in kept))
    return _execute(config, out_dir, tasks, done, workers or default_workers(), max_tasks)


def load_embedding(record: dict, output_dir) -> Embedding | None:
    """The record's embedding, read from its sidecar file when stored there."""
    if "embedding" in record:
        return Embedding.from_json(record["embedding"])
    if "embedding_file" in record:
        return Embedding.from_json(json.loads((Path(output_dir) / record["embedding_file"]).read_text()))
    return None


def verify_results(output_dir) -> list[dict]:
    """Re-validate every stored SUCCESS embedding; returns the keys that fail."""
    out_dir = Path(output_dir)
    config = read_resolved(out_dir)
    specs = {g.id: g for g in config.graphs}
    faults = {f.label: f for f in config.faults}
    bad = []
    for rec in read_results(out_dir / RESULTS_NAME):
        emb = load_embedding(rec, out_dir)
        if rec["status"] != Status.SUCCESS.value or emb is None:
            continue
        source = _source_graph(specs[rec["graph"]])
        target = _target_graph(TopologyDescriptor.parse(rec["topology"]), faults[rec["fault"]],
                               config.master_seed)
        if not validate_embedding(source, target, emb).valid:
            bad.append(rec["key"])
    return bad


def read_results(path) -> Iterable[dict]:
    """Yield records from a results log, skipping blank lines."""
    with open(path) as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def strip_timing(line: str) -> str:
    """A results line with its clock-dependent fields removed, for comparisons."""
    record = json.loads(line)
    for key in TIMING_FIELDS:
        record.pop(key, None)
    return canonical(record)
