"""``minorbench`` command line: gen, embed, run, report, faults.

Exit codes: 0 ok, 1 usage or configuration error, 2 I/O error or unusable
checkpoint, 3 embedding failure (``embed`` only).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from . import __version__
from .algorithms import AlgorithmParams, embed, parse_algorithm_id
from .analysis.report import report
from .embedding import compute_metrics, validate_embedding
from .errors import ConfigError, CorruptCheckpoint, MinorBenchError
from .faults import FaultSpec, inject_faults
from .generators import GraphSpec, generate
from .graph import Graph
from .topology import TopologyDescriptor, build

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_EMBED = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # family flags such as --t or --n must never be read as abbreviations of --topology
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _value(text: str):
    """Interpret a flag value as YAML so numbers and lists come through typed."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def _extra_params(tokens: list[str]) -> dict:
    """``--key value`` pairs left over after the fixed flags, as family parameters."""
    params = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) < 3:
            raise _UsageError(f"unexpected argument {tok!r}")
        key = tok[2:].replace("-", "_")
        if "=" in key:
            key, raw = key.split("=", 1)
            i += 1
        elif i + 1 < len(tokens) and not tokens[i + 1].startswith("--"):
            raw = tokens[i + 1]
            i += 2
        else:
            raise _UsageError(f"flag {tok} needs a value")
        params[key] = _value(raw)
    return params


def _params_from_pairs(pairs: list[str] | None) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise _UsageError(f"--param expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        out[key] = _value(raw)
    return out


def _topology_from(kind: str, params: dict) -> TopologyDescriptor:
    if "-" in kind and not params:
        return TopologyDescriptor.parse(kind)
    unknown = set(params) - {"m", "n", "t"}
    if unknown:
        raise _UsageError(f"unknown topology flags {sorted('--' + k for k in unknown)}")
    if "m" not in params:
        raise _UsageError("--m is required with --topology KIND")
    return TopologyDescriptor.from_dict({"kind": kind, **params})


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args, extra) -> int:
    params = _extra_params(extra)
    if bool(args.topology) == bool(args.family):
        raise _UsageError("give exactly one of --topology or --family")
    if args.topology:
        graph = build(_topology_from(args.topology, params))
    else:
        graph = generate(GraphSpec(args.family, params, args.seed))
    if args.stats:
        print(graph.node_count, graph.edge_count)
        if args.out:
            Path(args.out).write_text(graph.to_edgelist())
    else:
        _emit(graph.to_edgelist(), args.out)
    return EXIT_OK


def _load_graph(path: str) -> Graph:
    return Graph.from_edgelist(Path(path).read_text())


def cmd_embed(args, extra) -> int:
    if extra:
        raise _UsageError(f"unrecognized arguments: {' '.join(extra)}")
    if bool(args.source) == bool(args.family):
        raise _UsageError("give exactly one of --source FILE or --family NAME")
    if bool(args.target) == bool(args.topology):
        raise _UsageError("give exactly one of --target FILE or --topology LABEL")
    source = (_load_graph(args.source) if args.source
              else generate(GraphSpec(args.family, _params_from_pairs(args.param), args.graph_seed)))
    desc = None
    if args.topology:
        desc = TopologyDescriptor.parse(args.topology)
        target = build(desc)
    else:
        target = _load_graph(args.target)
    if args.fault_rate:
        target = inject_faults(target, FaultSpec("rate", args.fault_rate, args.fault_seed))
    parse_algorithm_id(args.algorithm)
    params = AlgorithmParams(seed=args.seed, deadline=args.timeout, topology=desc)
    result = embed(args.algorithm, source, target, params)
    body = {"algorithm": args.algorithm, "seed": args.seed, "status": result.status.value,
            "version": result.version, "counters": result.counters}
    if result.success:
        m = compute_metrics(result.embedding)
        body["metrics"] = {"max_chain_length": m.max_chain_length,
                           "mean_chain_length": m.mean_chain_length_decimal,
                           "qubit_count": m.qubit_count}
        if args.validate:
            rep = validate_embedding(source, target, result.embedding)
            body["valid"] = rep.valid
            body["violations"] = [str(v) for v in rep.violations]
        body["embedding"] = result.embedding.to_json()
    _emit(json.dumps(body, sort_keys=True) + "\n", args.out)
    if not result.success or body.get("valid") is False:
        return EXIT_EMBED
    return EXIT_OK


def cmd_run(args, extra) -> int:
    from . import runner

    if extra:
        raise _UsageError(f"unrecognized arguments: {' '.join(extra)}")
    overrides = {"master_seed": args.seed, "timeout_s": args.timeout, "output_dir": args.out}
    target = Path(args.path)
    if args.resume:
        out_dir = target if target.is_dir() else Path(runner.load_config(target, overrides).output_dir)
        summary = runner.resume(out_dir, workers=args.workers, max_tasks=args.max_tasks)
    else:
        config = runner.load_config(target, overrides)
        summary = runner.run(config, workers=args.workers, max_tasks=args.max_tasks)
    print(f"{summary.executed} trials run, {summary.completed}/{summary.total} complete "
          f"in {summary.output_dir}")
    return EXIT_OK


def cmd_report(args, extra) -> int:
    if extra:
        raise _UsageError(f"unrecognized arguments: {' '.join(extra)}")
    path = Path(args.results)
    if path.is_dir():
        path = path / "results.jsonl"
    out = args.out or str(path.parent / "report")
    summary = report(path, out)
    for lineno, reason in summary.malformed:
        print(f"warning: {path}:{lineno}: skipped ({reason})", file=sys.stderr)
    print(f"{summary.records} records, {summary.warnings} warnings; tables in {out}")
    return EXIT_OK


def cmd_faults(args, extra) -> int:
    params = _extra_params(extra)
    desc = _topology_from(args.topology, params)
    base = build(desc)
    spec = FaultSpec("rate", args.rate, args.seed)
    faulted = inject_faults(base, spec)
    removed = sorted(set(base.nodes) - set(faulted.nodes))
    text = "".join(f"{v}\n" for v in removed)
    if args.stats:
        print(len(removed), faulted.node_count, faulted.edge_count)
        if args.out:
            Path(args.out).write_text(text)
    else:
        _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="minorbench", description="Minor-embedding benchmark harness.")
    p.add_argument("--version", action="version", version=f"minorbench {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a source graph or a hardware topology",
                       description="Family and topology parameters are passed as --NAME VALUE, "
                                   "e.g. --family erdos_renyi --n 30 --p 0.2, or "
                                   "--topology chimera --m 16 --n 16 --t 4.")
    g.add_argument("--topology", help="chimera, pegasus, zephyr, or a label such as pegasus-16")
    g.add_argument("--family", help="graph family name")
    g.add_argument("--seed", type=int, default=0, help="generator seed (random families)")
    g.add_argument("--stats", action="store_true", help="print node and edge counts")
    g.add_argument("--out", help="write the edge list here instead of stdout")
    g.set_defaults(func=cmd_gen, loose=True)

    e = sub.add_parser("embed", help="embed one source graph into one target")
    e.add_argument("--source", help="source edge-list file")
    e.add_argument("--family", help="generate the source from this family instead")
    e.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter (repeatable)")
    e.add_argument("--graph-seed", type=int, default=0)
    e.add_argument("--target", help="target edge-list file")
    e.add_argument("--topology", help="target topology label, e.g. chimera-16-16-4")
    e.add_argument("--fault-rate", type=float, default=0.0)
    e.add_argument("--fault-seed", type=int, default=0)
    e.add_argument("--algorithm", default="pathfinder", help="algorithm id, e.g. pssa{variant:fast}")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--timeout", type=float, default=30.0)
    e.add_argument("--validate", action="store_true", help="re-check the embedding before printing")
    e.add_argument("--out", help="write the JSON result here instead of stdout")
    e.set_defaults(func=cmd_embed, loose=False)

    r = sub.add_parser("run", help="run (or resume) an experiment from a YAML config")
    r.add_argument("path", help="config file, or an output directory with --resume")
    r.add_argument("--resume", action="store_true")
    r.add_argument("--seed", type=int, help="override master_seed")
    r.add_argument("--timeout", type=float, help="override timeout_s")
    r.add_argument("--out", help="override output_dir")
    r.add_argument("--workers", type=int, help="worker processes (default: MINORBENCH_WORKERS or 1)")
    r.add_argument("--max-tasks", type=int, help="stop after this many trials")
    r.set_defaults(func=cmd_run, loose=False)

    s = sub.add_parser("report", help="summarise a results log into CSV tables")
    s.add_argument("results", help="results.jsonl or the run's output directory")
    s.add_argument("--out", help="directory for the CSV files (default: <results dir>/report)")
    s.set_defaults(func=cmd_report, loose=False)

    f = sub.add_parser("faults", help="sample a fault pattern for a topology")
    f.add_argument("--topology", required=True, help="kind (with --m/--n/--t) or a label")
    f.add_argument("--rate", type=float, required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--stats", action="store_true", help="print removed count, remaining nodes and edges")
    f.add_argument("--out", help="write the pattern file here instead of stdout")
    f.set_defaults(func=cmd_faults, loose=True)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra and not args.loose:
            raise _UsageError(f"unrecognized arguments: {' '.join(extra)}")
        return args.func(args, extra)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorruptCheckpoint as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, MinorBenchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
