"""CSV summary tables built from a runner results log.

Every table is keyed by topology, fault setting and algorithm, so a log
mixing several of them is summarised without pooling across them. Files:

``overall.csv``
    success counts with Wilson intervals, pooled and macro-averaged success
    rate, ACL and MCL over successes.
``by_category.csv``
    the same per graph family, plus the mean rank among algorithms
    (failures ranked last) over problems the group contains.
``scaling_success.csv``
    success rate in 20-node bins of source size, with Wilson bands.
``scaling_acl.csv``
    ACL in 20 equal-count bins of sqrt(edges), over successes.
``fault_retention.csv``
    share of baseline successes kept at each fault rate, per edge-count
    stratum and overall.
``fits.csv``
    ACL ~ a*sqrt(E) + b, ACL ~ E^k and the logistic success threshold.
``rank_tests.csv``
    Friedman test and Kendall's W over algorithms, and pairwise Wilcoxon
    signed-rank tests on ACL with Holm-adjusted p-values.
"""
from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

from ..errors import InvalidParams, MalformedRecord, MinorBenchError
from .fits import fit_logistic_success, fit_powerlaw, fit_sqrt_linear
from .stats import (NoEvidence, friedman, macro_average, rank_with_failures_last, wilcoxon_holm,
                    wilson_interval)

SUCCESS_BIN_WIDTH = 20
ACL_BINS = 20
STRATA_CUTS = (150, 400, 1000, 3000)
CONFIDENCE = 0.95

REQUIRED_FIELDS = ("key", "status", "graph", "category", "topology", "fault", "algorithm", "trial",
                   "source_nodes", "source_edges")

HEADERS = {
    "overall": ["topology", "fault", "algorithm", "trials", "successes", "success_rate",
                "wilson_lo", "wilson_hi", "macro_success_rate", "mean_acl", "macro_acl",
                "median_acl", "mean_mcl"],
    "by_category": ["topology", "fault", "algorithm", "category", "trials", "successes",
                    "success_rate", "mean_acl", "mean_rank"],
    "scaling_success": ["topology", "fault", "algorithm", "nodes_lo", "nodes_hi", "trials",
                        "successes", "success_rate", "wilson_lo", "wilson_hi"],
    "scaling_acl": ["topology", "fault", "algorithm", "bin", "count", "sqrt_edges_lo",
                    "sqrt_edges_hi", "sqrt_edges_mean", "acl_mean", "acl_median"],
    "fault_retention": ["topology", "algorithm", "fault_rate", "stratum", "baseline_successes",
                        "retained", "retention"],
    "fits": ["topology", "fault", "algorithm", "model", "n", "coef1_name", "coef1", "coef2_name",
             "coef2", "goodness", "separated"],
    "rank_tests": ["topology", "fault", "test", "comparison", "n", "statistic", "p", "p_holm",
                   "kendall_w", "zeros_dropped"],
}


@dataclass
class ReportSummary:
    records: int
    malformed: list[tuple[int, str]] = field(default_factory=list)
    files: dict[str, Path] = field(default_factory=dict)

    @property
    def warnings(self) -> int:
        return len(self.malformed)


def _check_record(rec) -> dict:
    if not isinstance(rec, dict):
        raise MalformedRecord("record is not a JSON object")
    missing = [k for k in REQUIRED_FIELDS if k not in rec]
    if missing:
        raise MalformedRecord(f"missing fields {missing}")
    if rec["status"] == "SUCCESS" and not isinstance(rec.get("mean_chain_length"), (int, float)):
        raise MalformedRecord("SUCCESS record without mean_chain_length")
    return rec


def load_records(path) -> tuple[list[dict], list[tuple[int, str]]]:
    """Parse a results log; malformed lines are skipped and returned as (line number, reason)."""
    records, bad = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(_check_record(json.loads(line)))
            except json.JSONDecodeError as exc:
                bad.append((lineno, f"not JSON: {exc.msg}"))
            except MalformedRecord as exc:
                bad.append((lineno, str(exc)))
    return records, bad


def _fmt(value) -> str:
    if value is None or value is NoEvidence:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, ".10g")
    return str(value)


def _write(path: Path, header: list[str], rows: Iterable[list]):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])


def _ok(rec) -> bool:
    return rec["status"] == "SUCCESS"


def _group(records, *fields) -> dict[tuple, list[dict]]:
    groups: dict[tuple, list[dict]] = defaultdict(list)
    for rec in records:
        groups[tuple(rec[f] for f in fields)].append(rec)
    return dict(sorted(groups.items(), key=lambda kv: tuple(map(str, kv[0]))))


def _mean(values):
    return math.fsum(values) / len(values) if values else None


def stratum(edges: int, cuts=STRATA_CUTS) -> str:
    lo = 0
    for cut in cuts:
        if edges <= cut:
            return f"{lo}-{cut}"
        lo = cut + 1
    return f">{cuts[-1]}"


def overall_rows(records) -> list[list]:
    rows = []
    for (topo, fault, algo), recs in _group(records, "topology", "fault", "algorithm").items():
        n = len(recs)
        wins = [r for r in recs if _ok(r)]
        lo, hi = wilson_interval(len(wins), n, CONFIDENCE)
        by_cat = defaultdict(list)
        acl_cat = defaultdict(list)
        for r in recs:
            by_cat[r["category"]].append(1.0 if _ok(r) else 0.0)
            if _ok(r):
                acl_cat[r["category"]].append(r["mean_chain_length"])
        acls = [r["mean_chain_length"] for r in wins]
        rows.append([topo, fault, algo, n, len(wins), len(wins) / n, lo, hi,
                     macro_average(by_cat), _mean(acls),
                     macro_average(acl_cat) if acl_cat else None,
                     float(np.median(acls)) if acls else None,
                     _mean([r["max_chain_length"] for r in wins if "max_chain_length" in r])])
    return rows


def _problem(rec) -> tuple:
    return rec["graph"], rec["trial"]


def _acl_rows(recs, algorithms) -> tuple[list[tuple], list[list]]:
    """Problems and their ACL row (None for a failure or a missing trial)."""
    cells = {(_problem(r), r["algorithm"]): r for r in recs}
    problems = sorted({_problem(r) for r in recs}, key=lambda p: (p[0], p[1]))
    rows = []
    for prob in problems:
        row = []
        for algo in algorithms:
            r = cells.get((prob, algo))
            row.append(r["mean_chain_length"] if r is not None and _ok(r) else None)
        rows.append(row)
    return problems, rows


def by_category_rows(records) -> list[list]:
    mean_rank: dict[tuple, list[float]] = defaultdict(list)
    for (topo, fault), recs in _group(records, "topology", "fault").items():
        algorithms = sorted({r["algorithm"] for r in recs})
        category = {r["graph"]: r["category"] for r in recs}
        problems, rows = _acl_rows(recs, algorithms)
        table = rank_with_failures_last(rows, algorithms, problems, drop_all_failed=False)
        for prob, ranks in zip(table.problems, table.ranks):
            for algo, rank in zip(algorithms, ranks):
                mean_rank[(topo, fault, algo, category[prob[0]])].append(float(rank))
    out = []
    for (topo, fault, algo, cat), recs in _group(records, "topology", "fault", "algorithm", "category").items():
        wins = [r for r in recs if _ok(r)]
        out.append([topo, fault, algo, cat, len(recs), len(wins), len(wins) / len(recs),
                    _mean([r["mean_chain_length"] for r in wins]),
                    _mean(mean_rank.get((topo, fault, algo, cat), []))])
    return out


def scaling_success_rows(records) -> list[list]:
    out = []
    for (topo, fault, algo), recs in _group(records, "topology", "fault", "algorithm").items():
        bins = defaultdict(list)
        for r in recs:
            bins[r["source_nodes"] // SUCCESS_BIN_WIDTH].append(_ok(r))
        for b in sorted(bins):
            flags = bins[b]
            k = sum(flags)
            lo, hi = wilson_interval(k, len(flags), CONFIDENCE)
            out.append([topo, fault, algo, b * SUCCESS_BIN_WIDTH, (b + 1) * SUCCESS_BIN_WIDTH - 1,
                        len(flags), k, k / len(flags), lo, hi])
    return out


def scaling_acl_rows(records) -> list[list]:
    out = []
    for (topo, fault, algo), recs in _group(records, "topology", "fault", "algorithm").items():
        wins = sorted((r for r in recs if _ok(r)),
                      key=lambda r: (r["source_edges"], r["graph"], r["trial"]))
        if not wins:
            continue
        for i, chunk in enumerate(np.array_split(np.arange(len(wins)), min(ACL_BINS, len(wins)))):
            part = [wins[j] for j in chunk]
            roots = [math.sqrt(r["source_edges"]) for r in part]
            acls = [r["mean_chain_length"] for r in part]
            out.append([topo, fault, algo, i, len(part), roots[0], roots[-1], _mean(roots),
                        _mean(acls), float(np.median(acls))])
    return out


def fault_retention_rows(records) -> list[list]:
    out = []
    rated = [r for r in records if r.get("fault_rate") is not None]
    for (topo, algo), recs in _group(rated, "topology", "algorithm").items():
        by_rate = defaultdict(dict)
        for r in recs:
            by_rate[r["fault_rate"]][_problem(r)] = r
        baseline = by_rate.get(0.0)
        if baseline is None:
            continue
        base_ok = {p: r for p, r in baseline.items() if _ok(r)}
        for rate in sorted(by_rate):
            if rate == 0.0:
                continue
            at_rate = by_rate[rate]
            strata = defaultdict(lambda: [0, 0])
            for p, r in base_ok.items():
                kept = p in at_rate and _ok(at_rate[p])
                for label in (stratum(r["source_edges"]), "all"):
                    strata[label][0] += 1
                    strata[label][1] += int(kept)
            labels = [stratum(c) for c in STRATA_CUTS] + [f">{STRATA_CUTS[-1]}", "all"]
            for label in labels:
                if label not in strata:
                    continue
                base, kept = strata[label]
                out.append([topo, algo, rate, label, base, kept, kept / base])
    return out


def fits_rows(records) -> list[list]:
    out = []
    for (topo, fault, algo), recs in _group(records, "topology", "fault", "algorithm").items():
        wins = [r for r in recs if _ok(r)]
        edges = [r["source_edges"] for r in wins]
        acls = [r["mean_chain_length"] for r in wins]
        try:
            f = fit_sqrt_linear(edges, acls)
            out.append([topo, fault, algo, f.model, f.n, "a", f["a"], "b", f["b"], f.goodness, None])
        except InvalidParams:
            pass
        try:
            pos = [(e, a) for e, a in zip(edges, acls) if e > 0]
            f = fit_powerlaw([e for e, _ in pos], [a for _, a in pos])
            out.append([topo, fault, algo, f.model, f.n, "exponent", f["exponent"], "prefactor",
                        f["prefactor"], f.goodness, None])
        except InvalidParams:
            pass
        sized = [r for r in recs if r["source_edges"] > 0]
        try:
            f = fit_logistic_success([r["source_edges"] for r in sized], [_ok(r) for r in sized])
            sep = f.flags["separated"]
            out.append([topo, fault, algo, f.model, f.n, "midpoint", f["midpoint"],
                        None if sep else "slope", None if sep else f["slope"], f.goodness, sep])
        except InvalidParams:
            pass
    return out


def rank_test_rows(records) -> list[list]:
    out = []
    for (topo, fault), recs in _group(records, "topology", "fault").items():
        algorithms = sorted({r["algorithm"] for r in recs})
        if len(algorithms) < 2:
            continue
        problems, rows = _acl_rows(recs, algorithms)
        table = rank_with_failures_last(rows, algorithms, problems)
        try:
            fr = friedman(table)
            out.append([topo, fault, "friedman", " ".join(algorithms), fr.n, fr.chi2, fr.p, None,
                        fr.kendall_w, None])
        except MinorBenchError:
            pass
        pairs = {}
        for i, j in combinations(range(len(algorithms)), 2):
            both = [(row[i], row[j]) for row in rows if row[i] is not None and row[j] is not None]
            if len(both) >= 5:
                pairs[f"{algorithms[i]} vs {algorithms[j]}"] = ([a for a, _ in both], [b for _, b in both])
        for name, (res, adjusted) in wilcoxon_holm(pairs).items():
            out.append([topo, fault, "wilcoxon", name, res.n, res.statistic, res.p, adjusted, None,
                        res.zeros_dropped])
    return out


BUILDERS = {
    "overall": overall_rows,
    "by_category": by_category_rows,
    "scaling_success": scaling_success_rows,
    "scaling_acl": scaling_acl_rows,
    "fault_retention": fault_retention_rows,
    "fits": fits_rows,
    "rank_tests": rank_test_rows,
}


def report(results_path, out_dir) -> ReportSummary:
    """Write every summary table for ``results_path`` into ``out_dir``."""
    records, bad = load_records(results_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = ReportSummary(len(records), bad)
    for name, builder in BUILDERS.items():
        path = out / f"{name}.csv"
        _write(path, HEADERS[name], builder(records) if records else [])
        summary.files[name] = path
    return summary
