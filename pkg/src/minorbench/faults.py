"""Simulated hardware faults: uniform qubit removal or an explicit pattern."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import floor
from pathlib import Path
from typing import Iterable

from .errors import InvalidParams, InvalidPattern
from .graph import Graph
from .rng import make_rng


@dataclass(frozen=True)
class FaultSpec:
    """Either ``mode="rate"`` with fraction ``rate`` and ``seed``, or
    ``mode="pattern"`` with an explicit tuple of qubit ids."""

    mode: str = "rate"
    rate: float = 0.0
    seed: int = 0
    nodes: tuple[int, ...] = field(default=())
    source: str | None = None  # pattern file path, for labelling only

    def __post_init__(self):
        if self.mode not in ("rate", "pattern"):
            raise InvalidParams(f"fault mode must be 'rate' or 'pattern', got {self.mode!r}")
        if self.mode == "rate" and not 0.0 <= self.rate <= 1.0:
            raise InvalidParams(f"fault rate must satisfy 0 <= f <= 1, got {self.rate}")
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))

    @classmethod
    def none(cls) -> "FaultSpec":
        return cls("rate", 0.0, 0)

    @classmethod
    def from_pattern_file(cls, path) -> "FaultSpec":
        return cls("pattern", nodes=tuple(read_pattern(path)), source=str(path))

    @property
    def is_baseline(self) -> bool:
        return self.mode == "rate" and self.rate == 0.0

    @property
    def label(self) -> str:
        if self.mode == "rate":
            return f"rate={self.rate!r}"
        return f"pattern={Path(self.source).name}" if self.source else f"pattern[{len(self.nodes)}]"

    def to_dict(self) -> dict:
        if self.mode == "rate":
            return {"rate": self.rate, "seed": self.seed}
        return {"pattern": self.source} if self.source else {"nodes": list(self.nodes)}


def read_pattern(path) -> list[int]:
    """Read a pattern file: one qubit id per line; blank lines and ``#`` comments ignored."""
    ids = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            ids.append(int(line))
        except ValueError:
            raise InvalidPattern(f"{path}:{lineno}: not a node id: {raw!r}") from None
    return ids


def removal_count(node_count: int, rate: float) -> int:
    # guard against 0.29 * 100 = 28.999... style float error
    return min(node_count, floor(node_count * rate + 1e-9))


def sample_faulty_nodes(nodes: Iterable[int], count: int, seed: int) -> list[int]:
    """Draw ``count`` distinct ids uniformly by a partial Fisher-Yates shuffle."""
    pool = sorted(nodes)
    rng = make_rng(seed, "faults")
    for i in range(count):
        j = i + int(rng.integers(len(pool) - i))
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:count])


def inject_faults(target: Graph, spec: FaultSpec) -> Graph:
    """Remove faulty qubits and their couplers; surviving ids are unchanged."""
    if spec.mode == "pattern":
        unknown = sorted(set(spec.nodes) - set(target.nodes))
        if unknown:
            raise InvalidPattern(f"fault pattern names nodes not in the target: {unknown[:10]}")
        return target.without_nodes(spec.nodes)
    k = removal_count(target.node_count, spec.rate)
    if k == 0:
        return target
    return target.without_nodes(sample_faulty_nodes(target.nodes, k, spec.seed))


def retention(baseline: Iterable, at_rate: Iterable) -> float | None:
    """Fraction of baseline successes that are still successes at a fault rate.

    Returns ``None`` when there are no baseline successes.
    """
    base = set(baseline)
    if not base:
        return None
    return len(base & set(at_rate)) / len(base)
