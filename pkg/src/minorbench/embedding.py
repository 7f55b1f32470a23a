"""Embeddings, structural validation and chain-length metrics."""
from __future__ import annotations

import enum
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import EmptyEmbedding
from .graph import Graph


class Embedding(Mapping):
    """Read-only mapping from source node to its chain of hardware qubits.

    Chains are stored as sorted tuples. An empty ``Embedding()`` is the
    failure sentinel returned by algorithms.
    """

    __slots__ = ("_chains",)

    def __init__(self, chains: Mapping[int, Iterable[int]] | None = None):
        self._chains = {int(v): tuple(sorted({int(q) for q in c}))
                        for v, c in (chains or {}).items()}

    def __getitem__(self, v):
        return self._chains[v]

    def __iter__(self):
        return iter(self._chains)

    def __len__(self):
        return len(self._chains)

    def __repr__(self):
        return f"Embedding({len(self._chains)} chains, {self.qubit_count} qubits)"

    def __eq__(self, other):
        if isinstance(other, Embedding):
            return self._chains == other._chains
        if isinstance(other, Mapping):
            return self == Embedding(other)
        return NotImplemented

    __hash__ = None

    @property
    def qubit_count(self) -> int:
        return sum(len(c) for c in self._chains.values())

    def qubits(self) -> set[int]:
        return {q for c in self._chains.values() for q in c}

    def to_json(self) -> dict[str, list[int]]:
        return {str(v): list(self._chains[v]) for v in sorted(self._chains)}

    @classmethod
    def from_json(cls, data: Mapping[str, list[int]]) -> "Embedding":
        return cls({int(k): v for k, v in data.items()})


class ViolationKind(str, enum.Enum):
    DISCONNECTED_CHAIN = "DisconnectedChain"
    OVERLAPPING_CHAINS = "OverlappingChains"
    UNCOVERED_EDGE = "UncoveredEdge"
    EMPTY_CHAIN = "EmptyChain"
    UNKNOWN_NODE = "UnknownNode"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    nodes: tuple[int, ...] = ()
    qubits: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}

    def count(self, kind: ViolationKind) -> int:
        return sum(1 for v in self.violations if v.kind == kind)


def _connected(qubits: set[int], target: Graph) -> bool:
    start = next(iter(qubits))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in target.neighbors(u):
            if w in qubits and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(qubits)


def validate_embedding(source: Graph, target: Graph, emb: Mapping[int, Iterable[int]]) -> ValidationReport:
    """Check that ``emb`` is a minor embedding of ``source`` into ``target``.

    Reports, rather than raises, every problem found: chains that are
    missing or empty, ids outside either graph, chains whose qubits do not
    induce a connected subgraph, chains sharing qubits, and source edges with
    no coupler between the two chains.
    """
    out: list[Violation] = []
    chains: dict[int, set[int]] = {}
    for v, chain in emb.items():
        if v not in source:
            out.append(Violation(ViolationKind.UNKNOWN_NODE, nodes=(v,)))
            continue
        chain = set(chain)
        unknown = sorted(q for q in chain if q not in target)
        if unknown:
            out.append(Violation(ViolationKind.UNKNOWN_NODE, nodes=(v,), qubits=tuple(unknown)))
            chain -= set(unknown)
        chains[v] = chain

    for v in source.nodes:
        # chains holding only unknown qubits were reported above
        if v not in chains or (not chains[v] and not any(True for _ in emb[v])):
            out.append(Violation(ViolationKind.EMPTY_CHAIN, nodes=(v,)))

    for v in sorted(chains):
        if chains[v] and not _connected(chains[v], target):
            out.append(Violation(ViolationKind.DISCONNECTED_CHAIN, nodes=(v,), qubits=tuple(sorted(chains[v]))))

    owner: dict[int, list[int]] = {}
    for v in sorted(chains):
        for q in chains[v]:
            owner.setdefault(q, []).append(v)
    shared: dict[tuple[int, int], list[int]] = {}
    for q, vs in owner.items():
        if len(vs) > 1:
            for i in range(len(vs)):
                for j in range(i + 1, len(vs)):
                    shared.setdefault((vs[i], vs[j]), []).append(q)
    for pair in sorted(shared):
        out.append(Violation(ViolationKind.OVERLAPPING_CHAINS, nodes=pair, qubits=tuple(sorted(shared[pair]))))

    for u, v in source.sorted_edges():
        cu, cv = chains.get(u), chains.get(v)
        if not cu or not cv:
            continue
        if len(cu) > len(cv):
            cu, cv = cv, cu
        if not any(w in cv for q in cu for w in target.neighbors(q)):
            out.append(Violation(ViolationKind.UNCOVERED_EDGE, nodes=(u, v)))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class ChainMetrics:
    max_chain_length: int
    mean_chain_length: Fraction
    qubit_count: int
    chain_count: int = field(default=0)

    @property
    def mean_chain_length_decimal(self) -> float:
        return float(self.mean_chain_length)


def compute_metrics(emb: Mapping[int, Iterable[int]]) -> ChainMetrics:
    sizes = [len(set(c)) for c in emb.values()]
    if not sizes:
        raise EmptyEmbedding("cannot compute metrics of an empty embedding")
    total = sum(sizes)
    return ChainMetrics(max(sizes), Fraction(total, len(sizes)), total, len(sizes))
