"""Uniform embedding-algorithm contract and registry."""
from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..embedding import Embedding
from ..errors import InvalidParams, UnknownAlgorithm
from ..graph import Graph
from ..topology import TopologyDescriptor

# Upper bound on how long any algorithm may run past its deadline, in seconds.
# Each loop checks the clock at least this often on the graphs the harness targets.
CHECK_INTERVAL_S = 0.5


class Status(str, enum.Enum):
    SUCCESS = "SUCCESS"
    TIMEOUT = "TIMEOUT"
    FAILURE = "FAILURE"
    OOM = "OOM"


@dataclass(frozen=True)
class AlgorithmParams:
    """Per-call settings shared by every algorithm.

    ``deadline`` is a wall-clock budget in seconds. ``topology`` describes
    the (fault-free) hardware the target was built from, when known.
    ``options`` holds algorithm-specific tuning values.
    """

    seed: int = 0
    deadline: float = 30.0
    topology: TopologyDescriptor | None = None
    options: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.deadline > 0:
            raise InvalidParams(f"deadline must be > 0, got {self.deadline}")


@dataclass(frozen=True)
class AlgorithmResult:
    embedding: Embedding
    status: Status
    counters: dict[str, int]
    version: str

    def __post_init__(self):
        if (self.status is Status.SUCCESS) != bool(len(self.embedding)):
            raise ValueError("status SUCCESS requires a non-empty embedding and vice versa")

    @property
    def success(self) -> bool:
        return self.status is Status.SUCCESS


class Deadline:
    def __init__(self, seconds: float):
        self.start = time.monotonic()
        self.end = self.start + seconds

    def expired(self) -> bool:
        return time.monotonic() >= self.end

    def remaining(self) -> float:
        return max(0.0, self.end - time.monotonic())


class EmbeddingAlgorithm:
    """Base class for registered algorithms.

    Subclasses set ``name``, ``version`` and ``defaults`` and implement
    :meth:`run`, which receives options already merged with ``defaults`` and
    must not mutate either graph.
    """

    name: str = ""
    version: str = "0"
    defaults: dict[str, Any] = {}

    def run(self, source: Graph, target: Graph, params: AlgorithmParams,
            options: dict[str, Any]) -> AlgorithmResult:
        raise NotImplementedError

    def result(self, status: Status, chains=None, **counters) -> AlgorithmResult:
        emb = Embedding(chains) if status is Status.SUCCESS else Embedding()
        return AlgorithmResult(emb, status, {k: int(v) for k, v in counters.items()}, self.version)

    def embed(self, source: Graph, target: Graph, params: AlgorithmParams) -> AlgorithmResult:
        unknown = set(params.options) - set(self.defaults)
        if unknown:
            raise InvalidParams(f"{self.name}: unknown options {sorted(unknown)}")
        options = {**self.defaults, **params.options}
        if source.node_count == 0 or source.node_count > target.node_count:
            return self.result(Status.FAILURE)
        try:
            return self.run(source, target, params, options)
        except MemoryError:
            return self.result(Status.OOM)


REGISTRY: dict[str, EmbeddingAlgorithm] = {}


def register_algorithm(cls):
    """Class decorator adding an algorithm to the registry under ``cls.name``."""
    if not cls.name:
        raise ValueError("algorithm class needs a name")
    REGISTRY[cls.name] = cls()
    return cls


def _parse_value(text: str):
    text = text.strip()
    try:
        return json.loads(text)
    except ValueError:
        return text


def parse_algorithm_id(algorithm_id: str) -> tuple[str, dict[str, Any]]:
    """Split ``"pssa{alpha:0.95,variant:fast}"`` into ``("pssa", {...})``."""
    algorithm_id = algorithm_id.strip()
    if "{" not in algorithm_id:
        return algorithm_id, {}
    if not algorithm_id.endswith("}"):
        raise InvalidParams(f"malformed algorithm id {algorithm_id!r}")
    name, body = algorithm_id[:-1].split("{", 1)
    options = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        if ":" not in item:
            raise InvalidParams(f"malformed option {item!r} in {algorithm_id!r}")
        key, value = item.split(":", 1)
        options[key.strip()] = _parse_value(value)
    return name.strip(), options


def format_algorithm_id(name: str, options: Mapping[str, Any]) -> str:
    if not options:
        return name
    body = ",".join(f"{k}:{json.dumps(options[k])}" for k in sorted(options))
    return f"{name}{{{body}}}"


def get_algorithm(name: str) -> EmbeddingAlgorithm:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownAlgorithm(f"unknown algorithm {name!r}; registered: {sorted(REGISTRY)}") from None


def embed(algorithm_id: str, source: Graph, target: Graph, params: AlgorithmParams) -> AlgorithmResult:
    """Run a registered algorithm; ``algorithm_id`` may carry inline options."""
    name, inline = parse_algorithm_id(algorithm_id)
    algo = get_algorithm(name)
    if inline:
        params = AlgorithmParams(params.seed, params.deadline, params.topology,
                                 {**inline, **params.options})
    return algo.embed(source, target, params)
