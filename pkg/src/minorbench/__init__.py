"""Benchmark harness for minor embedding onto quantum-annealer hardware graphs."""
__version__ = "0.1.0"

from .algorithms import AlgorithmParams, AlgorithmResult, Status, embed, get_algorithm
from .embedding import Embedding, compute_metrics, validate_embedding
from .errors import MinorBenchError
from .faults import FaultSpec, inject_faults
from .generators import GraphSpec, generate
from .graph import Graph
from .topology import TopologyDescriptor, build, max_native_clique

__all__ = [
    "__version__", "AlgorithmParams", "AlgorithmResult", "Status", "embed", "get_algorithm",
    "Embedding", "compute_metrics", "validate_embedding", "MinorBenchError", "FaultSpec",
    "inject_faults", "GraphSpec", "generate", "Graph", "TopologyDescriptor", "build",
    "max_native_clique",
]
