"""Embedding algorithms. Importing this package registers all of them."""
from .base import (CHECK_INTERVAL_S, REGISTRY, AlgorithmParams, AlgorithmResult, Deadline,
                   EmbeddingAlgorithm, Status, embed, format_algorithm_id, get_algorithm,
                   parse_algorithm_id, register_algorithm)
from . import clique, pathfinder, pssa  # noqa: F401  (registration side effects)

__all__ = [
    "CHECK_INTERVAL_S", "REGISTRY", "AlgorithmParams", "AlgorithmResult", "Deadline",
    "EmbeddingAlgorithm", "Status", "embed", "format_algorithm_id", "get_algorithm",
    "parse_algorithm_id", "register_algorithm",
]
