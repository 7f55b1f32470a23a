"""Exception hierarchy shared across the package."""


class MinorBenchError(Exception):
    """Base class for all package errors."""


class InvalidParams(MinorBenchError, ValueError):
    """Generator or topology parameters violate a documented constraint."""


class UnknownFamily(MinorBenchError, KeyError):
    """Requested graph family is not registered."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown family"


class GenerationFailure(MinorBenchError, RuntimeError):
    """A randomized generator exhausted its retry budget."""


class PartitionFailure(GenerationFailure):
    """A connected partition of the target could not be completed."""


class SamplingFailure(GenerationFailure):
    """No connected induced subgraph of the requested size was found."""


class InvalidGraph(MinorBenchError, ValueError):
    """Graph data breaks the simple-undirected-graph invariants."""


class EmptyEmbedding(MinorBenchError, ValueError):
    """Metrics were requested for an embedding with no chains."""


class UnknownAlgorithm(MinorBenchError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown algorithm"


class InvalidPattern(MinorBenchError, ValueError):
    """A fault pattern names a node that is not in the target graph."""


class ConfigError(MinorBenchError, ValueError):
    """Experiment configuration is invalid; ``path`` locates the bad key."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class CorruptCheckpoint(MinorBenchError, RuntimeError):
    """Checkpoint and results log disagree; the run must be restarted."""


class EmptyCategory(MinorBenchError, ValueError):
    pass


class InvalidCounts(MinorBenchError, ValueError):
    pass


class DegenerateTable(MinorBenchError, ValueError):
    """Every row of a rank table is fully tied."""


class TooFewPairs(MinorBenchError, ValueError):
    pass


class MalformedRecord(MinorBenchError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
