"""Immutable undirected simple graphs with integer node ids."""
from __future__ import annotations

from collections import deque
from typing import Iterable

import numpy as np

from .errors import InvalidGraph


class Graph:
    """An immutable simple undirected graph.

    Generators produce dense ids ``0..n-1``. Graphs derived by node removal
    (see :mod:`minorbench.faults`) keep the surviving ids, so ``nodes`` is in
    general a sorted tuple of non-negative integers rather than a range.

    Two graphs are equal when their node sets and edge sets are equal.
    """

    __slots__ = ("_nodes", "_node_set", "_edges", "_adj", "_hash", "_csr")

    def __init__(self, nodes: int | Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        if isinstance(nodes, (int, np.integer)):
            if nodes < 0:
                raise InvalidGraph("node count must be non-negative")
            node_tuple = tuple(range(int(nodes)))
        else:
            node_tuple = tuple(sorted({int(v) for v in nodes}))
            if node_tuple and node_tuple[0] < 0:
                raise InvalidGraph("node ids must be non-negative")
        node_set = frozenset(node_tuple)
        adj: dict[int, set[int]] = {v: set() for v in node_tuple}
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidGraph(f"self-loop at node {u}")
            if u not in node_set or v not in node_set:
                raise InvalidGraph(f"edge ({u}, {v}) has an endpoint outside the node set")
            if u > v:
                u, v = v, u
            canon.add((u, v))
            adj[u].add(v)
            adj[v].add(u)
        self._nodes = node_tuple
        self._node_set = node_set
        self._edges = frozenset(canon)
        self._adj = {v: frozenset(nb) for v, nb in adj.items()}
        self._hash = None
        self._csr = None

    # -- basic queries -----------------------------------------------------
    @property
    def nodes(self) -> tuple[int, ...]:
        return self._nodes

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        """Edges as ``(u, v)`` pairs with ``u < v``."""
        return self._edges

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def is_dense(self) -> bool:
        """True when node ids are exactly ``0..node_count-1``."""
        return not self._nodes or self._nodes[-1] == len(self._nodes) - 1

    def __contains__(self, v) -> bool:
        return v in self._node_set

    def __len__(self) -> int:
        return len(self._nodes)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> dict[int, int]:
        return {v: len(nb) for v, nb in self._adj.items()}

    def max_degree(self) -> int:
        return max((len(nb) for nb in self._adj.values()), default=0)

    def mean_degree(self) -> float:
        return 2.0 * len(self._edges) / len(self._nodes) if self._nodes else 0.0

    def has_edge(self, u: int, v: int) -> bool:
        nb = self._adj.get(u)
        return nb is not None and v in nb

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self._edges)

    # -- equality ----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._nodes, self._edges))
        return self._hash

    def __repr__(self):
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"

    def __getstate__(self):
        return (self._nodes, self.sorted_edges())

    def __setstate__(self, state):
        nodes, edges = state
        Graph.__init__(self, nodes, edges)

    # -- derived graphs ----------------------------------------------------
    def subgraph(self, nodes: Iterable[int]) -> "Graph":
        """Induced subgraph on ``nodes`` (ids preserved)."""
        keep = {int(v) for v in nodes}
        missing = keep - self._node_set
        if missing:
            raise InvalidGraph(f"nodes not in graph: {sorted(missing)[:5]}")
        return Graph(keep, ((u, v) for u, v in self._edges if u in keep and v in keep))

    def without_nodes(self, nodes: Iterable[int]) -> "Graph":
        drop = {int(v) for v in nodes}
        return self.subgraph(v for v in self._nodes if v not in drop)

    def relabeled(self) -> tuple["Graph", dict[int, int]]:
        """Dense relabeling in increasing id order; returns ``(graph, old->new)``."""
        mapping = {v: i for i, v in enumerate(self._nodes)}
        g = Graph(len(self._nodes), ((mapping[u], mapping[v]) for u, v in self._edges))
        return g, mapping

    # -- traversal ---------------------------------------------------------
    def components(self) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for s in self._nodes:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            out.append(comp)
        return out

    def is_connected(self) -> bool:
        if not self._nodes:
            return True
        return len(self.components()[0]) == len(self._nodes)

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Compressed adjacency over positional indices.

        Returns ``(ids, indptr, indices)`` where ``ids[i]`` is the node id at
        position ``i`` and the neighbours of position ``i`` are
        ``indices[indptr[i]:indptr[i+1]]`` (positions, sorted).
        """
        if self._csr is None:
            ids = np.asarray(self._nodes, dtype=np.int64)
            pos = {v: i for i, v in enumerate(self._nodes)}
            indptr = np.zeros(len(ids) + 1, dtype=np.int64)
            chunks = []
            for i, v in enumerate(self._nodes):
                nb = sorted(pos[w] for w in self._adj[v])
                indptr[i + 1] = indptr[i] + len(nb)
                chunks.extend(nb)
            self._csr = (ids, indptr, np.asarray(chunks, dtype=np.int64))
        return self._csr

    # -- interchange -------------------------------------------------------
    def to_edgelist(self) -> str:
        """Edge-list text: ``p <n_nodes> <n_edges>`` then one ``u v`` per line.

        Graphs with non-dense ids additionally list every node as ``v <id>``
        after the header so that isolated nodes survive a round trip.
        """
        lines = [f"p {self.node_count} {self.edge_count}"]
        if not self.is_dense:
            lines.extend(f"v {v}" for v in self._nodes)
        lines.extend(f"{u} {v}" for u, v in self.sorted_edges())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> "Graph":
        header = None
        explicit: list[int] = []
        edges = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith(("#", "c ")):
                continue
            parts = line.split()
            if parts[0] == "p":
                if len(parts) != 3:
                    raise InvalidGraph(f"line {lineno}: malformed header")
                header = (int(parts[1]), int(parts[2]))
            elif parts[0] == "v":
                explicit.append(int(parts[1]))
            else:
                if len(parts) != 2:
                    raise InvalidGraph(f"line {lineno}: expected 'u v'")
                edges.append((int(parts[0]), int(parts[1])))
        if header is None:
            raise InvalidGraph("missing 'p <n_nodes> <n_edges>' header")
        g = cls(explicit if explicit else header[0], edges)
        if g.node_count != header[0] or g.edge_count != header[1]:
            raise InvalidGraph(
                f"header says {header[0]} nodes/{header[1]} edges, "
                f"body has {g.node_count}/{g.edge_count}"
            )
        return g
