"""Chain construction by congestion-weighted shortest paths.

Each source node's chain is grown from a root qubit along cheapest paths to
the chains of its placed neighbours. A qubit costs ``base**k`` when ``k``
other chains already hold it, so early passes may overlap and later passes
push chains apart. After a chain is built, each path segment that serves a
single neighbour is handed to that neighbour, which keeps chain lengths
balanced. Passes repeat until no qubit is shared, then a few more passes
try to shorten the chains.
"""
from __future__ import annotations

import heapq

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from ..graph import Graph
from ..rng import make_rng
from .base import AlgorithmParams, Deadline, EmbeddingAlgorithm, Status, register_algorithm


class _Router:
    """Mutable routing state over the target's positional indices."""

    def __init__(self, source: Graph, target: Graph, base: float, cap: int, rng):
        self.ids, self.indptr, self.indices = target.csr()
        self.size = len(self.ids)
        self.src_adj = {v: sorted(source.neighbors(v)) for v in source.nodes}
        self.chains: dict[int, set[int]] = {}
        self.roots: dict[int, int] = {}
        self.degree = np.diff(self.indptr)
        self.usage = np.zeros(self.size, dtype=np.int64)
        self.base = base
        self.cap = cap
        self.rng = rng
        self.dijkstra_calls = 0

    # bookkeeping

    def lift(self, v) -> set[int] | None:
        chain = self.chains.pop(v, None)
        if chain:
            self.usage[list(chain)] -= 1
        return chain

    def put(self, v, chain: set[int], root: int | None = None):
        self.chains[v] = chain
        if root is not None:
            self.roots[v] = root
        self.usage[list(chain)] += 1

    def overlap(self) -> int:
        return int(np.maximum(self.usage - 1, 0).sum())

    def max_fill(self) -> int:
        return int(self.usage.max()) if self.size else 0

    def total(self) -> int:
        return sum(len(c) for c in self.chains.values())

    def snapshot(self) -> dict[int, frozenset[int]]:
        return {v: frozenset(c) for v, c in self.chains.items()}

    def restore(self, snap):
        self.chains = {v: set(c) for v, c in snap.items()}
        self.usage[:] = 0
        for c in self.chains.values():
            self.usage[list(c)] += 1

    # routing

    def weights(self, bound: int | None = None) -> np.ndarray:
        w = np.power(self.base, np.minimum(self.usage, self.cap)).astype(float)
        if bound is not None:
            w[self.usage >= bound] = np.inf
        return w

    def route(self, v, bound: int | None = None) -> bool:
        """Build and install a chain for the (lifted) node ``v``.

        Qubits held by ``bound`` or more chains are impassable. Returns False,
        leaving ``v`` unplaced, when no root is reachable.
        """
        w = self.weights(bound)
        placed = [u for u in self.src_adj[v] if u in self.chains]
        if not placed:
            ok = np.flatnonzero(w == w.min())
            if not np.isfinite(w.min()):
                return False
            q = int(ok[int(self.rng.integers(ok.size))])
            self.put(v, {q}, q)
            return True

        shape = (self.size, self.size)
        graph = csr_matrix((w[self.indices], self.indices, self.indptr), shape=shape)
        limit = self._cost_bound(v, placed, w, shape)
        cost = w.copy()
        dists, preds = {}, {}
        for u in placed:
            src = np.fromiter(self.chains[u], dtype=np.int64)
            dist, pred = dijkstra(graph, directed=True, indices=src, min_only=True,
                                  return_predecessors=True, limit=limit)[:2]
            self.dijkstra_calls += 1
            with np.errstate(invalid="ignore"):
                # dist counts the endpoint's own weight; the root pays it once
                cost += np.where(np.isfinite(dist), np.maximum(dist - w, 0.0), np.inf)
            dists[u], preds[u] = dist, pred
        lowest = cost.min()
        if not np.isfinite(lowest):
            return False
        ties = np.flatnonzero(cost == lowest)
        root = int(ties[int(self.rng.integers(ties.size))])

        # Steiner-style growth: each path leaves from the chain qubit closest to its target
        chain = [root]
        members = {root}
        segments = []
        for u in placed:
            dist, pred = dists[u], preds[u]
            start = min(chain, key=lambda q: (dist[q], q))
            seg = []
            x = int(pred[start])
            while x >= 0 and pred[x] >= 0:
                seg.append(x)
                x = int(pred[x])
            segments.append((u, start, seg))
            for q in seg:
                members.add(q)
                chain.append(q)

        # hand each segment's unshared tail to the neighbour it reaches
        anchors = {start for _, start, _ in segments}
        keep = set(members)
        given = {}
        for u, _, seg in segments:
            cut = max((i for i, q in enumerate(seg) if q in anchors), default=-1)
            tail = seg[cut + 1:]
            if tail:
                given[u] = tail
                keep.difference_update(tail)
        for u, tail in given.items():
            self.chains[u].update(tail)
            self.usage[tail] += 1
        self.put(v, keep, root)
        return True

    def _cost_bound(self, v, placed, w, shape) -> float:
        """Cost of one candidate root, an upper bound on the best root's cost.

        A root's cost is at least its distance to each neighbour chain, so
        the per-neighbour searches can stop at this bound without changing
        the result. The candidate is ``v``'s previous root when it is known.
        """
        hint = self.roots.get(v)
        if hint is None or not np.isfinite(w[hint]):
            hint = self.roots.get(placed[0])
        if hint is None or not np.isfinite(w[hint]):
            return np.inf
        # reversed edges carry the weight of the node they leave
        rev = csr_matrix((np.repeat(w, self.degree), self.indices, self.indptr), shape=shape)
        back = dijkstra(rev, directed=True, indices=hint)
        self.dijkstra_calls += 1
        total = w[hint]
        for u in placed:
            d = back[list(self.chains[u])].min()
            total += max(d - w[hint], 0.0)
        # slack so that roots tying with the candidate are still found
        return total * (1 + 1e-9) + 1e-9

    def fill_key(self) -> tuple[int, int]:
        """(largest number of chains on one qubit, number of qubits at that fill)."""
        top = self.max_fill()
        return top, int((self.usage == top).sum())

    def length_key(self) -> tuple[int, int]:
        sizes = [len(c) for c in self.chains.values()]
        top = max(sizes)
        return top, sizes.count(top)


class _Timeout(Exception):
    pass


def placement_order(adj: dict, rng) -> list:
    """Seeded order that always places next a node with the most placed neighbours.

    Ties are broken by a random rank, and each component starts at its
    lowest-ranked node, so chains tend to be routed next to existing ones.
    """
    nodes = list(adj)
    rank = {v: int(r) for v, r in zip(nodes, rng.permutation(len(nodes)))}
    placed_nbrs = dict.fromkeys(nodes, 0)
    done = set()
    order = []
    for start in sorted(nodes, key=rank.__getitem__):
        if start in done:
            continue
        heap = [(0, rank[start], start)]
        while heap:
            _, _, v = heapq.heappop(heap)
            if v in done:
                continue
            done.add(v)
            order.append(v)
            for u in adj[v]:
                if u not in done:
                    placed_nbrs[u] += 1
                    heapq.heappush(heap, (-placed_nbrs[u], rank[u], u))
    return order


@register_algorithm
class PathfinderEmbedding(EmbeddingAlgorithm):
    """Shortest-path chain router with congestion penalties.

    Options:
        base: growth factor of a qubit's cost per extra chain holding it.
        cap: largest exponent applied to ``base``.
        patience: passes without progress before a restart.
        rounds: hard limit on passes per restart.
        tries: number of restarts from a fresh random order.
        length_patience: chain-shortening passes without progress before
            stopping (0 disables the phase).
    """

    name = "pathfinder"
    version = "1.0"
    defaults = {"base": 1e6, "cap": 8, "patience": 10, "rounds": 100, "tries": 10,
                "length_patience": 3}

    def run(self, source, target, params: AlgorithmParams, options):
        deadline = Deadline(params.deadline)
        rng = make_rng(params.seed, "pathfinder")
        counters = {"tries": 0, "passes": 0, "placements": 0, "bounces": 0}
        nodes = list(source.nodes)
        router = None
        earlier_calls = 0

        def place(v, bound=None) -> bool:
            if deadline.expired():
                raise _Timeout
            counters["placements"] += 1
            return router.route(v, bound)

        def done(status, chains=None):
            calls = earlier_calls + (router.dijkstra_calls if router else 0)
            return self.result(status, chains, dijkstra_calls=calls, **counters)

        try:
            for _ in range(int(options["tries"])):
                counters["tries"] += 1
                if router is not None:
                    earlier_calls += router.dijkstra_calls
                router = _Router(source, target, float(options["base"]), int(options["cap"]), rng)
                if self._search(router, nodes, rng, options, counters, place):
                    self._shorten(router, nodes, rng, options, counters, place)
                    ids = router.ids
                    return done(Status.SUCCESS, {v: ids[sorted(c)].tolist()
                                                 for v, c in router.chains.items()})
        except _Timeout:
            return done(Status.TIMEOUT)
        return done(Status.FAILURE)

    @staticmethod
    def _search(router, nodes, rng, options, counters, place) -> bool:
        """One restart: initial placement then overlap-reducing passes."""
        for v in placement_order(router.src_adj, rng):
            if not place(v):
                return False
        best_key, best = router.fill_key(), router.snapshot()
        if best_key[0] <= 1:
            return True
        stale = 0
        pushback = 0
        n = len(nodes)
        for _ in range(int(options["rounds"])):
            if stale >= options["patience"]:
                break
            counters["passes"] += 1
            improved = False
            pushdown = pushback < n
            for v in placement_order(router.src_adj, rng):
                old = router.lift(v)
                if pushdown:
                    # only accept chains avoiding qubits as full as the worst one held now
                    bound = int(router.usage[list(old)].max()) + 1
                    if not place(v, bound):
                        router.put(v, old)
                        counters["bounces"] += 1
                        pushback += 3
                elif not place(v):
                    router.restore(best)
                    break
                key = router.fill_key()
                if key < best_key:
                    best_key, best, improved = key, router.snapshot(), True
                    if key[0] <= 1:
                        return True
            if improved:
                stale, pushback = 0, 0
            else:
                stale += 1
                pushback += 2 * n // max(1, int(options["patience"]))
                if not pushdown:
                    pushback -= 1
        return False

    @staticmethod
    def _shorten(router, nodes, rng, options, counters, place):
        """Re-route chains over free qubits while the longest chains get shorter."""
        patience = int(options["length_patience"])
        best_key = router.length_key()
        stale = 0
        while stale < patience:
            counters["passes"] += 1
            improved = False
            for i in rng.permutation(len(nodes)):
                v = nodes[int(i)]
                snap = router.snapshot()
                router.lift(v)
                if not place(v, 1):
                    router.restore(snap)
                    continue
                key = router.length_key()
                if key < best_key:
                    best_key, improved = key, True
                elif key > best_key:
                    router.restore(snap)
            stale = 0 if improved else stale + 1
