"""Seeded source-graph generators.

Every family is a pure function of its parameters and seed. Node ids are
dense and follow a fixed per-family order:

* random families, complete, turan, circulant, hypercube, path, cycle:
  the natural ``0..n-1`` order of the construction;
* complete_bipartite: part A is ``0..a-1``, part B follows;
* lattices: row-major, ``id = y * width + x`` (kagome: ``3 * cell + s`` with
  ``s`` the sublattice index);
* star and wheel: hub is node 0;
* balanced_tree: breadth-first order from the root;
* planted and native_subgraph: see their docstrings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from .embedding import Embedding
from .errors import (GenerationFailure, InvalidParams, PartitionFailure,
                     SamplingFailure, UnknownFamily)
from .graph import Graph
from .rng import make_rng
from .topology import TopologyDescriptor, build

D_REGULAR_RETRIES = 100
PLANTED_RETRIES = 50
SAMPLING_RETRIES = 50


# ---------------------------------------------------------------------------
# spec and registry


def _fmt_value(v) -> str:
    if isinstance(v, dict):
        try:
            return TopologyDescriptor.from_dict(v).label
        except Exception:
            return json.dumps(v, sort_keys=True, separators=(",", ":"))
    if isinstance(v, (list, tuple)):
        return "-".join(_fmt_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class GraphSpec:
    """A family name, its parameters and a seed.

    ``id`` is a stable string built from all three (the seed is omitted for
    deterministic families) and doubles as the deduplication key.
    """

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __hash__(self):
        return hash(self.id)

    def __eq__(self, other):
        return isinstance(other, GraphSpec) and self.id == other.id

    @property
    def id(self) -> str:
        body = ",".join(f"{k}={_fmt_value(self.params[k])}" for k in sorted(self.params))
        text = f"{self.family}[{body}]"
        if FAMILIES.get(self.family, _Family(None, True)).randomized:
            text += f"@s{self.seed}"
        return text

    @property
    def category(self) -> str:
        return self.family

    def to_dict(self) -> dict:
        return {"family": self.family, "params": _plain(self.params), "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "GraphSpec":
        unknown = set(data) - {"family", "params", "seed"}
        if unknown:
            raise InvalidParams(f"unknown graph spec keys: {sorted(unknown)}")
        return cls(str(data["family"]), dict(data.get("params") or {}), int(data.get("seed", 0)))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, TopologyDescriptor):
        return obj.to_dict()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


@dataclass(frozen=True)
class _Family:
    fn: Callable[..., Graph] | None
    randomized: bool


FAMILIES: dict[str, _Family] = {}


def register_family(name: str, randomized: bool = True):
    """Decorator adding a generator ``fn(params: dict, seed: int) -> Graph``."""
    def deco(fn):
        FAMILIES[name] = _Family(fn, randomized)
        return fn
    return deco


def generate(spec: GraphSpec) -> Graph:
    """Build the graph described by ``spec``."""
    fam = FAMILIES.get(spec.family)
    if fam is None:
        raise UnknownFamily(f"unknown graph family {spec.family!r}")
    return fam.fn(dict(spec.params), int(spec.seed))


# ---------------------------------------------------------------------------
# parameter helpers


def _take(params: dict, family: str, required: tuple[str, ...], optional: dict | None = None):
    optional = optional or {}
    unknown = set(params) - set(required) - set(optional)
    if unknown:
        raise InvalidParams(f"{family}: unknown parameters {sorted(unknown)}")
    missing = [k for k in required if k not in params]
    if missing:
        raise InvalidParams(f"{family}: missing parameters {missing}")
    out = [params[k] for k in required]
    out.extend(params.get(k, default) for k, default in optional.items())
    return out


def _int(value, name: str, lo: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise InvalidParams(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo:
        raise InvalidParams(f"{name} must be >= {lo}, got {value}")
    return value


def _prob(value, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidParams(f"{name} must satisfy 0 <= {name} <= 1, got {value}")
    return value


# ---------------------------------------------------------------------------
# random families


def _pairs_bernoulli(n: int, probs, rng) -> list[tuple[int, int]]:
    iu, ju = np.triu_indices(n, k=1)
    draws = rng.random(iu.size)
    keep = draws < probs
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def gen_random(kind: str, params: dict, seed: int) -> Graph:
    """Random graph families: erdos_renyi, watts_strogatz, barabasi_albert,
    d_regular and stochastic_block."""
    rng = make_rng(seed, kind)
    if kind == "erdos_renyi":
        n, p = _take(params, kind, ("n", "p"))
        n = _int(n, "n", 0)
        p = _prob(p, "p")
        return Graph(n, _pairs_bernoulli(n, p, rng))

    if kind == "stochastic_block":
        sizes, p_in, p_out, n = _take(params, kind, ("sizes", "p_in", "p_out"), {"n": None})
        sizes = [_int(s, "block size", 1) for s in sizes]
        total = sum(sizes)
        if n is not None and _int(n, "n", 0) != total:
            raise InvalidParams(f"stochastic_block: block sizes sum to {total}, not n={n}")
        p_in, p_out = _prob(p_in, "p_in"), _prob(p_out, "p_out")
        block = np.repeat(np.arange(len(sizes)), sizes)
        iu, ju = np.triu_indices(total, k=1)
        probs = np.where(block[iu] == block[ju], p_in, p_out)
        return Graph(total, _pairs_bernoulli(total, probs, rng))

    if kind == "watts_strogatz":
        n, k, beta = _take(params, kind, ("n", "k", "beta"))
        n, k = _int(n, "n", 1), _int(k, "k", 0)
        beta = _prob(beta, "beta")
        if k % 2:
            raise InvalidParams(f"watts_strogatz: k must be even, got {k}")
        if k >= n:
            raise InvalidParams(f"watts_strogatz: k must be < n, got k={k}, n={n}")
        adj = [set() for _ in range(n)]
        for j in range(1, k // 2 + 1):
            for u in range(n):
                v = (u + j) % n
                adj[u].add(v)
                adj[v].add(u)
        for j in range(1, k // 2 + 1):
            for u in range(n):
                if rng.random() >= beta:
                    continue
                v = (u + j) % n
                if v not in adj[u] or len(adj[u]) >= n - 1:
                    continue
                w = int(rng.integers(n))
                while w == u or w in adj[u]:
                    w = int(rng.integers(n))
                adj[u].discard(v)
                adj[v].discard(u)
                adj[u].add(w)
                adj[w].add(u)
        return Graph(n, ((u, v) for u in range(n) for v in adj[u] if u < v))

    if kind == "barabasi_albert":
        n, m = _take(params, kind, ("n", "m"))
        n, m = _int(n, "n", 1), _int(m, "m", 1)
        if m >= n:
            raise InvalidParams(f"barabasi_albert: requires 1 <= m < n, got m={m}, n={n}")
        edges = list(combinations(range(m), 2))
        # each node appears once per incident edge end
        repeated = [v for e in edges for v in e] or list(range(m))
        for new in range(m, n):
            targets: set[int] = set()
            while len(targets) < m:
                targets.add(repeated[int(rng.integers(len(repeated)))])
            for t in sorted(targets):
                edges.append((t, new))
                repeated.extend((t, new))
        return Graph(n, edges)

    if kind == "d_regular":
        n, d = _take(params, kind, ("n", "d"))
        n, d = _int(n, "n", 0), _int(d, "d", 0)
        if (n * d) % 2:
            raise InvalidParams(f"d_regular: n*d must be even, got n={n}, d={d}")
        if d >= n and n > 0:
            raise InvalidParams(f"d_regular: requires d < n, got d={d}, n={n}")
        for _ in range(D_REGULAR_RETRIES):
            edges = _pairing_attempt(n, d, rng)
            if edges is not None:
                return Graph(n, edges)
        raise GenerationFailure(f"d_regular: pairing model failed {D_REGULAR_RETRIES} times for n={n}, d={d}")

    raise UnknownFamily(f"unknown random family {kind!r}")


def _pairing_attempt(n: int, d: int, rng) -> set[tuple[int, int]] | None:
    """One pass of the pairing model, rejecting loops and repeated pairs as they arise."""
    points = [v for v in range(n) for _ in range(d)]
    edges: set[tuple[int, int]] = set()
    while points:
        chosen = None
        for _ in range(32):
            i, j = rng.choice(len(points), size=2, replace=False)
            u, v = points[i], points[j]
            if u != v and (min(u, v), max(u, v)) not in edges:
                chosen = (int(i), int(j))
                break
        if chosen is None:
            valid = [(i, j) for i, j in combinations(range(len(points)), 2)
                     if points[i] != points[j]
                     and (min(points[i], points[j]), max(points[i], points[j])) not in edges]
            if not valid:
                return None
            chosen = valid[int(rng.integers(len(valid)))]
        i, j = chosen
        u, v = points[i], points[j]
        edges.add((min(u, v), max(u, v)))
        for idx in sorted((i, j), reverse=True):
            points.pop(idx)
    return edges


# ---------------------------------------------------------------------------
# structured families


def gen_structured(kind: str, params: dict) -> Graph:
    if kind == "complete":
        (n,) = _take(params, kind, ("n",))
        n = _int(n, "n", 0)
        return Graph(n, combinations(range(n), 2))

    if kind == "complete_bipartite":
        a, b = _take(params, kind, ("a", "b"))
        a, b = _int(a, "a", 0), _int(b, "b", 0)
        return Graph(a + b, ((i, a + j) for i in range(a) for j in range(b)))

    if kind == "turan":
        n, r = _take(params, kind, ("n", "r"))
        n, r = _int(n, "n", 1), _int(r, "r", 1)
        if r > n:
            raise InvalidParams(f"turan: requires 1 <= r <= n, got r={r}, n={n}")
        part = []
        base, extra = divmod(n, r)
        for p in range(r):
            part.extend([p] * (base + (1 if p < extra else 0)))
        return Graph(n, ((u, v) for u, v in combinations(range(n), 2) if part[u] != part[v]))

    if kind == "circulant":
        n, offsets = _take(params, kind, ("n", "offsets"))
        n = _int(n, "n", 1)
        offsets = sorted({_int(o, "offset") for o in offsets})
        bad = [o for o in offsets if not 1 <= o <= n // 2]
        if bad:
            raise InvalidParams(f"circulant: offsets must lie in 1..{n // 2}, got {bad}")
        return Graph(n, ((i, (i + o) % n) for i in range(n) for o in offsets))

    if kind == "hypercube":
        (d,) = _take(params, kind, ("d",))
        d = _int(d, "d", 0)
        n = 1 << d
        return Graph(n, ((v, v ^ (1 << b)) for v in range(n) for b in range(d) if not v & (1 << b)))

    raise UnknownFamily(f"unknown structured family {kind!r}")


# ---------------------------------------------------------------------------
# lattices (open boundaries)


def gen_lattice(kind: str, width: int, height: int) -> Graph:
    width, height = _int(width, "width", 1), _int(height, "height", 1)

    def idx(x, y):
        return y * width + x

    def inside(x, y):
        return 0 <= x < width and 0 <= y < height

    if kind == "kagome":
        # three sites per cell: corner a (0), half along e1 b (1), half along e2 c (2)
        def site(x, y, s):
            return 3 * idx(x, y) + s

        edges = []
        for y in range(height):
            for x in range(width):
                a, b, c = site(x, y, 0), site(x, y, 1), site(x, y, 2)
                edges += [(a, b), (a, c), (b, c)]
                # the "down" triangle sharing corner a
                left = (x - 1, y) if inside(x - 1, y) else None
                below = (x, y - 1) if inside(x, y - 1) else None
                if left:
                    edges.append((a, site(*left, 1)))
                if below:
                    edges.append((a, site(*below, 2)))
                if left and below:
                    edges.append((site(*left, 1), site(*below, 2)))
        return Graph(3 * width * height, edges)

    steps = {
        "grid": [(1, 0), (0, 1)],
        "triangular": [(1, 0), (0, 1), (-1, 1)],
        "king": [(1, 0), (0, 1), (1, 1), (-1, 1)],
    }
    if kind == "honeycomb":
        # brick wall: every horizontal bond, vertical bonds on alternating columns
        edges = []
        for y in range(height):
            for x in range(width):
                if x + 1 < width:
                    edges.append((idx(x, y), idx(x + 1, y)))
                if y + 1 < height and (x + y) % 2 == 0:
                    edges.append((idx(x, y), idx(x, y + 1)))
        return Graph(width * height, edges)
    if kind not in steps:
        raise UnknownFamily(f"unknown lattice {kind!r}")
    edges = [(idx(x, y), idx(x + dx, y + dy))
             for y in range(height) for x in range(width)
             for dx, dy in steps[kind] if inside(x + dx, y + dy)]
    return Graph(width * height, edges)


# ---------------------------------------------------------------------------
# topological extremals


def gen_topological(kind: str, params: dict) -> Graph:
    if kind == "balanced_tree":
        r, h = _take(params, kind, ("r", "h"))
        r, h = _int(r, "r", 1), _int(h, "h", 0)
        n = h + 1 if r == 1 else (r ** (h + 1) - 1) // (r - 1)
        return Graph(n, ((v, (v - 1) // r) for v in range(1, n)))
    (n,) = _take(params, kind, ("n",))
    if kind == "path":
        n = _int(n, "n", 1)
        return Graph(n, ((i, i + 1) for i in range(n - 1)))
    if kind == "cycle":
        n = _int(n, "n", 3)
        return Graph(n, ((i, (i + 1) % n) for i in range(n)))
    if kind == "star":
        n = _int(n, "n", 1)
        return Graph(n, ((0, i) for i in range(1, n)))
    if kind == "wheel":
        n = _int(n, "n", 4)
        rim = n - 1
        return Graph(n, [(0, i) for i in range(1, n)] + [(1 + i, 1 + (i + 1) % rim) for i in range(rim)])
    raise UnknownFamily(f"unknown topological family {kind!r}")


# ---------------------------------------------------------------------------
# benchmarking families built on a hardware graph


def _resolve_target(target) -> Graph:
    if isinstance(target, Graph):
        return target
    return build(TopologyDescriptor.from_dict(target))


def _largest_component(g: Graph) -> list[int]:
    return sorted(max(g.components(), key=len)) if g.node_count else []


def gen_planted(target, chain_count: int, seed: int) -> tuple[Graph, Embedding]:
    """Planted-solution graph and its embedding witness.

    The largest connected component of ``target`` is split into
    ``chain_count`` connected chains by seeded BFS growth: roots are drawn at
    random, then the smallest chain that can still grow (lowest index on ties)
    absorbs a random node of its frontier until every node is assigned.
    Chain ``i`` becomes source node ``i``; two source nodes are adjacent iff
    some hardware edge joins their chains. The witness maps each source node
    to its chain and is a valid embedding of the result into ``target``.
    """
    g = _resolve_target(target)
    chain_count = _int(chain_count, "chain_count", 1)
    nodes = _largest_component(g)
    if chain_count > len(nodes):
        raise InvalidParams(
            f"planted: chain_count={chain_count} exceeds the {len(nodes)} nodes of the target's largest component")
    rng = make_rng(seed, "planted")
    for _ in range(PLANTED_RETRIES):
        owner = _grow_partition(g, nodes, chain_count, rng)
        if owner is not None:
            break
    else:
        raise PartitionFailure(f"planted: no connected partition after {PLANTED_RETRIES} attempts")
    chains: list[list[int]] = [[] for _ in range(chain_count)]
    for q in nodes:
        chains[owner[q]].append(q)
    quotient = {(min(owner[u], owner[v]), max(owner[u], owner[v]))
                for u, v in g.edges if u in owner and v in owner and owner[u] != owner[v]}
    witness = Embedding({i: c for i, c in enumerate(chains)})
    return Graph(chain_count, quotient), witness


def _grow_partition(g: Graph, nodes: list[int], k: int, rng) -> dict[int, int] | None:
    roots = [nodes[int(i)] for i in rng.choice(len(nodes), size=k, replace=False)]
    owner = {r: i for i, r in enumerate(roots)}
    size = [1] * k
    frontier: list[set[int]] = [set() for _ in range(k)]
    for i, r in enumerate(roots):
        frontier[i].update(w for w in g.neighbors(r) if w not in owner)
    remaining = len(nodes) - k
    while remaining:
        growable = [i for i in range(k) if frontier[i]]
        if not growable:
            return None
        i = min(growable, key=lambda c: (size[c], c))
        cand = sorted(frontier[i])
        q = cand[int(rng.integers(len(cand)))]
        owner[q] = i
        size[i] += 1
        remaining -= 1
        for f in frontier:
            f.discard(q)
        frontier[i].update(w for w in g.neighbors(q) if w not in owner)
    return owner


def gen_native_subgraph(target, node_count: int, seed: int) -> tuple[Graph, Embedding]:
    """Connected induced subgraph of ``target`` grown by seeded random BFS.

    Returns the subgraph relabeled to dense ids (increasing hardware id
    order) and the identity witness mapping each new id to its original
    qubit.
    """
    g = _resolve_target(target)
    node_count = _int(node_count, "node_count", 1)
    if node_count > g.node_count:
        raise InvalidParams(f"native_subgraph: node_count={node_count} exceeds target size {g.node_count}")
    rng = make_rng(seed, "native_subgraph")
    for _ in range(SAMPLING_RETRIES):
        start = g.nodes[int(rng.integers(g.node_count))]
        chosen = {start}
        frontier = set(g.neighbors(start))
        while len(chosen) < node_count and frontier:
            cand = sorted(frontier)
            q = cand[int(rng.integers(len(cand)))]
            chosen.add(q)
            frontier.discard(q)
            frontier.update(w for w in g.neighbors(q) if w not in chosen)
        if len(chosen) == node_count:
            sub, mapping = g.subgraph(chosen).relabeled()
            return sub, Embedding({new: [old] for old, new in mapping.items()})
    raise SamplingFailure(f"native_subgraph: no connected subgraph of {node_count} nodes found")


# ---------------------------------------------------------------------------
# registry wiring

for _name in ("erdos_renyi", "watts_strogatz", "barabasi_albert", "d_regular", "stochastic_block"):
    register_family(_name)(lambda p, s, _k=_name: gen_random(_k, p, s))
for _name in ("complete", "complete_bipartite", "turan", "circulant", "hypercube"):
    register_family(_name, randomized=False)(lambda p, s, _k=_name: gen_structured(_k, p))
for _name in ("grid", "triangular", "honeycomb", "kagome", "king"):
    register_family(_name, randomized=False)(
        lambda p, s, _k=_name: gen_lattice(_k, *_take(p, _k, ("width", "height"))))
for _name in ("path", "cycle", "star", "wheel", "balanced_tree"):
    register_family(_name, randomized=False)(lambda p, s, _k=_name: gen_topological(_k, p))


@register_family("planted")
def _planted(params, seed):
    target, chain_count = _take(params, "planted", ("target", "chain_count"))
    return gen_planted(target, chain_count, seed)[0]


@register_family("native_subgraph")
def _native(params, seed):
    target, node_count = _take(params, "native_subgraph", ("target", "node_count"))
    return gen_native_subgraph(target, node_count, seed)[0]

