from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minorbench.embedding import Embedding, ViolationKind, compute_metrics, validate_embedding
from minorbench.errors import EmptyEmbedding
from minorbench.generators import GraphSpec, gen_planted, generate
from minorbench.graph import Graph
from minorbench.topology import build_chimera

K = ViolationKind


def kinds(report):
    return {v.kind for v in report.violations}


def test_identity_on_k3():
    k3 = generate(GraphSpec("complete", {"n": 3}))
    assert validate_embedding(k3, k3, {0: [0], 1: [1], 2: [2]}).valid


def test_disconnected_chain_on_path():
    k2 = generate(GraphSpec("complete", {"n": 2}))
    path = generate(GraphSpec("path", {"n": 3}))
    rep = validate_embedding(k2, path, {0: [0, 2], 1: [1]})
    assert kinds(rep) == {K.DISCONNECTED_CHAIN}
    assert rep.violations[0].nodes == (0,)


def _connected_subsets(target):
    out = []
    nodes = list(target.nodes)
    for mask in range(1, 2 ** len(nodes)):
        chosen = [v for i, v in enumerate(nodes) if mask >> i & 1]
        if target.subgraph(chosen).is_connected():
            out.append(chosen)
    return out


def _brute_force_valid(source, target, chains):
    """The three minor-embedding conditions, checked independently of the validator."""
    for chain in chains.values():
        seen, stack = {chain[0]}, [chain[0]]
        while stack:
            x = stack.pop()
            for y in chain:
                if y not in seen and (min(x, y), max(x, y)) in target.edges:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(chain):
            return False
    used = [q for c in chains.values() for q in c]
    if len(used) != len(set(used)):
        return False
    return all(any((min(a, b), max(a, b)) in target.edges for a in chains[u] for b in chains[v])
               for u, v in source.edges)


def test_k3_into_c4_exhaustive():
    k3 = generate(GraphSpec("complete", {"n": 3}))
    c4 = generate(GraphSpec("cycle", {"n": 4}))
    subsets = _connected_subsets(c4)
    valid = 0
    for a, b, c in product(subsets, repeat=3):
        if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
            continue
        chains = {0: a, 1: b, 2: c}
        rep = validate_embedding(k3, c4, chains)
        assert rep.valid == _brute_force_valid(k3, c4, chains)
        uncovered = any(not any(c4.has_edge(x, y) for x in chains[u] for y in chains[v])
                        for u, v in k3.edges)
        assert (K.UNCOVERED_EDGE in kinds(rep)) == uncovered
        valid += rep.valid
    # contracting one cycle edge gives a triangle, so valid assignments exist:
    # 4 contractible edges x 3! labelings
    assert valid == 24


def test_structural_violations():
    k2 = Graph(2, [(0, 1)])
    target = Graph(3, [(0, 1), (1, 2)])
    assert K.EMPTY_CHAIN in kinds(validate_embedding(k2, target, {0: [0]}))
    assert K.EMPTY_CHAIN in kinds(validate_embedding(k2, target, {0: [0], 1: []}))
    assert K.UNKNOWN_NODE in kinds(validate_embedding(k2, target, {0: [0], 1: [1], 5: [2]}))
    assert K.UNKNOWN_NODE in kinds(validate_embedding(k2, target, {0: [0], 1: [1, 9]}))
    assert K.OVERLAPPING_CHAINS in kinds(validate_embedding(k2, target, {0: [0, 1], 1: [1]}))


def test_metrics_examples():
    m = compute_metrics({i: [i] for i in range(5)})
    assert (m.max_chain_length, m.mean_chain_length, m.qubit_count) == (1, 1, 5)
    m = compute_metrics({0: [1, 2], 1: [3, 4, 5], 2: [6, 7, 8, 9]})
    assert (m.max_chain_length, m.mean_chain_length, m.qubit_count) == (4, 3, 9)
    m = compute_metrics({0: [1], 1: [2, 3]})
    assert m.mean_chain_length == Fraction(3, 2) and m.mean_chain_length_decimal == 1.5
    with pytest.raises(EmptyEmbedding):
        compute_metrics({})


def test_json_round_trip():
    emb = Embedding({2: [5, 1], 0: [3]})
    assert Embedding.from_json(emb.to_json()) == emb
    assert emb.to_json() == {"0": [3], "2": [1, 5]}


def test_metrics_invariant_under_automorphism():
    # rotating a cycle maps valid embeddings to valid ones with the same metrics
    c8 = generate(GraphSpec("cycle", {"n": 8}))
    src = generate(GraphSpec("cycle", {"n": 4}))
    emb = {0: [0, 1], 1: [2, 3], 2: [4, 5], 3: [6, 7]}
    for shift in range(8):
        moved = {v: [(q + shift) % 8 for q in c] for v, c in emb.items()}
        assert validate_embedding(src, c8, moved).valid
        assert compute_metrics(moved) == compute_metrics(emb)


# -- mutation fuzz --------------------------------------------------------


def mutate(source, target, emb, kind, rng):
    """Apply one mutation meant to produce exactly ``kind``; None if not applicable."""
    chains = {v: list(c) for v, c in emb.items()}
    order = sorted(chains)
    if kind is K.DISCONNECTED_CHAIN:
        for v in rng.permutation(order):
            chain = chains[int(v)]
            for q in chain:
                rest = [x for x in chain if x != q]
                if rest and not target.subgraph(rest).is_connected():
                    chains[int(v)] = rest
                    if len(validate_embedding(source, target, chains).violations) == 1:
                        return chains, (int(v),)
                    chains[int(v)] = chain
        return None
    if kind is K.OVERLAPPING_CHAINS:
        for v in rng.permutation(order):
            for u in sorted(source.neighbors(int(v))):
                # borrow a qubit of u adjacent to v's chain: v stays connected, still covers its edges
                for q in chains[u]:
                    if any(w in chains[int(v)] for w in target.neighbors(q)):
                        trial = dict(chains)
                        trial[int(v)] = chains[int(v)] + [q]
                        if {x.kind for x in validate_embedding(source, target, trial).violations} == {kind}:
                            return trial, tuple(sorted((int(v), u)))
        return None
    if kind is K.UNCOVERED_EDGE:
        for u, v in sorted(source.edges):
            trial = dict(chains)
            for a, b in ((u, v), (v, u)):
                if len(trial[a]) > 1:
                    # trim a's chain to the qubits not touching b, if it stays connected
                    keep = [q for q in trial[a] if not any(w in trial[b] for w in target.neighbors(q))]
                    if keep and target.subgraph(keep).is_connected():
                        trial[a] = keep
                        rep = validate_embedding(source, target, trial)
                        if {x.kind for x in rep.violations} == {kind}:
                            return trial, None
                        trial = dict(chains)
        return None
    if kind is K.EMPTY_CHAIN:
        v = int(rng.choice(order))
        chains[v] = []
        return chains, (v,)
    if kind is K.UNKNOWN_NODE:
        v = int(rng.choice(order))
        chains[v] = chains[v] + [max(target.nodes) + 1 + int(rng.integers(100))]
        return chains, (v,)
    raise AssertionError(kind)


def run_mutation_trials(n_trials, seed=0):
    import numpy as np

    rng = np.random.default_rng(seed)
    target = build_chimera(3, 3, 4)
    stats = {"trials": 0, "false_accepts": 0, "wrong_class": 0, "false_rejects": 0}
    kinds_cycle = list(K)
    while stats["trials"] < n_trials:
        k = int(rng.integers(4, 20))
        source, emb = gen_planted(target, k, int(rng.integers(2**31)))
        if not validate_embedding(source, target, emb).valid:
            stats["false_rejects"] += 1
        kind = kinds_cycle[stats["trials"] % len(kinds_cycle)]
        mutated = mutate(source, target, emb, kind, rng)
        if mutated is None:
            continue
        chains, _ = mutated
        rep = validate_embedding(source, target, chains)
        stats["trials"] += 1
        if rep.valid:
            stats["false_accepts"] += 1
        elif kind not in {v.kind for v in rep.violations}:
            stats["wrong_class"] += 1
    return stats


def test_mutation_fuzz_small():
    stats = run_mutation_trials(100, seed=1)
    assert stats == {"trials": 100, "false_accepts": 0, "wrong_class": 0, "false_rejects": 0}


@given(st.integers(1, 30), st.integers(0, 10**6))
def test_property_planted_valid_and_metrics_consistent(k, seed):
    target = build_chimera(2, 2, 4)
    source, emb = gen_planted(target, k, seed)
    assert validate_embedding(source, target, emb).valid
    m = compute_metrics(emb)
    assert m.max_chain_length >= m.mean_chain_length >= 1
    assert m.qubit_count == sum(len(c) for c in emb.values())
