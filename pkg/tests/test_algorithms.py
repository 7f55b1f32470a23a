import time

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minorbench.algorithms import (CHECK_INTERVAL_S, REGISTRY, AlgorithmParams, Status, embed,
                                   format_algorithm_id, parse_algorithm_id)
from minorbench.algorithms.pathfinder import placement_order
from minorbench.algorithms.pssa import AnnealState, terminal_search
from minorbench.embedding import compute_metrics, validate_embedding
from minorbench.errors import InvalidParams, UnknownAlgorithm
from minorbench.generators import GraphSpec, generate
from minorbench.graph import Graph
from minorbench.rng import make_rng
from minorbench.topology import TopologyDescriptor, build, clique_template

ALGORITHMS = ("clique", "pathfinder", "pssa")
C16 = TopologyDescriptor.parse("chimera-16-16-4")


def g(family, seed=0, **params):
    return generate(GraphSpec(family, params, seed))


def params(seed=0, deadline=30.0, topology=None, **options):
    return AlgorithmParams(seed=seed, deadline=deadline, topology=topology, options=options)


def check_contract(result, source, target):
    if result.status is Status.SUCCESS:
        assert len(result.embedding) == source.node_count
        report = validate_embedding(source, target, result.embedding)
        assert report.valid, report.violations
    else:
        assert len(result.embedding) == 0


def test_registry():
    assert set(REGISTRY) == set(ALGORITHMS)
    with pytest.raises(UnknownAlgorithm):
        embed("oct", Graph(1), Graph(1), params())


def test_algorithm_id_parsing():
    assert parse_algorithm_id("pssa") == ("pssa", {})
    assert parse_algorithm_id("pssa{alpha:0.95,variant:fast}") == ("pssa", {"alpha": 0.95, "variant": "fast"})
    assert format_algorithm_id("pssa", {"alpha": 0.95}) == "pssa{alpha:0.95}"
    with pytest.raises(InvalidParams):
        parse_algorithm_id("pssa{alpha}")
    with pytest.raises(InvalidParams):
        embed("pathfinder{bogus:1}", Graph(1), Graph(1), params())


def test_k1_into_connected_target():
    target = build(TopologyDescriptor.parse("chimera-2-2-4"))
    res = embed("clique", Graph(1), target, params(topology=TopologyDescriptor.parse("chimera-2-2-4")))
    assert res.status is Status.SUCCESS
    assert [len(c) for c in res.embedding.values()] == [1]


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_pigeonhole_failure(algo):
    res = embed(algo, g("complete", n=2), Graph(1), params())
    assert res.status is Status.FAILURE and len(res.embedding) == 0


# -- clique -------------------------------------------------------------------


def test_clique_capacity_on_chimera16():
    target = build(C16)
    res = embed("clique", g("complete", n=64), target, params(topology=C16))
    assert res.status is Status.SUCCESS
    check_contract(res, g("complete", n=64), target)
    # one horizontal and one vertical line segment per chain: m + 1 qubits
    assert set(map(len, res.embedding.values())) == {17}
    assert embed("clique", g("complete", n=65), target, params(topology=C16)).status is Status.FAILURE


def test_clique_k4_on_one_cell():
    desc = TopologyDescriptor.parse("chimera-1-1-4")
    res = embed("clique", g("complete", n=4), build(desc), params(topology=desc))
    assert res.status is Status.SUCCESS
    assert set(map(len, res.embedding.values())) == {2}
    check_contract(res, g("complete", n=4), build(desc))


def test_clique_small_cliques_use_small_templates():
    res = embed("clique", g("complete", n=8), build(C16), params(topology=C16))
    # a 2x2-cell template holds K8 with chains of 3
    assert compute_metrics(res.embedding).max_chain_length == 3


def test_clique_routes_around_faults():
    from minorbench.faults import FaultSpec, inject_faults
    target = inject_faults(build(C16), FaultSpec("rate", 0.05, 2))
    res = embed("clique", g("complete", n=20), target, params(topology=C16))
    check_contract(res, g("complete", n=20), target)
    assert res.status is Status.SUCCESS


def test_clique_without_descriptor_uses_greedy_clique():
    target = g("complete", n=6)
    res = embed("clique", g("cycle", n=5), target, params())
    assert res.status is Status.SUCCESS
    check_contract(res, g("cycle", n=5), target)


# -- pathfinder ---------------------------------------------------------------


def test_pathfinder_petersen_on_chimera4():
    petersen = Graph(10, nx.petersen_graph().edges())
    target = build(TopologyDescriptor.parse("chimera-4-4-4"))
    res = embed("pathfinder", petersen, target, params(seed=42))
    assert res.status is Status.SUCCESS
    check_contract(res, petersen, target)


@pytest.mark.parametrize("seed", range(5))
def test_pathfinder_path_on_chimera2(seed):
    target = build(TopologyDescriptor.parse("chimera-2-2-4"))
    res = embed("pathfinder", g("path", n=10), target, params(seed=seed))
    assert res.status is Status.SUCCESS
    check_contract(res, g("path", n=10), target)


def test_pathfinder_k5_on_cycle_fails():
    res = embed("pathfinder", g("complete", n=5), g("cycle", n=10), params(seed=1))
    assert res.status is Status.FAILURE
    assert res.counters["tries"] == 10


def test_pathfinder_deterministic():
    src = g("erdos_renyi", seed=3, n=25, p=0.25)
    target = build(TopologyDescriptor.parse("chimera-6-6-4"))
    a = embed("pathfinder", src, target, params(seed=11))
    b = embed("pathfinder", src, target, params(seed=11))
    assert a == b
    check_contract(a, src, target)


def test_pathfinder_deadline():
    target = build(C16)
    start = time.monotonic()
    res = embed("pathfinder", g("complete", n=40), target, params(seed=1, deadline=0.3))
    elapsed = time.monotonic() - start
    assert res.status is Status.TIMEOUT and len(res.embedding) == 0
    assert elapsed < 0.3 + CHECK_INTERVAL_S + 0.5


def test_pathfinder_on_sparse_ids():
    from minorbench.faults import FaultSpec, inject_faults
    target = inject_faults(build(TopologyDescriptor.parse("chimera-4-4-4")), FaultSpec("rate", 0.1, 5))
    res = embed("pathfinder", g("complete", n=8), target, params(seed=2))
    assert res.status is Status.SUCCESS
    check_contract(res, g("complete", n=8), target)


def test_placement_order_prefers_placed_neighbours():
    star = {0: [1, 2, 3], 1: [0], 2: [0], 3: [0]}
    for seed in range(10):
        order = placement_order(star, make_rng(seed, "t"))
        assert sorted(order) == [0, 1, 2, 3]
        # once any leaf is placed the hub comes next
        assert 0 in order[:2]


# -- pssa ---------------------------------------------------------------------


def test_pssa_monotone_against_template():
    target = build(C16)
    template = clique_template(C16)
    for n in (8, 24, 40):
        src = g("complete", n=n)
        res = embed("pssa", src, target, params(seed=n, topology=C16))
        assert res.status is Status.SUCCESS
        check_contract(res, src, target)
        assert res.counters["final_qubits"] <= res.counters["initial_qubits"]
        assert compute_metrics(res.embedding).qubit_count <= sum(len(c) for c in template[:n])


def test_pssa_cycle_on_chimera2_deterministic():
    desc = TopologyDescriptor.parse("chimera-2-2-4")
    target = build(desc)
    a = embed("pssa", g("cycle", n=8), target, params(seed=5, topology=desc))
    b = embed("pssa", g("cycle", n=8), target, params(seed=5, topology=desc))
    assert a.status is Status.SUCCESS and a == b
    check_contract(a, g("cycle", n=8), target)


def test_pssa_falls_back_to_pathfinder():
    desc = TopologyDescriptor.parse("chimera-4-4-4")
    src = g("grid", width=5, height=5)  # 25 nodes > template capacity 16
    res = embed("pssa", src, build(desc), params(seed=1, topology=desc))
    assert res.status is Status.SUCCESS
    assert res.counters["init_fallback"] == 1
    check_contract(res, src, build(desc))


@pytest.mark.parametrize("variant", ["standard", "weighted", "fast", "thorough"])
def test_pssa_variants(variant):
    desc = TopologyDescriptor.parse("chimera-4-4-4")
    src = g("erdos_renyi", seed=2, n=12, p=0.4)
    res = embed("pssa", src, build(desc), params(seed=3, topology=desc, variant=variant))
    assert res.status is Status.SUCCESS
    check_contract(res, src, build(desc))


def test_pssa_unknown_variant():
    desc = TopologyDescriptor.parse("chimera-2-2-4")
    with pytest.raises(InvalidParams):
        embed("pssa", g("path", n=3), build(desc), params(topology=desc, variant="turbo"))


def test_anneal_state_moves_keep_feasibility():
    desc = TopologyDescriptor.parse("chimera-4-4-4")
    target = build(desc)
    src = g("complete", n=10)
    chains = clique_template(desc)[:10]
    state = AnnealState(src, target, {v: chains[v] for v in range(10)})
    rng = make_rng(0, "t")
    applied = 0
    for _ in range(2000):
        a = int(rng.integers(10))
        members = sorted(state.chains[a])
        q = members[int(rng.integers(len(members)))]
        for b in sorted({state.owner[p] for p in target.neighbors(q) if state.owner.get(p, a) != a}):
            if state.shift_legal(q, a, b):
                before = state.cost
                delta = state.shift_delta(a, b)
                state.apply_shift(q, a, b)
                assert state.cost == before + delta
                assert validate_embedding(src, target, state.embedding()).valid
                applied += 1
                break
    assert applied > 0
    assert state.cost == sum(len(c) ** 2 for c in state.chains)
    removed = terminal_search(state)
    assert validate_embedding(src, target, state.embedding()).valid
    assert removed >= 0


# -- shared contract ----------------------------------------------------------


@settings(max_examples=25)
@given(st.sampled_from(ALGORITHMS), st.integers(1, 14), st.floats(0.1, 0.9), st.integers(0, 10**6))
def test_property_contract_and_immutability(algo, n, p, seed):
    desc = TopologyDescriptor.parse("chimera-3-3-4")
    target = build(desc)
    src = g("erdos_renyi", seed=seed, n=n, p=p)
    before = (hash(src), hash(target), src.edges, target.edges)
    res = embed(algo, src, target, params(seed=seed, deadline=10, topology=desc))
    assert (hash(src), hash(target), src.edges, target.edges) == before
    check_contract(res, src, target)
