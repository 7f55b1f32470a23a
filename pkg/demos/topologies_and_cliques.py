"""Hardware graphs, native cliques and the three embedders on one problem."""
from minorbench import (AlgorithmParams, GraphSpec, TopologyDescriptor, build, compute_metrics, embed,
                        generate, max_native_clique, validate_embedding)

# The three hardware generations at production size
for label in ("chimera-16-16-4", "pegasus-16", "zephyr-12-4"):
    desc = TopologyDescriptor.parse(label)
    g = build(desc)
    degrees = [g.degree(v) for v in g.nodes]
    print(f"{label:16s} {g.node_count:5d} qubits {g.edge_count:6d} couplers "
          f"max degree {max(degrees):2d}  native clique K{max_native_clique(desc)}")

# Chimera's template tops out at K64; one more node and it refuses
desc = TopologyDescriptor.parse("chimera-16-16-4")
c16 = build(desc)
for n in (8, 32, 64, 65):
    res = embed("clique", generate(GraphSpec("complete", {"n": n})), c16,
                AlgorithmParams(seed=0, deadline=10, topology=desc))
    extra = ""
    if res.success:
        m = compute_metrics(res.embedding)
        extra = f"chain length {m.max_chain_length}, {m.qubit_count} qubits"
    print(f"K{n}: {res.status.value} {extra}")

# Same random graph, three algorithms
source = generate(GraphSpec("erdos_renyi", {"n": 40, "p": 0.15}, seed=3))
print(f"\nG(40, 0.15): {source.edge_count} edges")
for algo in ("clique", "pathfinder", "pssa", "pssa{variant:fast}"):
    res = embed(algo, source, c16, AlgorithmParams(seed=1, deadline=30, topology=desc))
    if not res.success:
        print(f"{algo:20s} {res.status.value}")
        continue
    m = compute_metrics(res.embedding)
    ok = validate_embedding(source, c16, res.embedding).valid
    print(f"{algo:20s} ACL {float(m.mean_chain_length):.2f}  MCL {m.max_chain_length:2d}  "
          f"qubits {m.qubit_count:4d}  valid={ok}")
