"""Break qubits at increasing rates and watch embeddings drop out."""
from minorbench import (AlgorithmParams, FaultSpec, GraphSpec, TopologyDescriptor, build, embed,
                        generate, inject_faults)

desc = TopologyDescriptor.parse("chimera-6-6-4")
lattice = build(desc)
problems = [generate(GraphSpec("erdos_renyi", {"n": 24, "p": 0.2}, seed=s)) for s in range(8)]
problems += [generate(GraphSpec("complete", {"n": n})) for n in (10, 12, 14)]

baseline = None
for rate in (0.0, 0.05, 0.15, 0.25, 0.35):
    broken = inject_faults(lattice, FaultSpec("rate", rate, seed=11))
    solved = set()
    for i, g in enumerate(problems):
        # no topology descriptor: a faulted lattice is just a graph
        res = embed("pathfinder", g, broken, AlgorithmParams(seed=i, deadline=5))
        if res.success:
            solved.add(i)
    if baseline is None:
        baseline = solved
    kept = len(solved & baseline) / len(baseline)
    print(f"f={rate:.2f}: removed {lattice.node_count - broken.node_count:3d} qubits, "
          f"solved {len(solved):2d}/{len(problems)}, retention {kept:.2f}")
