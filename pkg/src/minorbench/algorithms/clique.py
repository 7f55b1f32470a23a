"""Native clique embedding from the topology's line-crossing template."""
from __future__ import annotations

from ..graph import Graph
from ..topology import (TopologyDescriptor, chains_from_blocks, template_capacity,
                        template_placements, template_size_range)
from .base import AlgorithmParams, Deadline, EmbeddingAlgorithm, Status, register_algorithm


def clique_chains(desc: TopologyDescriptor, target: Graph, n: int,
                  deadline: Deadline | None = None) -> tuple[list[list[int]] | None, dict[str, int]]:
    """Chains for ``K_n`` on ``target``, or ``None`` if no placement fits.

    Template sizes are tried smallest first, so small cliques get short
    chains. When qubits are missing, every placement of a size is scanned
    and runs touching a missing qubit are dropped.
    """
    present = set(target.nodes)
    scanned = 0
    for size in template_size_range(desc):
        if template_capacity(desc, size) < n:
            continue
        for blocks in template_placements(desc, size):
            scanned += 1
            chains = chains_from_blocks(blocks, present)
            if len(chains) >= n:
                return chains[:n], {"template_size": size, "placements_scanned": scanned,
                                    "intact_chains": len(chains)}
            if deadline is not None and deadline.expired():
                return None, {"placements_scanned": scanned, "deadline_hit": 1}
    return None, {"placements_scanned": scanned}


def greedy_clique(target: Graph) -> list[int]:
    """A maximal clique found greedily by descending degree (used without a descriptor)."""
    order = sorted(target.nodes, key=lambda v: (-target.degree(v), v))
    best: list[int] = []
    for start in order[:64]:
        clique = [start]
        cand = set(target.neighbors(start))
        for v in order:
            if v in cand:
                clique.append(v)
                cand &= target.neighbors(v)
        if len(clique) > len(best):
            best = clique
    return best


@register_algorithm
class CliqueEmbedding(EmbeddingAlgorithm):
    """Places source nodes on the first chains of a native clique template.

    The source graph's edges are ignored: any graph with at most as many
    nodes as the template has chains is embedded.
    """

    name = "clique"
    version = "1.0"
    defaults: dict = {}

    def run(self, source, target, params: AlgorithmParams, options):
        n = source.node_count
        deadline = Deadline(params.deadline)
        if params.topology is None:
            clique = greedy_clique(target)
            if len(clique) < n:
                return self.result(Status.FAILURE, template_size=len(clique))
            chains = [[q] for q in clique[:n]]
            counters = {"template_size": len(clique)}
        else:
            chains, counters = clique_chains(params.topology, target, n, deadline)
            if chains is None:
                status = Status.TIMEOUT if counters.get("deadline_hit") else Status.FAILURE
                return self.result(status, **counters)
        nodes = sorted(source.nodes)
        if n == 1:
            # any one qubit embeds a single node
            chains = [chains[0][:1]]
        return self.result(Status.SUCCESS, {v: chains[i] for i, v in enumerate(nodes)}, **counters)
