"""Named graph lists that experiment configs can pull in with ``presets: [name]``.

``sensitivity``
    30 small graphs, one or a few per family, for quick parameter sweeps.
``medium``
    30 graphs of 12 to 60 nodes that separate the three topologies.
``faults``
    40 graphs of 8 to 40 nodes sized for a small Chimera lattice, so that
    heavy fault rates start to cost embeddings.
``smoke``
    6 tiny graphs for tests and demos.
"""
from __future__ import annotations

from .errors import ConfigError
from .generators import GraphSpec


def _specs(rows) -> list[GraphSpec]:
    out = []
    for family, params, seeds in rows:
        for seed in seeds:
            out.append(GraphSpec(family, dict(params), seed))
    return out


_ONE = (0,)

PRESETS: dict[str, list[GraphSpec]] = {
    "smoke": _specs([
        ("path", {"n": 6}, _ONE),
        ("cycle", {"n": 6}, _ONE),
        ("complete", {"n": 4}, _ONE),
        ("star", {"n": 5}, _ONE),
        ("grid", {"width": 3, "height": 3}, _ONE),
        ("erdos_renyi", {"n": 8, "p": 0.3}, (1,)),
    ]),
    "sensitivity": _specs([
        ("complete", {"n": 8}, _ONE),
        ("complete", {"n": 12}, _ONE),
        ("complete", {"n": 16}, _ONE),
        ("complete_bipartite", {"a": 6, "b": 6}, _ONE),
        ("turan", {"n": 12, "r": 3}, _ONE),
        ("hypercube", {"d": 4}, _ONE),
        ("circulant", {"n": 16, "offsets": [1, 3]}, _ONE),
        ("erdos_renyi", {"n": 20, "p": 0.2}, (1, 2, 3)),
        ("erdos_renyi", {"n": 40, "p": 0.1}, (1, 2)),
        ("barabasi_albert", {"n": 30, "m": 2}, (1, 2)),
        ("watts_strogatz", {"n": 30, "k": 4, "beta": 0.1}, (1, 2)),
        ("d_regular", {"n": 20, "d": 3}, (1, 2, 3)),
        ("stochastic_block", {"sizes": [10, 10], "p_in": 0.4, "p_out": 0.05}, (1,)),
        ("grid", {"width": 5, "height": 5}, _ONE),
        ("king", {"width": 4, "height": 4}, _ONE),
        ("triangular", {"width": 5, "height": 5}, _ONE),
        ("honeycomb", {"width": 4, "height": 4}, _ONE),
        ("kagome", {"width": 3, "height": 3}, _ONE),
        ("path", {"n": 20}, _ONE),
        ("cycle", {"n": 20}, _ONE),
        ("star", {"n": 15}, _ONE),
        ("wheel", {"n": 12}, _ONE),
        ("balanced_tree", {"r": 2, "h": 4}, _ONE),
    ]),
    "medium": _specs([
        ("complete", {"n": 12}, _ONE),
        ("complete", {"n": 16}, _ONE),
        ("complete", {"n": 20}, _ONE),
        ("complete_bipartite", {"a": 8, "b": 8}, _ONE),
        ("turan", {"n": 18, "r": 3}, _ONE),
        ("hypercube", {"d": 5}, _ONE),
        ("circulant", {"n": 30, "offsets": [1, 3, 7]}, _ONE),
        ("erdos_renyi", {"n": 30, "p": 0.2}, (1, 2, 3)),
        ("erdos_renyi", {"n": 50, "p": 0.1}, (1, 2)),
        ("erdos_renyi", {"n": 40, "p": 0.15}, (1, 2)),
        ("barabasi_albert", {"n": 60, "m": 2}, (1, 2)),
        ("barabasi_albert", {"n": 40, "m": 3}, (1, 2)),
        ("watts_strogatz", {"n": 50, "k": 4, "beta": 0.2}, (1, 2)),
        ("d_regular", {"n": 40, "d": 3}, (1, 2)),
        ("d_regular", {"n": 30, "d": 4}, (1, 2)),
        ("grid", {"width": 7, "height": 7}, _ONE),
        ("king", {"width": 6, "height": 6}, _ONE),
        ("triangular", {"width": 7, "height": 7}, _ONE),
        ("wheel", {"n": 30}, _ONE),
        ("cycle", {"n": 40}, _ONE),
        ("balanced_tree", {"r": 3, "h": 3}, _ONE),
    ]),
    "faults": _specs([
        ("complete", {"n": 8}, _ONE),
        ("complete", {"n": 10}, _ONE),
        ("complete", {"n": 12}, _ONE),
        ("complete_bipartite", {"a": 6, "b": 6}, _ONE),
        ("turan", {"n": 12, "r": 3}, _ONE),
        ("hypercube", {"d": 4}, _ONE),
        ("circulant", {"n": 20, "offsets": [1, 4]}, _ONE),
        ("erdos_renyi", {"n": 16, "p": 0.3}, (1, 2, 3)),
        ("erdos_renyi", {"n": 24, "p": 0.2}, (1, 2, 3)),
        ("erdos_renyi", {"n": 32, "p": 0.15}, (1, 2)),
        ("erdos_renyi", {"n": 20, "p": 0.25}, (1, 2)),
        ("barabasi_albert", {"n": 30, "m": 2}, (1, 2, 3)),
        ("barabasi_albert", {"n": 24, "m": 3}, (1, 2)),
        ("watts_strogatz", {"n": 30, "k": 4, "beta": 0.2}, (1, 2, 3)),
        ("d_regular", {"n": 24, "d": 3}, (1, 2, 3)),
        ("d_regular", {"n": 20, "d": 4}, (1, 2)),
        ("grid", {"width": 6, "height": 6}, _ONE),
        ("king", {"width": 5, "height": 5}, _ONE),
        ("triangular", {"width": 5, "height": 5}, _ONE),
        ("honeycomb", {"width": 5, "height": 4}, _ONE),
        ("kagome", {"width": 3, "height": 3}, _ONE),
        ("wheel", {"n": 20}, _ONE),
        ("cycle", {"n": 40}, _ONE),
        ("path", {"n": 40}, _ONE),
        ("star", {"n": 12}, _ONE),
        ("balanced_tree", {"r": 2, "h": 4}, _ONE),
    ]),
}


def preset(name: str) -> list[GraphSpec]:
    try:
        return list(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}",
                          path=f"presets.{name}") from None
