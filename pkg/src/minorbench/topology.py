"""Chimera, Pegasus and Zephyr hardware graphs.

Node ids are the lexicographic rank of each qubit's coordinate tuple:

* Chimera ``(row, col, side, shore)``; side 0 qubits couple vertically,
  side 1 qubits horizontally.
* Pegasus ``(u, w, k, z)`` with ``u`` the orientation, ``w`` the
  perpendicular offset, ``k`` the track within a tile and ``z`` the position
  along the line. Only the main fabric is kept, which for ``m=16`` gives the
  deployed 5,640 qubits and 40,484 couplers.
* Zephyr ``(u, w, k, j, z)``.

Each topology also carries a native clique template: a set of chains built
from one vertical and one horizontal run of qubits, arranged so that every
chain touches every other chain.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import InvalidParams
from .graph import Graph

# Pegasus per-track line offsets (default offset list of the published construction).
PEGASUS_VERTICAL_OFFSETS = (2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6)
PEGASUS_HORIZONTAL_OFFSETS = (6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10)


@dataclass(frozen=True)
class TopologyDescriptor:
    """Kind and size of a hardware graph.

    ``m`` is the grid extent for every kind; ``n`` (columns) applies to
    Chimera only and ``t`` (shore / tile size) to Chimera and Zephyr.
    """

    kind: str
    m: int
    n: int | None = None
    t: int | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind == "chimera":
            if self.n is None:
                object.__setattr__(self, "n", self.m)
            if self.t is None:
                object.__setattr__(self, "t", 4)
            if self.m < 1 or self.n < 1 or self.t < 1:
                raise InvalidParams("chimera requires m, n, t >= 1")
        elif kind == "pegasus":
            if self.n is not None or self.t is not None:
                raise InvalidParams("pegasus takes only m")
            if self.m < 2:
                raise InvalidParams("pegasus requires m >= 2")
        elif kind == "zephyr":
            if self.n is not None:
                raise InvalidParams("zephyr takes only m and t")
            if self.t is None:
                object.__setattr__(self, "t", 4)
            if self.m < 1 or self.t < 1:
                raise InvalidParams("zephyr requires m >= 1 and t >= 1")
        else:
            raise InvalidParams(f"unknown topology kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "chimera":
            return f"chimera-{self.m}-{self.n}-{self.t}"
        if self.kind == "zephyr":
            return f"zephyr-{self.m}-{self.t}"
        return f"pegasus-{self.m}"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "m": self.m}
        if self.n is not None:
            d["n"] = self.n
        if self.t is not None:
            d["t"] = self.t
        return d

    @classmethod
    def from_dict(cls, data) -> "TopologyDescriptor":
        if isinstance(data, TopologyDescriptor):
            return data
        if isinstance(data, str):
            return cls.parse(data)
        unknown = set(data) - {"kind", "m", "n", "t"}
        if unknown:
            raise InvalidParams(f"unknown topology keys: {sorted(unknown)}")
        return cls(data["kind"], int(data["m"]),
                   None if data.get("n") is None else int(data["n"]),
                   None if data.get("t") is None else int(data["t"]))

    @classmethod
    def parse(cls, text: str) -> "TopologyDescriptor":
        """Parse labels such as ``chimera-16-16-4``, ``pegasus-16``, ``zephyr-12-4``."""
        parts = text.strip().split("-")
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise InvalidParams(f"cannot parse topology label {text!r}") from None
        kind = parts[0].lower()
        if kind == "chimera" and len(nums) in (1, 2, 3):
            m, n, t = (nums + [None, None])[:3]
            return cls(kind, m, n, t)
        if kind == "pegasus" and len(nums) == 1:
            return cls(kind, nums[0])
        if kind == "zephyr" and len(nums) in (1, 2):
            return cls(kind, nums[0], None, nums[1] if len(nums) == 2 else None)
        raise InvalidParams(f"cannot parse topology label {text!r}")


# ---------------------------------------------------------------------------
# coordinates


def chimera_coordinates(m: int, n: int, t: int) -> list[tuple[int, int, int, int]]:
    return list(product(range(m), range(n), range(2), range(t)))


def pegasus_coordinates(m: int) -> list[tuple[int, int, int, int]]:
    """Main-fabric Pegasus coordinates in lexicographic order."""
    m1 = m - 1
    lo = min(PEGASUS_HORIZONTAL_OFFSETS), min(PEGASUS_VERTICAL_OFFSETS)
    hi = max(PEGASUS_HORIZONTAL_OFFSETS), max(PEGASUS_VERTICAL_OFFSETS)
    coords = []
    for u, w, k, z in product(range(2), range(m), range(12), range(m1)):
        # edge-of-fabric tracks whose lines would dangle off the processor
        if w == 0 and k < lo[u]:
            continue
        if w == m1 and k >= hi[u]:
            continue
        coords.append((u, w, k, z))
    return coords


def zephyr_coordinates(m: int, t: int) -> list[tuple[int, int, int, int, int]]:
    return list(product(range(2), range(2 * m + 1), range(t), range(2), range(m)))


# ---------------------------------------------------------------------------
# graph construction


def _check_pos(**kw):
    for name, value in kw.items():
        if not isinstance(value, int) or value < 1:
            raise InvalidParams(f"{name} must be a positive integer, got {value!r}")


def build_chimera(m: int, n: int | None = None, t: int = 4) -> Graph:
    """Chimera graph: an ``m x n`` grid of ``K_{t,t}`` cells."""
    n = m if n is None else n
    _check_pos(m=m, n=n, t=t)

    def idx(i, j, u, k):
        return ((i * n + j) * 2 + u) * t + k

    edges = []
    for i, j in product(range(m), range(n)):
        for k0, k1 in product(range(t), range(t)):
            edges.append((idx(i, j, 0, k0), idx(i, j, 1, k1)))
        for k in range(t):
            if i + 1 < m:
                edges.append((idx(i, j, 0, k), idx(i + 1, j, 0, k)))
            if j + 1 < n:
                edges.append((idx(i, j, 1, k), idx(i, j + 1, 1, k)))
    return Graph(m * n * 2 * t, edges)


def pegasus_edges_by_coordinate(m: int) -> list[tuple[tuple, tuple]]:
    """Pegasus couplers as coordinate pairs (main fabric only)."""
    present = set(pegasus_coordinates(m))
    m1 = m - 1
    voff, hoff = PEGASUS_VERTICAL_OFFSETS, PEGASUS_HORIZONTAL_OFFSETS
    edges = []
    for q in sorted(present):
        u, w, k, z = q
        # odd coupler between paired tracks
        if k % 2 == 0 and (u, w, k + 1, z) in present:
            edges.append((q, (u, w, k + 1, z)))
        # external coupler along the line
        if z + 1 < m1 and (u, w, k, z + 1) in present:
            edges.append((q, (u, w, k, z + 1)))
        if u == 0:
            # internal couplers: every horizontal qubit whose segment crosses this one
            for kk in range(12):
                h = (1, z + (kk < voff[k]), kk, w - (k < hoff[kk]))
                if 0 <= h[3] < m1 and h in present:
                    edges.append((q, h))
    return edges


def build_pegasus(m: int) -> Graph:
    """Pegasus graph ``P_m`` restricted to its main fabric."""
    if not isinstance(m, int) or m < 2:
        raise InvalidParams(f"pegasus requires integer m >= 2, got {m!r}")
    coords = pegasus_coordinates(m)
    rank = {c: i for i, c in enumerate(coords)}
    return Graph(len(coords), ((rank[a], rank[b]) for a, b in pegasus_edges_by_coordinate(m)))


def zephyr_edges_by_coordinate(m: int, t: int) -> list[tuple[tuple, tuple]]:
    M = 2 * m + 1
    edges = []
    for u, w, k, j, z in product(range(2), range(M), range(t), range(2), range(m)):
        if z + 1 < m:
            edges.append(((u, w, k, j, z), (u, w, k, j, z + 1)))
    for u, w, k, a in product(range(2), range(M), range(t), range(2)):
        for z in range(a, m):
            edges.append(((u, w, k, 0, z), (u, w, k, 1, z - a)))
    for w, z, h, k, i, j, a, b in product(range(m), range(m), range(t), range(t),
                                          range(2), range(2), range(2), range(2)):
        edges.append(((0, 2 * w + 1 + a * (2 * i - 1), k, j, z),
                      (1, 2 * z + 1 + b * (2 * j - 1), h, i, w)))
    return edges


def build_zephyr(m: int, t: int = 4) -> Graph:
    """Zephyr graph ``Z_{m,t}`` with ``4 t m (2m+1)`` qubits."""
    _check_pos(m=m, t=t)
    coords = zephyr_coordinates(m, t)
    rank = {c: i for i, c in enumerate(coords)}
    return Graph(len(coords), ((rank[a], rank[b]) for a, b in zephyr_edges_by_coordinate(m, t)))


@lru_cache(maxsize=16)
def build(desc: TopologyDescriptor) -> Graph:
    """Build (and memoise) the graph for a descriptor."""
    if desc.kind == "chimera":
        return build_chimera(desc.m, desc.n, desc.t)
    if desc.kind == "pegasus":
        return build_pegasus(desc.m)
    return build_zephyr(desc.m, desc.t)


@lru_cache(maxsize=16)
def coordinate_index(desc: TopologyDescriptor) -> dict[tuple, int]:
    if desc.kind == "chimera":
        coords = chimera_coordinates(desc.m, desc.n, desc.t)
    elif desc.kind == "pegasus":
        coords = pegasus_coordinates(desc.m)
    else:
        coords = zephyr_coordinates(desc.m, desc.t)
    return {c: i for i, c in enumerate(coords)}


# ---------------------------------------------------------------------------
# native clique templates
#
# A template is a list of blocks. Each block holds horizontal runs and
# vertical runs (lists of qubit ids). Any horizontal run of a block can be
# joined with any vertical run of the same block to form a connected chain,
# and every run is coupled to every run of the opposite orientation in other
# chains. The number of chains a block yields is min(#horizontal, #vertical).

Block = tuple[list[list[int]], list[list[int]]]


def _chimera_blocks(desc: TopologyDescriptor, size: int, r0: int, c0: int,
                    flip_r: bool, flip_c: bool) -> list[Block]:
    idx = coordinate_index(desc)
    t = desc.t

    def cell(i, j):
        i = size - 1 - i if flip_r else i
        j = size - 1 - j if flip_c else j
        return r0 + i, c0 + j

    blocks = []
    for c in range(size):
        horiz, vert = [], []
        for k in range(t):
            horiz.append([idx[(*cell(c, j), 1, k)] for j in range(c + 1)])
            vert.append([idx[(*cell(i, c), 0, k)] for i in range(c, size)])
        blocks.append((horiz, vert))
    return blocks


def _pegasus_blocks(desc: TopologyDescriptor, size: int, w0: int, z0: int) -> list[Block]:
    idx = coordinate_index(desc)
    lo, hi = 12 * w0 + 10, 12 * (w0 + size) - 11
    lo_y, hi_y = 12 * z0 + 10, 12 * (z0 + size) - 11
    vert = []
    for x in range(lo, hi + 1):
        w, k = divmod(x, 12)
        vert.append([idx[(0, w, k, z)] for z in range(z0, z0 + size - 1)])
    horiz = []
    for y in range(lo_y, hi_y + 1):
        w, k = divmod(y, 12)
        horiz.append([idx[(1, w, k, z)] for z in range(w0, w0 + size - 1)])
    return [(horiz, vert)]


def _zephyr_blocks(desc: TopologyDescriptor, size: int, w0: int, z0: int) -> list[Block]:
    idx = coordinate_index(desc)
    t = desc.t
    vert = [[idx[(0, w, k, j, z)] for z in range(z0, z0 + size)]
            for w in range(2 * w0 + 1, 2 * (w0 + size)) for k in range(t) for j in range(2)]
    horiz = [[idx[(1, w, k, j, z)] for z in range(w0, w0 + size)]
             for w in range(2 * z0 + 1, 2 * (z0 + size)) for k in range(t) for j in range(2)]
    return [(horiz, vert)]


def template_size_range(desc: TopologyDescriptor) -> range:
    """Sub-region sizes a template can occupy, smallest first."""
    if desc.kind == "chimera":
        return range(1, min(desc.m, desc.n) + 1)
    if desc.kind == "pegasus":
        return range(2, desc.m + 1)
    return range(1, desc.m + 1)


def template_capacity(desc: TopologyDescriptor, size: int) -> int:
    if desc.kind == "chimera":
        return desc.t * size
    if desc.kind == "pegasus":
        return 12 * size - 20
    return 2 * desc.t * (2 * size - 1)


def template_placements(desc: TopologyDescriptor, size: int):
    """Yield every placement of a ``size`` template as a list of blocks."""
    if desc.kind == "chimera":
        for r0, c0 in product(range(desc.m - size + 1), range(desc.n - size + 1)):
            for flip_r, flip_c in product((False, True), repeat=2):
                yield _chimera_blocks(desc, size, r0, c0, flip_r, flip_c)
    elif desc.kind == "pegasus":
        for w0, z0 in product(range(desc.m - size + 1), repeat=2):
            yield _pegasus_blocks(desc, size, w0, z0)
    else:
        for w0, z0 in product(range(desc.m - size + 1), repeat=2):
            yield _zephyr_blocks(desc, size, w0, z0)


def chains_from_blocks(blocks: list[Block], present=None) -> list[list[int]]:
    """Pair runs within each block into chains, skipping runs with missing qubits."""
    chains = []
    for horiz, vert in blocks:
        if present is not None:
            horiz = [r for r in horiz if all(q in present for q in r)]
            vert = [r for r in vert if all(q in present for q in r)]
        for h, v in zip(horiz, vert):
            chains.append(h + v)
    return chains


def clique_template(desc: TopologyDescriptor) -> list[list[int]]:
    """Full-size fault-free clique template chains."""
    size = template_size_range(desc)[-1]
    return chains_from_blocks(next(template_placements(desc, size)))


def max_native_clique(desc: TopologyDescriptor) -> int:
    """Largest complete graph the built-in clique template places on ``desc``.

    For ``chimera(m, n, t)`` this is ``t * min(m, n)``. For Pegasus and Zephyr
    it is the capacity of this package's line-crossing template
    (``12m - 20`` and ``2t(2m - 1)``), which is valid but not necessarily the
    largest clique minor of the topology.
    """
    return template_capacity(desc, template_size_range(desc)[-1])
