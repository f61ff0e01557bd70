"""Finite simple graphs and the subgraph machinery the zeta recursion runs on.

Vertices are the dense labels ``0..n-1``. Edges are stored as sorted pairs in
a sorted tuple; the position of an edge in that tuple is its *edge id*, which
names the formal variable ``T_l = p^{-s(l)}`` attached to it.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import GraphInputError


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise GraphInputError(f"negative vertex count {self.n}")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise GraphInputError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphInputError(f"edge {{{u},{v}}} out of range for n={self.n}")
            if u > v:
                raise GraphInputError(f"edge ({u},{v}) is not sorted; use Graph.from_edges")
            if (u, v) in seen:
                raise GraphInputError(f"duplicate edge {{{u},{v}}}")
            seen.add((u, v))
        if list(self.edges) != sorted(self.edges):
            raise GraphInputError("edges must be sorted; use Graph.from_edges")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Build a graph, sorting each pair and dropping duplicate edges."""
        pairs = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphInputError(f"loop at vertex {u}")
            pairs.add((min(u, v), max(u, v)))
        return cls(n, tuple(sorted(pairs)))

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbourhood of each vertex as a bitmask."""
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def neighbors(self, v: int) -> list[int]:
        return mask_members(self.adjacency[v])

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def edge_id(self, u: int, v: int) -> int:
        return self.edge_index[(min(u, v), max(u, v))]

    def has_edge(self, u: int, v: int) -> bool:
        return (self.adjacency[u] >> v) & 1 == 1

    def is_connected(self) -> bool:
        return self.n <= 1 or mask_is_connected(self, self.full_mask)

    def is_tree(self) -> bool:
        return self.n >= 1 and self.num_edges == self.n - 1 and self.is_connected()

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Image graph under the vertex map ``v -> perm[v]``."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def edge_mask(self, vertex_mask: int) -> int:
        """Bitmask over edge ids of the edges with both ends in ``vertex_mask``."""
        m = 0
        for i, (u, v) in enumerate(self.edges):
            if (vertex_mask >> u) & 1 and (vertex_mask >> v) & 1:
                m |= 1 << i
        return m


@dataclass(frozen=True)
class EdgeSubgraph:
    """A spanning subgraph of ``host``: all host vertices, only ``kept`` edges."""

    host: Graph
    kept: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        bad = [i for i in self.kept if not 0 <= i < self.host.num_edges]
        if bad:
            raise GraphInputError(f"edge ids {bad} not in host graph")

    @classmethod
    def from_pairs(cls, host: Graph, pairs: Iterable[Sequence[int]]) -> "EdgeSubgraph":
        return cls(host, frozenset(host.edge_id(u, v) for u, v in pairs))

    def as_graph(self) -> Graph:
        return Graph(self.host.n, tuple(self.host.edges[i] for i in sorted(self.kept)))


def mask_members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def members_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def mask_is_connected(g: Graph, mask: int) -> bool:
    """True when the subgraph induced by ``mask`` is connected (and nonempty)."""
    if mask == 0:
        return False
    adj = g.adjacency
    seen = mask & -mask
    frontier = seen
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        new = adj[low.bit_length() - 1] & mask & ~seen
        seen |= new
        frontier |= new
    return seen == mask


def _component_masks(g: Graph, mask: int) -> list[int]:
    adj = g.adjacency
    comps = []
    rest = mask
    while rest:
        seen = rest & -rest
        frontier = seen
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = adj[low.bit_length() - 1] & mask & ~seen
            seen |= new
            frontier |= new
        comps.append(seen)
        rest &= ~seen
    return comps


def connected_components(g: Graph) -> list[frozenset[int]]:
    """Vertex sets of the connected components, ordered by smallest member."""
    return [frozenset(mask_members(c)) for c in _component_masks(g, g.full_mask)]


def _check_vertices(g: Graph, vertices: Iterable[int]) -> list[int]:
    vs = sorted(set(vertices))
    for v in vs:
        if not 0 <= v < g.n:
            raise GraphInputError(f"vertex {v} out of range for n={g.n}")
    return vs


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """The subgraph induced by ``vertices``, relabelled ``0..k-1``.

    Returns the graph together with the label map: entry ``i`` is the host
    vertex that became vertex ``i``.
    """
    vs = _check_vertices(g, vertices)
    pos = {v: i for i, v in enumerate(vs)}
    edges = tuple((pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos)
    return Graph(len(vs), edges), tuple(vs)


def induced_edge_ids(g: Graph, vertices: Iterable[int]) -> tuple[int, ...]:
    """Host edge ids of the induced subgraph, in the subgraph's edge order."""
    vs = set(vertices)
    return tuple(i for i, (u, v) in enumerate(g.edges) if u in vs and v in vs)


def split_reduced_isolated(g: Graph) -> tuple[Graph, frozenset[int]]:
    """Separate the isolated vertices from the rest (the reduced subgraph).

    The reduced part is returned as a subgraph induced on the non-isolated
    vertices, relabelled in increasing order.
    """
    isolated = frozenset(v for v in range(g.n) if g.adjacency[v] == 0)
    reduced, _ = induced_subgraph(g, (v for v in range(g.n) if v not in isolated))
    return reduced, isolated


def connected_masks(g: Graph, min_vertices: int = 1) -> list[int]:
    """Bitmasks of all vertex subsets inducing a connected subgraph."""
    return [m for m in range(1, 1 << g.n)
            if m.bit_count() >= min_vertices and mask_is_connected(g, m)]


def enumerate_indgraphs(g: Graph, min_vertices: int = 1) -> list[tuple[frozenset[int], Graph]]:
    """Connected induced subgraphs with at least ``min_vertices`` vertices.

    Ordered by size, then lexicographically by sorted vertex tuple.
    """
    if min_vertices < 1:
        raise GraphInputError("min_vertices must be at least 1")
    masks = connected_masks(g, min_vertices)
    subsets = sorted((tuple(mask_members(m)) for m in masks), key=lambda t: (len(t), t))
    return [(frozenset(s), induced_subgraph(g, s)[0]) for s in subsets]


def connected_partitions(g: Graph) -> Iterator[tuple[int, ...]]:
    """Set partitions of V(g) whose blocks each induce a connected subgraph.

    Blocks are bitmasks, listed in order of their smallest vertex. These are
    in bijection with the realizable spanning subgraphs (see
    :func:`enumerate_realizable_edge_subgraphs`).
    """
    if g.n == 0:
        yield ()
        return
    by_low: list[list[int]] = [[] for _ in range(g.n)]
    for m in connected_masks(g):
        by_low[(m & -m).bit_length() - 1].append(m)

    def rec(rest: int, acc: list[int]):
        if rest == 0:
            yield tuple(acc)
            return
        low = (rest & -rest).bit_length() - 1
        for block in by_low[low]:
            if block & ~rest == 0:
                acc.append(block)
                yield from rec(rest & ~block, acc)
                acc.pop()

    yield from rec(g.full_mask, [])


def is_realizable(g: Graph, h: EdgeSubgraph) -> bool:
    """Whether ``h`` is the same-colour subgraph of some vertex colouring of ``g``.

    Equivalent local test: every edge of ``g`` missing from ``h`` must join
    two different connected components of ``h``.
    """
    comp = _component_labels(h.as_graph())
    for i, (u, v) in enumerate(g.edges):
        if i not in h.kept and comp[u] == comp[v]:
            return False
    return True


def _component_labels(g: Graph) -> list[int]:
    label = [0] * g.n
    for k, c in enumerate(_component_masks(g, g.full_mask)):
        for v in mask_members(c):
            label[v] = k
    return label


def enumerate_realizable_edge_subgraphs(g: Graph) -> list[EdgeSubgraph]:
    out = []
    for blocks in connected_partitions(g):
        kept = 0
        for b in blocks:
            kept |= g.edge_mask(b)
        out.append(EdgeSubgraph(g, frozenset(mask_members(kept))))
    out.sort(key=lambda h: (len(h.kept), sorted(h.kept)))
    return out


def quotient_graph(g: Graph, blocks: Sequence[int]) -> Graph:
    """One vertex per block; blocks adjacent when some edge of ``g`` joins them."""
    where = {}
    for k, b in enumerate(blocks):
        for v in mask_members(b):
            where[v] = k
    pairs = set()
    for u, v in g.edges:
        a, b = where[u], where[v]
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    return Graph(len(blocks), tuple(sorted(pairs)))


def contract_to_star_graph(g: Graph, h: EdgeSubgraph) -> Graph:
    """The contracted graph G*_H: components of ``h`` become vertices.

    Components are numbered by their smallest host vertex; two are adjacent
    iff they are at distance one in ``g``.
    """
    if h.host != g:
        raise GraphInputError("subgraph belongs to a different host graph")
    blocks = _component_masks(h.as_graph(), g.full_mask)
    return quotient_graph(g, blocks)


def graph_distance(g: Graph, u: int, v: int) -> float:
    """Shortest-path length between ``u`` and ``v``; ``math.inf`` if disconnected."""
    _check_vertices(g, (u, v))
    if u == v:
        return 0
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                queue.append(y)
    return math.inf


# Named families used across tests and the CLI.

def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def star_graph(n: int) -> Graph:
    """Star on ``n`` vertices with centre 0."""
    return Graph(n, tuple((0, i) for i in range(1, n)))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def edgeless_graph(n: int) -> Graph:
    return Graph(n, ())
