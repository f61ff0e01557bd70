"""Canonical labelling and automorphism generators for small graphs.

Individualisation-refinement search: equitable colour refinement, branch on
the first non-singleton cell, keep the lexicographically largest edge
certificate over all leaves. Leaves equivalent to the first or best leaf give
automorphisms, which prune sibling branches lying in the same orbit.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

from .errors import ResourceLimitError
from .graph import Graph

MAX_CANONICAL_VERTICES = 12


@dataclass(frozen=True)
class CanonicalForm:
    # labeling[v] is the canonical position of vertex v
    labeling: tuple[int, ...]
    key: bytes
    automorphisms: tuple[tuple[int, ...], ...]

    def canonical_graph(self, g: Graph) -> Graph:
        return g.relabel(self.labeling)


def _refine(adj: tuple[int, ...], cells: list[list[int]]) -> list[list[int]]:
    """Coarsest equitable refinement, splitting cells by neighbour counts."""
    cells = [list(c) for c in cells]
    changed = True
    while changed:
        changed = False
        for w_idx in range(len(cells)):
            wmask = 0
            for v in cells[w_idx]:
                wmask |= 1 << v
            new_cells = []
            for cell in cells:
                if len(cell) == 1:
                    new_cells.append(cell)
                    continue
                groups: dict[int, list[int]] = {}
                for v in cell:
                    groups.setdefault((adj[v] & wmask).bit_count(), []).append(v)
                if len(groups) > 1:
                    changed = True
                    for cnt in sorted(groups):
                        new_cells.append(groups[cnt])
                else:
                    new_cells.append(cell)
            cells = new_cells
            if changed:
                break
    return cells


def _certificate(edges, labeling) -> tuple:
    return tuple(sorted((min(labeling[u], labeling[v]), max(labeling[u], labeling[v]))
                        for u, v in edges))


def _orbit_reps(candidates, gens, n) -> list[int]:
    """One representative per orbit of ``candidates`` under ``gens``."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for v in range(n):
            a, b = find(v), find(g[v])
            if a != b:
                parent[max(a, b)] = min(a, b)
    seen = set()
    reps = []
    for v in candidates:
        r = find(v)
        if r not in seen:
            seen.add(r)
            reps.append(v)
    return reps


def canonical_form(g: Graph) -> CanonicalForm:
    cap = int(os.environ.get("GRAPH_ZETA_MAX_CANONICAL", MAX_CANONICAL_VERTICES))
    if g.n > cap:
        raise ResourceLimitError(f"canonical form capped at {cap} vertices (got {g.n})")
    return _canonical_cached(g.n, g.edges)


@lru_cache(maxsize=200_000)
def _canonical_cached(n: int, edges: tuple) -> CanonicalForm:
    g = Graph(n, edges)
    adj = g.adjacency
    if n == 0:
        return CanonicalForm((), b"\x00", ())

    gens: list[tuple[int, ...]] = []
    state = {"first": None, "best": None, "best_lab": None}

    def leaf_labeling(cells):
        lab = [0] * n
        for pos, c in enumerate(cells):
            lab[c[0]] = pos
        return tuple(lab)

    def record_aut(lab_a, lab_b):
        # vertex map sending v to the vertex occupying v's position under lab_b
        inv_b = [0] * n
        for v, pos in enumerate(lab_b):
            inv_b[pos] = v
        perm = tuple(inv_b[lab_a[v]] for v in range(n))
        if perm != tuple(range(n)) and perm not in gens:
            gens.append(perm)

    def search(cells, prefix) -> bool:
        """Explore the subtree; True when its first leaf matched the first path."""
        cells = _refine(adj, cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            lab = leaf_labeling(cells)
            cert = _certificate(edges, lab)
            if state["first"] is None:
                state["first"] = (cert, lab)
                state["best"], state["best_lab"] = cert, lab
                return False
            if cert == state["first"][0]:
                record_aut(state["first"][1], lab)
                return True
            if cert == state["best"]:
                record_aut(state["best_lab"], lab)
                return False
            if cert > state["best"]:
                state["best"], state["best_lab"] = cert, lab
            return False
        cell = cells[target]
        done: list[int] = []
        for v in sorted(cell):
            if done:
                fixing = [a for a in gens if all(a[x] == x for x in prefix)]
                reps = _orbit_reps(done + [v], fixing, n)
                if v not in reps:
                    continue
            done.append(v)
            child = cells[:target] + [[v], [x for x in cell if x != v]] + cells[target + 1:]
            # a hit means this subtree is an automorphic image of an explored
            # first-path subtree: unwind to the nearest first-path ancestor
            if search(child, prefix + [v]) and not prefix_is_first_path(prefix):
                return True
        return False

    first_path: list[int] = []

    def prefix_is_first_path(prefix):
        return prefix == first_path[:len(prefix)]

    # record the first path while descending
    cells = [list(range(n))]
    cells = _refine(adj, cells)
    probe = cells
    while True:
        t = next((i for i, c in enumerate(probe) if len(c) > 1), None)
        if t is None:
            break
        v = min(probe[t])
        first_path.append(v)
        probe = _refine(adj, probe[:t] + [[v], [x for x in probe[t] if x != v]] + probe[t + 1:])

    search([list(range(n))], [])
    best_lab = state["best_lab"]
    cert = state["best"]
    bits = bytearray()
    bits += n.to_bytes(1, "big")
    adjbits = 0
    for a, b in cert:
        adjbits |= 1 << (a * n + b)
    bits += adjbits.to_bytes((n * n + 7) // 8, "big")
    return CanonicalForm(best_lab, bytes(bits), tuple(gens))


def automorphism_group(g: Graph, limit: int = 4_000_000) -> list[tuple[int, ...]]:
    """Materialise Aut(g) by closing the generator set (identity included)."""
    gens = canonical_form(g).automorphisms
    ident = tuple(range(g.n))
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for s in gens:
                c = tuple(s[h[v]] for v in range(g.n))
                if c not in group:
                    group.add(c)
                    nxt.append(c)
                    if len(group) > limit:
                        raise ResourceLimitError(f"automorphism group exceeds {limit} elements")
        frontier = nxt
    return sorted(group)


def is_automorphism(g: Graph, perm) -> bool:
    es = set(g.edges)
    return all((min(perm[u], perm[v]), max(perm[u], perm[v])) in es for u, v in g.edges)
