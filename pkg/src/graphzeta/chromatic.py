"""Chromatic polynomials and the colouring-count function C(p; H)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Sequence

from .canonical import canonical_form
from .errors import DomainError, ResourceLimitError
from .graph import (EdgeSubgraph, Graph, connected_components, contract_to_star_graph,
                    induced_subgraph, is_realizable)

BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class ChromaticPoly:
    """Integer polynomial in x; ``coefficients[i]`` multiplies ``x**i``."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coefficients)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(int(a) for a in c))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coefficients):
            acc = acc * x + a
        return acc

    def __mul__(self, other: "ChromaticPoly") -> "ChromaticPoly":
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return ChromaticPoly(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return ChromaticPoly(tuple(out))

    def __sub__(self, other: "ChromaticPoly") -> "ChromaticPoly":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (0,) * (n - len(self.coefficients))
        b = other.coefficients + (0,) * (n - len(other.coefficients))
        return ChromaticPoly(tuple(x - y for x, y in zip(a, b)))

    def __add__(self, other: "ChromaticPoly") -> "ChromaticPoly":
        return self - ChromaticPoly(tuple(-c for c in other.coefficients))

    @classmethod
    def monomial(cls, k: int) -> "ChromaticPoly":
        return cls((0,) * k + (1,))

    @classmethod
    def falling_factorial(cls, n: int) -> "ChromaticPoly":
        """x (x-1) ... (x-n+1)."""
        out = cls((1,))
        for i in range(n):
            out = out * cls((-i, 1))
        return out

    def __str__(self) -> str:
        terms = []
        for i in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}{'*' if mono else ''}{mono}"
            terms.append(("-" if c < 0 else "+", s))
        if not terms:
            return "0"
        out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, s in terms[1:]:
            out += f" {sign} {s}"
        return out


_memo: dict[bytes, ChromaticPoly] = {}


def chromatic_polynomial(g: Graph) -> ChromaticPoly:
    """P(x; g) by deletion-contraction, memoised on the canonical key."""
    if g.num_edges == 0:
        return ChromaticPoly.monomial(g.n)
    comps = connected_components(g)
    if len(comps) > 1:
        out = ChromaticPoly((1,))
        for c in comps:
            out = out * chromatic_polynomial(induced_subgraph(g, c)[0])
        return out
    if g.num_edges == comb(g.n, 2):
        return ChromaticPoly.falling_factorial(g.n)
    if g.num_edges == g.n - 1:
        return _tree_poly(g.n)
    key = canonical_form(g).key
    hit = _memo.get(key)
    if hit is not None:
        return hit
    u, v = _pick_edge(g)
    result = chromatic_polynomial(delete_edge(g, u, v)) - chromatic_polynomial(contract_edge(g, u, v))
    _memo[key] = result
    return result


def _tree_poly(n: int) -> ChromaticPoly:
    out = ChromaticPoly((0, 1))
    for _ in range(n - 1):
        out = out * ChromaticPoly((-1, 1))
    return out


def _pick_edge(g: Graph) -> tuple[int, int]:
    # contracting an edge between high-degree vertices merges the most parallels
    return max(g.edges, key=lambda e: (g.degree(e[0]) + g.degree(e[1]), -e[0], -e[1]))


def delete_edge(g: Graph, u: int, v: int) -> Graph:
    e = (min(u, v), max(u, v))
    return Graph(g.n, tuple(x for x in g.edges if x != e))


def contract_edge(g: Graph, u: int, v: int) -> Graph:
    """Merge ``v`` into ``u``; parallel edges collapse and the loop is dropped."""
    u, v = min(u, v), max(u, v)
    relabel = [w if w < v else w - 1 for w in range(g.n)]
    relabel[v] = relabel[u]
    pairs = set()
    for a, b in g.edges:
        a2, b2 = relabel[a], relabel[b]
        if a2 != b2:
            pairs.add((min(a2, b2), max(a2, b2)))
    return Graph(g.n - 1, tuple(sorted(pairs)))


def chromatic_function(g: Graph, h: EdgeSubgraph) -> ChromaticPoly:
    """C(p; h) as a polynomial in p: the chromatic polynomial of G*_h.

    Only valid for realizable ``h``; for any other spanning subgraph the true
    colouring count is zero while the contracted-graph formula is not.
    """
    if not is_realizable(g, h):
        raise DomainError("subgraph is not the same-colour subgraph of any colouring")
    return chromatic_polynomial(contract_to_star_graph(g, h))


def coloring_count_bruteforce(g: Graph, h: EdgeSubgraph, p: int) -> int:
    """Count colourings a in F_p^V whose same-colour edge set is exactly ``h``."""
    if p ** g.n > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"{p}^{g.n} colourings exceed the enumeration guard")
    target = h.kept
    count = 0
    for a in itertools.product(range(p), repeat=g.n):
        if frozenset(i for i, (u, v) in enumerate(g.edges) if a[u] == a[v]) == target:
            count += 1
    return count


def same_color_subgraph(g: Graph, coloring: Sequence[int]) -> EdgeSubgraph:
    """The spanning subgraph keeping exactly the monochromatic edges."""
    return EdgeSubgraph(g, frozenset(i for i, (u, v) in enumerate(g.edges)
                                     if coloring[u] == coloring[v]))
