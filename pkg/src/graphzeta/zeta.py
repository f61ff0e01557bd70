"""Exact local zeta functions of graphs over Q_p.

A :class:`GraphZeta` is a rational function in the edge variables
``T_l = p^{-s(l)}``. Its numerator is a :class:`LaurentPoly` whose variable 0
is ``p`` (symbolic mode) and whose variable ``1 + l`` is ``T_l``. The
denominator stays factored as a multiset of binomials
``(1 - p^a * prod_{l in edges} T_l)``, the shape the colouring recursion
produces. In fixed-prime mode ``p`` is a number, variable 0 is unused and
coefficients are Fractions.

Normal form: every denominator factor that exactly divides the numerator is
cancelled. The factors are irreducible and pairwise non-associate, so two
normal forms represent the same function iff they are identical.
"""
from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath

from .canonical import automorphism_group, canonical_form
from .chromatic import chromatic_polynomial
from .errors import DomainError, GraphInputError, PoleError, ResourceLimitError
from .graph import (Graph, connected_components, connected_partitions, enumerate_indgraphs,
                    induced_edge_ids, induced_subgraph, mask_members, quotient_graph)
from .poly import DivisibilityFilter, LaurentPoly

DEFAULT_MAX_VERTICES = 10


@dataclass(frozen=True, order=True)
class DenFactor:
    """``1 - p^p_exp * prod_{l in edges} T_l``."""

    p_exp: int
    edges: tuple[int, ...]


@dataclass(frozen=True)
class GraphZeta:
    edges: tuple[tuple[int, int], ...]
    numerator: LaurentPoly
    denominator: tuple[tuple[DenFactor, int], ...] = ()
    prime: int | None = None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def nvars(self) -> int:
        return 1 + len(self.edges)

    def factors(self) -> list[DenFactor]:
        return [f for f, _ in self.denominator]

    def __mul__(self, other: "GraphZeta") -> "GraphZeta":
        if self.edges != other.edges or self.prime != other.prime:
            raise ValueError("zeta functions live in different variable rings")
        den = Counter(dict(self.denominator))
        den.update(dict(other.denominator))
        return normalize(self.edges, self.numerator * other.numerator, den, self.prime)


def _shift(f: DenFactor, nedges: int, prime: int | None) -> tuple[list[int], object]:
    exps = [0] * (1 + nedges)
    for l in f.edges:
        exps[1 + l] += 1
    if prime is None:
        exps[0] = f.p_exp
        return exps, 1
    return exps, Fraction(prime) ** f.p_exp


def normalize(edges, numerator: LaurentPoly, den: Mapping[DenFactor, int],
              prime: int | None = None) -> GraphZeta:
    """Cancel every denominator factor that exactly divides the numerator."""
    nedges = len(edges)
    if numerator.is_zero():
        return GraphZeta(tuple(edges), numerator, (), prime)
    left = {}
    filt = None
    for f in sorted(den):
        mult = den[f]
        shift, c = _shift(f, nedges, prime)
        while mult > 0:
            if c == 1 and len(numerator) > 2000:
                if filt is None:
                    filt = DivisibilityFilter(numerator)
                if not filt.may_divide(shift):
                    break
            q = numerator.div_binomial(shift, c)
            if q is None:
                break
            numerator, filt = q, None
            mult -= 1
        if mult:
            left[f] = mult
    return GraphZeta(tuple(edges), numerator, tuple(sorted(left.items())), prime)


def one(edges=(), prime: int | None = None) -> GraphZeta:
    return GraphZeta(tuple(edges), LaurentPoly.constant(1 + len(edges), 1), (), prime)


def _p_power_poly(nvars: int, coeffs: Sequence[int], shift: int, prime: int | None) -> LaurentPoly:
    """``p^shift * sum_i coeffs[i] p^i`` as a constant of the ring."""
    if prime is None:
        return LaurentPoly.from_terms(nvars, (([i + shift] + [0] * (nvars - 1), c)
                                             for i, c in enumerate(coeffs) if c))
    val = sum(Fraction(c) * Fraction(prime) ** (i + shift) for i, c in enumerate(coeffs))
    return LaurentPoly.constant(nvars, val)


def _embed(z: GraphZeta, host_edges, edge_map: Sequence[int]) -> GraphZeta:
    """Rename edge ``i`` of ``z`` to host edge ``edge_map[i]``."""
    index = [0] + [1 + e for e in edge_map]
    num = z.numerator.remap(1 + len(host_edges), index)
    den = tuple((DenFactor(f.p_exp, tuple(sorted(edge_map[l] for l in f.edges))), m)
                for f, m in z.denominator)
    return GraphZeta(tuple(host_edges), num, tuple(sorted(den)), z.prime)


def max_vertices_default() -> int:
    return int(os.environ.get("GRAPH_ZETA_MAX_VERTICES", DEFAULT_MAX_VERTICES))


def tree_zeta_closed_form(g: Graph, prime: int | None = None) -> GraphZeta:
    """(1 - p^-1)^(N-1) / prod_{edges} (1 - p^-1 T_l) for a tree on N vertices."""
    if not g.is_tree():
        raise DomainError("closed form applies to connected trees only")
    nv = 1 + g.num_edges
    base = _p_power_poly(nv, (-1, 1), -1, prime)
    num = LaurentPoly.constant(nv, 1)
    for _ in range(g.n - 1):
        num = num * base
    den = {DenFactor(-1, (l,)): 1 for l in range(g.num_edges)}
    return normalize(g.edges, num, den, prime)


class ZetaEngine:
    """Recursive evaluator with memoisation on canonical forms.

    ``use_tree_shortcut=False`` forces every tree through the general
    colouring recursion, which is how the closed form is cross-checked.
    """

    def __init__(self, prime: int | None = None, use_tree_shortcut: bool = True,
                 max_vertices: int | None = None):
        self.prime = prime
        self.use_tree_shortcut = use_tree_shortcut
        self.max_vertices = max_vertices_default() if max_vertices is None else max_vertices
        # canonical key -> zeta of the canonical representative
        self.memo: dict[bytes, GraphZeta] = {}

    def zeta(self, g: Graph) -> GraphZeta:
        if g.n > self.max_vertices:
            raise ResourceLimitError(
                f"graph has {g.n} vertices; cap is {self.max_vertices} "
                "(raise with --max-vertices or GRAPH_ZETA_MAX_VERTICES)")
        result = None
        for comp in connected_components(g):
            if len(comp) < 2:
                continue
            if len(comp) == g.n:
                return self._connected(g)
            sub, _ = induced_subgraph(g, comp)
            z = _embed(self._connected(sub), g.edges, induced_edge_ids(g, comp))
            result = z if result is None else _product_disjoint(result, z)
        return one(g.edges, self.prime) if result is None else result

    def _connected(self, g: Graph) -> GraphZeta:
        if g.n == 1:
            return one((), self.prime)
        if self.use_tree_shortcut and g.is_tree():
            return tree_zeta_closed_form(g, self.prime)
        cf = canonical_form(g)
        cg = g.relabel(cf.labeling)
        z = self.memo.get(cf.key)
        if z is None:
            z = self._recurse(cg)
            self.memo[cf.key] = z
        # edge j of cg is the image of one edge of g
        lab = cf.labeling
        edge_map = [0] * g.num_edges
        for i, (u, v) in enumerate(g.edges):
            edge_map[cg.edge_id(lab[u], lab[v])] = i
        return _embed(z, g.edges, edge_map)

    def _recurse(self, g: Graph) -> GraphZeta:
        """Sum over realizable spanning subgraphs H != G, then solve for Z(G)."""
        n, nv, prime = g.n, 1 + g.num_edges, self.prime
        block_cache: dict[int, GraphZeta] = {}

        def block_zeta(mask: int) -> GraphZeta:
            z = block_cache.get(mask)
            if z is None:
                verts = mask_members(mask)
                sub, _ = induced_subgraph(g, verts)
                z = _embed(self._connected(sub), g.edges, induced_edge_ids(g, verts))
                block_cache[mask] = z
            return z

        groups: dict[tuple, LaurentPoly] = {}
        for blocks in connected_partitions(g):
            if len(blocks) == 1:
                continue
            chi = chromatic_polynomial(quotient_graph(g, blocks))
            term = _p_power_poly(nv, chi.coefficients, -n, prime)
            exps = [0] * nv
            den: Counter = Counter()
            for b in blocks:
                if b & (b - 1) == 0:
                    continue
                for l in mask_members(g.edge_mask(b)):
                    exps[1 + l] = 1
                zb = block_zeta(b)
                term = term * zb.numerator
                den.update(dict(zb.denominator))
            term = term * LaurentPoly.monomial(exps)
            key = tuple(sorted(den.items()))
            groups[key] = groups[key] + term if key in groups else term

        lcm: Counter = Counter()
        for key in groups:
            for f, m in key:
                lcm[f] = max(lcm[f], m)
        items = [(dict(key), num) for key, num in groups.items()]
        total = _common_denominator_sum(items, sorted(lcm.items()), g.num_edges, prime)
        lcm[DenFactor(1 - n, tuple(range(g.num_edges)))] += 1
        return normalize(g.edges, total, lcm, prime)


def _common_denominator_sum(items, factors, nedges: int, prime) -> LaurentPoly:
    """Sum of ``num * lcm / den`` over ``items`` = [(den multiplicities, num)].

    Items are bucketed by how many copies of the first factor they lack, the
    buckets are summed recursively over the remaining factors, and only then
    multiplied by the missing copies. Sharing the multiplications this way is
    much cheaper than clearing each fraction separately.
    """
    if not factors:
        total = items[0][1]
        for _, num in items[1:]:
            total = total + num
        return total
    (f, m), rest = factors[0], factors[1:]
    buckets: dict[int, list] = {}
    for have, num in items:
        buckets.setdefault(m - have.get(f, 0), []).append((have, num))
    shift, c = _shift(f, nedges, prime)
    total = None
    for deficit in sorted(buckets):
        part = _common_denominator_sum(buckets[deficit], rest, nedges, prime)
        for _ in range(deficit):
            part = part.mul_binomial(shift, c)
        total = part if total is None else total + part
    return total


def _product_disjoint(a: GraphZeta, b: GraphZeta) -> GraphZeta:
    """Product of zeta functions in disjoint sets of edge variables.

    A factor of one side cannot divide the other side's numerator, so the
    product of two normal forms is already normal.
    """
    den = Counter(dict(a.denominator))
    den.update(dict(b.denominator))
    return GraphZeta(a.edges, a.numerator * b.numerator, tuple(sorted(den.items())), a.prime)


_engines: dict[tuple, ZetaEngine] = {}


def zeta(g: Graph, prime: int | None = None, use_tree_shortcut: bool = True,
         max_vertices: int | None = None) -> GraphZeta:
    """Z(s; g) as an exact rational function of the edge variables."""
    cap = max_vertices_default() if max_vertices is None else max_vertices
    key = (prime, use_tree_shortcut)
    engine = _engines.get(key)
    if engine is None:
        engine = _engines[key] = ZetaEngine(prime, use_tree_shortcut, cap)
    engine.max_vertices = cap
    return engine.zeta(g)


def clear_caches() -> None:
    _engines.clear()


# ---------------------------------------------------------------- operations

def transport(z: GraphZeta, edges, edge_map: Sequence[int]) -> GraphZeta:
    """Rewrite ``z`` over another edge list: variable ``l`` becomes ``edge_map[l]``."""
    if len(edge_map) != z.num_edges or len(edges) != z.num_edges:
        raise GraphInputError("edge correspondence must be a bijection")
    return _embed(z, edges, edge_map)


def permute_edges(z: GraphZeta, edge_perm: Sequence[int]) -> GraphZeta:
    """Substitute ``T_l -> T_{edge_perm[l]}``."""
    return _embed(z, z.edges, edge_perm)


def with_prime(z: GraphZeta, prime: int) -> GraphZeta:
    """Specialise a symbolic-p zeta function to a concrete prime."""
    if z.prime is not None:
        if z.prime != prime:
            raise ValueError(f"zeta already fixed at p={z.prime}")
        return z
    P = Fraction(prime)
    num = z.numerator.substitute(z.nvars, lambda e: ((0,) + e[1:], P ** e[0]))
    return normalize(z.edges, num, dict(z.denominator), prime)


def specialize_edges_to_zero(z: GraphZeta, g: Graph, keep: Iterable[int]) -> GraphZeta:
    """Set ``s(l) = 0`` (``T_l = 1``) for every edge outside G[keep].

    The result is expressed in the edge variables of the relabelled induced
    subgraph, so it compares directly with ``zeta(induced_subgraph(g, keep))``.
    """
    keep = sorted(set(keep))
    if tuple(z.edges) != tuple(g.edges):
        raise GraphInputError("zeta function does not belong to this graph")
    sub, _ = induced_subgraph(g, keep)
    kept = induced_edge_ids(g, keep)
    pos = {l: i for i, l in enumerate(kept)}
    nv = 1 + len(kept)

    def fn(exps):
        new = [0] * nv
        new[0] = exps[0]
        for l, e in enumerate(exps[1:]):
            if e and l in pos:
                new[1 + pos[l]] = e
        return new, 1

    num = z.numerator.substitute(nv, fn)
    den: Counter = Counter()
    for f, m in z.denominator:
        edges = tuple(sorted(pos[l] for l in f.edges if l in pos))
        if not edges and f.p_exp == 0:
            raise PoleError(f"factor {f} vanishes identically after specialisation")
        den[DenFactor(f.p_exp, edges)] += m
    return normalize(sub.edges, num, den, z.prime)


def _as_s_list(z: GraphZeta, s_values) -> list:
    if isinstance(s_values, Mapping):
        out = []
        for l in range(z.num_edges):
            if l in s_values:
                out.append(s_values[l])
            elif z.edges[l] in s_values:
                out.append(s_values[z.edges[l]])
            else:
                raise GraphInputError(f"no exponent given for edge {z.edges[l]}")
        return out
    if isinstance(s_values, (int, float, Fraction)):
        return [s_values] * z.num_edges
    out = list(s_values)
    if len(out) != z.num_edges:
        raise GraphInputError(f"expected {z.num_edges} exponents, got {len(out)}")
    return out


def _is_integral(x) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    return False


def evaluate(z: GraphZeta, p: int | None = None, s_values=0):
    """Value of Z at ``s``; exact Fraction when every ``s(l)`` is an integer.

    Non-integer exponents make ``p^{-s}`` irrational, so those go through
    40-digit mpmath arithmetic and come back as a float.
    """
    if p is None:
        p = z.prime
    if p is None:
        raise ValueError("a prime is required to evaluate a symbolic-p zeta function")
    if z.prime is not None and z.prime != p:
        raise ValueError(f"zeta function is fixed at p={z.prime}")
    s = _as_s_list(z, s_values)
    if all(_is_integral(x) for x in s):
        P = Fraction(p)
        T = [P ** (-int(x)) for x in s]
        values = [P] + T
        den = Fraction(1)
        for f, m in z.denominator:
            val = 1 - P ** f.p_exp * _prod(T[l] for l in f.edges)
            if val == 0:
                raise PoleError(f"evaluation at a pole: factor {f}")
            den *= val ** m
        return z.numerator.evaluate(values) / den
    with mpmath.workdps(40):
        P = mpmath.mpf(p)
        T = [P ** -(mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x))
             for x in s]
        values = [P] + T
        den = mpmath.mpf(1)
        for f, m in z.denominator:
            val = 1 - P ** f.p_exp * _prod(T[l] for l in f.edges)
            if abs(val) < mpmath.mpf(10) ** -30:
                raise PoleError(f"evaluation at a pole: factor {f}")
            den *= val ** m
        total = mpmath.mpf(0)
        for exps, c in z.numerator.items():
            t = mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c)
            for x, e in zip(values, exps):
                if e:
                    t *= x ** e
            total += t
        return float(total / den)


def _prod(xs):
    out = 1
    for x in xs:
        out = out * x
    return out


def convergence_abscissa_uniform(g: Graph) -> Fraction:
    """max over connected induced H with >= 2 vertices of (1 - |V(H)|) / |E(H)|.

    With every ``s(l) = gamma`` the integral converges for ``Re(gamma)``
    strictly above this value.
    """
    if g.num_edges == 0:
        raise DomainError("edgeless graph: the zeta function is constant")
    return max(Fraction(1 - len(vs), h.num_edges) for vs, h in enumerate_indgraphs(g, 2))


def indgraph_factor(g: Graph, vertices: Iterable[int]) -> DenFactor:
    vs = sorted(vertices)
    return DenFactor(1 - len(vs), induced_edge_ids(g, vs))


def denominator_witnesses(z: GraphZeta, g: Graph) -> dict[DenFactor, frozenset[int] | None]:
    """Map each denominator factor to the connected induced subgraph producing it."""
    table = {indgraph_factor(g, vs): vs for vs, _ in enumerate_indgraphs(g, 2)}
    return {f: table.get(f) for f in z.factors()}


@dataclass
class FunctionalEquationReport:
    checks: list[tuple[tuple[int, ...], tuple[int, ...], bool]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks)


def automorphism_edge_map(g: Graph, perm: Sequence[int]) -> tuple[int, ...]:
    return tuple(g.edge_id(perm[u], perm[v]) for u, v in g.edges)


def check_functional_equation(g: Graph, z: GraphZeta | None = None,
                              all_elements: bool = False) -> FunctionalEquationReport:
    """Check Z(s) = Z(s o sigma_E) for each automorphism generator (or all of Aut)."""
    if z is None:
        z = zeta(g)
    perms = automorphism_group(g) if all_elements else \
        [tuple(range(g.n))] + list(canonical_form(g).automorphisms)
    report = FunctionalEquationReport()
    for perm in perms:
        emap = automorphism_edge_map(g, perm)
        report.checks.append((tuple(perm), emap, permute_edges(z, emap) == z))
    return report


# ---------------------------------------------------------------- serialisation

def _rat(c) -> str:
    return str(Fraction(c))


def to_json_dict(z: GraphZeta) -> dict:
    by_mono: dict[tuple[int, ...], dict[int, object]] = {}
    for exps, c in z.numerator.items():
        by_mono.setdefault(exps[1:], {})[exps[0]] = c
    numerator = []
    for mono in sorted(by_mono):
        coeff = {str(k): _rat(v) for k, v in sorted(by_mono[mono].items())}
        numerator.append({"coeff": coeff,
                          "monomial": {str(l): e for l, e in enumerate(mono) if e}})
    denominator = [{"p_exp": f.p_exp, "edges": list(f.edges), "mult": m}
                   for f, m in z.denominator]
    return {"edges": [list(e) for e in z.edges], "prime": z.prime,
            "numerator": numerator, "denominator": denominator}


def from_json_dict(d: dict) -> GraphZeta:
    edges = tuple(tuple(e) for e in d["edges"])
    nv = 1 + len(edges)
    items = []
    for term in d["numerator"]:
        mono = [0] * len(edges)
        for l, e in term["monomial"].items():
            mono[int(l)] = int(e)
        for pe, c in term["coeff"].items():
            c = Fraction(c)
            items.append(([int(pe)] + mono, c.numerator if c.denominator == 1 else c))
    num = LaurentPoly.from_terms(nv, items)
    den = tuple(sorted((DenFactor(int(f["p_exp"]), tuple(sorted(int(x) for x in f["edges"]))),
                        int(f["mult"])) for f in d["denominator"]))
    return GraphZeta(edges, num, den, d.get("prime"))


def dumps(z: GraphZeta) -> str:
    return json.dumps(to_json_dict(z), sort_keys=True, separators=(",", ":"))


def loads(text: str) -> GraphZeta:
    return from_json_dict(json.loads(text))


# ---------------------------------------------------------------- LaTeX

def _var(edge: tuple[int, int]) -> str:
    return f"s_{{{edge[0]},{edge[1]}}}"


def _exponent(p_exp, mono, edges) -> str:
    parts = []
    if p_exp or not any(mono):
        parts.append(str(p_exp))
    for l, e in enumerate(mono):
        if e:
            term = _var(edges[l]) if e == 1 else f"{e}{_var(edges[l])}"
            parts.append(f"-{term}" if parts else f"-{term}")
    s = "".join(parts) if parts else "0"
    return s


def _coeff_latex(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}" if c > 0 else \
        f"-\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"


def _term_latex(c, base: str, p_exp: int, mono, edges) -> str:
    has_power = p_exp != 0 or any(mono)
    power = f"{base}^{{{_exponent(p_exp, mono, edges)}}}" if has_power else ""
    if not has_power:
        return _coeff_latex(c)
    if c == 1:
        return power
    if c == -1:
        return "-" + power
    return f"{_coeff_latex(c)}\\,{power}"


def _join(terms: list[str]) -> str:
    out = terms[0]
    for t in terms[1:]:
        out += t if t.startswith("-") else "+" + t
    return out


def to_latex(z: GraphZeta) -> str:
    """Render in the factored style ``(1-p^{-1})^{k} ... / prod (1-p^{a-s_l-...})``."""
    base = "p" if z.prime is None else str(z.prime)
    num = z.numerator
    k = 0
    one_minus = ([-1] + [0] * z.num_edges, 1) if z.prime is None else \
        ([0] * z.nvars, Fraction(1, z.prime))
    while len(num) > 1:
        q = num.div_binomial(*one_minus) if z.prime is None else None
        if q is None:
            break
        num, k = q, k + 1
    pieces = []
    if k:
        pieces.append(f"(1-{base}^{{-1}})" + (f"^{{{k}}}" if k > 1 else ""))
    rest_is_one = num == LaurentPoly.constant(z.nvars, 1)
    if not rest_is_one:
        terms = [_term_latex(c, base, exps[0], exps[1:], z.edges)
                 for exps, c in sorted(num.items(), key=lambda t: (t[0][1:], -t[0][0]))]
        body = _join(terms) if terms else "0"
        pieces.append(f"\\left({body}\\right)" if pieces and len(terms) > 1 else body)
    numerator = "".join(pieces) if pieces else "1"
    if not z.denominator:
        return numerator
    dens = []
    for f, m in z.denominator:
        mono = [0] * z.num_edges
        for l in f.edges:
            mono[l] = 1
        fac = f"(1-{base}^{{{_exponent(f.p_exp, mono, z.edges)}}})"
        dens.append(fac + (f"^{{{m}}}" if m > 1 else ""))
    return f"\\frac{{{numerator}}}{{{''.join(dens)}}}"
