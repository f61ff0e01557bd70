"""p-adic log-Coulomb gases on graphs.

Charges ``e_v`` turn the multivariate zeta function into the partition
function ``Z(beta)`` via ``s(u,v) = e_u e_v beta``. With rational charges and
``D`` the common denominator of the products ``e_u e_v``, every edge variable
becomes an integral power of ``w = p^(-beta/D)``, so ``Z`` is an exact
rational function of ``w`` and its poles can be certified by exact division.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

import mpmath

from .errors import DomainError, GraphInputError, PoleError
from .graph import Graph, enumerate_indgraphs, induced_edge_ids
from .zeta import GraphZeta, evaluate, zeta

INF = math.inf


def _as_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise GraphInputError(f"charge {x!r} is not a number")
    if isinstance(x, float):
        raise DomainError("charges must be exact rationals (int or 'a/b' string); "
                          "use partition_value for real charges")
    try:
        return Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise GraphInputError(f"cannot parse charge {x!r}") from exc


@dataclass(frozen=True)
class ChargeDistribution:
    charges: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "charges", tuple(_as_fraction(c) for c in self.charges))

    @classmethod
    def uniform(cls, n: int, value=1) -> "ChargeDistribution":
        return cls((value,) * n)

    def __getitem__(self, v: int) -> Fraction:
        return self.charges[v]

    def __len__(self) -> int:
        return len(self.charges)

    def check(self, g: Graph) -> None:
        if len(self.charges) != g.n:
            raise GraphInputError(f"{len(self.charges)} charges for {g.n} vertices")

    def edge_products(self, g: Graph) -> list[Fraction]:
        self.check(g)
        return [self.charges[u] * self.charges[v] for u, v in g.edges]

    def common_denominator(self, g: Graph) -> int:
        return reduce(math.lcm, (q.denominator for q in self.edge_products(g)), 1)


def star_gas_charges(M: int) -> ChargeDistribution:
    """Neutral star layout: centre 0 and the next M/2 - 1 leaves +1, the rest -1."""
    if M < 2 or M % 2:
        raise DomainError(f"star gas needs an even particle count >= 2, got {M}")
    return ChargeDistribution(tuple(1 if v < M // 2 else -1 for v in range(M)))


@dataclass(frozen=True)
class EdgeSignSplit:
    pos_edges: frozenset[int]
    neg_edges: frozenset[int]
    zero_edges: frozenset[int]


def edge_sign_split(g: Graph, e: ChargeDistribution) -> EdgeSignSplit:
    prods = e.edge_products(g)
    return EdgeSignSplit(frozenset(i for i, q in enumerate(prods) if q > 0),
                         frozenset(i for i, q in enumerate(prods) if q < 0),
                         frozenset(i for i, q in enumerate(prods) if q == 0))


# ---------------------------------------------------------------- polynomials in w
# Dense coefficient lists, index = degree, no trailing zeros.

def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pdivmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = [Fraction(x) for x in a]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for i, y in enumerate(b):
            a[i + k] -= c * y
        _trim(a)
    return _trim(q), a


def _monic(a: Sequence) -> list:
    return [Fraction(x) / a[-1] for x in a]


def _primitive(a: Sequence) -> list[int]:
    """Integer multiple of ``a`` with coprime coefficients."""
    scale = reduce(math.lcm, (Fraction(x).denominator for x in a), 1)
    ints = [int(Fraction(x) * scale) for x in a]
    g = reduce(math.gcd, ints, 0)
    return [x // g for x in ints] if g > 1 else ints


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer polynomials: lead(b)^k a mod b in Z[w]."""
    a = list(a)
    lead = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1]
        a = [lead * x for x in a]
        for i, y in enumerate(b):
            a[i + k] -= c * y
        _trim(a)
    return a


def _pgcd(a: Sequence, b: Sequence) -> list:
    """Monic gcd over Q via a primitive remainder sequence.

    Plain Euclid over Q suffers coefficient swell at the degrees met here;
    dividing out the content after every step keeps the integers small.
    """
    a, b = _trim(list(a)), _trim(list(b))
    if not a or not b:
        return _monic(a or b) if (a or b) else []
    a, b = _primitive(a), _primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _prem(a, b)
        a, b = b, (_primitive(r) if r else [])
    return _monic(a)


def _peval(a: Sequence, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _multiplicity(poly: Sequence, m: Sequence) -> int:
    k = 0
    while poly:
        q, r = _pdivmod(poly, m)
        if r:
            break
        poly, k = q, k + 1
    return k


@dataclass(frozen=True)
class OneVarRational:
    """``num(w) / den(w)`` with ``w = p^(-beta/D)``; den monic and coprime to num.

    ``candidates`` lists the real values of beta at which a denominator factor
    of the unreduced form vanishes; only those can be real poles.
    """

    p: int
    D: int
    num: tuple[Fraction, ...]
    den: tuple[Fraction, ...]
    candidates: tuple[Fraction, ...] = field(default=(), compare=False)

    @classmethod
    def build(cls, p: int, D: int, num: Sequence, den: Sequence,
              candidates: Iterable[Fraction] = ()) -> "OneVarRational":
        num, den = _trim([Fraction(x) for x in num]), _trim([Fraction(x) for x in den])
        if not den:
            raise ZeroDivisionError("denominator is identically zero")
        g = _pgcd(num, den) if num else _monic(den)
        if len(g) > 1:
            num = _pdivmod(num, g)[0]
            den = _pdivmod(den, g)[0]
        if not num:
            den = [Fraction(1)]
        lead = den[-1]
        num = [x / lead for x in num]
        den = [x / lead for x in den]
        return cls(p, D, tuple(num), tuple(den), tuple(sorted(set(candidates))))

    def w_of(self, beta):
        """``w`` at ``beta``: exact when ``beta / D`` is an integer."""
        r = Fraction(beta) / self.D if not isinstance(beta, float) else beta / self.D
        if isinstance(r, Fraction) and r.denominator == 1:
            return Fraction(self.p) ** (-r.numerator)
        return None

    def minimal_polynomial(self, beta: Fraction) -> list[Fraction]:
        """Minimal polynomial over Q of ``w0 = p^(-beta/D)``: ``w^t - p^(-r)``.

        With ``beta/D = r/t`` in lowest terms, ``x^t - p^(-r)`` is irreducible
        because ``p^(-r)`` is not a q-th power for any prime q dividing t.
        """
        r = Fraction(beta) / self.D
        t, rr = r.denominator, r.numerator
        return [-(Fraction(self.p) ** (-rr))] + [Fraction(0)] * (t - 1) + [Fraction(1)]

    def pole_order(self, beta: Fraction) -> int:
        """Order of the pole at real ``beta`` (0 when Z is finite there)."""
        return _multiplicity(list(self.den), self.minimal_polynomial(beta))

    def zero_order(self, beta: Fraction) -> int:
        return _multiplicity(list(self.num), self.minimal_polynomial(beta))

    def real_poles(self) -> list[tuple[Fraction, int]]:
        out = []
        for b in self.candidates:
            k = self.pole_order(b)
            if k:
                out.append((b, k))
        return out

    def __call__(self, beta):
        """Value at real ``beta``: Fraction when exact, float otherwise."""
        if not isinstance(beta, float):
            beta = Fraction(beta)
            if beta in self.candidates and self.pole_order(beta):
                raise PoleError(f"pole at beta = {beta}")
        w = self.w_of(beta)
        if w is not None:
            d = _peval(self.den, w)
            if d == 0:
                raise PoleError(f"pole at beta = {beta}")
            return _peval(self.num, w) / d
        with mpmath.workdps(40):
            b = mpmath.mpf(beta) if isinstance(beta, float) else \
                mpmath.mpf(beta.numerator) / beta.denominator
            w = mpmath.power(self.p, -b / self.D)
            d = _peval([mpmath.mpf(c.numerator) / c.denominator for c in self.den], w)
            if abs(d) < mpmath.mpf(10) ** -30:
                raise PoleError(f"pole at beta = {beta}")
            n = _peval([mpmath.mpf(c.numerator) / c.denominator for c in self.num], w)
            return float(n / d)

    def to_dict(self) -> dict:
        return {"p": self.p, "D": self.D, "num": [str(c) for c in self.num],
                "den": [str(c) for c in self.den]}


def _binomial(c: Fraction, N: int) -> tuple[list[Fraction], int]:
    """``1 - c w^N`` as (polynomial, w-shift) with the shift clearing negative powers."""
    if N >= 0:
        poly = [Fraction(0)] * (N + 1)
        poly[0] += 1
        poly[N] -= c
        return _trim(poly), 0
    # w^N (w^{-N} - c)
    poly = [Fraction(0)] * (-N + 1)
    poly[0] -= c
    poly[-N] += 1
    return _trim(poly), N


def substitute_charges(z: GraphZeta, g: Graph, e: ChargeDistribution, p: int) -> OneVarRational:
    """Z(s; g) at ``s(u,v) = e_u e_v beta`` as a rational function of ``w``."""
    if tuple(z.edges) != tuple(g.edges):
        raise GraphInputError("zeta function does not belong to this graph")
    if z.prime is not None and z.prime != p:
        raise ValueError(f"zeta function is fixed at p={z.prime}")
    prods = e.edge_products(g)
    D = e.common_denominator(g)
    powers = [int(q * D) for q in prods]
    P = Fraction(p)

    shift = 0
    num_terms: dict[int, Fraction] = {}
    for exps, c in z.numerator.items():
        k = sum(m * powers[l] for l, m in enumerate(exps[1:]) if m)
        num_terms[k] = num_terms.get(k, 0) + Fraction(c) * P ** exps[0]
    den = [Fraction(1)]
    candidates = []
    for f, mult in z.denominator:
        N = sum(powers[l] for l in f.edges)
        c = P ** f.p_exp
        if N == 0 and c == 1:
            raise PoleError(f"factor {f} vanishes identically under these charges")
        poly, s = _binomial(c, N)
        for _ in range(mult):
            den = _pmul(den, poly)
            shift += s
        if N != 0:
            # 1 - p^a w^N = 0  <=>  beta = D a / N
            candidates.append(Fraction(D * f.p_exp, N))
    # num(w) / (w^shift * den(w)): move all w-powers to nonnegative degree
    lo = min(num_terms, default=0)
    base = min(lo, shift)
    num = [Fraction(0)] * (max(num_terms, default=0) - base + 1)
    for k, c in num_terms.items():
        num[k - base] += c
    den = [Fraction(0)] * (shift - base) + den
    return OneVarRational.build(p, D, num, den, candidates)


def char_split(g: Graph, vertices: Iterable[int], e: ChargeDistribution) -> tuple[Fraction, Fraction]:
    """(Char_+, Char_-) of the subgraph induced by ``vertices``."""
    prods = e.edge_products(g)
    plus = minus = Fraction(0)
    for l in induced_edge_ids(g, vertices):
        if prods[l] > 0:
            plus += prods[l]
        elif prods[l] < 0:
            minus += prods[l]
    return plus, minus


@dataclass(frozen=True)
class BetaInterval:
    beta_IR: Fraction | float
    beta_UV: Fraction | float
    uv_witnesses: tuple[frozenset[int], ...] = ()
    ir_witnesses: tuple[frozenset[int], ...] = ()

    def contains(self, beta) -> bool:
        return self.beta_IR < beta < self.beta_UV

    @property
    def nonempty(self) -> bool:
        return self.beta_IR < self.beta_UV


def beta_interval(g: Graph, e: ChargeDistribution) -> BetaInterval:
    """Convergence interval (beta_IR, beta_UV) from the signed charge sums."""
    e.check(g)
    uv, ir = INF, -INF
    uv_w: list[frozenset[int]] = []
    ir_w: list[frozenset[int]] = []
    for vs, h in enumerate_indgraphs(g, 2):
        plus, minus = char_split(g, vs, e)
        total = plus + minus
        if total < 0:
            bound = Fraction(len(vs) - 1) / abs(total)
            if bound < uv:
                uv, uv_w = bound, [vs]
            elif bound == uv:
                uv_w.append(vs)
        elif total > 0:
            bound = Fraction(1 - len(vs)) / total
            if bound > ir:
                ir, ir_w = bound, [vs]
            elif bound == ir:
                ir_w.append(vs)
    return BetaInterval(ir, uv, tuple(uv_w), tuple(ir_w))


@dataclass(frozen=True)
class PhaseVerdict:
    kind: str  # "transition_at" | "no_pole_found" | "unbounded_interval"
    interval: BetaInterval
    beta: Fraction | None = None
    pole_order: int = 0
    witnesses: tuple[frozenset[int], ...] = ()
    partition_function: OneVarRational | None = None

    def to_dict(self) -> dict:
        out = {"beta_IR": ext_real(self.interval.beta_IR),
               "beta_UV": ext_real(self.interval.beta_UV),
               "verdict": self.kind}
        if self.kind == "transition_at":
            out["transition"] = {
                "beta": ext_real(self.beta), "pole_order": self.pole_order,
                "witness_subgraphs": [sorted(w) for w in self.witnesses]}
        elif self.kind == "no_pole_found":
            out["transition"] = None
            out["witness_subgraphs"] = [sorted(w) for w in self.witnesses]
        else:
            out["transition"] = None
        return out


def ext_real(x):
    """JSON form of an extended real: ints stay ints, other rationals become 'a/b'."""
    if x == INF:
        return "+inf"
    if x == -INF:
        return "-inf"
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def phase_transition_check(g: Graph, p: int, e: ChargeDistribution,
                           z: GraphZeta | None = None) -> PhaseVerdict:
    """Decide whether the partition function has a genuine pole at beta_UV."""
    interval = beta_interval(g, e)
    if interval.beta_UV == INF:
        return PhaseVerdict("unbounded_interval", interval)
    if z is None:
        z = zeta(g)
    rat = substitute_charges(z, g, e, p)
    order = rat.pole_order(interval.beta_UV)
    if order:
        return PhaseVerdict("transition_at", interval, interval.beta_UV, order,
                            interval.uv_witnesses, rat)
    return PhaseVerdict("no_pole_found", interval, interval.beta_UV, 0,
                        interval.uv_witnesses, rat)


def partition_value(z: GraphZeta, g: Graph, charges: Sequence, beta, p: int | None = None):
    """Floating or exact value of Z at ``s(u,v) = e_u e_v beta`` for arbitrary real charges."""
    s = [charges[u] * charges[v] * beta for u, v in g.edges]
    return evaluate(z, p, s)


# ---------------------------------------------------------------- hypotheses

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


@dataclass(frozen=True)
class HypothesisReport:
    H1: bool
    H2: bool
    # weaker reading: a point where only some negative-edge difference vanishes
    H2_single_edge: bool

    def to_dict(self) -> dict:
        return {"H1": self.H1, "H2": self.H2, "H2_single_edge": self.H2_single_edge}


def hypothesis_check(g: Graph, e: ChargeDistribution) -> HypothesisReport:
    """H1: unit charges with both edge signs. H2: solvable sign pattern.

    H2 asks for a point with ``x_u = x_v`` on every negative edge and
    ``x_u != x_v`` on every positive edge. Over an infinite field this holds
    iff contracting the negative edges leaves no positive edge inside a class.
    """
    split = edge_sign_split(g, e)
    h1 = all(abs(c) == 1 for c in e.charges) and bool(split.pos_edges) and bool(split.neg_edges)

    uf = _UnionFind(g.n)
    for l in split.neg_edges:
        uf.union(*g.edges[l])
    h2 = all(uf.find(g.edges[l][0]) != uf.find(g.edges[l][1]) for l in split.pos_edges)

    # merging the two ends of one negative edge never traps a positive edge in
    # a simple graph, so this reading only needs some negative edge
    weak = False
    for l in split.neg_edges:
        a, b = g.edges[l]
        if all({a, b} != set(g.edges[m]) for m in split.pos_edges):
            weak = True
            break
    return HypothesisReport(h1, h2, weak)
