"""Monte Carlo estimates of integrals over Z_p^N of products of |x_u - x_v|_p^t.

Points of Z_p are drawn digit by digit. Only the valuation of each difference
matters, and it is fixed by the first digit where two coordinates disagree,
so digits are generated lazily until every edge is resolved. No truncation
is involved: each sample of the integrand is exact.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, GraphInputError, ResourceLimitError, VarianceRegionError
from .graph import Graph, enumerate_indgraphs, induced_edge_ids
from .padic import is_prime

DEFAULT_DIGIT_BUDGET = 10**6
GENERATOR_NAME = "numpy.Philox4x64-10+SeedSequence.spawn"


class PadicSample:
    """A uniform random element of Z_p whose digits are materialised on demand."""

    def __init__(self, p: int, rng: np.random.Generator, batch: int = 8):
        self.p = p
        self.rng = rng
        self.batch = batch
        self.digits: list[int] = []

    def extend(self, count: int) -> None:
        while len(self.digits) < count:
            self.digits.extend(int(d) for d in self.rng.integers(0, self.p, size=self.batch))

    def digit(self, i: int) -> int:
        self.extend(i + 1)
        return self.digits[i]


def pairwise_valuation(a: PadicSample, b: PadicSample, budget: int = DEFAULT_DIGIT_BUDGET) -> int:
    """ord_p(a - b): the index of the first digit where ``a`` and ``b`` differ."""
    if a.p != b.p:
        raise ValueError("samples live in different Z_p")
    i = 0
    while a.digit(i) == b.digit(i):
        i += 1
        if i >= budget:
            raise ResourceLimitError(f"no differing digit within {budget} digits")
    return i


def pairwise_norm(a: PadicSample, b: PadicSample, budget: int = DEFAULT_DIGIT_BUDGET) -> Fraction:
    """|a - b|_p as an exact power of p."""
    return Fraction(1, a.p ** pairwise_valuation(a, b, budget))


def _block_digits(p: int) -> int:
    # largest K with p^K < 2^62, so differences of K-digit blocks fit in int64
    k = 1
    while p ** (k + 1) < 2**62:
        k += 1
    return k


def _valuation(d: np.ndarray, p: int) -> np.ndarray:
    """p-adic valuation of nonzero int64 entries."""
    v = np.zeros(d.shape, dtype=np.int64)
    idx = np.flatnonzero(d % p == 0)
    d = d[idx]
    while idx.size:
        d //= p
        v[idx] += 1
        keep = d % p == 0
        idx, d = idx[keep], d[keep]
    return v


def sample_valuations(g: Graph, p: int, m: int, rng: np.random.Generator,
                      block_digits: int | None = None,
                      budget: int = DEFAULT_DIGIT_BUDGET) -> np.ndarray:
    """``m`` independent draws of (ord_p(x_u - x_v))_l for x uniform on Z_p^n.

    Each coordinate is revealed ``block_digits`` digits at a time; rows where
    some edge is still undecided get a further block, for those rows only.
    """
    K = _block_digits(p) if block_digits is None else block_digits
    if not 1 <= K <= _block_digits(p):
        raise ValueError(f"block_digits must lie in [1, {_block_digits(p)}] for p={p}")
    M = p**K
    us = np.array([u for u, _ in g.edges], dtype=np.int64)
    vs = np.array([v for _, v in g.edges], dtype=np.int64)
    out = np.zeros((m, g.num_edges), dtype=np.int64)
    if g.num_edges == 0 or m == 0:
        return out
    x = rng.integers(0, M, size=(m, g.n), dtype=np.int64)
    diff = x[:, us] - x[:, vs]
    rows, cols = np.nonzero(diff == 0)
    nz = diff != 0
    out[nz] = _valuation(diff[nz], p)
    level = 1
    while rows.size:
        if level * K >= budget:
            raise ResourceLimitError(f"no differing digit within {budget} digits")
        urows, inv = np.unique(rows, return_inverse=True)
        y = rng.integers(0, M, size=(urows.size, g.n), dtype=np.int64)
        d = y[inv, us[cols]] - y[inv, vs[cols]]
        done = d != 0
        out[rows[done], cols[done]] = level * K + _valuation(d[done], p)
        rows, cols = rows[~done], cols[~done]
        level += 1
    return out


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    p: int
    seed: int
    generator: str = GENERATOR_NAME

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n_samples,
                "p": self.p, "seed": self.seed, "generator": self.generator}


def _exponent_list(g: Graph, exponents) -> list[float]:
    if isinstance(exponents, Mapping):
        out = []
        for l, e in enumerate(g.edges):
            if l in exponents:
                out.append(exponents[l])
            elif e in exponents:
                out.append(exponents[e])
            else:
                raise GraphInputError(f"no exponent given for edge {e}")
    elif isinstance(exponents, (int, float, Fraction)):
        out = [exponents] * g.num_edges
    else:
        out = list(exponents)
        if len(out) != g.num_edges:
            raise GraphInputError(f"expected {g.num_edges} exponents, got {len(out)}")
    return out


def check_variance_region(g: Graph, exponents) -> None:
    """Refuse exponents for which the integrand has infinite second moment.

    The second moment is the same integral at doubled exponents, which is
    finite iff ``|V(H)| - 1 + 2*sum_{E(H)} t > 0`` for every connected induced
    H with at least two vertices. For a single edge this reads ``2t > -1``.
    """
    t = _exponent_list(g, exponents)
    for vs, h in enumerate_indgraphs(g, 2):
        ids = induced_edge_ids(g, vs)
        total = sum(Fraction(t[l]) for l in ids)
        if len(vs) - 1 + total <= 0:
            raise DomainError(
                f"integral diverges: subgraph on {sorted(vs)} has "
                f"|V|-1+sum(t) = {float(len(vs) - 1 + total):.6g} <= 0")
        if len(vs) - 1 + 2 * total <= 0:
            raise VarianceRegionError(
                f"Monte Carlo refused: on vertices {sorted(vs)} the integrand has infinite "
                f"variance (|V|-1 + 2*sum(t) = {float(len(vs) - 1 + 2 * total):.6g} <= 0; "
                "each single edge needs 2t > -1)")


def _chunk_moments(g: Graph, p: int, t: np.ndarray, m: int, seq: np.random.SeedSequence,
                   block_digits: int | None) -> tuple[int, float, float]:
    rng = np.random.Generator(np.random.Philox(seq))
    vals = sample_valuations(g, p, m, rng, block_digits)
    if g.num_edges:
        f = np.exp(-(vals @ t) * math.log(p))
    else:
        f = np.ones(m)
    mean = float(f.mean())
    m2 = float(((f - mean) ** 2).sum())
    return m, mean, m2


def mc_partition_estimate(g: Graph, p: int, exponents, n: int, seed: int,
                          chunk_size: int = 1 << 16, workers: int = 1,
                          block_digits: int | None = None) -> McEstimate:
    """Unbiased estimate of the integral over Z_p^n of prod_l |x_u - x_v|_p^{t_l}.

    Chunk ``i`` always draws from child ``i`` of ``SeedSequence(seed)``, so the
    result is bit-for-bit reproducible and independent of ``workers``.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if n < 2:
        raise DomainError("need at least two samples for a standard error")
    t_list = _exponent_list(g, exponents)
    check_variance_region(g, t_list)
    t = np.array([float(x) for x in t_list], dtype=np.float64)
    sizes = [chunk_size] * (n // chunk_size)
    if n % chunk_size:
        sizes.append(n % chunk_size)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seqs))

    def run(job):
        return _chunk_moments(g, p, t, job[0], job[1], block_digits)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    # pairwise merge of (count, mean, M2), in chunk order
    count, mean, m2 = 0, 0.0, 0.0
    for c, mu, s2 in parts:
        total = count + c
        delta = mu - mean
        mean += delta * c / total
        m2 += s2 + delta * delta * count * c / total
        count = total
    stderr = math.sqrt(m2 / (count - 1) / count)
    return McEstimate(mean, stderr, count, p, seed)
