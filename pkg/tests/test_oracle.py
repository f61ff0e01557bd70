import math
from fractions import Fraction

import numpy as np
import pytest

from graphzeta.errors import DomainError, ResourceLimitError, VarianceRegionError
from graphzeta.graph import Graph, complete_graph, edgeless_graph, star_graph
from graphzeta.oracle import (GENERATOR_NAME, PadicSample, check_variance_region,
                              mc_partition_estimate, pairwise_norm, pairwise_valuation,
                              sample_valuations)
from graphzeta.zeta import evaluate, zeta


class _ZeroRng:
    def integers(self, lo, hi, size=None):
        return np.zeros(size, dtype=np.int64)


def _fixed(p, digits):
    s = PadicSample(p, _ZeroRng())
    s.digits = list(digits)
    return s


def test_pairwise_norm_examples():
    assert pairwise_norm(_fixed(3, [1, 2]), _fixed(3, [2, 2])) == 1
    assert pairwise_norm(_fixed(3, [1, 0, 2]), _fixed(3, [1, 1, 2])) == Fraction(1, 3)
    assert pairwise_valuation(_fixed(5, [4, 4, 4, 1]), _fixed(5, [4, 4, 4, 3])) == 3
    with pytest.raises(ResourceLimitError):
        pairwise_valuation(_fixed(2, []), _fixed(2, []), budget=100)
    with pytest.raises(ValueError):
        pairwise_norm(_fixed(2, [0]), _fixed(3, [1]))


def _assert_geometric(vals, p, n):
    for k in range(6):
        prob = p ** -k * (1 - 1 / p)
        count = int(np.count_nonzero(vals == k))
        assert abs(count - n * prob) <= 4 * math.sqrt(n * prob * (1 - prob)), (p, k, count)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_valuation_distribution_vectorised(p):
    n = 10**6
    rng = np.random.default_rng(p)
    vals = sample_valuations(complete_graph(2), p, n, rng)[:, 0]
    _assert_geometric(vals, p, n)


@pytest.mark.parametrize("p", [2, 3])
def test_valuation_distribution_scalar(p):
    n = 10**5
    rng = np.random.default_rng(100 + p)
    vals = np.array([pairwise_valuation(PadicSample(p, rng), PadicSample(p, rng)) for _ in range(n)])
    _assert_geometric(vals, p, n)


def test_single_digit_blocks_reach_deep_valuations():
    rng = np.random.default_rng(5)
    n = 400_000
    vals = sample_valuations(complete_graph(2), 2, n, rng, block_digits=1)[:, 0]
    _assert_geometric(vals, 2, n)
    # lazily extended far beyond the first block
    assert vals.max() >= 12
    with pytest.raises(ValueError):
        sample_valuations(complete_graph(2), 2, 10, rng, block_digits=100)


def test_valuations_consistent_with_ultrametric():
    # in a triangle the two smallest valuations coincide
    vals = sample_valuations(complete_graph(3), 3, 50_000, np.random.default_rng(9))
    s = np.sort(vals, axis=1)
    assert np.all(s[:, 0] == s[:, 1])


def test_deterministic_and_worker_independent():
    g = complete_graph(3)
    a = mc_partition_estimate(g, 3, 1, 100_000, seed=42, chunk_size=10_000)
    b = mc_partition_estimate(g, 3, 1, 100_000, seed=42, chunk_size=10_000, workers=4)
    c = mc_partition_estimate(g, 3, 1, 100_000, seed=43, chunk_size=10_000)
    assert a == b and a.mean != c.mean
    assert a.to_dict() == {"mean": a.mean, "stderr": a.stderr, "n": 100_000, "p": 3, "seed": 42,
                           "generator": GENERATOR_NAME}


def test_zero_exponents():
    est = mc_partition_estimate(complete_graph(3), 2, 0, 1000, seed=1)
    assert est.mean == 1 and est.stderr == 0
    est = mc_partition_estimate(edgeless_graph(3), 2, [], 1000, seed=1)
    assert est.mean == 1 and est.stderr == 0


@pytest.mark.parametrize("g,p,t", [(complete_graph(2), 2, 1), (complete_graph(2), 5, -0.3),
                                   (star_graph(3), 3, [Fraction(1, 2), 2]),
                                   (complete_graph(3), 2, {0: 1, 1: 0.5, (1, 2): -0.2})])
def test_agrees_with_symbolic(g, p, t):
    est = mc_partition_estimate(g, p, t, 300_000, seed=3)
    if isinstance(t, dict):
        s = [t[0], t[1], t[(1, 2)]]
    else:
        s = t
    exact = float(evaluate(zeta(g), p, s))
    assert abs(est.mean - exact) <= 3 * est.stderr


def test_stderr_scales_like_inverse_sqrt_n():
    g = complete_graph(2)
    small = mc_partition_estimate(g, 2, -0.25, 10**4, seed=8)
    large = mc_partition_estimate(g, 2, -0.25, 10**6, seed=8)
    assert 0.7 < small.stderr / large.stderr / 10 < 1.3
    exact = float(evaluate(zeta(g), 2, -0.25))
    assert abs(large.mean - exact) <= 3 * large.stderr


def test_variance_guard():
    k2, k3 = complete_graph(2), complete_graph(3)
    check_variance_region(k2, -0.49)
    with pytest.raises(VarianceRegionError):
        check_variance_region(k2, -0.5)
    with pytest.raises(DomainError) as info:
        check_variance_region(k2, -1)
    assert not isinstance(info.value, VarianceRegionError)
    # every single edge passes 2t > -1, the triangle as a whole does not
    with pytest.raises(VarianceRegionError):
        mc_partition_estimate(k3, 2, -0.4, 1000, seed=0)
    check_variance_region(k3, -0.3)


def test_input_errors():
    with pytest.raises(DomainError):
        mc_partition_estimate(complete_graph(2), 4, 1, 100, seed=0)
    with pytest.raises(DomainError):
        mc_partition_estimate(complete_graph(2), 2, 1, 1, seed=0)
    with pytest.raises(ValueError):
        mc_partition_estimate(complete_graph(3), 2, [1, 1], 100, seed=0)
