import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from graphzeta.errors import DomainError
from graphzeta.gas import (ChargeDistribution, _pdivmod, _pgcd, _pmul, OneVarRational, beta_interval, char_split,
                           edge_sign_split, ext_real, hypothesis_check, partition_value,
                           phase_transition_check, star_gas_charges, substitute_charges)
from graphzeta.graph import Graph, complete_graph, edgeless_graph, path_graph, star_graph
from graphzeta.oracle import check_variance_region, mc_partition_estimate
from graphzeta.errors import VarianceRegionError
from graphzeta.zeta import convergence_abscissa_uniform, evaluate, zeta

from _util import random_connected, random_graph


def charges(*values):
    return ChargeDistribution(tuple(values))


def test_charges_are_exact():
    with pytest.raises(DomainError):
        ChargeDistribution((0.5, 1))
    assert charges(1, Fraction(1, 2))[1] == Fraction(1, 2)


def test_edge_sign_split():
    split = edge_sign_split(path_graph(4), charges(1, -1, 0, 1))
    assert split.neg_edges == {0} and split.zero_edges == {1, 2} and split.pos_edges == frozenset()


def test_k2_mixed_charges():
    g = complete_graph(2)
    rat = substitute_charges(zeta(g), g, charges(1, -1), 2)
    for beta in (Fraction(0), Fraction(1, 2), Fraction(-3, 4), Fraction(3, 2)):
        # (1 - p^-1) / (1 - p^{-1+beta}); only integer beta is exact in p^beta
        expected = 0.5 / (1 - 2 ** (-1 + float(beta)))
        assert float(rat(beta)) == pytest.approx(expected, rel=1e-12)
    assert rat(Fraction(2)) == Fraction(1, 2) / (1 - 2)
    assert rat.pole_order(Fraction(1)) == 1
    verdict = phase_transition_check(g, 2, charges(1, -1))
    assert verdict.kind == "transition_at" and verdict.beta == 1 and verdict.pole_order == 1
    assert verdict.to_dict()["transition"]["witness_subgraphs"] == [[0, 1]]


def test_k2_positive_charges_unbounded():
    g = complete_graph(2)
    verdict = phase_transition_check(g, 3, charges(1, 1))
    assert verdict.kind == "unbounded_interval"
    assert verdict.to_dict()["beta_UV"] == "+inf" and verdict.to_dict()["beta_IR"] == -1


def test_s4_all_positive():
    g = star_graph(4)
    for p in (2, 3, 5):
        rat = substitute_charges(zeta(g), g, ChargeDistribution.uniform(4), p)
        P = Fraction(p)
        for beta in range(0, 4):
            assert rat(beta) == (1 - 1 / P) ** 3 / (1 - P ** (-1 - beta)) ** 3


def test_zero_charges_give_one():
    g = complete_graph(4)
    rat = substitute_charges(zeta(g), g, ChargeDistribution.uniform(4, 0), 2)
    assert rat(Fraction(3)) == 1 and rat(Fraction(-5)) == 1 and rat(0.3) == 1
    assert rat.real_poles() == []


def test_char_split_examples():
    assert char_split(complete_graph(2), [0, 1], charges(1, -1)) == (0, -1)
    assert char_split(complete_graph(2), [0, 1], charges(1, 1)) == (1, 0)
    assert char_split(star_graph(4), range(4), star_gas_charges(4)) == (1, -2)


def test_beta_interval_examples():
    assert beta_interval(complete_graph(2), charges(1, -1)).beta_UV == 1
    for M in (4, 6, 8):
        iv = beta_interval(star_graph(M), star_gas_charges(M))
        assert (iv.beta_IR, iv.beta_UV) == (-1, 1)
    iv = beta_interval(star_graph(2), star_gas_charges(2))
    assert (iv.beta_IR, iv.beta_UV) == (-math.inf, 1)
    rng = random.Random(31)
    for _ in range(10):
        g = random_connected(rng.randint(2, 6), 2, rng)
        iv = beta_interval(g, ChargeDistribution.uniform(g.n))
        assert iv.beta_UV == math.inf
        assert iv.beta_IR == convergence_abscissa_uniform(g) < 0


@pytest.mark.parametrize("M", [2, 4, 6, 8])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_star_gas_transition(M, p):
    g = star_graph(M)
    verdict = phase_transition_check(g, p, star_gas_charges(M))
    assert verdict.kind == "transition_at"
    assert verdict.beta == 1 and verdict.interval.beta_UV == 1
    assert verdict.pole_order == M // 2


def test_ext_real():
    assert [ext_real(x) for x in (math.inf, -math.inf, Fraction(3), Fraction(-2, 3))] == ["+inf", "-inf", 3, "-2/3"]


def _rand_charges(n, rnd):
    return ChargeDistribution(tuple(Fraction(rnd.randint(-3, 3), rnd.choice([1, 2, 3])) for _ in range(n)))


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.randoms(use_true_random=False))
def test_substitution_commutes_with_evaluation(n, rnd):
    g = random_connected(n, 2, rnd)
    e = _rand_charges(n, rnd)
    z = zeta(g)
    p = rnd.choice([2, 3, 5])
    rat = substitute_charges(z, g, e, p)
    iv = beta_interval(g, e)
    lo = max(float(iv.beta_IR), -4.0)
    hi = min(float(iv.beta_UV), 4.0)
    for _ in range(10):
        beta = Fraction(lo + (hi - lo) * rnd.uniform(0.05, 0.95)).limit_denominator(50)
        if not lo < beta < hi:
            continue
        direct = partition_value(z, g, e.charges, beta, p)
        assert float(rat(beta)) == pytest.approx(float(direct), rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 5), st.randoms(use_true_random=False))
def test_positive_charges_have_no_positive_pole(n, rnd):
    g = random_connected(n, 2, rnd)
    e = ChargeDistribution(tuple(Fraction(rnd.randint(1, 3), rnd.randint(1, 2)) for _ in range(n)))
    rat = substitute_charges(zeta(g), g, e, rnd.choice([2, 3, 5]))
    assert all(beta <= 0 for beta, _ in rat.real_poles())
    assert phase_transition_check(g, 2, e).kind == "unbounded_interval"


def test_monte_carlo_at_interval_midpoint():
    cases = [(complete_graph(2), charges(1, -1)), (star_graph(3), charges(1, 1, -1)),
             (complete_graph(3), charges(1, 1, -1)), (path_graph(4), charges(1, -1, 1, -1)),
             (star_graph(4), star_gas_charges(4))]
    checked = 0
    for g, e in cases:
        iv = beta_interval(g, e)
        lo = max(float(iv.beta_IR), -2.0)
        hi = min(float(iv.beta_UV), 2.0)
        beta = Fraction((lo + hi) / 2).limit_denominator(8)
        s = [e[u] * e[v] * beta for u, v in g.edges]
        try:
            check_variance_region(g, s)
        except VarianceRegionError:
            continue
        for p in (2, 3, 5):
            rat = substitute_charges(zeta(g), g, e, p)
            est = mc_partition_estimate(g, p, s, 200_000, seed=7)
            assert abs(float(rat(beta)) - est.mean) <= 3 * est.stderr
            checked += 1
    assert checked >= 9


def test_hypotheses():
    assert hypothesis_check(star_graph(3), charges(1, 1, -1)).to_dict() == \
        {"H1": True, "H2": True, "H2_single_edge": True}
    tri = hypothesis_check(complete_graph(3), charges(1, 1, -1))
    assert tri.H1 and not tri.H2 and tri.H2_single_edge
    assert not hypothesis_check(complete_graph(3), ChargeDistribution.uniform(3)).H1
    assert not hypothesis_check(star_graph(3), charges(2, 1, -1)).H1


def _euclid_gcd(a, b):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return [x / a[-1] for x in a]


@settings(max_examples=60, deadline=None)
@given(*[st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=1, max_size=6)] * 3)
def test_gcd_matches_euclid(a, b, c):
    if not any(a) or not any(b) or not any(c):
        return
    x, y = _pmul(a, c), _pmul(b, c)
    g = _pgcd(x, y)
    assert g == _euclid_gcd(x, y)
    assert not _pdivmod(x, g)[1] and not _pdivmod(y, g)[1]
