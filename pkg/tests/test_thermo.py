import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from graphzeta.errors import DomainError, PoleError
from graphzeta.gas import star_gas_charges, substitute_charges
from graphzeta.graph import star_graph
from graphzeta.thermo import (StarGasSpec, finite_size_free_energy, free_energy_per_particle,
                              grand_canonical, grand_canonical_series, grand_potential_density,
                              log_star_partition, mean_energy, star_partition,
                              star_partition_rational)
from graphzeta.zeta import zeta


def closed_form(M, k, p, b):
    P = Fraction(p)
    h = M // 2
    return P ** (k * (M - b)) * (1 - 1 / P) ** (M - 1) / ((1 - P ** (-1 - b)) ** (h - 1) * (1 - P ** (-1 + b)) ** h)


def test_spec_validation():
    for bad in ((3, 0, 2), (0, 0, 2), (4, -1, 2), (4, 0, 4)):
        with pytest.raises(DomainError):
            StarGasSpec(*bad)


def test_small_values():
    assert star_partition(StarGasSpec(4, 0, 2, 0)) == 1
    assert star_partition(StarGasSpec(2, 0, 3, 2)) == Fraction(2, 3) / (1 - 3)
    assert star_partition(StarGasSpec(4, 2, 3, 3)) == closed_form(4, 2, 3, 3)
    with pytest.raises(PoleError):
        star_partition(StarGasSpec(6, 0, 2, 1))
    with pytest.raises(PoleError):
        star_partition(StarGasSpec(6, 0, 2, -1))
    assert star_partition(StarGasSpec(2, 0, 2, -1)) == closed_form(2, 0, 2, -1)


@pytest.mark.parametrize("M", [2, 4, 6, 8])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_matches_gas_pipeline(M, p):
    rat = star_partition_rational(M, 0, p)
    pipe = substitute_charges(zeta(star_graph(M)), star_graph(M), star_gas_charges(M), p)
    assert (rat.num, rat.den) == (pipe.num, pipe.den)
    for b in (0, 2, -2, 3):
        assert rat(b) == pipe(b) == closed_form(M, 0, p, b)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 4, 6, 10]), st.integers(0, 3), st.sampled_from([2, 3, 5]),
       st.floats(-0.95, 0.95))
def test_float_path_agrees_with_log(M, k, p, beta):
    value = star_partition(StarGasSpec(M, k, p, beta))
    assert value > 0
    assert math.log(value) == pytest.approx(log_star_partition(M, k, p, beta), rel=1e-12, abs=1e-12)
    assert float(star_partition_rational(M, k, p)(beta)) == pytest.approx(value, rel=1e-10)


def test_free_energy_limits_and_domain():
    # at beta = 0 the two half-logs cancel -ln(1 - 1/p) for every p
    for p in (2, 3, 5):
        for rho in (0.25, 1.0, 3.0):
            assert free_energy_per_particle(rho, p, 0.0) == pytest.approx(math.log(rho) - 1 - math.log(2), abs=1e-14)
    for bad in (-0.1, 1.0, 1.5):
        with pytest.raises(DomainError):
            free_energy_per_particle(1.0, 2, bad)
        with pytest.raises(DomainError):
            mean_energy(2, bad)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_mean_energy_is_derivative(p):
    h = 1e-5
    for beta in (0.1, 0.3, 0.5, 0.8):
        fd = (free_energy_per_particle(1.0, p, beta + h) - free_energy_per_particle(1.0, p, beta - h)) / (2 * h)
        assert abs(fd - mean_energy(p, beta)) < 1e-6


def test_mean_energy_diverges_towards_one():
    assert mean_energy(2, 0.999) < mean_energy(2, 0.9) < 0


def test_finite_size_approaches_limit():
    M, k, p, beta = 2**16, 0, 2, 0.5
    rho = M / p**k
    finite = finite_size_free_energy(M, k, p, beta)
    # finite-size value at density rho = M / p^k
    assert finite == pytest.approx(free_energy_per_particle(rho, p, beta), rel=0.01)


@pytest.mark.parametrize("p,k,beta", [(2, 0, 0.5), (2, 3, 0.1), (3, 1, 0.7), (5, 2, 0.0)])
def test_grand_canonical_series(p, k, beta):
    gc = grand_canonical(p, k, beta, 0.0)
    assert gc.radius == pytest.approx(math.sqrt(gc.pole_X2))
    for frac in (0.1, 0.3, 0.5):
        X = frac * gc.radius
        assert abs(grand_canonical(p, k, beta, X).value - grand_canonical_series(p, k, beta, X)) < 1e-9


def test_grand_canonical_pole():
    gc = grand_canonical(2, 0, 0.5, 0.0)
    with pytest.raises(PoleError):
        grand_canonical(2, 0, 0.5, math.sqrt(gc.pole_X2))


def test_grand_potential_vanishes():
    vals = []
    for k in (5, 10, 20):
        X = 0.5 * grand_canonical(2, k, 0.5, 0.0).radius
        vals.append(abs(grand_potential_density(2, k, 0.5, X)))
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-3
