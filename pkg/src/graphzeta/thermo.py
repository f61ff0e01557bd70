"""Thermodynamics of the neutral star-graph gas.

The star S_M has centre 0; the centre and the next M/2 - 1 leaves carry
charge +1 and the remaining M/2 leaves carry -1. In a ball of volume p^k:

    Z_{M,k}(beta) = p^{k(M - beta)} (1-p^-1)^{M-1}
                    / ((1-p^{-1-beta})^{M/2-1} (1-p^{-1+beta})^{M/2})
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DomainError, PoleError
from .gas import OneVarRational, _binomial, _pmul
from .padic import is_prime


@dataclass(frozen=True)
class StarGasSpec:
    M: int
    k: int
    p: int
    beta: object = 0

    def __post_init__(self):
        if self.M < 2 or self.M % 2:
            raise DomainError(f"M must be even and >= 2, got {self.M}")
        if self.k < 0:
            raise DomainError(f"ball exponent k must be >= 0, got {self.k}")
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")


def _is_exact(beta) -> bool:
    return isinstance(beta, int) or (isinstance(beta, Fraction) and beta.denominator == 1)


def star_partition_rational(M: int, k: int, p: int) -> OneVarRational:
    """Z_{M,k} as a rational function of w = p^(-beta)."""
    spec = StarGasSpec(M, k, p)
    P = Fraction(p)
    half = spec.M // 2
    # p^{kM} w^k (1-p^-1)^{M-1}
    num = [Fraction(0)] * k + [P ** (k * M) * (1 - 1 / P) ** (M - 1)]
    den = [Fraction(1)]
    shift = 0
    for _ in range(half - 1):
        den = _pmul(den, _binomial(1 / P, 1)[0])
    for _ in range(half):
        poly, s = _binomial(1 / P, -1)
        den = _pmul(den, poly)
        shift += s
    # den currently stands for w^shift * den(w), with shift <= 0
    num = [Fraction(0)] * (-shift) + num
    cands = [Fraction(-1)] if half > 1 else []
    return OneVarRational.build(p, 1, num, den, cands + [Fraction(1)])


def star_partition(spec: StarGasSpec):
    """Z_{M,k}(beta); a Fraction for integral beta, a float otherwise.

    beta = 1 is always a pole. beta = -1 is a pole once M >= 4; for M = 2
    the formula stays finite there.
    """
    M, k, p, beta = spec.M, spec.k, spec.p, spec.beta
    half = M // 2
    if beta == 1 or (beta == -1 and half > 1):
        raise PoleError(f"Z_{{{M},{k}}} has a pole at beta = {beta}")
    if _is_exact(beta):
        b = int(beta)
        P = Fraction(p)
        return (P ** (k * (M - b)) * (1 - 1 / P) ** (M - 1)
                / ((1 - P ** (-1 - b)) ** (half - 1) * (1 - P ** (-1 + b)) ** half))
    return math.exp(log_star_partition(M, k, p, beta)) * _sign(M, p, beta)


def _sign(M: int, p: int, beta) -> int:
    # outside (-1, 1) the factors 1 - p^{-1 -+ beta} can be negative
    half = M // 2
    s = 1
    if 1 - p ** (-1 - beta) < 0 and (half - 1) % 2:
        s = -s
    if 1 - p ** (-1 + beta) < 0 and half % 2:
        s = -s
    return s


def log_star_partition(M: int, k: int, p: int, beta) -> float:
    """ln |Z_{M,k}(beta)|, stable for very large M."""
    with mpmath.workdps(30):
        b = mpmath.mpf(beta) if not isinstance(beta, Fraction) else \
            mpmath.mpf(beta.numerator) / beta.denominator
        lp = mpmath.log(p)
        half = M // 2
        val = (k * (M - b) * lp + (M - 1) * mpmath.log(1 - mpmath.mpf(1) / p)
               - (half - 1) * mpmath.log(abs(1 - mpmath.power(p, -1 - b)))
               - half * mpmath.log(abs(1 - mpmath.power(p, -1 + b))))
        return float(val)


def _check_beta(beta) -> None:
    if not 0 <= beta < 1:
        raise DomainError(f"beta must lie in [0, 1), got {beta}")


def free_energy_per_particle(rho: float, p: int, beta: float) -> float:
    """beta*f = ln rho - ln(1-p^-1) + (1/2)ln(1-p^{-1-beta}) + (1/2)ln(1-p^{-1+beta}) - 1 - ln 2.

    As beta -> 0 this tends to ln(rho) - 1 - ln 2.
    """
    _check_beta(beta)
    if rho <= 0:
        raise DomainError("density must be positive")
    return (math.log(rho) - math.log(1 - 1 / p) + 0.5 * math.log(1 - p ** (-1 - beta))
            + 0.5 * math.log(1 - p ** (-1 + beta)) - 1 - math.log(2))


def finite_size_free_energy(M: int, k: int, p: int, beta: float) -> float:
    """-(1/M) ln(Z_{M,k}(beta) / ((M/2 - 1)!)^2)."""
    log_sym = 2 * math.lgamma(M // 2)
    return -(log_star_partition(M, k, p, beta) - log_sym) / M


def mean_energy(p: int, beta: float) -> float:
    """(ln p / 2) (p^{-1-beta}/(1-p^{-1-beta}) - p^{-1+beta}/(1-p^{-1+beta}))."""
    _check_beta(beta)
    a, b = p ** (-1 - beta), p ** (-1 + beta)
    return math.log(p) / 2 * (a / (1 - a) - b / (1 - b))


@dataclass(frozen=True)
class GrandCanonical:
    value: float
    pole_X2: float  # the value of X^2 at which the continuation blows up
    radius: float  # the generating series converges for |X| < radius


def _q2(p: int, k: int, beta: float) -> float:
    return (p**k * (1 - 1 / p)) ** 2 / ((1 - p ** (-1 - beta)) * (1 - p ** (-1 + beta)))


def grand_canonical(p: int, k: int, beta: float, X: float) -> GrandCanonical:
    """Meromorphic continuation of 1 + sum_{L>=1} Z_{2L,k}(beta) X^{2L}."""
    _check_beta(beta)
    q2 = _q2(p, k, beta)
    y = q2 * X * X
    if y == 1:
        raise PoleError(f"X^2 = {1 / q2} is a pole of the grand-canonical function")
    pref = p ** (-k * (beta - 2)) * (1 - 1 / p) * X * X / (1 - p ** (-1 + beta))
    return GrandCanonical(1 + pref / (1 - y), 1 / q2, 1 / math.sqrt(q2))


def grand_canonical_series(p: int, k: int, beta: float, X: float, terms: int = 50) -> float:
    """Partial sum 1 + sum_{L=1}^{terms} Z_{2L,k}(beta) X^{2L}."""
    _check_beta(beta)
    if X == 0:
        return 1.0
    total = 1.0
    log_x = math.log(abs(X))
    for L in range(1, terms + 1):
        # Z_{2L,k} alone overflows a float for large k; Z X^{2L} does not
        M = 2 * L
        StarGasSpec(M, k, p, beta)
        total += _sign(M, p, beta) * math.exp(log_star_partition(M, k, p, beta) + M * log_x)
    return total


def grand_potential_density(p: int, k: int, beta: float, X: float) -> float:
    """p^-k ln |Z_{beta,k}(X)| using the continued closed form."""
    v = grand_canonical(p, k, beta, X).value
    if v == 0:
        raise PoleError("grand-canonical function vanishes; its logarithm is singular")
    return math.log(abs(v)) / p**k
