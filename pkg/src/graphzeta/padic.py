"""p-adic order and absolute value of rationals."""
from __future__ import annotations

from fractions import Fraction


def ord_p(x, p: int) -> int | float:
    """Exponent of ``p`` in ``x``; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def norm_p(x, p: int) -> Fraction:
    """|x|_p = p^(-ord_p(x)), with |0|_p = 0."""
    v = ord_p(x, p)
    if v == float("inf"):
        return Fraction(0)
    return Fraction(p) ** (-v)


def digits(x: int, p: int, count: int) -> list[int]:
    """First ``count`` base-p digits of a non-negative integer, least significant first."""
    if x < 0:
        raise ValueError("digits of negative integers are not finite")
    out = []
    for _ in range(count):
        x, d = divmod(x, p)
        out.append(d)
    return out


def ball_volume(k: int, p: int) -> Fraction:
    """Haar volume of p^(-k) Z_p with Z_p normalised to volume 1."""
    return Fraction(p) ** k


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True
