"""Sparse Laurent polynomials with exponent vectors packed into Python ints.

Each monomial over ``nvars`` variables is one integer: variable ``i`` owns the
bit field ``[WIDTH*i, WIDTH*(i+1))`` holding ``exponent + BIAS``. Multiplying
monomials is then integer addition minus the packed zero vector, which keeps
the inner loops of the zeta recursion in C.

Coefficients are ``int`` or ``Fraction``; nothing here assumes which.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

WIDTH = 24
BIAS = 1 << (WIDTH - 1)
MASK = (1 << WIDTH) - 1
# prime modulus for the divisibility prefilter
_Q = 2**31 - 1
_HASH_WEIGHTS = np.random.default_rng(20240917).integers(1, 2**62, size=256, dtype=np.int64)


@lru_cache(maxsize=None)
def packed_zero(nvars: int) -> int:
    z = 0
    for i in range(nvars):
        z |= BIAS << (WIDTH * i)
    return z


def pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if not -BIAS < e < BIAS:
            raise OverflowError(f"exponent {e} does not fit the packed field")
        key |= (e + BIAS) << (WIDTH * i)
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple(((key >> (WIDTH * i)) & MASK) - BIAS for i in range(nvars))


def field(key: int, i: int) -> int:
    return ((key >> (WIDTH * i)) & MASK) - BIAS


def _pack_rows(E: np.ndarray) -> list[int]:
    """Inverse of :meth:`LaurentPoly.exponent_matrix`."""
    if E.size and (E.min() <= -BIAS or E.max() >= BIAS):
        raise OverflowError("exponent does not fit the packed field")
    n, nv = E.shape
    b = (E + BIAS).astype("<u4").view(np.uint8).reshape(n, nv, 4)[:, :, :3]
    raw = np.ascontiguousarray(b).tobytes()
    w = 3 * nv
    frm = int.from_bytes
    return [frm(raw[i:i + w], "little") for i in range(0, n * w, w)]


class LaurentPoly:
    """Immutable-by-convention sparse polynomial ``sum c * x^e`` (``e`` may be negative)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[int, object] | None = None):
        self.nvars = nvars
        self.terms = terms if terms is not None else {}

    # construction
    @classmethod
    def constant(cls, nvars: int, c) -> "LaurentPoly":
        return cls(nvars, {packed_zero(nvars): c} if c != 0 else {})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "LaurentPoly":
        return cls(len(exps), {pack(exps): c} if c != 0 else {})

    @classmethod
    def from_terms(cls, nvars: int, items: Iterable[tuple[Sequence[int], object]]) -> "LaurentPoly":
        terms: dict[int, object] = {}
        for exps, c in items:
            k = pack(exps)
            v = terms.get(k, 0) + c
            if v == 0:
                terms.pop(k, None)
            else:
                terms[k] = v
        return cls(nvars, terms)

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], object]]:
        for k, c in self.terms.items():
            yield unpack(k, self.nvars), c

    def sorted_items(self) -> list[tuple[tuple[int, ...], object]]:
        return sorted(self.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"LaurentPoly({self.nvars}, {dict(self.sorted_items())})"

    # arithmetic
    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        return LaurentPoly(self.nvars, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def scale(self, c) -> "LaurentPoly":
        if c == 0:
            return LaurentPoly(self.nvars)
        return LaurentPoly(self.nvars, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if len(other.terms) < len(self.terms):
            self, other = other, self
        z = packed_zero(self.nvars)
        out: dict[int, object] = {}
        get = out.get
        for ka, ca in self.terms.items():
            off = ka - z
            for kb, cb in other.terms.items():
                k = kb + off
                out[k] = get(k, 0) + ca * cb
        return LaurentPoly(self.nvars, {k: v for k, v in out.items() if v != 0})

    def mul_binomial(self, shift: Sequence[int], c) -> "LaurentPoly":
        """``self * (1 - c * x^shift)``."""
        d = pack(shift) - packed_zero(self.nvars)
        out = dict(self.terms)
        for k, v in self.terms.items():
            k2 = k + d
            nv = out.get(k2, 0) - c * v
            if nv == 0:
                out.pop(k2, None)
            else:
                out[k2] = nv
        return LaurentPoly(self.nvars, out)

    def div_binomial(self, shift: Sequence[int], c) -> "LaurentPoly | None":
        """Exact quotient by ``1 - c * x^shift``, or ``None`` if it does not divide.

        Monomials split into chains ``u, u+shift, u+2*shift, ...``; along a
        chain with coefficients ``a_k`` the quotient satisfies
        ``q_k = a_k + c * q_{k-1}`` and division is exact iff the last
        ``q`` vanishes.
        """
        pivot = next((i for i, e in enumerate(shift) if e != 0), None)
        if pivot is None:
            # dividing by the constant 1 - c
            if c == 1:
                return None
            return self.scale(Fraction(1) / (1 - c))
        dp = shift[pivot]
        d = pack(shift) - packed_zero(self.nvars)
        chains: dict[int, dict[int, object]] = {}
        for key, coef in self.terms.items():
            k = field(key, pivot) // dp
            chains.setdefault(key - k * d, {})[k] = coef
        out: dict[int, object] = {}
        for rep, chain in chains.items():
            lo, hi = min(chain), max(chain)
            q = 0
            for k in range(lo, hi + 1):
                q = chain.get(k, 0) + c * q
                if k < hi and q != 0:
                    out[rep + k * d] = q
            if q != 0:
                return None
        return LaurentPoly(self.nvars, out)

    def exponent_matrix(self) -> np.ndarray:
        """Exponent vectors of all terms as an int64 array (terms x nvars)."""
        if not self.terms:
            return np.zeros((0, self.nvars), dtype=np.int64)
        nb = 3 * self.nvars  # WIDTH is 24 bits: every field is three whole bytes
        raw = b"".join(k.to_bytes(nb, "little") for k in self.terms)
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, nb).astype(np.int64)
        return b[:, 0::3] + (b[:, 1::3] << 8) + (b[:, 2::3] << 16) - BIAS

    # reindexing / evaluation
    def remap(self, new_nvars: int, index_map: Mapping[int, int] | Sequence[int]) -> "LaurentPoly":
        """Move variable ``i`` to position ``index_map[i]`` in a ring of ``new_nvars``."""
        if not self.terms:
            return LaurentPoly(new_nvars)
        E = self.exponent_matrix()
        out = np.zeros((E.shape[0], new_nvars), dtype=np.int64)
        targets = [index_map[i] for i in range(self.nvars)]
        if len(set(targets)) == len(targets):
            out[:, targets] = E
        else:
            for i, t in enumerate(targets):
                out[:, t] += E[:, i]
        keys = _pack_rows(out)
        coeffs = list(self.terms.values())
        if len(set(keys)) == len(keys):
            return LaurentPoly(new_nvars, dict(zip(keys, coeffs)))
        items: dict[int, object] = {}
        for k, c in zip(keys, coeffs):
            v = items.get(k, 0) + c
            if v == 0:
                items.pop(k, None)
            else:
                items[k] = v
        return LaurentPoly(new_nvars, items)

    def substitute(self, new_nvars: int,
                   fn: Callable[[tuple[int, ...]], tuple[Sequence[int], object]]) -> "LaurentPoly":
        """Monomial homomorphism: ``fn(exps) -> (new_exps, multiplier)``."""
        items: dict[int, object] = {}
        for exps, c in self.items():
            new_exps, mult = fn(exps)
            k = pack(new_exps)
            v = items.get(k, 0) + c * mult
            if v == 0:
                items.pop(k, None)
            else:
                items[k] = v
        return LaurentPoly(new_nvars, items)

    def evaluate(self, values: Sequence, one=1):
        """Sum of ``c * prod(values[i] ** e_i)``; values may be Fractions or mpf."""
        total = 0
        for exps, c in self.items():
            t = c * one
            for x, e in zip(values, exps):
                if e:
                    t = t * x ** e
            total = total + t
        return total


class DivisibilityFilter:
    """Cheap necessary test for ``1 - x^shift`` dividing a fixed polynomial.

    Only for integer coefficients and ``c = 1``. The quotient along each chain
    ``u + k*shift`` then ends in the plain sum of the chain's coefficients, so
    divisibility means every chain sums to zero. Sums are taken mod a prime
    and chains are grouped by a random hash: a ``False`` answer is exact,
    ``True`` still needs the actual division.
    """

    def __init__(self, poly: LaurentPoly):
        self.usable = (0 < poly.nvars <= len(_HASH_WEIGHTS)
                       and all(isinstance(c, int) for c in poly.terms.values()))
        if self.usable:
            self.E = poly.exponent_matrix()
            self.coef = np.fromiter((c % _Q for c in poly.terms.values()), dtype=np.int64,
                                    count=len(poly.terms))
            self.weights = _HASH_WEIGHTS[:poly.nvars]

    def may_divide(self, shift: Sequence[int]) -> bool:
        if not self.usable or not len(self.coef):
            return True
        pivot = next((i for i, e in enumerate(shift) if e != 0), None)
        if pivot is None:
            return True
        d = np.asarray(shift, dtype=np.int64)
        k = self.E[:, pivot] // d[pivot]
        h = self.E @ self.weights - k * int(d @ self.weights)
        _, inv = np.unique(h, return_inverse=True)
        sums = np.zeros(inv.max() + 1, dtype=np.int64)
        np.add.at(sums, inv, self.coef)
        return not np.any(sums % _Q)
