"""Finite Heisenberg group of level n, as exact monomial matrices.

A monomial matrix M is stored as (shift s, exponents e_j, scalar c) and acts by
``M e_j = w^(c + e_j) e_{j+s}`` on the standard basis, where w = exp(2 pi i / m)
with phase lattice m = 2n.  Using 2n rather than n leaves room for the central
sign -1 = w^n, which is needed when n = 2 mod 4.

The generators are sigma e_j = e_{j+1} and tau e_j = zeta^j e_j with
zeta = w^2 a primitive n-th root of unity; they satisfy sigma tau = zeta^-1 tau sigma.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ellcurve import CurvePoint


class DimensionMismatchError(ValueError):
    pass


class NotScalarError(ValueError):
    """The commutator of two monomial matrices was not a scalar matrix."""


class NotTorsionError(ValueError):
    pass


@dataclass(frozen=True)
class MonomialMatrix:
    n: int
    shift: int
    exponents: tuple[int, ...]
    scalar_exp: int = 0
    m: int = 0  # phase lattice; 0 means 2n

    def __post_init__(self):
        m = self.m or 2 * self.n
        if len(self.exponents) != self.n:
            raise DimensionMismatchError(f"expected {self.n} exponents, got {len(self.exponents)}")
        # fold the common part of the exponents into the scalar so equality is canonical
        e = [int(x) % m for x in self.exponents]
        c = (int(self.scalar_exp) + e[0]) % m
        e = tuple((x - e[0]) % m for x in e)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "shift", int(self.shift) % self.n)
        object.__setattr__(self, "exponents", e)
        object.__setattr__(self, "scalar_exp", c)

    def _check(self, other: "MonomialMatrix"):
        if self.n != other.n or self.m != other.m:
            raise DimensionMismatchError(f"n/m mismatch: ({self.n},{self.m}) vs ({other.n},{other.m})")

    def __matmul__(self, other: "MonomialMatrix") -> "MonomialMatrix":
        return compose(self, other)

    def __pow__(self, k: int) -> "MonomialMatrix":
        if k < 0:
            return inverse(self) ** (-k)
        out = identity(self.n, self.m)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def is_scalar(self) -> bool:
        return self.shift == 0 and not any(self.exponents)

    def times_root(self, k: int) -> "MonomialMatrix":
        """Multiply by the scalar w^k."""
        return MonomialMatrix(self.n, self.shift, self.exponents, self.scalar_exp + k, self.m)

    def to_array(self) -> np.ndarray:
        w = np.exp(2j * np.pi / self.m)
        out = np.zeros((self.n, self.n), dtype=complex)
        for j in range(self.n):
            out[(j + self.shift) % self.n, j] = w ** ((self.scalar_exp + self.exponents[j]) % self.m)
        return out


def compose(a: MonomialMatrix, b: MonomialMatrix) -> MonomialMatrix:
    """The product a @ b (apply b first)."""
    a._check(b)
    n = a.n
    exps = [b.exponents[j] + a.exponents[(j + b.shift) % n] for j in range(n)]
    return MonomialMatrix(n, a.shift + b.shift, tuple(exps), a.scalar_exp + b.scalar_exp, a.m)


def inverse(a: MonomialMatrix) -> MonomialMatrix:
    n = a.n
    # a e_j = w^(c+e_j) e_{j+s}, so a^-1 e_k = w^-(c+e_{k-s}) e_{k-s}
    exps = [-a.exponents[(k - a.shift) % n] for k in range(n)]
    return MonomialMatrix(n, -a.shift, tuple(exps), -a.scalar_exp, a.m)


def identity(n: int, m: int = 0) -> MonomialMatrix:
    return MonomialMatrix(n, 0, (0,) * n, 0, m)


def sigma(n: int) -> MonomialMatrix:
    return MonomialMatrix(n, 1, (0,) * n)


def tau(n: int) -> MonomialMatrix:
    # zeta^j = w^(2j) on the 2n lattice
    return MonomialMatrix(n, 0, tuple(2 * j for j in range(n)))


def translation_lift(n: int, p: CurvePoint) -> MonomialMatrix:
    """sigma^a tau^b for the n-torsion point p = a/n + (b/n) tau."""
    a, b = Fraction(p.a) * n, Fraction(p.b) * n
    if a.denominator != 1 or b.denominator != 1:
        raise NotTorsionError(f"{p!r} is not {n}-torsion")
    return sigma(n) ** int(a) @ tau(n) ** int(b)


def commutator(a: MonomialMatrix, b: MonomialMatrix) -> int:
    """Phase exponent k (mod m) with a b a^-1 b^-1 = w^k I."""
    a._check(b)
    c = a @ b @ inverse(a) @ inverse(b)
    if not c.is_scalar:
        raise NotScalarError("commutator is not a scalar matrix")
    return c.scalar_exp


def commutator_sign(a: MonomialMatrix, b: MonomialMatrix) -> int:
    """+1 or -1 for commuting / anticommuting lifts; raises otherwise."""
    k = commutator(a, b)
    if k == 0:
        return 1
    if 2 * k == a.m:
        return -1
    raise NotScalarError(f"commutator phase w^{k} is not a sign")


def _check_two_torsion(p: CurvePoint):
    if p.is_origin or not (2 * p).is_origin:
        raise NotTorsionError(f"{p!r} is not a non-zero 2-torsion point")


@dataclass(frozen=True)
class GroupActionSpec:
    """Lifts of two translations by 2-torsion points to the level-n coordinates."""

    n: int
    generators: tuple[MonomialMatrix, MonomialMatrix]

    def __post_init__(self):
        for g in self.generators:
            if g.n != self.n:
                raise DimensionMismatchError("generator of wrong size")
            if not (g @ g).is_scalar:
                raise ValueError("generator does not square to a scalar")

    @classmethod
    def from_points(cls, n: int, pi: CurvePoint, pj: CurvePoint) -> "GroupActionSpec":
        _check_two_torsion(pi)
        _check_two_torsion(pj)
        if pi == pj:
            raise ValueError("the two 2-torsion points must be distinct")
        if n % 2:
            raise ValueError("2-torsion lifts need even n")
        return cls(n, (translation_lift(n, pi), translation_lift(n, pj)))

    @property
    def commutator_sign(self) -> int:
        return commutator_sign(*self.generators)


def descends(n: int, pi: CurvePoint, pj: CurvePoint) -> bool:
    """Whether the Z2 x Z2 translation action lifts to an honest action (commuting lifts)."""
    return GroupActionSpec.from_points(n, pi, pj).commutator_sign == 1
