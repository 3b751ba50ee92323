"""Exact arithmetic on complex tori C/(Z + Z tau).

Points are stored by their rational coordinates (a, b) in the lattice basis,
so that ``a + b*tau`` is the complex representative.  Coordinates are reduced
to the half-open square [0, 1)^2, which makes equality of points, torsion
orders and linear equivalence of divisors decidable without floating point.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping


class CurveMismatchError(ValueError):
    """Raised when points or divisors living on different curves are combined."""


def _reduce(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class EllipticCurve:
    """The torus C/(Z + Z tau)."""

    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise ValueError(f"modulus must lie in the upper half plane, got {tau!r}")
        object.__setattr__(self, "tau", tau)

    def point(self, a, b=0) -> "CurvePoint":
        return CurvePoint(a, b, self)

    @property
    def origin(self) -> "CurvePoint":
        return CurvePoint(0, 0, self)

    def two_torsion(self) -> list["CurvePoint"]:
        """The three non-zero 2-torsion points 1/2, tau/2, (1+tau)/2."""
        h = Fraction(1, 2)
        return [self.point(h, 0), self.point(0, h), self.point(h, h)]

    def torsion_points(self, order: int) -> list["CurvePoint"]:
        return [self.point(Fraction(i, order), Fraction(j, order))
                for i in range(order) for j in range(order)]


@dataclass(frozen=True)
class CurvePoint:
    a: Fraction
    b: Fraction
    curve: EllipticCurve = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "a", _reduce(Fraction(self.a)))
        object.__setattr__(self, "b", _reduce(Fraction(self.b)))

    def __repr__(self):
        return f"CurvePoint({self.a}, {self.b})"

    def _check(self, other: "CurvePoint"):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        if other.curve != self.curve:
            raise CurveMismatchError("points lie on different curves")
        return None

    def __add__(self, other: "CurvePoint") -> "CurvePoint":
        if self._check(other) is NotImplemented:
            return NotImplemented
        return CurvePoint(self.a + other.a, self.b + other.b, self.curve)

    def __neg__(self) -> "CurvePoint":
        return CurvePoint(-self.a, -self.b, self.curve)

    def __sub__(self, other: "CurvePoint") -> "CurvePoint":
        return self + (-other)

    def __mul__(self, k: int) -> "CurvePoint":
        if not isinstance(k, int):
            return NotImplemented
        return CurvePoint(k * self.a, k * self.b, self.curve)

    __rmul__ = __mul__

    @property
    def is_origin(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_complex(self) -> complex:
        return float(self.a) + float(self.b) * self.curve.tau

    def halves(self) -> list["CurvePoint"]:
        """All four points x with 2x = self."""
        h = Fraction(1, 2)
        return [CurvePoint(self.a / 2 + i * h, self.b / 2 + j * h, self.curve)
                for i in (0, 1) for j in (0, 1)]


def add_points(p: CurvePoint, q: CurvePoint) -> CurvePoint:
    return p + q


def torsion_order(p: CurvePoint) -> int:
    """Least N >= 1 with N*p = 0.

    Coordinates are rational by construction, so the order always exists; it
    is the lcm of the reduced denominators.
    """
    return lcm(p.a.denominator, p.b.denominator)


class DivisorOnCurve:
    """A finite formal sum of points with integer multiplicities."""

    __slots__ = ("curve", "_terms")

    def __init__(self, curve: EllipticCurve, terms: Mapping[CurvePoint, int] | Iterable[tuple[CurvePoint, int]] = ()):
        self.curve = curve
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Counter = Counter()
        for p, m in items:
            if p.curve != curve:
                raise CurveMismatchError("divisor term on a different curve")
            acc[p] += int(m)
        self._terms = {p: m for p, m in acc.items() if m != 0}

    @classmethod
    def point(cls, p: CurvePoint, mult: int = 1) -> "DivisorOnCurve":
        return cls(p.curve, [(p, mult)])

    @classmethod
    def zero(cls, curve: EllipticCurve) -> "DivisorOnCurve":
        return cls(curve)

    @property
    def terms(self) -> dict[CurvePoint, int]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return sum(self._terms.values())

    def sum(self) -> CurvePoint:
        """Group sum of the points, counted with multiplicity."""
        s = self.curve.origin
        for p, m in self._terms.items():
            s = s + p * m
        return s

    def _coerce(self, other) -> "DivisorOnCurve":
        if isinstance(other, CurvePoint):
            other = DivisorOnCurve.point(other)
        if not isinstance(other, DivisorOnCurve):
            raise TypeError(f"cannot combine divisor with {type(other).__name__}")
        if other.curve != self.curve:
            raise CurveMismatchError("divisors live on different curves")
        return other

    def __add__(self, other) -> "DivisorOnCurve":
        other = self._coerce(other)
        return DivisorOnCurve(self.curve, list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> "DivisorOnCurve":
        return DivisorOnCurve(self.curve, [(p, -m) for p, m in self._terms.items()])

    def __sub__(self, other) -> "DivisorOnCurve":
        return self + (-self._coerce(other))

    def __mul__(self, k: int) -> "DivisorOnCurve":
        return DivisorOnCurve(self.curve, [(p, k * m) for p, m in self._terms.items()])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DivisorOnCurve):
            return NotImplemented
        return self.curve == other.curve and self._terms == other._terms

    def __hash__(self):
        return hash((self.curve, frozenset(self._terms.items())))

    def __repr__(self):
        inner = " + ".join(f"{m}*({p.a},{p.b})" for p, m in sorted(
            self._terms.items(), key=lambda kv: (kv[0].a, kv[0].b)))
        return f"DivisorOnCurve({inner or '0'})"

    def pushforward(self, f) -> "DivisorOnCurve":
        """Image divisor under a point map ``f`` (a homomorphism or translate)."""
        img = [(f(p), m) for p, m in self._terms.items()]
        curve = img[0][0].curve if img else self.curve
        return DivisorOnCurve(curve, img)


def linearly_equivalent(d1: DivisorOnCurve, d2: DivisorOnCurve) -> bool:
    """Abel's theorem on a torus: equal degree and equal group sum."""
    if d1.curve != d2.curve:
        raise CurveMismatchError("divisors live on different curves")
    return d1.degree == d2.degree and d1.sum() == d2.sum()


def is_principal(d: DivisorOnCurve) -> bool:
    return linearly_equivalent(d, DivisorOnCurve.zero(d.curve))


@dataclass(frozen=True)
class TwoIsogeny:
    """The quotient map E -> E/<p> for a non-zero 2-torsion point p.

    The target is normalised back to the form C/(Z + Z tau'), so its points
    again carry exact rational coordinates.
    """

    source: EllipticCurve
    kernel: CurvePoint
    target: EllipticCurve

    def __call__(self, x: CurvePoint) -> CurvePoint:
        if x.curve != self.source:
            raise CurveMismatchError("point not on the source curve")
        h = Fraction(1, 2)
        k = self.kernel
        if (k.a, k.b) == (h, 0):
            return self.target.point(2 * x.a, x.b)
        if (k.a, k.b) == (0, h):
            return self.target.point(x.a, 2 * x.b)
        return self.target.point(x.a - x.b, 2 * x.b)

    def lift(self, y: CurvePoint) -> CurvePoint:
        """One preimage of ``y``; the other differs by the kernel point."""
        h = Fraction(1, 2)
        k = self.kernel
        if (k.a, k.b) == (h, 0):
            return self.source.point(y.a / 2, y.b)
        if (k.a, k.b) == (0, h):
            return self.source.point(y.a, y.b / 2)
        return self.source.point(y.a + y.b / 2, y.b / 2)


def quotient_by_two_torsion(p: CurvePoint) -> TwoIsogeny:
    curve = p.curve
    h = Fraction(1, 2)
    if (p.a, p.b) == (h, 0):
        tau2 = 2 * curve.tau
    elif (p.a, p.b) == (0, h):
        tau2 = curve.tau / 2
    elif (p.a, p.b) == (h, h):
        tau2 = (1 + curve.tau) / 2
    else:
        raise ValueError(f"{p!r} is not a non-zero 2-torsion point")
    return TwoIsogeny(curve, p, EllipticCurve(tau2))
