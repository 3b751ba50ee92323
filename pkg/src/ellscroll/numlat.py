"""Exact intersection theory on elliptic ruled surfaces and bielliptic lattices.

Two ruled models are supported, both P^1-bundles over an elliptic base curve F
with a section class F0 and fibre class f:

* ``odd``  -- the symmetric square S^2 F (invariant e = -1, F0^2 = 1), which
  carries the degree-n elliptic scroll for n odd;
* ``even`` -- P(O + O(0 - P)) for a non-zero 2-torsion point P (F0^2 = 0),
  the scroll for n even.

Line bundles are modelled as ``a*F0 + pi^*M`` with M a divisor on the base, so
isomorphism is decided by the coefficient of F0 together with linear
equivalence of M on F.  Chern data of vector bundles are kept numerically:
c1 in the (F0, f) lattice and c2 as an integer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .ellcurve import (
    CurvePoint,
    DivisorOnCurve,
    EllipticCurve,
    is_principal,
    linearly_equivalent,
    quotient_by_two_torsion,
)


class ModelMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class RuledModel:
    kind: str
    n: int
    base: EllipticCurve
    twist: CurvePoint

    def __post_init__(self):
        if self.kind not in ("odd", "even"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n < 5:
            raise ValueError("scrolls are considered for n >= 5 only")
        if (self.kind == "odd") != (self.n % 2 == 1):
            raise ValueError(f"{self.kind} model needs n of matching parity, got n={self.n}")
        if self.kind == "even" and self.n < 6:
            raise ValueError("even model needs n >= 6")
        if self.twist.curve != self.base or self.twist.is_origin or (2 * self.twist).is_origin is False:
            raise ValueError("twist must be a non-zero 2-torsion point of the base")

    @classmethod
    def for_degree(cls, n: int, base: EllipticCurve | None = None, twist_index: int = 0) -> "RuledModel":
        base = base or EllipticCurve(0.1 + 1j)
        return cls("odd" if n % 2 else "even", n, base, base.two_torsion()[twist_index])

    # intersection data on the (F0, f) lattice
    @property
    def section_square(self) -> int:
        return 1 if self.kind == "odd" else 0

    def form(self, x: tuple, y: tuple):
        """Intersection pairing of numerical classes (a, b) = a*F0 + b*f."""
        return x[0] * y[0] * self.section_square + x[0] * y[1] + x[1] * y[0]

    @property
    def section_normal(self) -> DivisorOnCurve:
        """Divisor on F representing the normal bundle of F0."""
        o = DivisorOnCurve.point(self.base.origin)
        return o if self.kind == "odd" else o - self.twist

    # distinguished classes
    def pic(self, a: int, base_divisor: DivisorOnCurve | None = None) -> "PicElement":
        return PicElement(a, base_divisor if base_divisor is not None else DivisorOnCurve.zero(self.base))

    def fibre(self, p: CurvePoint | None = None) -> "PicElement":
        p = self.base.origin if p is None else p
        return self.pic(0, DivisorOnCurve.point(p))

    @property
    def section(self) -> "PicElement":
        return self.pic(1)

    @property
    def canonical(self) -> "PicElement":
        o = DivisorOnCurve.point(self.base.origin)
        if self.kind == "odd":
            return self.pic(-2, o)
        return self.pic(-2, o - self.twist)

    @property
    def hyperplane(self) -> "PicElement":
        k = (self.n - 1) // 2 if self.kind == "odd" else self.n // 2
        return self.pic(1, k * DivisorOnCurve.point(self.base.origin))

    @property
    def bisection(self) -> "PicElement":
        """The class of the elliptic normal curve on the scroll (F_i, resp. E)."""
        if self.kind == "odd":
            return self.pic(2, -DivisorOnCurve.point(self.twist))
        return self.pic(2)


@dataclass(frozen=True)
class PicElement:
    section_mult: int
    base_divisor: DivisorOnCurve

    @property
    def numerical(self) -> tuple[int, int]:
        return (self.section_mult, self.base_divisor.degree)

    def __add__(self, other: "PicElement") -> "PicElement":
        return PicElement(self.section_mult + other.section_mult, self.base_divisor + other.base_divisor)

    def __neg__(self) -> "PicElement":
        return PicElement(-self.section_mult, -self.base_divisor)

    def __sub__(self, other: "PicElement") -> "PicElement":
        return self + (-other)

    def __mul__(self, k: int) -> "PicElement":
        return PicElement(k * self.section_mult, k * self.base_divisor)

    __rmul__ = __mul__

    def isomorphic(self, other: "PicElement") -> bool:
        return (self.section_mult == other.section_mult
                and linearly_equivalent(self.base_divisor, other.base_divisor))


def _check_model(m: RuledModel, *ds: PicElement):
    for d in ds:
        if d.base_divisor.curve != m.base:
            raise ModelMismatchError("class is not defined over this model's base curve")


def intersect(d1: PicElement, d2: PicElement, m: RuledModel) -> int:
    _check_model(m, d1, d2)
    return m.form(d1.numerical, d2.numerical)


def riemann_roch_line(d: PicElement, m: RuledModel) -> int:
    """chi(O(D)) = D.(D - K)/2, using chi(O) = 0 for a surface ruled over an elliptic curve."""
    val = Fraction(intersect(d, d - m.canonical, m), 2)
    assert val.denominator == 1
    return int(val)


def adjunction_genus(d: PicElement, m: RuledModel) -> int:
    val = Fraction(intersect(d, d + m.canonical, m), 2) + 1
    assert val.denominator == 1
    return int(val)


def restrict_to_section(d: PicElement, m: RuledModel) -> DivisorOnCurve:
    """O(D)|_{F0} as a divisor class on F0 = F."""
    _check_model(m, d)
    return d.section_mult * m.section_normal + d.base_divisor


# --------------------------------------------------------------------------
# Chern data

@dataclass(frozen=True)
class BundleChernData:
    rank: int
    c1: tuple[int, int]
    c2: int

    def total(self) -> "ChernClass":
        return ChernClass(self.c1, self.c2)


@dataclass(frozen=True)
class ChernClass:
    """Total Chern class 1 + c1 + c2 in the numerical ring truncated above degree 2."""

    c1: tuple[int, int] = (0, 0)
    c2: int = 0

    def mul(self, other: "ChernClass", m: RuledModel) -> "ChernClass":
        c1 = (self.c1[0] + other.c1[0], self.c1[1] + other.c1[1])
        return ChernClass(c1, self.c2 + other.c2 + m.form(self.c1, other.c1))

    def inverse(self, m: RuledModel) -> "ChernClass":
        c1 = (-self.c1[0], -self.c1[1])
        return ChernClass(c1, m.form(self.c1, self.c1) - self.c2)


def line_bundle(c1: tuple[int, int]) -> BundleChernData:
    return BundleChernData(1, tuple(c1), 0)


def extension(sub: BundleChernData, quot: BundleChernData, m: RuledModel) -> BundleChernData:
    """Chern data of the middle term of 0 -> sub -> E -> quot -> 0."""
    c = sub.total().mul(quot.total(), m)
    return BundleChernData(sub.rank + quot.rank, c.c1, c.c2)


def quotient(total: BundleChernData, sub: BundleChernData, m: RuledModel) -> BundleChernData:
    """Chern data of E/sub, by Whitney division."""
    c = total.total().mul(sub.total().inverse(m), m)
    return BundleChernData(total.rank - sub.rank, c.c1, c.c2)


def twist_bundle(b: BundleChernData, line: tuple[int, int], m: RuledModel) -> BundleChernData:
    r = b.rank
    c1 = (b.c1[0] + r * line[0], b.c1[1] + r * line[1])
    c2 = b.c2 + (r - 1) * m.form(b.c1, line) + comb(r, 2) * m.form(line, line)
    return BundleChernData(r, c1, c2)


def chi_bundle(b: BundleChernData, m: RuledModel) -> int:
    """Hirzebruch-Riemann-Roch on a surface with chi(O) = 0."""
    K = m.canonical.numerical
    val = Fraction(m.form(b.c1, b.c1) - 2 * b.c2, 2) - Fraction(m.form(b.c1, K), 2)
    if val.denominator != 1:
        raise ArithmeticError(f"non-integral Euler characteristic {val}")
    return int(val)


@dataclass(frozen=True)
class NormalBundleData:
    tangent: BundleChernData
    ambient: BundleChernData
    normal: BundleChernData
    anticanonical: BundleChernData
    quotient: BundleChernData
    whitney_ok: bool


def normal_bundle_sequence(n: int, m: RuledModel) -> NormalBundleData:
    """Chern data along 0 -> T_X -> T_P|X -> N -> 0 and 0 -> K^-1 -> N -> Q -> 0.

    c2(T_X) = 0 because the surface is ruled over an elliptic curve.
    """
    if n != m.n:
        raise ValueError(f"model built for n={m.n}, asked for n={n}")
    K = m.canonical.numerical
    H = m.hyperplane.numerical
    minus_k = (-K[0], -K[1])
    tangent = BundleChernData(2, minus_k, 0)
    ambient = BundleChernData(n - 1, (n * H[0], n * H[1]), comb(n, 2) * m.form(H, H))
    normal = quotient(ambient, tangent, m)
    anti = line_bundle(minus_k)
    q = quotient(normal, anti, m)
    ok = (extension(tangent, normal, m) == ambient and extension(anti, q, m) == normal)
    return NormalBundleData(tangent, ambient, normal, anti, q, ok)


def derive_normal_chern(n: int, m: RuledModel) -> BundleChernData:
    return normal_bundle_sequence(n, m).quotient


# --------------------------------------------------------------------------
# bielliptic lattice

@dataclass(frozen=True)
class BiellipticLattice:
    """Span of the images A of E and B of F in NS of a type-2 bielliptic surface.

    Coefficients are rational so that (n/4)B makes sense when n = 2 mod 4,
    where only B/2 (not B/4) is integral.
    """

    n: int
    ab: int = 4

    def __post_init__(self):
        if self.n % 2 or self.n < 6:
            raise ValueError(f"bielliptic embedding needs even n >= 6, got {self.n}")

    def form(self, x, y) -> Fraction:
        return Fraction(x[0]) * Fraction(y[1]) * self.ab + Fraction(x[1]) * Fraction(y[0]) * self.ab

    @property
    def A(self):
        return (Fraction(1), Fraction(0))

    @property
    def B(self):
        return (Fraction(0), Fraction(1))

    @property
    def hyperplane(self):
        return (Fraction(1), Fraction(self.n, 4))

    @property
    def b_coefficient_integral(self) -> bool:
        """True iff H = A + (n/4)B uses an integer multiple of B (n = 0 mod 4)."""
        return self.hyperplane[1].denominator == 1

    @property
    def in_neron_severi(self) -> bool:
        # B/2 is a class; (n/4)B is a multiple of it exactly when n is even
        return (2 * self.hyperplane[1]).denominator == 1


@dataclass(frozen=True)
class BiellipticNumbers:
    n: int
    h_squared: int
    h_dot_a: int
    h_dot_b: int
    chi_h: int
    b_integral: bool

    def as_tuple(self):
        return (self.h_squared, self.h_dot_a, self.h_dot_b, self.chi_h)


def bielliptic_numbers(n: int) -> BiellipticNumbers:
    lat = BiellipticLattice(n)
    H = lat.hyperplane
    h2 = lat.form(H, H)
    ha = lat.form(H, lat.A)
    hb = lat.form(H, lat.B)
    # K is numerically trivial and chi(O) = 0, so chi(H) = H^2/2
    chi = h2 / 2
    for v in (h2, ha, hb, chi):
        assert v.denominator == 1
    return BiellipticNumbers(n, int(h2), int(ha), int(hb), int(chi), lat.b_coefficient_integral)


def expected_hilbert_dimension(n: int) -> int:
    if n < 5:
        raise ValueError("n >= 5 required")
    return n * n if n % 2 else n * n + 1


def double_curve_twist(n: int, base: EllipticCurve | None = None) -> DivisorOnCurve:
    """Divisor of T = N_{E/X_i} (x) N_{E/X_j} on the double curve E."""
    base = base or EllipticCurve(0.1 + 1j)
    if n % 2 == 0:
        return DivisorOnCurve.zero(base)
    qi, qj, _ = base.two_torsion()
    return 2 * DivisorOnCurve.point(base.origin) - qi - qj


def hilbert_dimension_crosscheck(n: int) -> tuple[int, int]:
    """(expected dimension, chi(N_X) + h^0(T)); the two must agree.

    h^0 of the degree-0 bundle T is 1 when T is trivial and 0 otherwise.
    """
    m = RuledModel.for_degree(n)
    seq = normal_bundle_sequence(n, m)
    chi_n = chi_bundle(seq.anticanonical, m) + chi_bundle(seq.quotient, m)
    h0_t = 1 if is_principal(double_curve_twist(n, m.base)) else 0
    return expected_hilbert_dimension(n), chi_n + h0_t


# --------------------------------------------------------------------------
# the formula suite

@dataclass
class FormulaCheck:
    name: str
    claim: str
    passed: bool
    detail: str = ""


@dataclass
class FormulaReport:
    model: RuledModel
    checks: list[FormulaCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, claim, passed, detail=""):
        self.checks.append(FormulaCheck(name, claim, bool(passed), detail))


def _symmetric_square_restriction(m: RuledModel) -> tuple[DivisorOnCurve, DivisorOnCurve, int]:
    """Restrict O(2F0 - f_P) to the bisection F_P = F/<P> inside S^2 F.

    F_P is the image of {(x, x+P)}; on it the ruling map is [x] -> 2x + P.
    Returns (restriction, expected divisor 0_P - Q_P, #(F0 cap F_P)).
    """
    F = m.base
    P = m.twist
    iso = quotient_by_two_torsion(P)
    Fi = iso.target
    # F0 = {x, 0}: meets {y, y+P} where y = 0 or y + P = 0
    meet = {iso(y) for y in (F.origin, -P)}
    meet_div = DivisorOnCurve(Fi, [(p, 1) for p in meet])
    # pull back the fibre over P along [x] -> 2x + P
    pre = {iso(x) for x in (P - P).halves()}
    fibre_div = DivisorOnCurve(Fi, [(p, 1) for p in pre])
    restriction = 2 * meet_div - fibre_div
    origin_i = iso(F.origin)
    others = {iso(q) for q in F.two_torsion() if q != P}
    assert len(others) == 1
    q_i = others.pop()
    expected = DivisorOnCurve.point(origin_i) - q_i
    return restriction, expected, len(meet)


def verify_formula_suite(m: RuledModel) -> FormulaReport:
    rep = FormulaReport(m)
    F0, f, K, H = m.section, m.fibre(), m.canonical, m.hyperplane
    C = m.bisection
    o = DivisorOnCurve.point(m.base.origin)
    fP = m.fibre(m.twist)

    rep.add("K^2", "K^2 = 0", intersect(K, K, m) == 0)
    rep.add("K.f", "fibres are rational: K.f = -2", intersect(K, f, m) == -2)
    rep.add("g(f)", "fibre genus 0", adjunction_genus(f, m) == 0)
    rep.add("g(F0)", "section genus 1", adjunction_genus(F0, m) == 1)
    # adjunction as an identity of line bundles on F0: (K + F0)|F0 = K_F0 = O
    rep.add("adj(F0)", "(K + F0)|F0 is trivial", is_principal(restrict_to_section(K + F0, m)))
    rep.add("H^2", "H^2 = n", intersect(H, H, m) == m.n)
    rep.add("chi(H)", "chi(O(H)) = n", riemann_roch_line(H, m) == m.n)
    rep.add("H.C", "bisection has degree n", intersect(H, C, m) == m.n)
    rep.add("g(C)", "bisection is elliptic", adjunction_genus(C, m) == 1)
    rep.add("C.f", "C is a 2-section", intersect(C, f, m) == 2)
    seq = normal_bundle_sequence(m.n, m)
    rep.add("N.f", "N|f has degree (n-4) + 2", m.form(seq.normal.c1, f.numerical) == m.n - 2)
    rep.add("Q.f", "Q|f = (n-4) O_f(1)", m.form(seq.quotient.c1, f.numerical) == m.n - 4)

    if m.kind == "odd":
        rep.add("section restriction", "O(F0)|F0 = O(0)", intersect(F0, F0, m) == o.degree
                and linearly_equivalent(restrict_to_section(F0, m), o))
        # F_i = 2F0 - f_P is a 2-section of square 0 meeting F0 once
        restriction, expected, n_meet = _symmetric_square_restriction(m)
        rep.add("bisection class", "O(F_i) = O(2F0 - f_P)",
                intersect(C, C, m) == 0 and intersect(C, F0, m) == n_meet == 1)
        rep.add("bisection restriction", "O(F_i)|F_i = O(0_i - Q_i)",
                restriction.degree == intersect(C, C, m)
                and linearly_equivalent(restriction, expected)
                and not is_principal(expected),
                detail=f"restriction {restriction}, expected {expected}")
        rep.add("canonical class odd", "K = -2F0 + f0", K.isomorphic(m.pic(-2, o)))
        # O(F_i) (x) K = O(f0 - f_P), degree 0 and non-trivial
        diff = (C + K).base_divisor
        rep.add("bisection plus canonical", "O(F_i) + K = f0 - f_P nontrivial of degree 0",
                (C + K).section_mult == 0 and diff.degree == 0 and not is_principal(diff))
        rep.add("bisection via canonical odd", "O(F_i) = -K + f0 - f_P", C.isomorphic(-K + f - fP))
    else:
        rep.add("F0^2", "F0^2 = 0 after the elementary transformation", intersect(F0, F0, m) == 0)
        rep.add("N(F0)", "normal bundle of F0 is O(0 - P), non-trivial",
                not is_principal(m.section_normal) and m.section_normal.degree == 0)
        rep.add("canonical class even", "K = -2F0 + f0 - f_P", K.isomorphic(m.pic(-2, o - m.twist)))
        # E misses F0, so E|F0 is trivial; this pins the base part of E = 2F0 + pi^*M
        e_base = -2 * m.section_normal
        rep.add("bisection is 2F0", "O(E) = O(2F0)",
                is_principal(restrict_to_section(m.pic(2, e_base), m))
                and m.pic(2, e_base).isomorphic(C) and intersect(C, F0, m) == 0)
        rep.add("bisection via canonical even", "O(E) = -K + f0 - f_P", C.isomorphic(-K + f - fP))
    return rep


# --------------------------------------------------------------------------

@dataclass
class LatticeRow:
    n: int
    h_squared: int
    chi_h: int
    chi_q: int
    chi_q_twisted: int
    rank_q: int
    whitney_ok: bool
    formulas_ok: bool

    @property
    def passed(self) -> bool:
        n = self.n
        return (self.h_squared == n and self.chi_h == n and self.chi_q == n * n
                and self.chi_q_twisted == 0 and self.rank_q == n - 4
                and self.whitney_ok and self.formulas_ok)


def lattice_row(n: int, base: EllipticCurve | None = None, twist_index: int = 0) -> LatticeRow:
    m = RuledModel.for_degree(n, base, twist_index)
    H = m.hyperplane
    seq = normal_bundle_sequence(n, m)
    q = seq.quotient
    q_tw = twist_bundle(q, (-m.bisection).numerical, m)
    return LatticeRow(
        n=n,
        h_squared=intersect(H, H, m),
        chi_h=riemann_roch_line(H, m),
        chi_q=chi_bundle(q, m),
        chi_q_twisted=chi_bundle(q_tw, m),
        rank_q=q.rank,
        whitney_ok=seq.whitney_ok,
        formulas_ok=verify_formula_suite(m).passed,
    )
