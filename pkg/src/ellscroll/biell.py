"""Bielliptic surfaces (E x F)/G degenerating to a union of two elliptic scrolls.

Here G = Z2 x Z2 acts on E x F by

    g1 : (x, y) -> (x + P_i + P_j, y + eps),   eps = tau_F / 2
    g2 : (x, y) -> (x + P_j, -y)

and F = C/(Z + Z tau_F) with t = exp(2 pi i tau_F / 4).  The surface is mapped
to P^{n-1} by the G-invariant sections of L0 x L1, where L0 has degree n on E
and L1 has degree 4 on F with divisor 0 + tau_F/2 + tau_F/4 + 3 tau_F/4.  When
n = 2 mod 4 the lifted translations on L0 anticommute, and L1 is twisted by a
degree-0 bundle M1 whose lifts anticommute as well.

With this action the stabiliser of each limit component contains the
translation by P_i resp. P_j, so the family tends to S(E, P_i) u S(E, P_j) as t -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ellcurve import CurvePoint, EllipticCurve
from .scrollgeo import (
    DEFAULT_MIN_GAP,
    DEFAULT_RANK_TOL,
    FormBasis,
    NumericalStabilityError,
    PointCloud,
    build_union,
    default_sample_count,
    estimate_degree,
    hilbert_profile,
    interpolate_ideal,
)
from .theta import EmbeddedCurve, ThetaParams, ThetaSpace, max_modulus_normalize, projective_distance

HALF = Fraction(1, 2)


class FamilyError(ValueError):
    pass


def tau_from_t(t: complex) -> complex:
    """tau_F with t = exp(2 pi i tau_F / 4)."""
    return 4 * np.log(complex(t)) / (2j * np.pi)


@dataclass(frozen=True)
class FamilyConfig:
    n: int
    tau_e: complex = 0.1 + 1.0j
    pi: CurvePoint | None = None
    pj: CurvePoint | None = None
    t_values: tuple = (0.2, 0.1, 0.05)
    samples: int | None = None
    seed: int = 0
    twist: bool | None = None  # None: twist exactly when n = 2 mod 4
    rank_tol: float = DEFAULT_RANK_TOL
    min_gap: float = DEFAULT_MIN_GAP

    def __post_init__(self):
        if self.n % 2 or self.n < 6:
            raise FamilyError(f"n must be even and >= 6, got {self.n}")
        tau_e = complex(self.tau_e)
        object.__setattr__(self, "tau_e", tau_e)
        E = EllipticCurve(tau_e)
        pts = E.two_torsion()
        pi = pts[0] if self.pi is None else E.point(self.pi.a, self.pi.b)
        pj = pts[1] if self.pj is None else E.point(self.pj.a, self.pj.b)
        for p in (pi, pj):
            if p.is_origin or not (2 * p).is_origin:
                raise FamilyError(f"{p!r} is not a non-zero 2-torsion point")
        if pi == pj:
            raise FamilyError("P_i and P_j must differ")
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "pj", pj)
        object.__setattr__(self, "t_values", tuple(complex(t) for t in self.t_values))
        for t in self.t_values:
            check_t(t)
        if self.twist is None:
            object.__setattr__(self, "twist", self.n % 4 == 2)

    @property
    def curve(self) -> EllipticCurve:
        return EllipticCurve(self.tau_e)

    @property
    def embedded_curve(self) -> EmbeddedCurve:
        return EmbeddedCurve(self.n, ThetaParams(self.tau_e))

    @property
    def g1_translation(self) -> CurvePoint:
        return self.pi + self.pj

    @property
    def g2_translation(self) -> CurvePoint:
        return self.pj


def check_t(t: complex):
    t = complex(t)
    if not 0 < abs(t) < 1:
        raise FamilyError(f"|t| must lie in (0, 1), got {abs(t)}")
    if tau_from_t(t).imag < 0.5:
        raise FamilyError(f"|t| = {abs(t):.3g} gives Im tau_F < 0.5")


@dataclass
class SectionSpace:
    """H^0 of L0 x L1 (or L0 x (L1 + M1)) in the product theta basis, index k*4 + l.

    ``g1``/``g2`` act on coefficient vectors: if s = basis @ c then
    g^* s = basis @ (g @ c).  Each is scaled so that its square is the identity.
    """

    n: int
    tau_e: complex
    tau_f: complex
    twisted: bool
    e_space: ThetaSpace
    f_space: ThetaSpace
    g1: np.ndarray
    g2: np.ndarray
    fit_residual: float
    square_deviation: float
    l1_zero_residual: float

    @property
    def dim(self) -> int:
        return 4 * self.n

    def evaluate(self, z_e, z_f) -> np.ndarray:
        x = self.e_space.basis(z_e)
        u = self.f_space.basis(z_f)
        return (x[:, :, None] * u[:, None, :]).reshape(x.shape[0], -1)

    @property
    def commutator(self) -> np.ndarray:
        g1, g2 = self.g1, self.g2
        return g1 @ g2 @ np.linalg.inv(g1) @ np.linalg.inv(g2)

    @property
    def commutator_scalar(self) -> complex:
        return complex(self.commutator[0, 0])

    @property
    def commutator_deviation(self) -> float:
        """Distance of the commutator from the nearest of +I, -I."""
        C = self.commutator
        eye = np.eye(self.dim)
        return float(min(np.abs(C - eye).max(), np.abs(C + eye).max()))

    @property
    def commutes(self) -> bool:
        return float(np.abs(self.commutator - np.eye(self.dim)).max()) < 1e-8

    @property
    def anticommutes(self) -> bool:
        return float(np.abs(self.commutator + np.eye(self.dim)).max()) < 1e-8


def _l1_zero_residual(tau_f: complex) -> float:
    """Relative value at 3 tau/4 of the degree-4 section through 0, tau/2, tau/4."""
    F = ThetaSpace(4, tau_f, shift=(0, Fraction(1, 8)))
    v, _ = F.section_through(np.array([0, tau_f / 2, tau_f / 4]))
    row = F.basis(np.array([3 * tau_f / 4]))[0]
    return float(abs(row @ v) / np.linalg.norm(row))


def build_sections(cfg: FamilyConfig, t: complex, twist: bool | None = None,
                   seed: int | None = None, fit_tol: float = 1e-8) -> SectionSpace:
    check_t(t)
    n = cfg.n
    twist = cfg.twist if twist is None else twist
    tau_f = tau_from_t(t)
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    E = ThetaSpace(n, cfg.tau_e)
    F = ThetaSpace(4, tau_f, shift=(0, Fraction(1, 8)), b=HALF if twist else 0)
    gz = E.sample_points(6 * n, rng)
    gy = F.sample_points(40, rng)
    a1, a2 = cfg.g1_translation, cfg.g2_translation
    AE1, r1 = E.action_matrix(1, (a1.a, a1.b), gz)
    AE2, r2 = E.action_matrix(1, (a2.a, a2.b), gz)
    AF1, r3 = F.action_matrix(1, (0, HALF), gy)   # y -> y + eps
    AF2, r4 = F.action_matrix(-1, (0, 0), gy)     # y -> -y
    fit = max(r1, r2, r3, r4)
    if fit > fit_tol:
        raise NumericalStabilityError(f"change-of-basis residual {fit:.3g} exceeds {fit_tol:.3g}")
    gens, devs = [], []
    for A in (np.kron(AE1, AF1), np.kron(AE2, AF2)):
        sq = A @ A
        lam = sq[0, 0]
        devs.append(float(np.abs(sq - lam * np.eye(4 * n)).max() / abs(lam)))
        gens.append(A / np.sqrt(lam))
    return SectionSpace(n, cfg.tau_e, tau_f, bool(twist), E, F, gens[0], gens[1],
                        float(fit), max(devs), _l1_zero_residual(tau_f))


def averaging_projector(s: SectionSpace) -> np.ndarray:
    I = np.eye(s.dim)
    return (I + s.g1 + s.g2 + s.g1 @ s.g2) / 4


@dataclass
class InvariantSections:
    space: SectionSpace
    basis: np.ndarray          # (4n, n) coefficient columns
    singular_values: np.ndarray
    idempotency_error: float

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def evaluate(self, z_e, z_f) -> np.ndarray:
        return self.space.evaluate(z_e, z_f) @ self.basis


def projector_rank(P: np.ndarray, rank_tol: float = 1e-8) -> tuple[int, np.ndarray]:
    s = np.linalg.svd(P, compute_uv=False)
    return int(np.sum(s > rank_tol * s[0])), s


def invariant_sections(s: SectionSpace, rank_tol: float = 1e-8) -> InvariantSections:
    """The G-invariant subspace, with basis normalised on the l = 0 slice.

    Scaling the square roots in the lifts by -1 selects another character of
    G; the (+1, +1) eigenspace of the principal-root lifts is used.
    """
    if not s.commutes:
        raise FamilyError(f"lifted generators do not commute (commutator ~ {s.commutator_scalar:.6g})")
    P = averaging_projector(s)
    idem = float(np.abs(P @ P - P).max())
    u, sv, _ = np.linalg.svd(P)
    r = int(np.sum(sv > rank_tol * sv[0]))
    if r != s.n:
        raise FamilyError(f"invariant subspace has dimension {r}, expected {s.n}; "
                          f"singular values {np.round(sv[:s.n + 2], 6).tolist()}")
    W = u[:, :r]
    S = W[0::4]
    if np.linalg.cond(S) < 1e8:
        W = W @ np.linalg.inv(S)
    return InvariantSections(s, W, sv, idem)


# --------------------------------------------------------------------------
# sampling the embedded surface

def _sample_invariant(inv: InvariantSections, count: int, rng: np.random.Generator,
                      max_tries: int = 10) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    E, F = inv.space.e_space, inv.space.f_space
    z = E.sample_points(count, rng)
    y = F.sample_points(count, rng)
    scale = np.linalg.norm(inv.basis)
    for _ in range(max_tries):
        X = inv.evaluate(z, y)
        ref = np.linalg.norm(inv.space.evaluate(z, y), axis=1) * scale
        bad = np.abs(X).max(axis=1) < 1e-13 * ref
        if not bad.any():
            return z, y, X
        z[bad] = E.sample_points(int(bad.sum()), rng)
        y[bad] = F.sample_points(int(bad.sum()), rng)
    raise NumericalStabilityError("base point hit repeatedly while sampling")


def embed_bielliptic(cfg: FamilyConfig, t: complex, count: int, seed: int,
                     inv: InvariantSections | None = None) -> PointCloud:
    inv = inv or invariant_sections(build_sections(cfg, t))
    rng = np.random.default_rng(seed)
    _, _, X = _sample_invariant(inv, count, rng)
    t = complex(t)
    prov = {"kind": "bielliptic", "n": cfg.n, "t": [t.real, t.imag],
            "tau_e": [cfg.tau_e.real, cfg.tau_e.imag], "twisted": inv.space.twisted}
    return PointCloud(max_modulus_normalize(X), prov, seed)


def invariance_residual(inv: InvariantSections, cfg: FamilyConfig, count: int = 50, seed: int = 0) -> float:
    """Largest projective distance between the images of a point and its G-translates."""
    rng = np.random.default_rng(seed)
    z, y, X = _sample_invariant(inv, count, rng)
    tau_f = inv.space.tau_f
    moves = [
        (cfg.g1_translation.to_complex(), 1, tau_f / 2),
        (cfg.g2_translation.to_complex(), -1, 0.0),
    ]
    worst = 0.0
    for dz, eps, dy in moves:
        Y = inv.evaluate(z + dz, eps * y + dy)
        worst = max(worst, float(projective_distance(X, Y).max()))
    return worst


# --------------------------------------------------------------------------
# degeneration to the union of scrolls

@dataclass
class DegenerationRow:
    t: complex
    h1: int
    h2: int
    degree: int | None
    residual_rms: float
    residual_max: float

    def as_dict(self) -> dict:
        return {"abs_t": abs(self.t), "t": [self.t.real, self.t.imag], "h1": self.h1, "h2": self.h2,
                "degree": self.degree, "residual_rms": self.residual_rms, "residual_max": self.residual_max}


@dataclass
class DegenerationReport:
    n: int
    form_degree: int
    z0_h1: int
    z0_h2: int
    z0_forms: int
    rows: list[DegenerationRow] = field(default_factory=list)

    @property
    def hilbert_constant(self) -> bool:
        return all(r.h1 == self.z0_h1 and r.h2 == self.z0_h2 for r in self.rows)

    @property
    def residual_ratios(self) -> list[float]:
        res = [r.residual_rms for r in self.rows]
        return [a / b for a, b in zip(res, res[1:])]

    @property
    def residual_monotone(self) -> bool:
        res = [r.residual_rms for r in self.rows]
        return all(b < a for a, b in zip(res, res[1:]))

    def halving_factor_ok(self, factor: float = 2.0) -> bool:
        """Residual shrinks by ``factor`` per halving of |t| (scaled to the actual |t| ratio)."""
        for a, b, q in zip(self.rows, self.rows[1:], self.residual_ratios):
            halvings = np.log2(abs(a.t) / abs(b.t))
            if q < factor ** halvings:
                return False
        return True

    def as_dict(self) -> dict:
        return {"n": self.n, "form_degree": self.form_degree,
                "z0": {"h1": self.z0_h1, "h2": self.z0_h2, "forms": self.z0_forms},
                "rows": [r.as_dict() for r in self.rows],
                "residual_ratios": self.residual_ratios,
                "hilbert_constant": self.hilbert_constant,
                "residual_monotone": self.residual_monotone}


def degree_window(n: int) -> tuple[int, ...]:
    """Degrees where h(d) of a degree-2n surface in P^{n-1} already equals n d^2.

    For n = 6 the value 24 = h(2) exceeds the 21 available quadrics, so the
    second difference only settles from d = 4 on.
    """
    return (2, 3, 4) if n >= 8 else (4, 5)


def default_form_degree(n: int) -> int:
    # the union of two degree-6 scrolls lies on no quadric and on too few cubics
    return 2 if n >= 8 else 4


def degeneration_experiment(cfg: FamilyConfig, t_sequence=None, form_degree: int | None = None,
                            count: int | None = None, with_degree: bool = True) -> DegenerationReport:
    """Compare Z_t clouds against the union of scrolls Z0 as |t| decreases."""
    ts = [complex(t) for t in (t_sequence if t_sequence is not None else cfg.t_values)]
    if any(abs(b) >= abs(a) for a, b in zip(ts, ts[1:])):
        raise FamilyError("t_sequence must be strictly decreasing in |t|")
    n = cfg.n
    d = form_degree or default_form_degree(n)
    curve = cfg.embedded_curve
    z0_count = max(default_sample_count(n, max(d, 2)), cfg.samples or 0)
    z0 = build_union(curve, cfg.pi, cfg.pj, z0_count, seed=cfg.seed)
    forms: FormBasis = interpolate_ideal(z0, d, cfg.rank_tol, cfg.min_gap)
    prof0 = hilbert_profile(z0, (1, 2), cfg.rank_tol, cfg.min_gap)
    report = DegenerationReport(n, d, prof0.value(1), prof0.value(2), forms.count)
    window = degree_window(n)
    d_top = window[-1] + 1 if with_degree else max(d, 2)
    m = count or max(default_sample_count(n, d_top), cfg.samples or 0)
    for k, t in enumerate(ts):
        inv = invariant_sections(build_sections(cfg, t, seed=cfg.seed + 1000 + k))
        cloud = embed_bielliptic(cfg, t, m, seed=cfg.seed + 2000 + k, inv=inv)
        prof = hilbert_profile(cloud, (1, 2), cfg.rank_tol, cfg.min_gap)
        deg = estimate_degree(cloud, window, 2, cfg.rank_tol, cfg.min_gap) if with_degree else None
        v = forms.evaluate(cloud.points)
        report.rows.append(DegenerationRow(t, prof.value(1), prof.value(2), deg,
                                           float(np.sqrt(np.mean(v ** 2))), float(v.max())))
    return report
