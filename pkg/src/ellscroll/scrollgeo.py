"""Sampled scrolls and surfaces in P^{n-1}, and Hilbert functions by numerical rank.

A variety is represented by a point cloud.  The value h(d) of its Hilbert
function is the rank of the matrix of all degree-d monomials evaluated at the
samples; the degree of a surface is read off the second difference of h.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from pathlib import Path

import numpy as np

from .ellcurve import CurvePoint
from .theta import EmbeddedCurve, max_modulus_normalize


class NumericalStabilityError(ArithmeticError):
    pass


class InsufficientSamplesError(ValueError):
    pass


class SpectralGapError(NumericalStabilityError):
    def __init__(self, msg, singular_values=None):
        super().__init__(msg)
        self.singular_values = singular_values


class DegreeInstabilityError(NumericalStabilityError):
    def __init__(self, msg, profile=None, differences=None):
        super().__init__(msg)
        self.profile = profile
        self.differences = differences


DEFAULT_RANK_TOL = 1e-8
DEFAULT_MIN_GAP = 1e3


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    provenance: dict
    seed: int | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex, copy=True)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.count

    def transformed(self, U: np.ndarray) -> "PointCloud":
        """Apply a linear change of coordinates x -> U x and renormalise."""
        prov = dict(self.provenance, transformed=True)
        return PointCloud(max_modulus_normalize(self.points @ U.T), prov, self.seed)

    def subset(self, idx) -> "PointCloud":
        return PointCloud(self.points[idx], self.provenance, self.seed)

    def concat(self, other: "PointCloud", provenance: dict) -> "PointCloud":
        return PointCloud(np.vstack([self.points, other.points]), provenance, self.seed)


@dataclass
class HilbertProfile:
    degrees: list[int]
    values: list[int]
    rank_tol: float
    min_gap: float
    gaps: list[float] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"degrees": self.degrees, "values": self.values, "rank_tol": self.rank_tol,
                "min_gap": self.min_gap, "gaps": [float(min(g, 1e300)) for g in self.gaps]}

    def value(self, d: int) -> int:
        return self.values[self.degrees.index(d)]

    def second_differences(self, d_range) -> list[int]:
        return [self.value(d + 1) - 2 * self.value(d) + self.value(d - 1) for d in d_range]

    def first_differences(self, d_range) -> list[int]:
        return [self.value(d) - self.value(d - 1) for d in d_range]


# --------------------------------------------------------------------------
# sampling

def _torsion_complex(curve: EmbeddedCurve, p: CurvePoint) -> complex:
    return curve.point_of(p)


def sample_curve(curve: EmbeddedCurve, count: int, seed: int) -> PointCloud:
    rng = np.random.default_rng(seed)
    z = curve.sample(count, rng)
    return PointCloud(curve(z), {"kind": "curve", "n": curve.n, "tau": [curve.tau.real, curve.tau.imag]}, seed)


def _secant_points(curve: EmbeddedCurve, shift: complex, count: int, rng: np.random.Generator) -> np.ndarray:
    x = curve.sample(count, rng)
    a = curve(x)
    b = curve(x + shift)
    lam = rng.random(count)[:, None]
    return max_modulus_normalize(lam * a + (1 - lam) * b)


def sample_translation_scroll(curve: EmbeddedCurve, p: CurvePoint | complex, count: int, seed: int) -> PointCloud:
    """Points on the secants joining x and x + p, for random x and lambda in [0, 1].

    ``p`` is an exact curve point or, for non-torsion translations, a complex number.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if isinstance(p, CurvePoint):
        if p.is_origin:
            raise ValueError("translation by the origin gives no scroll")
        shift = _torsion_complex(curve, p)
        tag = [str(p.a), str(p.b)]
    else:
        shift = complex(p)
        if abs(shift) < 1e-14:
            raise ValueError("translation by the origin gives no scroll")
        tag = [shift.real, shift.imag]
    rng = np.random.default_rng(seed)
    pts = _secant_points(curve, shift, count, rng)
    return PointCloud(pts, {"kind": "scroll", "n": curve.n, "P": tag,
                            "tau": [curve.tau.real, curve.tau.imag]}, seed)


def build_union(curve: EmbeddedCurve, pi: CurvePoint, pj: CurvePoint, count: int, seed: int) -> PointCloud:
    """Union of the two scrolls S(E, pi) and S(E, pj), with balanced sample counts."""
    for p in (pi, pj):
        if p.is_origin or not (2 * p).is_origin:
            raise ValueError(f"{p!r} is not a non-zero 2-torsion point")
    if pi == pj:
        raise ValueError("the two torsion points must differ")
    ss = np.random.SeedSequence(seed).spawn(2)
    ci = sample_translation_scroll(curve, pi, count // 2, int(ss[0].generate_state(1)[0]))
    cj = sample_translation_scroll(curve, pj, count - count // 2, int(ss[1].generate_state(1)[0]))
    prov = {"kind": "union", "n": curve.n, "Pi": [str(pi.a), str(pi.b)], "Pj": [str(pj.a), str(pj.b)],
            "tau": [curve.tau.real, curve.tau.imag]}
    return PointCloud(np.vstack([ci.points, cj.points]), prov, seed)


# --------------------------------------------------------------------------
# Hilbert functions

@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> np.ndarray:
    """Exponent index tuples of all degree-d monomials in n variables, shape (C(n-1+d, d), d)."""
    return np.array(list(combinations_with_replacement(range(n), d)), dtype=int).reshape(-1, d)


def monomial_count(n: int, d: int) -> int:
    return comb(n - 1 + d, d)


def evaluation_matrix(points: np.ndarray, d: int) -> np.ndarray:
    """Rows: all degree-d monomials at one sample, scaled to unit norm."""
    points = np.asarray(points)
    if d == 0:
        return np.ones((points.shape[0], 1), dtype=complex)
    idx = monomials(points.shape[1], d)
    A = np.prod(points[:, idx], axis=2)
    return A / np.linalg.norm(A, axis=1)[:, None]


def _numerical_rank(s: np.ndarray, rank_tol: float, min_gap: float) -> tuple[int, float]:
    if s.size == 0 or s[0] == 0:
        return 0, np.inf
    r = int(np.sum(s > rank_tol * s[0]))
    gap = np.inf if r == len(s) else s[r - 1] / s[r]
    if gap < min_gap:
        raise SpectralGapError(f"spectral gap {gap:.3g} below {min_gap:.3g} at rank {r}", s)
    return r, float(gap)


def _check_samples(cloud: PointCloud, d: int, factor: int = 3):
    need = factor * monomial_count(cloud.ambient_dim, d)
    if cloud.count < need:
        raise InsufficientSamplesError(f"degree {d} needs {need} samples, cloud has {cloud.count}")


def hilbert_value(cloud: PointCloud, d: int, rank_tol: float = DEFAULT_RANK_TOL,
                  min_gap: float = DEFAULT_MIN_GAP) -> tuple[int, float]:
    _check_samples(cloud, d)
    s = np.linalg.svd(evaluation_matrix(cloud.points, d), compute_uv=False)
    return _numerical_rank(s, rank_tol, min_gap)


def hilbert_function(cloud: PointCloud, d: int, rank_tol: float = DEFAULT_RANK_TOL,
                     min_gap: float = DEFAULT_MIN_GAP) -> int:
    return hilbert_value(cloud, d, rank_tol, min_gap)[0]


def hilbert_profile(cloud: PointCloud, degrees, rank_tol: float = DEFAULT_RANK_TOL,
                    min_gap: float = DEFAULT_MIN_GAP) -> HilbertProfile:
    degrees = sorted(set(int(d) for d in degrees))
    vals, gaps = [], []
    for d in degrees:
        v, g = hilbert_value(cloud, d, rank_tol, min_gap)
        vals.append(v)
        gaps.append(g)
    return HilbertProfile(degrees, vals, rank_tol, min_gap, gaps)


def estimate_degree(cloud: PointCloud, d_range=(2, 3, 4), dim: int = 2,
                    rank_tol: float = DEFAULT_RANK_TOL, min_gap: float = DEFAULT_MIN_GAP,
                    profile_out: list | None = None) -> int:
    """Degree from the stabilised difference of the Hilbert function.

    Surfaces (dim=2) use the second difference h(d+1) - 2h(d) + h(d-1);
    curves (dim=1) use h(d) - h(d-1).  The difference must be constant on d_range.
    """
    d_range = sorted(d_range)
    if dim == 2:
        prof = hilbert_profile(cloud, range(d_range[0] - 1, d_range[-1] + 2), rank_tol, min_gap)
        diffs = prof.second_differences(d_range)
    elif dim == 1:
        prof = hilbert_profile(cloud, range(d_range[0] - 1, d_range[-1] + 1), rank_tol, min_gap)
        diffs = prof.first_differences(d_range)
    else:
        raise ValueError("only curves and surfaces are supported")
    if profile_out is not None:
        profile_out.append(prof)
    if len(set(diffs)) != 1:
        raise DegreeInstabilityError(f"differences {diffs} not constant over d in {d_range}", prof, diffs)
    return diffs[0]


def default_sample_count(n: int, d_max: int, factor: int = 4) -> int:
    return factor * monomial_count(n, d_max)


# --------------------------------------------------------------------------
# ideals

@dataclass
class FormBasis:
    """Orthonormal coefficient vectors (columns) of degree-d forms in the monomial basis."""

    n: int
    d: int
    coefficients: np.ndarray
    heldout_residual: float

    @property
    def count(self) -> int:
        return self.coefficients.shape[1]

    def evaluate(self, points) -> np.ndarray:
        """|form values| at unit-normalised monomial vectors, shape (points, forms)."""
        return np.abs(evaluation_matrix(np.asarray(points), self.d) @ self.coefficients)

    def residual(self, points) -> float:
        if self.count == 0:
            return 0.0
        return float(self.evaluate(points).max())


def interpolate_ideal(cloud: PointCloud, d: int, rank_tol: float = DEFAULT_RANK_TOL,
                      min_gap: float = DEFAULT_MIN_GAP, holdout_tol: float = 1e-8) -> FormBasis:
    """Degree-d forms vanishing on the cloud.

    The first 3 * #monomials samples fit the kernel; the remaining samples
    are held out and must satisfy every form to ``holdout_tol``.
    """
    _check_samples(cloud, d)
    nfit = 3 * monomial_count(cloud.ambient_dim, d)
    A = evaluation_matrix(cloud.points[:nfit], d)
    _, s, vh = np.linalg.svd(A)
    r, _ = _numerical_rank(s, rank_tol, min_gap)
    K = vh[r:].conj().T
    basis = FormBasis(cloud.ambient_dim, d, K, 0.0)
    held = cloud.points[nfit:]
    if held.shape[0] and K.shape[1]:
        basis.heldout_residual = basis.residual(held)
        if basis.heldout_residual > holdout_tol:
            raise NumericalStabilityError(
                f"held-out residual {basis.heldout_residual:.3g} exceeds {holdout_tol:.3g}")
    return basis


# --------------------------------------------------------------------------
# persistence

def save_cloud(cloud: PointCloud, path) -> tuple[Path, Path]:
    """CSV with 2n columns (re/im interleaved) and a JSON sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = cloud.ambient_dim
    out = np.empty((cloud.count, 2 * n))
    out[:, 0::2] = cloud.points.real
    out[:, 1::2] = cloud.points.imag
    header = ",".join(f"re{i},im{i}" for i in range(n))
    np.savetxt(path, out, delimiter=",", header=header, comments="", fmt="%.17g")
    side = path.with_suffix(".json")
    side.write_text(json.dumps({"provenance": cloud.provenance, "seed": cloud.seed,
                                "count": cloud.count, "ambient_dim": n}, indent=2, default=str))
    return path, side


def load_cloud(path) -> PointCloud:
    path = Path(path)
    raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    meta = json.loads(path.with_suffix(".json").read_text())
    pts = raw[:, 0::2] + 1j * raw[:, 1::2]
    return PointCloud(pts, meta["provenance"], meta.get("seed"))
