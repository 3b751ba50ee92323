"""Theta functions with rational characteristics and elliptic normal curves.

Conventions::

    theta(tau, z)        = sum_m exp(2 pi i (m^2 tau / 2 + m z))
    theta[a, b](tau, z)  = sum_m exp(2 pi i ((m+a)^2 tau / 2 + (m+a)(z+b)))

Series are summed over a window of 2M+1 consecutive indices centred on the
dominant term, which keeps the evaluation accurate for z far from the real axis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .ellcurve import CurvePoint
from .heis import MonomialMatrix, sigma, tau as tau_gen


class ThetaError(ArithmeticError):
    """Numerical failure in theta evaluation (truncation, base point, zero denominator)."""


@dataclass(frozen=True)
class ThetaParams:
    tau: complex
    truncation_eps: float = 1e-16
    max_terms: int = 400

    def __post_init__(self):
        t = complex(self.tau)
        if not t.imag > 0:
            raise ValueError(f"Im tau must be positive, got {t!r}")
        object.__setattr__(self, "tau", t)

    @property
    def n_terms(self) -> int:
        """Half-width M of the summation window (Gaussian tail bound)."""
        m = int(np.ceil(np.sqrt(abs(np.log(self.truncation_eps)) / (np.pi * self.tau.imag)))) + 2
        if 2 * m + 1 > self.max_terms:
            raise ThetaError(f"truncation needs {2 * m + 1} terms, cap is {self.max_terms}")
        return m

    def with_tau(self, tau: complex) -> "ThetaParams":
        return replace(self, tau=tau)


def _theta_sum(p: ThetaParams, a: float, b: float, z, *, with_envelope: bool = False):
    z = np.asarray(z, dtype=complex)
    tau = p.tau
    M = p.n_terms
    # exponent real part is -pi Im(tau) (m+a)^2 - 2 pi (m+a) Im z, maximal near m+a = -Im z / Im tau
    c = np.round(-z.imag / tau.imag - a)
    m = c[..., None] + np.arange(-M, M + 1)
    ma = m + a
    terms = np.exp(2j * np.pi * (0.5 * ma * ma * tau + ma * (z[..., None] + b)))
    val = terms.sum(-1)
    if with_envelope:
        return val, np.abs(terms).sum(-1)
    return val


def eval_theta(p: ThetaParams, z):
    """Riemann theta function; accepts scalar or array z."""
    out = _theta_sum(p, 0.0, 0.0, z)
    return out[()] if out.ndim == 0 else out


def eval_theta_char(p: ThetaParams, a, b, z):
    """Theta function with characteristic (a, b)."""
    out = _theta_sum(p, float(a), float(b), z)
    return out[()] if out.ndim == 0 else out


def theta_quasi_period_factor(tau: complex, b, z):
    """Factor c with theta[0,b](tau, z + tau) = c * theta[0,b](tau, z)."""
    return np.exp(-1j * np.pi * tau - 2j * np.pi * (np.asarray(z) + float(b)))


def projective_distance(u, v) -> float | np.ndarray:
    """1 - |<u,v>| / (|u||v|), row-wise for 2-d input."""
    u = np.asarray(u)
    v = np.asarray(v)
    ip = np.abs(np.sum(np.conj(u) * v, axis=-1))
    nrm = np.linalg.norm(u, axis=-1) * np.linalg.norm(v, axis=-1)
    return 1.0 - ip / nrm


def max_modulus_normalize(X: np.ndarray, floor: float = 1e-13) -> np.ndarray:
    """Scale each row so that its largest-modulus coordinate equals 1."""
    X = np.atleast_2d(X)
    idx = np.argmax(np.abs(X), axis=1)
    piv = X[np.arange(X.shape[0]), idx]
    if np.any(np.abs(piv) < floor):
        raise ThetaError("all coordinates vanish at a sample point")
    return X / piv[:, None]


# --------------------------------------------------------------------------
# spaces of theta functions on a torus

class ThetaSpace:
    """Sections of a degree-d line bundle on C/(Z + Z tau) in a theta basis.

    Basis: s_k(y) = theta[k/d, b](d tau, d (y - shift)), k = 0..d-1, with
    ``shift = s0 + s1*tau`` given by its real lattice coordinates.  All s_k
    share the factors of automorphy e_1 = 1 and
    e_tau(y) = exp(2 pi i L) exp(-2 pi i d y), L = (d s0 - b) + (d s1 - d/2) tau.
    """

    def __init__(self, d: int, tau: complex, shift=(0, 0), b=0, params: ThetaParams | None = None):
        if d < 1:
            raise ValueError("degree must be positive")
        self.d = int(d)
        self.tau = complex(tau)
        self.shift = (Fraction(shift[0]), Fraction(shift[1]))
        self.b = Fraction(b)
        base = params or ThetaParams(self.tau)
        self.params = base.with_tau(self.d * self.tau)

    def __repr__(self):
        return f"ThetaSpace(d={self.d}, tau={self.tau}, shift={self.shift}, b={self.b})"

    @property
    def dim(self) -> int:
        return self.d

    @property
    def shift_complex(self) -> complex:
        return float(self.shift[0]) + float(self.shift[1]) * self.tau

    @property
    def automorphy_constant(self) -> tuple[Fraction, Fraction]:
        """(c0, c1) with L = c0 + c1 tau."""
        d = self.d
        return d * self.shift[0] - self.b, d * self.shift[1] - Fraction(d, 2)

    def basis(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=complex)
        w = self.d * (y - self.shift_complex)
        return np.stack([_theta_sum(self.params, k / self.d, float(self.b), w)
                         for k in range(self.d)], -1)

    def multiplier(self, eps: int, c: tuple) -> int:
        """Integer k such that y -> exp(2 pi i k y) s(eps*y + c) preserves the space.

        ``c = (alpha, beta)`` are lattice coordinates of the translation part.
        """
        alpha, beta = Fraction(c[0]), Fraction(c[1])
        d = self.d
        if eps == 1:
            ok, k = (d * alpha).denominator == 1, d * beta
        elif eps == -1:
            c0, c1 = self.automorphy_constant
            ok, k = (d * alpha - 2 * c0).denominator == 1, 2 * c1 - d * beta + d
        else:
            raise ValueError("eps must be +1 or -1")
        if not ok or k.denominator != 1:
            raise ValueError(f"the map y -> {eps}y + ({alpha} + {beta} tau) does not preserve this bundle")
        return int(k)

    def transformed(self, eps: int, c: tuple, y) -> np.ndarray:
        k = self.multiplier(eps, c)
        y = np.asarray(y, dtype=complex)
        cc = float(c[0]) + float(c[1]) * self.tau
        return np.exp(2j * np.pi * k * y)[..., None] * self.basis(eps * y + cc)

    def sample_points(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.random(count) + rng.random(count) * self.tau

    def action_matrix(self, eps: int, c: tuple, grid) -> tuple[np.ndarray, float]:
        """Matrix A with transformed(y) = basis(y) @ A, and the relative lstsq residual."""
        B = self.basis(grid)
        T = self.transformed(eps, c, grid)
        A, *_ = np.linalg.lstsq(B, T, rcond=None)
        res = np.linalg.norm(B @ A - T) / np.linalg.norm(T)
        return A, float(res)

    def section_through(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients of the section vanishing at ``points`` (complex), plus singular values.

        For d - 1 points in general position the answer is unique up to scale.
        """
        V = self.basis(np.asarray(points, dtype=complex))
        _, s, vh = np.linalg.svd(V)
        return vh[-1].conj(), s


# --------------------------------------------------------------------------
# elliptic normal curves

@dataclass(frozen=True)
class EmbeddedCurve:
    """Degree-n elliptic normal curve with coordinates x_k(z) = theta[k/n, 0](n tau, n z)."""

    n: int
    params: ThetaParams

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("an elliptic normal curve needs n >= 3")

    @property
    def tau(self) -> complex:
        return self.params.tau

    @property
    def space(self) -> ThetaSpace:
        return ThetaSpace(self.n, self.tau, params=self.params)

    def coordinates(self, z) -> np.ndarray:
        """Raw (unnormalised) coordinate vectors, shape (..., n)."""
        return self.space.basis(z)

    def __call__(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return max_modulus_normalize(self.coordinates(z))

    def point_of(self, p: CurvePoint) -> complex:
        if abs(p.curve.tau - self.tau) > 1e-15:
            raise ValueError("point lies on a different curve")
        return p.to_complex()

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Random parameters z in the fundamental parallelogram."""
        return self.space.sample_points(count, rng)


def embed_curve(n: int, p: ThetaParams, z) -> np.ndarray:
    """Projective image of z (max-modulus normalised); a single z gives a 1-d vector."""
    if n < 5:
        raise ValueError("n >= 5 required")
    out = EmbeddedCurve(n, p)(z)
    return out[0] if np.ndim(z) == 0 else out


def curve_translation_action(n: int, a: int, b: int) -> MonomialMatrix:
    """Monomial matrix realising z -> z + a/n + b tau/n on the embedded curve.

    With x_k = theta[k/n, 0](n tau, n z), adding 1/n multiplies x_k by zeta^k
    (the diagonal generator) and adding tau/n sends x_k to a multiple of
    x_{k+1}, i.e. acts by sigma^-1.
    """
    return tau_gen(n) ** a @ sigma(n) ** (-b)


# --------------------------------------------------------------------------
# the theta identity behind the bielliptic family

def verify_smoothing_identity(p: ThetaParams, z: complex, rng: np.random.Generator | None = None,
                              near_zero: float = 1e-6, max_resamples: int = 10) -> float:
    """Relative residual of theta(-z-1/2)/theta(-z) = -theta(-z-1/2-tau)/theta(-z-tau).

    If a denominator is close to a zero of theta, z is jittered (at most
    ``max_resamples`` times) before giving up.
    """
    rng = rng or np.random.default_rng(0)
    tau = p.tau
    z = complex(z)
    for _ in range(max_resamples + 1):
        den = np.array([-z, -z - tau])
        vals, env = _theta_sum(p, 0.0, 0.0, den, with_envelope=True)
        if np.all(np.abs(vals) > near_zero * env):
            num = _theta_sum(p, 0.0, 0.0, np.array([-z - 0.5, -z - 0.5 - tau]))
            lhs = num[0] / vals[0]
            rhs = -num[1] / vals[1]
            return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
        z = z + 1e-3 * complex(rng.normal(), rng.normal())
    raise ThetaError("denominator stays near a zero of theta after resampling")
