import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ellscroll.heis import commutator_sign, translation_lift
from ellscroll.ellcurve import EllipticCurve
from ellscroll.scrollgeo import evaluation_matrix
from ellscroll.theta import (
    EmbeddedCurve,
    ThetaError,
    ThetaParams,
    ThetaSpace,
    curve_translation_action,
    embed_curve,
    eval_theta,
    eval_theta_char,
    projective_distance,
    theta_quasi_period_factor,
    verify_smoothing_identity,
)

taus = st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.5, 2.0))
zs = st.builds(complex, st.floats(-1, 1), st.floats(-1, 1))


def jacobi_oracle(tau, z):
    """theta(tau, z) = theta_3(pi z, q) with nome q = exp(pi i tau), in 30 digits."""
    with mpmath.workdps(30):
        q = mpmath.exp(1j * mpmath.pi * mpmath.mpc(tau))
        return complex(mpmath.jtheta(3, mpmath.pi * mpmath.mpc(z), q))


def char_oracle(tau, a, b, z, terms=60):
    with mpmath.workdps(30):
        tau, z = mpmath.mpc(tau), mpmath.mpc(z)
        s = mpmath.mpc(0)
        for m in range(-terms, terms + 1):
            ma = m + mpmath.mpf(a)
            s += mpmath.exp(2j * mpmath.pi * (ma * ma * tau / 2 + ma * (z + b)))
        return complex(s)


@settings(max_examples=40, deadline=None)
@given(taus, zs)
def test_theta_against_jacobi(tau, z):
    ref = jacobi_oracle(tau, z)
    assert abs(eval_theta(ThetaParams(tau), z) - ref) < 1e-12 * max(1, abs(ref))


@settings(max_examples=30, deadline=None)
@given(taus, zs, st.sampled_from([0, 0.25, 0.5, 1 / 3]), st.sampled_from([0, 0.5, 0.125]))
def test_theta_char_against_direct_sum(tau, z, a, b):
    ref = char_oracle(tau, a, b, z)
    assert abs(eval_theta_char(ThetaParams(tau), a, b, z) - ref) < 1e-12 * max(1, abs(ref))


def test_zeros():
    p = ThetaParams(1j)
    assert abs(eval_theta(p, (1 + 1j) / 2)) < 1e-10
    assert abs(eval_theta_char(p, 0.5, 0.5, 0)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(taus, zs, st.sampled_from([0, 0.5, 0.25]))
def test_periodicity(tau, z, b):
    p = ThetaParams(tau)
    v = eval_theta_char(p, 0, b, z)
    assert abs(eval_theta(p, z + 1) - eval_theta(p, z)) < 1e-12 * max(1, abs(v))
    assert abs(eval_theta(p, -z) - eval_theta(p, z)) < 1e-12 * max(1, abs(eval_theta(p, z)))
    shifted = eval_theta_char(p, 0, b, z + tau)
    assert abs(shifted - theta_quasi_period_factor(tau, b, z) * v) < 1e-10 * max(1, abs(shifted))


def test_truncation_stable():
    for tau in (0.5j, 0.3 + 1j, 2j):
        p = ThetaParams(tau)
        q = ThetaParams(tau, max_terms=2000, truncation_eps=1e-300)
        for z in (0.1, 0.3 + 0.2j, -0.4 + 0.7j):
            assert abs(eval_theta(p, z) - eval_theta(q, z)) < 1e-13 * max(1, abs(eval_theta(q, z)))


def test_invalid_tau():
    with pytest.raises(ValueError):
        ThetaParams(1 - 0.1j)
    with pytest.raises(ThetaError):
        ThetaParams(1e-4j, max_terms=50).n_terms


@pytest.mark.parametrize("n", [5, 6, 8])
def test_embedding_equivariance(n):
    rng = np.random.default_rng(n)
    C = EmbeddedCurve(n, ThetaParams(0.15 + 0.9j))
    z = C.sample(30, rng)
    X = C(z)
    for a, b in [(1, 0), (0, 1), (3, 2)]:
        M = curve_translation_action(n, a, b).to_array()
        Y = C(z + a / n + b * C.tau / n)
        assert projective_distance(Y, X @ M.T).max() < 1e-9
    assert projective_distance(C(z + 1), X).max() < 1e-12
    assert projective_distance(C(z + C.tau), X).max() < 1e-12


def test_embed_curve_shape():
    v = embed_curve(5, ThetaParams(1j), 0.3 + 0.1j)
    assert v.shape == (5,) and abs(np.abs(v).max() - 1) < 1e-15
    with pytest.raises(ValueError):
        embed_curve(4, ThetaParams(1j), 0.1)


def _rank(A, tol=1e-8):
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


def test_linear_normality_and_quadrics():
    rng = np.random.default_rng(1)
    for n in (5, 6, 7):
        C = EmbeddedCurve(n, ThetaParams(0.1 + 1j))
        X = C(C.sample(200, rng))
        assert _rank(X) == n
    C = EmbeddedCurve(5, ThetaParams(0.1 + 1j))
    X = C(C.sample(60, rng))
    assert 15 - _rank(evaluation_matrix(X, 2)) == 5


@pytest.mark.parametrize("n", [6, 8, 10, 12])
def test_curve_commutator_matches_exact(n):
    rng = np.random.default_rng(0)
    E = EllipticCurve(0.1 + 1j)
    p, q, _ = E.two_torsion()
    space = EmbeddedCurve(n, ThetaParams(E.tau)).space
    grid = space.sample_points(6 * n, rng)
    a1, r1 = space.action_matrix(1, (p.a, p.b), grid)
    a2, r2 = space.action_matrix(1, (q.a, q.b), grid)
    assert max(r1, r2) < 1e-10
    C = a1 @ a2 @ np.linalg.inv(a1) @ np.linalg.inv(a2)
    sign = commutator_sign(translation_lift(n, p), translation_lift(n, q))
    assert np.abs(C - sign * np.eye(n)).max() < 1e-8


def test_theta_space_multipliers():
    F = ThetaSpace(4, 1.5j, shift=(0, 0.125))
    assert F.multiplier(1, (0, 0.5)) == 2
    assert F.multiplier(-1, (0, 0)) == 1
    with pytest.raises(ValueError):
        F.multiplier(1, (0.125, 0))
    rng = np.random.default_rng(0)
    for eps, c in [(1, (0, 0.5)), (-1, (0, 0)), (1, (0.25, 0.75))]:
        _, res = F.action_matrix(eps, c, F.sample_points(40, rng))
        assert res < 1e-10


def test_degree_four_section_zeros():
    tau = 1.3j
    F = ThetaSpace(4, tau, shift=(0, 0.125))
    v, s = F.section_through(np.array([0, tau / 2, tau / 4]))
    row = F.basis(np.array([3 * tau / 4]))[0]
    assert abs(row @ v) / np.linalg.norm(row) < 1e-9


def test_smoothing_identity_examples():
    assert verify_smoothing_identity(ThetaParams(1j), 0.3 + 0.2j) < 1e-9
    assert verify_smoothing_identity(ThetaParams(2j), 0.1) < 1e-9
    a = verify_smoothing_identity(ThetaParams(1j), 0.3 + 0.2j)
    b = verify_smoothing_identity(ThetaParams(1j), 1.3 + 0.2j)
    assert abs(a - b) < 1e-12


def test_smoothing_identity_near_zero_resamples():
    tau = 1j
    # -z sits at the zero (1 + tau)/2 of theta, so z must be jittered
    z = -(1 + tau) / 2
    assert verify_smoothing_identity(ThetaParams(tau), z) < 1e-9


def test_smoothing_identity_random():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2))
        z = complex(rng.uniform(0, 1), rng.uniform(0, 1)) * (1 if rng.random() < 0.5 else tau)
        worst = max(worst, verify_smoothing_identity(ThetaParams(tau), z))
    assert worst < 1e-9


def test_projective_distance_scale_invariant():
    u = np.array([1, 2j, -0.5])
    assert projective_distance(u, cmath.exp(0.7j) * 3 * u) < 1e-15
    assert projective_distance(u, np.array([0, 0, 1.0])) > 0.1
