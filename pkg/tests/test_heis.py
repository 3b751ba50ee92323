from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellscroll.ellcurve import EllipticCurve
from ellscroll.heis import (
    DimensionMismatchError,
    GroupActionSpec,
    MonomialMatrix,
    NotScalarError,
    NotTorsionError,
    commutator,
    commutator_sign,
    compose,
    descends,
    identity,
    inverse,
    sigma,
    tau,
    translation_lift,
)

E = EllipticCurve(0.1 + 1j)


def monomials(n):
    m = 2 * n
    return st.builds(lambda s, e, c: MonomialMatrix(n, s, tuple(e), c),
                     st.integers(0, n - 1), st.lists(st.integers(0, m - 1), min_size=n, max_size=n),
                     st.integers(0, m - 1))


def test_heisenberg_relation():
    for n in (5, 6, 8):
        lhs = sigma(n) @ tau(n)
        rhs = (tau(n) @ sigma(n)).times_root(-2)  # zeta^-1 = w^-2
        assert lhs == rhs
        assert sigma(n) @ inverse(sigma(n)) == identity(n)


def test_square_of_half_shift():
    assert (sigma(6) ** 3 @ sigma(6) ** 3).is_scalar


def test_translation_lifts():
    h = Fr(1, 2)
    assert translation_lift(8, E.point(h, 0)) == sigma(8) ** 4
    assert translation_lift(8, E.point(0, h)) == tau(8) ** 4
    assert translation_lift(7, E.origin) == identity(7)
    with pytest.raises(NotTorsionError):
        translation_lift(8, E.point(Fr(1, 3), 0))


@pytest.mark.parametrize("n", range(6, 17, 2))
def test_two_torsion_commutator(n):
    lifts = [translation_lift(n, p) for p in E.two_torsion()]
    for i in range(3):
        assert (lifts[i] @ lifts[i]).is_scalar
        for j in range(3):
            if i != j:
                assert commutator_sign(lifts[i], lifts[j]) == (-1) ** (n // 2)
    assert descends(n, *E.two_torsion()[:2]) == (n % 4 == 0)


def test_commutator_of_generators():
    n = 7
    # sigma tau sigma^-1 tau^-1 = zeta^-1
    assert commutator(sigma(n), tau(n)) == 2 * n - 2


def test_non_scalar_commutator():
    a = MonomialMatrix(4, 1, (0, 0, 0, 0))
    b = MonomialMatrix(4, 0, (0, 1, 0, 0))
    with pytest.raises(NotScalarError):
        commutator(a, b)


def test_mismatch():
    with pytest.raises(DimensionMismatchError):
        compose(sigma(5), sigma(6))
    with pytest.raises(ValueError):
        GroupActionSpec.from_points(8, E.two_torsion()[0], E.two_torsion()[0])


@given(st.data())
def test_exact_matches_numeric(data):
    n = data.draw(st.sampled_from([5, 6, 8]))
    a, b, c = (data.draw(monomials(n)) for _ in range(3))
    assert np.allclose((a @ b).to_array(), a.to_array() @ b.to_array(), atol=1e-12)
    assert (a @ b) @ c == a @ (b @ c)
    assert np.allclose(inverse(a).to_array() @ a.to_array(), np.eye(n), atol=1e-12)


@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
def test_weil_pairing_form(a, b, c, d):
    n = 16
    g = sigma(n) ** a @ tau(n) ** b
    h = sigma(n) ** c @ tau(n) ** d
    # [s^a t^b, s^c t^d] = zeta^(bc - ad), zeta = w^2
    assert commutator(g, h) == (2 * (b * c - a * d)) % (2 * n)
