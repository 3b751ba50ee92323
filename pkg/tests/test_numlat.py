from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from ellscroll.ellcurve import DivisorOnCurve, EllipticCurve
from ellscroll.numlat import (
    BiellipticLattice,
    BundleChernData,
    RuledModel,
    adjunction_genus,
    bielliptic_numbers,
    chi_bundle,
    derive_normal_chern,
    expected_hilbert_dimension,
    hilbert_dimension_crosscheck,
    intersect,
    lattice_row,
    line_bundle,
    normal_bundle_sequence,
    riemann_roch_line,
    twist_bundle,
    verify_formula_suite,
)

ODD = RuledModel.for_degree(5)
EVEN = RuledModel.for_degree(6)


def test_intersection_examples():
    assert intersect(ODD.hyperplane, ODD.hyperplane, ODD) == 5
    assert intersect(EVEN.hyperplane, EVEN.hyperplane, EVEN) == 6
    assert intersect(ODD.canonical, ODD.canonical, ODD) == 0


def test_riemann_roch_examples():
    assert riemann_roch_line(ODD.hyperplane, ODD) == 5
    assert riemann_roch_line(ODD.pic(0), ODD) == 0
    m8 = RuledModel.for_degree(8)
    assert riemann_roch_line(m8.hyperplane, m8) == 8


@pytest.mark.parametrize("m", [ODD, EVEN], ids=["odd", "even"])
def test_adjunction(m):
    assert adjunction_genus(m.section, m) == 1
    assert adjunction_genus(m.fibre(), m) == 0
    assert adjunction_genus(m.bisection, m) == 1


def test_bad_models():
    E = EllipticCurve(1j)
    with pytest.raises(ValueError):
        RuledModel("odd", 6, E, E.two_torsion()[0])
    with pytest.raises(ValueError):
        RuledModel("even", 8, E, E.origin)
    with pytest.raises(ValueError):
        RuledModel.for_degree(4)


def closed_form_normal(n):
    """Chern data of N and Q worked out by hand from the two sequences."""
    c2_n = n * n * (n - 1) // 2 - n * n
    c2_q = n * n * (n - 1) // 2 - 2 * n * n
    return c2_n, c2_q


@pytest.mark.parametrize("n", range(5, 17))
def test_normal_bundle_chern_data(n):
    m = RuledModel.for_degree(n)
    seq = normal_bundle_sequence(n, m)
    H, K = m.hyperplane.numerical, m.canonical.numerical
    c2_n, c2_q = closed_form_normal(n)
    assert seq.normal.rank == n - 3 and seq.quotient.rank == n - 4
    assert seq.normal.c1 == (n * H[0] + K[0], n * H[1] + K[1])
    assert seq.quotient.c1 == (n * H[0] + 2 * K[0], n * H[1] + 2 * K[1])
    assert (seq.normal.c2, seq.quotient.c2) == (c2_n, c2_q)
    assert seq.whitney_ok
    assert derive_normal_chern(n, m) == seq.quotient


def test_chi_examples():
    assert chi_bundle(derive_normal_chern(5, ODD), ODD) == 25
    m9 = RuledModel.for_degree(9)
    assert chi_bundle(derive_normal_chern(9, m9), m9) == 81
    anti = line_bundle((-ODD.canonical.numerical[0], -ODD.canonical.numerical[1]))
    assert chi_bundle(anti, ODD) == 0
    m7 = RuledModel.for_degree(7)
    q = derive_normal_chern(7, m7)
    assert chi_bundle(twist_bundle(q, (-m7.bisection).numerical, m7), m7) == 0


def test_chi_line_bundles_agree():
    # rank-one HRR must reproduce Riemann-Roch for line bundles
    for m in (ODD, EVEN):
        for a in range(-3, 4):
            for b in range(-3, 4):
                d = m.pic(a, b * DivisorOnCurve.point(m.base.origin))
                assert chi_bundle(line_bundle(d.numerical), m) == riemann_roch_line(d, m)


def test_twist_matches_tensor_with_line_sum():
    # twisting a direct sum of line bundles twists each summand
    m = ODD
    a, b, L = (1, 0), (0, 2), (1, -1)
    s = BundleChernData(2, (1, 2), m.form(a, b))
    t = twist_bundle(s, L, m)
    a2 = (a[0] + L[0], a[1] + L[1])
    b2 = (b[0] + L[0], b[1] + L[1])
    assert t.c1 == (a2[0] + b2[0], a2[1] + b2[1]) and t.c2 == m.form(a2, b2)


@pytest.mark.parametrize("n", list(range(5, 17)))
def test_lattice_rows(n):
    assert lattice_row(n).passed


def test_formula_suite_named_checks():
    rep = verify_formula_suite(ODD)
    names = {c.name for c in rep.checks}
    assert {"section restriction", "bisection class", "bisection restriction",
            "canonical class odd", "bisection plus canonical"} <= names and rep.passed
    rep = verify_formula_suite(EVEN)
    assert {"canonical class even", "bisection is 2F0", "bisection via canonical even"} <= {c.name for c in rep.checks} and rep.passed


def test_formula_suite_detects_wrong_canonical():
    # a model whose twist is swapped after the fact must fail the even-model identities
    m = RuledModel.for_degree(8, twist_index=0)
    wrong = m.pic(-2, DivisorOnCurve.point(m.base.origin))
    assert not wrong.isomorphic(m.canonical)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.5, 2.5), st.integers(0, 2), st.sampled_from(range(5, 17)))
def test_formula_suite_random_moduli(re, im, k, n):
    m = RuledModel.for_degree(n, EllipticCurve(complex(re, im)), k)
    assert verify_formula_suite(m).passed


def test_bielliptic_numbers():
    assert bielliptic_numbers(8).as_tuple() == (16, 8, 4, 8)
    assert bielliptic_numbers(6).as_tuple() == (12, 6, 4, 6)
    assert bielliptic_numbers(12).as_tuple() == (24, 12, 4, 12)
    assert not bielliptic_numbers(6).b_integral and bielliptic_numbers(8).b_integral
    lat = BiellipticLattice(10)
    assert lat.hyperplane[1] == Fr(5, 2) and lat.in_neron_severi
    with pytest.raises(ValueError):
        BiellipticLattice(7)


def test_expected_dimensions():
    assert [expected_hilbert_dimension(n) for n in (5, 6, 7)] == [25, 37, 49]
    for n in range(5, 17):
        exp, cross = hilbert_dimension_crosscheck(n)
        assert exp == cross
