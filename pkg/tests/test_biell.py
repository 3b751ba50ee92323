import numpy as np
import pytest

from ellscroll.biell import (
    FamilyConfig,
    FamilyError,
    averaging_projector,
    build_sections,
    degeneration_experiment,
    degree_window,
    embed_bielliptic,
    invariance_residual,
    invariant_sections,
    projector_rank,
    tau_from_t,
)
from ellscroll.ellcurve import EllipticCurve
from ellscroll.scrollgeo import (
    build_union,
    default_sample_count,
    estimate_degree,
    hilbert_function,
    interpolate_ideal,
)

E = EllipticCurve(0.1 + 1j)
P1, P2, P3 = E.two_torsion()


def test_tau_from_t():
    t = 0.2
    tau = tau_from_t(t)
    assert abs(np.exp(2j * np.pi * tau / 4) - t) < 1e-14
    assert tau_from_t(0.05).imag > tau_from_t(0.1).imag > tau.imag > 0


def test_config_validation():
    with pytest.raises(FamilyError):
        FamilyConfig(7)
    with pytest.raises(FamilyError):
        FamilyConfig(8, pi=P1, pj=P1)
    with pytest.raises(FamilyError):
        FamilyConfig(8, t_values=(0.9,))
    cfg = FamilyConfig(6)
    assert cfg.twist and not FamilyConfig(8).twist
    assert cfg.g1_translation == P3 and cfg.g2_translation == P2


@pytest.mark.parametrize("n", [6, 8])
def test_section_space(n):
    s = build_sections(FamilyConfig(n), 0.2)
    assert s.dim == 4 * n
    assert s.fit_residual < 1e-8 and s.square_deviation < 1e-8
    assert np.abs(s.g1 @ s.g1 - np.eye(4 * n)).max() < 1e-8
    assert s.commutes
    assert s.l1_zero_residual < 1e-9


def test_negative_control_n6():
    s = build_sections(FamilyConfig(6), 0.2, twist=False)
    assert s.anticommutes and not s.commutes
    P = averaging_projector(s)
    rank, _ = projector_rank(P)
    assert rank != 6
    assert np.abs(P @ P - P).max() > 0.1
    with pytest.raises(FamilyError):
        invariant_sections(s)


def test_twist_breaks_n8():
    assert build_sections(FamilyConfig(8), 0.1, twist=True).anticommutes


@pytest.mark.parametrize("n", [6, 8])
@pytest.mark.parametrize("tau_e,t", [(0.1 + 1j, 0.2), (-0.3 + 0.8j, 0.1 * np.exp(1j)), (0.25 + 1.4j, 0.05)])
def test_invariant_dimension(n, tau_e, t):
    cfg = FamilyConfig(n, tau_e=tau_e, t_values=(t,))
    inv = invariant_sections(build_sections(cfg, t))
    assert inv.dim == n and inv.idempotency_error < 1e-10
    assert invariance_residual(inv, cfg) < 1e-9


@pytest.mark.parametrize("n", [6, 8])
def test_embedded_surface(n):
    cfg = FamilyConfig(n)
    w = degree_window(n)
    cloud = embed_bielliptic(cfg, 0.2, default_sample_count(n, w[-1] + 1), seed=1)
    assert hilbert_function(cloud, 1) == n
    assert estimate_degree(cloud, w) == 2 * n


def test_degeneration_n8():
    rep = degeneration_experiment(FamilyConfig(8), with_degree=False)
    assert (rep.z0_h1, rep.z0_h2, rep.z0_forms) == (8, 32, 4)
    assert rep.hilbert_constant and rep.residual_monotone
    # linear convergence: each halving roughly halves the residual
    assert all(1.5 < q < 2.5 for q in rep.residual_ratios)


def test_degeneration_rejects_increasing_t():
    with pytest.raises(FamilyError):
        degeneration_experiment(FamilyConfig(8), [0.05, 0.1])


def test_action_with_single_translation_misses_union():
    # translating E by P_i alone in g1 (with g2 by P_j) degenerates to S(E, P_j) u S(E, P_k)
    n = 8
    stated = FamilyConfig(n, pi=P3, pj=P2)
    assert stated.g1_translation == P1 and stated.g2_translation == P2
    curve = stated.embedded_curve
    forms_ij = interpolate_ideal(build_union(curve, P1, P2, default_sample_count(n, 2), seed=0), 2)
    forms_jk = interpolate_ideal(build_union(curve, P3, P2, default_sample_count(n, 2), seed=0), 2)
    res_ij, res_jk = [], []
    for t in (0.1, 0.05):
        cloud = embed_bielliptic(stated, t, 300, seed=2)
        res_ij.append(forms_ij.residual(cloud.points))
        res_jk.append(forms_jk.residual(cloud.points))
    assert res_jk[1] < res_jk[0] and res_ij[1] > 0.2
