import math

import numpy as np
import pytest

from discrete_pfaffian.kernels import (
    assemble_matrix_kernel,
    build_M,
    build_rank_factorization,
    build_S_closed,
    build_S_inversion,
    build_S_rank,
    closed_form_vectors,
    commutator_check,
    dminus_matrix_check,
    orthogonal_kernel,
    prepare,
    projection_identities,
    resolvent_identity,
    route_agreement,
    symplectic_kernel,
)
from discrete_pfaffian.pfaffian import generating_functional, pfaffian
from discrete_pfaffian.weights import Charlier, GenericRational, Meixner, make_weight


@pytest.fixture(scope="module")
def charlier2():
    return prepare(make_weight(Charlier(1.0)), 2, L=60)


@pytest.fixture(scope="module")
def meixner2():
    return prepare(make_weight(Meixner(2.0, 0.5)), 2)


def test_M_matrices():
    s = prepare(make_weight(Charlier(1.0)), 1, L=40)
    M4 = build_M("SN4", s)
    assert M4.matrix.shape == (2, 2)
    assert M4.antisymmetry < 1e-12
    assert abs(pfaffian(M4.matrix)) > 1e-3
    # telescoped form sum_y (p_j(y) p_i(y+1) - p_j(y+1) p_i(y)) w(y) gives the same matrix
    B = s.phi[:2]
    r = np.sqrt(np.exp(s.weight.log_table(s.L)[:-1] - s.weight.log_table(s.L)[1:]))
    tele = np.array([[np.sum(B[i, :-1] * B[j, 1:] * r - B[i, 1:] * B[j, :-1] * r) for j in range(2)]
                     for i in range(2)])
    assert np.max(np.abs(tele - M4.matrix)) < 1e-12
    assert build_M("SN1", s).antisymmetry < 1e-12


@pytest.mark.parametrize("flavor", ["SN4", "SN1"])
def test_projection_identities(charlier2, meixner2, flavor):
    for s in (charlier2, meixner2):
        rep = projection_identities(flavor, build_S_inversion(flavor, s), s)
        assert rep.reproduce < 1e-8
        assert rep.annihilate < 1e-10
        assert rep.skew < 1e-10


def test_resolvent(charlier2):
    for flavor in ("SN4", "SN1"):
        assert resolvent_identity(flavor, build_S_inversion(flavor, charlier2), charlier2) < 1e-7


def test_rank_route(charlier2, meixner2):
    for s in (charlier2, meixner2):
        fac = build_rank_factorization(s)
        assert fac.n == 1
        assert fac.sv_ratio < 1e-8
        assert abs(fac.T[0, 0] - 1) < 1e-8
        for flavor in ("SN4", "SN1"):
            d = np.abs(build_S_rank(flavor, s, fac).matrix - build_S_inversion(flavor, s).matrix)[s.window, s.window]
            assert np.max(d) < 1e-7


def test_generic_two_pole_weight():
    s = prepare(make_weight(GenericRational((0.0, 0.5, 1.0), (0.3, 0.2))), 1)
    fac = build_rank_factorization(s)
    assert fac.n == 2
    assert np.max(fac.angles) < 1e-6
    d = np.abs(build_S_rank("SN4", s, fac).matrix - build_S_inversion("SN4", s).matrix)[s.window, s.window]
    assert np.max(d) < 1e-7


def test_closed_form_vectors(meixner2):
    s = meixner2
    psi1, psi2, _ = closed_form_vectors(s)
    N, b, c = 2, 2.0, 0.5
    x = np.arange(s.L + 1)
    ref = (math.sqrt(2 * N * c) * s.phi[4] - math.sqrt(2 * N + b - 1) * s.phi[3]) / (x + b)
    assert np.max(np.abs(psi1 - ref)) < 1e-15
    I = np.eye(s.L + 1)
    w = s.window
    assert np.max(np.abs(((I - s.KN) @ psi1)[w])) < 1e-8
    assert np.max(np.abs((s.KN @ psi2)[w])) < 1e-8
    assert np.max(np.abs(((I - s.KN) @ s.eps @ psi1)[w])) < 1e-8


def test_closed_form_resolution(charlier2, meixner2):
    for flavor in ("SN4", "SN1"):
        _, rep = build_S_closed(flavor, meixner2)
        assert "confirmed" in rep.record
        assert rep.resolved_residual < 1e-7
        _, rep = build_S_closed(flavor, charlier2)
        assert "rejected" in rep.record
        assert rep.resolved_scalar == pytest.approx(-2.0, rel=1e-12)  # -sqrt(2N/a)
        assert rep.nominal_residual > 1e-2
    agree = route_agreement("SN4", charlier2)
    assert agree["rank"] < 1e-7 and agree["closed"] < 1e-7


def test_block_layouts(charlier2):
    s = charlier2
    S4 = build_S_inversion("SN4", s)
    K4 = assemble_matrix_kernel("K_N4", S4, s)
    assert np.array_equal(K4.blocks[1][0], S4.matrix)
    S1 = build_S_inversion("SN1", s)
    K1 = assemble_matrix_kernel("K_N1", S1, s)
    E = s.eps
    assert np.max(np.abs(K1.blocks[1][0] - (E @ S1.matrix @ E - E))) < 1e-12


def test_nabla_form_same_generating_functional():
    w = make_weight(Charlier(1.0))
    s = prepare(w, 2, L=50)
    K = symplectic_kernel(w, 2, setup=s)
    Kn = symplectic_kernel(w, 2, setup=s, nabla=True)
    rng = np.random.default_rng(3)
    for _ in range(10):
        eta = np.zeros(51)
        sup = rng.choice(20, size=5, replace=False)
        eta[sup] = rng.uniform(-0.9, 0.9, size=5)
        assert abs(generating_functional(K, eta) - generating_functional(Kn, eta)) < 1e-9


def test_commutators(charlier2, meixner2):
    for s in (charlier2, meixner2):
        rep = commutator_check(s)
        assert rep.rank == 1
        assert rep.sv_ratio < 1e-8
        assert rep.closed_residual < 1e-8


def test_dminus_matrices(charlier2):
    s = prepare(make_weight(Charlier(2.5)), 2, L=60)
    rep = dminus_matrix_check(s)
    assert rep.derived < 1e-9
    assert rep.printed > 1e-3
    assert rep.plus_relations < 1e-9
    assert rep.determinant < 1e-9
    rep = dminus_matrix_check(prepare(make_weight(Meixner(3.5, 0.3)), 2))
    assert rep.derived < 1e-9 and rep.printed > 1e-3 and rep.determinant < 1e-9


def test_orthogonal_kernel_smoke():
    w = make_weight(Meixner(2.0, 0.3))
    K = orthogonal_kernel(w, 1, L=40)
    assert K.flavor == "K_N1" and K.size == 41
