import math

import numpy as np
import pytest

from discrete_pfaffian.limits import (
    LaguerreReference,
    LimitSchedule,
    MeixnerScaled,
    charlier_limit_check,
    is_decreasing,
    laguerre_limit_check,
    laguerre_row,
    psi1_integral,
)
from discrete_pfaffian.operators import build_difference_ops
from discrete_pfaffian.orthofam import build_table
from discrete_pfaffian.weights import Charlier, Truncation, make_weight


@pytest.fixture(scope="module")
def ref1():
    return LaguerreReference(1.0, 1)


def test_schedule_validation():
    with pytest.raises(ValueError):
        LimitSchedule((0.9, 0.99, 0.95), "c")
    with pytest.raises(ValueError):
        LimitSchedule((10,), "beta")
    assert is_decreasing([3, 2, 1])
    assert not is_decreasing([3, 3, 1])
    assert is_decreasing([3, 3, 1], strict=False)


def test_charlier_limit():
    rows = charlier_limit_check(1.0, 3, (10, 100, 1000, 10000))
    for key in ("phi_diff", "S4_diff", "S1_diff"):
        seq = [getattr(r, key) for r in rows]
        assert is_decreasing(seq), (key, seq)
        assert seq[-1] < 1e-3


def test_charlier_against_itself_is_zero():
    w = make_weight(Charlier(1.0))
    tr = Truncation(40)
    a = build_table(w, 4, tr, sign="origin").phi
    b = build_table(make_weight(Charlier(1.0)), 4, tr, sign="origin").phi
    assert np.max(np.abs(a - b)) == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_psi1_has_zero_integral(alpha):
    assert abs(psi1_integral(alpha)) < 1e-6


def test_reference_kernel_properties(ref1):
    diag = ref1.K(1.5, 1.5)
    assert math.isfinite(diag) and diag > 0
    assert diag == pytest.approx(sum(ref1.phi(k, 1.5) ** 2 for k in range(2)), rel=1e-12)
    assert ref1.K(1.0, 2.0) == pytest.approx(ref1.K(2.0, 1.0), rel=1e-12)


def test_E_is_half_sign_kernel(ref1):
    # E f at x equals int 1/2 sgn(x - t) f(t) dt; check with f = phi_0 against direct quadrature
    from scipy import integrate

    x = 1.3
    f = lambda t: ref1.phi(0, t)
    left = integrate.quad(f, 0, x)[0]
    right = integrate.quad(f, x, np.inf)[0]
    assert ref1.E(0, x) == pytest.approx(0.5 * left - 0.5 * right, abs=1e-9)
    assert ref1.E_even(0, x) + ref1.E_odd(0, x) == pytest.approx(ref1.E(0, x), abs=1e-12)


def test_phi_convergence_n3():
    ref = LaguerreReference(1.0, 1)
    diffs = []
    for c in (0.9, 0.99, 0.999):
        m = MeixnerScaled(1.0, 1, c)
        X = m.lattice(2.0)
        diffs.append(abs(m.table.phi[3, X] / math.sqrt(1 - c) - ref.phi(3, 2.0)))
    assert is_decreasing(diffs)
    assert diffs[-1] < 1e-2


def test_lattice_parity():
    m = MeixnerScaled(1.0, 1, 0.99)
    assert m.lattice(1.0, "even") % 2 == 0
    assert m.lattice(1.0, "odd") % 2 == 1
    assert abs(m.lattice(1.0) - 100) <= 1


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_laguerre_relations_converge(alpha):
    rows = laguerre_limit_check(alpha, 1, cs=(0.9, 0.99, 0.999))
    for key in rows[0].diffs:
        seq = [r.diffs[key] for r in rows]
        assert is_decreasing(seq), (key, seq)
    assert rows[-1].diffs["phi"] < 1e-2
    assert rows[-1].diffs["KN"] < 1e-2
    assert rows[-1].diffs["eps_psi1"] < 1e-2
    for key in rows[0].parity:
        seq = [r.parity[key] for r in rows]
        assert is_decreasing(seq), (key, seq)


def test_kernel_level_can_be_skipped(ref1):
    row = laguerre_row(1.0, 1, 0.9, ((1.0, 2.0),), ref1, kernel_level=False)
    assert "S" not in row.diffs and not row.parity
    assert row.diffs["phi"] < 0.2


def test_backward_nabla_is_not_the_adjoint():
    # the adjoint of the forward operator and the backward difference are different operators
    w = make_weight(Charlier(1.0))
    tr = Truncation(30)
    adj = build_difference_ops(w, tr)
    back = build_difference_ops(w, tr, nabla_minus="backward")
    Np = adj["NablaPlus"].matrix
    assert np.max(np.abs(adj["NablaMinus"].matrix - Np.T)) < 1e-14
    assert np.max(np.abs(back["NablaMinus"].matrix - Np.T)) > 0.1
