import math

import numpy as np
import pytest

from discrete_pfaffian.kernels import orthogonal_kernel, symplectic_kernel
from discrete_pfaffian.oracle import (
    Configuration,
    EnsembleSpec,
    EnumerationSizeError,
    compare,
    config_weight,
    enumerate_ensemble,
    oracle_correlation,
    oracle_density,
    oracle_generating_functional,
)
from discrete_pfaffian.pfaffian import generating_functional
from discrete_pfaffian.weights import Charlier, Meixner, Truncation, make_weight

CH = make_weight(Charlier(1.0))
ME = make_weight(Meixner(2.0, 0.3))


def test_config_weights():
    sp = EnsembleSpec("symplectic", 2, CH, Truncation(20))
    assert config_weight(sp, [4, 5]) == 0.0
    ws = np.exp(CH.log_table(20))
    # (x_i - x_j)^2 ((x_i - x_j)^2 - 1) = 9 * 8 at distance 3
    assert config_weight(sp, [1, 4]) == pytest.approx(ws[1] * ws[4] * 72, rel=1e-12)
    s1 = EnsembleSpec("symplectic", 1, CH, Truncation(20))
    assert config_weight(s1, [6]) == pytest.approx(ws[6], rel=1e-12)
    orth = EnsembleSpec("orthogonal", 1, ME, Truncation(20))
    assert config_weight(orth, [1, 2]) == 0.0
    assert config_weight(orth, [0, 2]) == 0.0
    assert config_weight(orth, [0, 3]) > 0


def test_configuration_validation():
    with pytest.raises(ValueError):
        Configuration((3, 1))
    assert Configuration((0, 3)).is_admissible()
    assert not Configuration((1, 2)).is_admissible()
    assert not Configuration((0, 2)).is_admissible()
    with pytest.raises(ValueError):
        config_weight(EnsembleSpec("symplectic", 2, CH, Truncation(20)), [1])


def test_single_particle_distribution():
    dist = enumerate_ensemble(EnsembleSpec("symplectic", 1, CH, Truncation(30)))
    ws = np.exp(CH.log_table(30))
    assert np.max(np.abs(dist.probs - ws / ws.sum())) < 1e-14
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_orthogonal_support_is_even_odd():
    dist = enumerate_ensemble(EnsembleSpec("orthogonal", 1, CH, Truncation(30)))
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(dist.configs[:, 0] % 2 == 0)
    assert np.all(dist.configs[:, 1] % 2 == 1)
    # every admissible pair is present
    assert len(dist.configs) == sum(1 for a in range(0, 31, 2) for b in range(a + 1, 31, 2))


def test_symplectic_support_excludes_neighbours():
    dist = enumerate_ensemble(EnsembleSpec("symplectic", 3, CH, Truncation(16)))
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(dist.configs, axis=1) >= 2)


def test_oracle_functionals():
    dist = enumerate_ensemble(EnsembleSpec("symplectic", 2, CH, Truncation(30)))
    assert oracle_generating_functional(dist, np.zeros(31)) == pytest.approx(1.0, abs=1e-12)
    assert oracle_density(dist).sum() == pytest.approx(2.0, abs=1e-12)
    assert oracle_correlation(dist, [4]) == pytest.approx(oracle_density(dist)[4], abs=1e-14)
    with pytest.raises(ValueError):
        oracle_correlation(dist, [2, 2])


def test_oracle_multilinear():
    dist = enumerate_ensemble(EnsembleSpec("orthogonal", 1, ME, Truncation(30)))
    eta = np.zeros(31)
    eta[[0, 3]] = [0.2, -0.4]
    vals = []
    for t in (0.0, 0.5, 1.0):
        e = eta.copy()
        e[5] = t
        vals.append(oracle_generating_functional(dist, e))
    assert abs(vals[2] - 2 * vals[1] + vals[0]) < 1e-14


def test_size_guard():
    with pytest.raises(EnumerationSizeError):
        enumerate_ensemble(EnsembleSpec("symplectic", 6, CH, Truncation(400)))


def test_top_configurations_sorted():
    dist = enumerate_ensemble(EnsembleSpec("symplectic", 2, CH, Truncation(20)))
    top = dist.top(5)
    assert len(top) == 5
    assert all(a[1] >= b[1] for a, b in zip(top, top[1:]))


def test_kernel_against_oracle_charlier_n2():
    tr = Truncation(60)
    dist = enumerate_ensemble(EnsembleSpec("symplectic", 2, CH, tr))
    K = symplectic_kernel(CH, 2, L=60)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        eta = np.zeros(61)
        sup = rng.choice(20, size=5, replace=False)
        eta[sup] = rng.uniform(-0.9, 0.9, 5)
        worst = max(worst, abs(generating_functional(K, eta) - oracle_generating_functional(dist, eta)))
    assert worst < 1e-6


def test_compare_reports():
    spec = EnsembleSpec("symplectic", 1, CH, Truncation(40))
    rep = compare(spec, symplectic_kernel(CH, 1, L=40), trials=5)
    assert all(math.isfinite(v) for v in rep.as_dict().values())
    assert rep.rho1_max < 1e-8
    spec = EnsembleSpec("orthogonal", 1, ME, Truncation(60))
    rep = compare(spec, orthogonal_kernel(ME, 1, L=60), trials=5)
    assert rep.gen_max < 1e-6
    assert rep.hole_max < 1e-6
