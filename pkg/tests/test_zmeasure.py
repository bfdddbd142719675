import math

import numpy as np
import pytest

from discrete_pfaffian.oracle import Configuration
from discrete_pfaffian.zmeasure import (
    DiagramError,
    YoungDiagram,
    ZParams,
    companion_ratio_check,
    hook_identity_residual,
    map_orthogonal,
    map_symplectic,
    normalization_check,
    partitions,
    proportionality_check,
    random_diagram,
    unmap_orthogonal,
    unmap_symplectic,
    z_weight,
)


def test_diagram_basics():
    lam = YoungDiagram((3, 1, 0))
    assert lam.parts == (3, 1)
    assert lam.size == 4
    assert lam.transpose().parts == (2, 1, 1)
    assert lam.transpose().transpose() == lam
    with pytest.raises(DiagramError):
        YoungDiagram((1, 2))


def test_partition_counts():
    assert [sum(1 for _ in partitions(n)) for n in range(9)] == [1, 1, 2, 3, 5, 7, 11, 15, 22]
    assert all(p.length <= 2 for p in partitions(7, max_len=2))


def test_empty_and_single_box():
    p = ZParams(2.0, 3.0, 2.0, 0.3)
    assert z_weight(p, YoungDiagram(())) == pytest.approx((1 - 0.3) ** p.t, rel=1e-14)
    expect = (1 - 0.3) ** p.t * 0.3 * 2.0 * 3.0 / 2
    assert z_weight(p, YoungDiagram((1,))) == pytest.approx(expect, rel=1e-14)


def test_vanishing_beyond_length():
    N = 2
    p = ZParams.symplectic(N, 2.0, 0.3)
    assert z_weight(p, YoungDiagram((2, 1, 1))) == 0.0
    assert z_weight(p, YoungDiagram((2, 1))) != 0.0


def test_support_by_enumeration():
    N = 2
    ps = ZParams.symplectic(N, 2.5, 0.3)
    po = ZParams.orthogonal(N, 2.5, 0.3)
    for n in range(21):
        for lam in partitions(n):
            assert (z_weight(ps, lam) == 0.0) == (lam.length > N)
            assert (z_weight(po, lam) == 0.0) == (lam.transpose().length > 2 * N)


def test_symplectic_map_examples():
    assert map_symplectic(YoungDiagram(()), 2) == (0, 2)
    assert map_symplectic(YoungDiagram((3, 1)), 2) == (1, 5)
    with pytest.raises(DiagramError):
        map_symplectic(YoungDiagram((1, 1, 1)), 2)


def test_maps_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(100):
        lam = random_diagram(rng, 15, max_len=3)
        x = map_symplectic(lam, 3)
        assert all(b - a >= 2 for a, b in zip(x, x[1:]))
        assert unmap_symplectic(x, 3) == lam
        mu = random_diagram(rng, 15, max_part=4)
        y = map_orthogonal(mu, 2)
        assert Configuration(y).is_admissible()
        assert unmap_orthogonal(y, 2) == mu


def test_orthogonal_image_parity():
    # admissible configurations are exactly the images
    N = 1
    for a in range(0, 12):
        for b in range(a + 1, 12):
            ok = Configuration((a, b)).is_admissible()
            try:
                unmap_orthogonal((a, b), N)
                hit = True
            except DiagramError:
                hit = False
            assert ok == hit


@pytest.mark.parametrize("flavor", ["symplectic", "orthogonal"])
def test_proportionality(flavor):
    rep = proportionality_check(2.0, 0.3, 2, flavor, pairs=50, seed=0)
    assert rep.max_rel < 1e-10
    assert rep.skipped < rep.pairs
    assert rep.constant_spread < 1e-9


def test_companion_ratios():
    assert companion_ratio_check(2.0, 0.3, 2, pairs=30) < 1e-10


def test_hook_identity():
    rng = np.random.default_rng(4)
    for _ in range(50):
        lam = random_diagram(rng, 20)
        assert hook_identity_residual(lam) < 1e-10


def test_normalization():
    p = ZParams(2.0, 2.0, 2.0, 0.2)
    assert normalization_check(p, 0).partial_sum == pytest.approx(0.8 ** p.t, rel=1e-14)
    sums = [normalization_check(p, k).partial_sum for k in range(0, 12, 3)]
    assert all(b > a for a, b in zip(sums, sums[1:]))
    rep = normalization_check(p, 30)
    assert abs(rep.deficit) < 1e-8
    assert math.isfinite(rep.tail_estimate)
