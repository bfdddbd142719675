"""Acceptance criteria 1-11.

Each test records one ``PASS``/``FAIL`` line, printed directly and collected
into a summary section at the end of the pytest run.  Run only this file with
``pytest tests/test_acceptance.py -v``.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from discrete_pfaffian.kernels import (
    build_rank_factorization,
    build_S_inversion,
    commutator_check,
    dminus_matrix_check,
    orthogonal_kernel,
    prepare,
    projection_identities,
    route_agreement,
    symplectic_kernel,
)
from discrete_pfaffian.limits import (
    charlier_limit_check,
    is_decreasing,
    laguerre_limit_check,
    psi1_integral,
)
from discrete_pfaffian.operators import epsilon_factorization_check, mutual_inverse_check
from discrete_pfaffian.oracle import EnsembleSpec, enumerate_ensemble, oracle_generating_functional
from discrete_pfaffian.orthofam import build_table, difference_residual
from discrete_pfaffian.pfaffian import (
    de_bruijn_checks,
    generating_functional,
    partition_function_det,
    partition_function_orth,
    partition_function_pf,
    pfaffian,
    shifted_vandermonde_sides,
)
from discrete_pfaffian.weights import Charlier, Meixner, Truncation, choose_cutoff, make_weight
from discrete_pfaffian.zmeasure import (
    ZParams,
    hook_identity_residual,
    normalization_check,
    proportionality_check,
    random_diagram,
)

CHARLIER = make_weight(Charlier(1.0))
MEIXNER = make_weight(Meixner(2.0, 0.3))


def report(k: int, title: str, checks: dict[str, tuple[float, float]]):
    """``checks`` maps a label to ``(value, tolerance)``; passing means value < tolerance."""
    failed = {name: v for name, (v, tol) in checks.items() if not v < tol}
    worst = ", ".join(f"{name}={v:.2e}<{tol:.0e}" for name, (v, tol) in checks.items())
    line = f"{'PASS' if not failed else 'FAIL'} criterion {k}: {title} [{worst}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failed, line


def gen_functional_gap(flavor, weight, N, L, trials=20, seed=0, window=20):
    tr = Truncation(L)
    dist = enumerate_ensemble(EnsembleSpec(flavor, N, weight, tr))
    K = symplectic_kernel(weight, N, L=L) if flavor == "symplectic" else orthogonal_kernel(weight, N, L=L)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        eta = np.zeros(L + 1)
        sup = rng.choice(window, size=6, replace=False)
        eta[sup] = rng.uniform(-0.9, 0.9, size=6)
        worst = max(worst, abs(generating_functional(K, eta) - oracle_generating_functional(dist, eta)))
    return worst


def test_criterion_01_symplectic_generating_functional():
    t0 = time.perf_counter()
    g1 = gen_functional_gap("symplectic", CHARLIER, 1, 40)
    t1 = time.perf_counter() - t0
    g2 = gen_functional_gap("symplectic", CHARLIER, 2, 60)
    report(1, "symplectic sqrt det(I + eta K) vs enumeration, Charlier a=1", {
        "N1_L40": (g1, 1e-8), "N1_runtime_s": (t1, 5.0), "N2_L60": (g2, 1e-6)})


def test_criterion_02_orthogonal_generating_functional():
    g1 = gen_functional_gap("orthogonal", MEIXNER, 1, 60)
    g2 = gen_functional_gap("orthogonal", CHARLIER, 2, 50)
    report(2, "orthogonal sqrt det(I + eta K) vs enumeration", {
        "meixner_2pts_L60": (g1, 1e-6), "charlier_4pts_L50": (g2, 1e-5)})


def test_criterion_03_route_agreement():
    checks = {}
    for w in (CHARLIER, MEIXNER):
        for N in (1, 2, 3, 5):
            s = prepare(w, N)
            for flavor in ("SN4", "SN1"):
                r = route_agreement(flavor, s)
                print(r["closed_record"])
                tag = f"{w.kind.__class__.__name__}_N{N}_{flavor}"
                checks[f"{tag}_rank"] = (r["rank"], 1e-7)
                checks[f"{tag}_closed"] = (r["closed"], 1e-7)
    worst_rank = max(v for k, (v, _) in checks.items() if k.endswith("rank"))
    worst_closed = max(v for k, (v, _) in checks.items() if k.endswith("closed"))
    ok = all(v < tol for v, tol in checks.values())
    report(3, "inversion vs rank vs closed-form kernels, N in {1,2,3,5}",
           {"worst_rank": (worst_rank, 1e-7), "worst_closed": (worst_closed, 1e-7)} if ok else checks)


def test_criterion_04_projection_identities():
    checks = {}
    for w in (CHARLIER, MEIXNER):
        for N in (1, 2):
            s = prepare(w, N)
            for flavor in ("SN4", "SN1"):
                rep = projection_identities(flavor, build_S_inversion(flavor, s), s)
                tag = f"{w.kind.__class__.__name__}_N{N}_{flavor}"
                checks[f"{tag}_reproduce"] = (rep.reproduce, 1e-8)
                checks[f"{tag}_annihilate"] = (rep.annihilate, 1e-8)
    worst = max(v for v, _ in checks.values())
    report(4, "S K_N D phi_i = phi_i, S K_N eps phi_i = phi_i, S = 0 off H_N",
           {"worst": (worst, 1e-8)})


def test_criterion_05_pfaffian_identities():
    rng = np.random.default_rng(5)
    worst_pf = 0.0
    for n in range(2, 13, 2):
        for _ in range(10):
            A = rng.normal(size=(n, n))
            A = A - A.T
            d = np.linalg.det(A)
            worst_pf = max(worst_pf, abs(pfaffian(A) ** 2 - d) / abs(d))
    rep = de_bruijn_checks(seed=5, trials=5, max_support=12, max_N=3)
    coeffs = [np.concatenate([rng.normal(size=k), [1.0]]) for k in range(6)]
    lhs, rhs = shifted_vandermonde_sides([0, 3, 7], coeffs)
    report(5, "Pf^2 = det, de Bruijn identities, shifted Vandermonde", {
        "pf_squared": (worst_pf, 1e-10), "pair_identity": (rep.pair_rel, 1e-10),
        "eps_identity": (rep.eps_rel, 1e-10),
        "vandermonde": (max(rep.vandermonde_rel, abs(rhs - lhs) / abs(lhs)), 1e-10)})


def test_criterion_06_partition_functions():
    checks = {}
    for w in (CHARLIER, MEIXNER):
        tr = Truncation(40)
        name = w.kind.__class__.__name__
        for N in (1, 2):
            Z = enumerate_ensemble(EnsembleSpec("symplectic", N, w, tr)).Z
            checks[f"{name}_sympl_N{N}"] = (abs(partition_function_pf(w, N, tr) / Z - 1), 1e-6)
            Zo = enumerate_ensemble(EnsembleSpec("orthogonal", N, w, tr)).Z
            det = partition_function_det(w, N, tr)
            checks[f"{name}_orth_det_N{N}"] = (abs((-1) ** N * det / Zo**2 - 1), 1e-6)
            checks[f"{name}_orth_pf_N{N}"] = (abs(partition_function_orth(w, N, tr) / Zo - 1), 1e-6)
    report(6, "enumerated normalisations vs Pf Q and the determinant form", checks)


def test_criterion_07_difference_systems():
    params = [Meixner(2.0, 0.3), Meixner(3.5, 0.5), Meixner(1.2, 0.7), Charlier(0.5), Charlier(1.0), Charlier(3.0)]
    checks = {}
    xs = np.arange(0, 41)
    for kind in params:
        w = make_weight(kind)
        tr = choose_cutoff(w, 13, tail_tol=1e-30, relative=True, L_min=60)
        table = build_table(w, 13, tr, sign="origin")
        worst = 0.0
        for n in range(1, 13):
            r1, r2 = difference_residual(table, n, xs)
            worst = max(worst, float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))
        checks[w.label()] = (worst, 1e-9)
    report(7, "first-order difference systems, n <= 12, x <= 40", checks)


def test_criterion_08_commutators():
    checks = {}
    for w in (CHARLIER, MEIXNER):
        name = w.kind.__class__.__name__
        for N in (1, 2):
            s = prepare(w, N)
            rep = commutator_check(s)
            fac = build_rank_factorization(s, route="analytic")
            T = np.atleast_2d(fac.T)
            dm = dminus_matrix_check(s)
            checks[f"{name}_N{N}_rank"] = (rep.sv_ratio, 1e-8)
            checks[f"{name}_N{N}_T"] = (float(np.max(np.abs(T - np.eye(len(T))))), 1e-8)
            checks[f"{name}_N{N}_det"] = (dm.determinant, 1e-9)
            if name == "Charlier":
                checks[f"{name}_N{N}_explicit"] = (rep.closed_residual, 1e-8)
    report(8, "rank of [D, K_N] K_N, explicit commutator, T = 1, det D_-", checks)


def test_criterion_09_operator_identities():
    checks = {}
    rng = np.random.default_rng(9)
    for w in (CHARLIER, MEIXNER):
        name = w.kind.__class__.__name__
        for N in (1, 2):
            s = prepare(w, N)
            E = s.eps
            probes = [rng.normal(size=s.L + 1) for _ in range(5)]
            r1, r2 = mutual_inverse_check(s.D, E, s.trunc, probes)
            kr = s.kn_report
            checks[f"{name}_N{N}_antisym"] = (float(np.max(np.abs(E + E.T))), 1e-12)
            checks[f"{name}_N{N}_FUF"] = (epsilon_factorization_check(w, s.trunc), 1e-10)
            checks[f"{name}_N{N}_Deps"] = (r1, 1e-8)
            checks[f"{name}_N{N}_epsD"] = (r2, 1e-8)
            checks[f"{name}_N{N}_idem"] = (kr.idempotency, 1e-9)
            checks[f"{name}_N{N}_trace"] = (kr.trace_err, 1e-8)
            checks[f"{name}_N{N}_CD"] = (kr.cd_rel, 1e-8)
    report(9, "epsilon, D eps = eps D = I, K_N projection and closed CD form", checks)


def test_criterion_10_zmeasures():
    ps = proportionality_check(2.0, 0.3, 2, "symplectic", pairs=50, seed=10)
    po = proportionality_check(2.0, 0.3, 2, "orthogonal", pairs=50, seed=10)
    rng = np.random.default_rng(10)
    hook = max(hook_identity_residual(random_diagram(rng, 25)) for _ in range(50))
    nrm = normalization_check(ZParams(2.0, 2.0, 2.0, 0.2), 30)
    report(10, "z-measure proportionality, hook identity, normalisation", {
        "symplectic": (ps.max_rel, 1e-10), "orthogonal": (po.max_rel, 1e-10),
        "hook": (hook, 1e-10), "normalization": (abs(nrm.deficit), 1e-8)})


def test_criterion_11_limits():
    t0 = time.perf_counter()
    rows = charlier_limit_check(1.0, 3, (10, 100, 1000, 10000))
    checks = {}
    decreasing = True
    for key in ("phi_diff", "S4_diff", "S1_diff"):
        seq = [getattr(r, key) for r in rows]
        decreasing &= is_decreasing(seq)
        checks[f"charlier_{key}"] = (seq[-1], 1e-3)
    for alpha in (0.5, 1.0, 2.0):
        lag = laguerre_limit_check(alpha, 1, cs=(0.9, 0.99, 0.999), kernel_cs=(0.9, 0.99))
        for key in ("phi", "psi1", "psi2", "eps_psi1"):
            decreasing &= is_decreasing([r.diffs[key] for r in lag])
        for key in ("KN", "DS", "S", "NpS", "SNm", "NpSNm"):
            decreasing &= is_decreasing([r.diffs[key] for r in lag[:2]])
        checks[f"laguerre_a{alpha}_phi"] = (lag[-1].diffs["phi"], 1e-2)
        checks[f"psi1_integral_a{alpha}"] = (abs(psi1_integral(alpha)), 1e-6)
    checks["runtime_s"] = (time.perf_counter() - t0, 600.0)
    checks["not_decreasing"] = (0.0 if decreasing else 1.0, 0.5)
    report(11, "Meixner to Charlier and Meixner to Laguerre limits", checks)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
