"""Pfaffians, the square-root generating functional of a 2x2 matrix kernel,
correlation extraction, partition functions and de Bruijn identities."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .weights import DiscreteWeight, Truncation, companion_log_table


class SkewError(ValueError):
    """Input is not an even-dimensional antisymmetric matrix."""


class KernelSignError(ArithmeticError):
    """``det(I + eta K)`` came out negative beyond tolerance."""


def as_skew(A, tol: float = 1e-12) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SkewError("matrix must be square")
    if A.shape[0] % 2:
        raise SkewError(f"odd dimension {A.shape[0]}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if A.size and float(np.max(np.abs(A + A.T))) > tol * scale:
        raise SkewError("matrix is not antisymmetric")
    return A


def pfaffian(A, check: bool = True) -> float:
    """Pfaffian by skew-symmetric Gaussian elimination with pivoting.

    At step ``k`` the largest entry of row ``k`` right of the diagonal is
    swapped into position ``k+1`` (each swap flips the sign), then a rank-2
    update clears rows/columns ``k`` and ``k+1``.
    """
    A = as_skew(A) if check else np.asarray(A, dtype=float)
    n = A.shape[0]
    if n % 2:
        raise SkewError(f"odd dimension {n}")
    A = A.copy()
    result = 1.0
    for k in range(0, n - 1, 2):
        p = k + 1 + int(np.argmax(np.abs(A[k, k + 1 :])))
        if p != k + 1:
            A[[k + 1, p], :] = A[[p, k + 1], :]
            A[:, [k + 1, p]] = A[:, [p, k + 1]]
            result = -result
        piv = A[k, k + 1]
        if piv == 0.0:
            return 0.0
        result *= piv
        if k + 2 < n:
            tau = A[k, k + 2 :] / piv
            u = A[k + 1, k + 2 :]
            A[k + 2 :, k + 2 :] += np.outer(u, tau) - np.outer(tau, u)
    return float(result)


def pfaffian_bruteforce(A) -> float:
    """Pfaffian by recursive expansion along the first row (small sizes)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    rest = list(range(1, n))
    for j_idx, j in enumerate(rest):
        if A[0, j] == 0:
            continue
        keep = [r for r in rest if r != j]
        total += (-1) ** j_idx * A[0, j] * pfaffian_bruteforce(A[np.ix_(keep, keep)])
    return total


# -- generating functional and correlations ---------------------------------------


def _blocks(K):
    if hasattr(K, "blocks"):
        return K.blocks
    K = np.asarray(K)
    n = K.shape[0] // 2
    return ((K[:n, :n], K[:n, n:]), (K[n:, :n], K[n:, n:]))


def _restricted(K, sites: np.ndarray) -> np.ndarray:
    (A, B), (C, D) = _blocks(K)
    ix = np.ix_(sites, sites)
    return np.block([[A[ix], B[ix]], [C[ix], D[ix]]])


def det_I_plus_eta_K(K, eta) -> float:
    """``det(I + eta K)`` reduced to the support of ``eta``.

    Rows of ``eta K`` vanish off the support, so the determinant equals that
    of the principal submatrix on the support (in both components).
    """
    eta = np.asarray(eta, dtype=float)
    sites = np.nonzero(eta)[0]
    if sites.size == 0:
        return 1.0
    sub = _restricted(K, sites)
    e = np.concatenate([eta[sites], eta[sites]])
    M = np.eye(len(e)) + e[:, None] * sub
    return float(np.linalg.det(M))


def generating_functional(K, eta, margin: int | None = None, neg_tol: float = 1e-10) -> float:
    """``sqrt(det(I + eta K))`` with the nonnegative root.

    ``K`` is a 2x2 block kernel (an object with ``blocks`` or a full
    ``2(L+1)`` square array).  With ``margin`` given, ``eta`` must vanish on
    the last ``margin`` sites.
    """
    eta = np.asarray(eta, dtype=float)
    if margin:
        if np.any(eta[len(eta) - margin :] != 0):
            raise ValueError(f"eta must vanish within {margin} sites of the cutoff")
    d = det_I_plus_eta_K(K, eta)
    if d < -neg_tol:
        raise KernelSignError(f"det(I + eta K) = {d:.3g} < 0")
    return math.sqrt(max(d, 0.0))


def correlation(K, points, return_terms: bool = False):
    """``rho_m(y_1..y_m)`` by Moebius inversion over subsets of the points."""
    pts = [int(p) for p in points]
    m = len(pts)
    if m == 0:
        return (1.0, []) if return_terms else 1.0
    if len(set(pts)) != m:
        raise ValueError("correlation points must be distinct")
    if m > 6:
        raise ValueError("at most 6 points are supported")
    size = _blocks(K)[0][0].shape[0]
    total = 0.0
    terms = []
    for r in range(m + 1):
        for S in itertools.combinations(pts, r):
            eta = np.zeros(size)
            eta[list(S)] = 1.0
            g = generating_functional(K, eta)
            terms.append((S, g))
            total += (-1) ** (m - r) * g
    return (total, terms) if return_terms else total


def hole_probability(K, region) -> float:
    size = _blocks(K)[0][0].shape[0]
    eta = np.zeros(size)
    eta[list(region)] = -1.0
    return generating_functional(K, eta)


# -- partition functions ------------------------------------------------------------


def monic_basis(weight: DiscreteWeight, n: int, trunc: Truncation, kind: str = "orthogonal"):
    """Evaluator for monic polynomials ``pi_0..pi_{n-1}`` (orthogonal or plain
    monomials) at arbitrary integer points."""
    if kind == "monomial":
        return lambda x: np.vstack([np.asarray(x, dtype=float) ** k for k in range(n)])
    from .orthofam import build_recurrence

    rec = build_recurrence(weight, max(n - 1, 0), trunc)

    def ev(x):
        x = np.asarray(x, dtype=float)
        P = np.zeros((n, x.size))
        P[0] = 1.0
        for k in range(n - 1):
            P[k + 1] = (x - rec.alpha[k]) * P[k] - (rec.beta[k] * P[k - 1] if k > 0 else 0.0)
        return P

    return ev


def partition_function_pf(weight: DiscreteWeight, N: int, trunc: Truncation, basis: str = "orthogonal") -> float:
    """``Pf Q`` with ``Q_ij = sum_x w(x) (pi_i(x) pi_j(x+1) - pi_i(x+1) pi_j(x))``."""
    x = np.arange(trunc.L + 1)
    ev = monic_basis(weight, 2 * N, trunc, basis)
    P0, P1 = ev(x), ev(x + 1)
    w = np.exp(weight.log_table(trunc.L))
    Q = (P0 * w) @ P1.T
    Q = Q - Q.T
    return pfaffian(Q)


def _orth_gram(weight: DiscreteWeight, N: int, trunc: Truncation, basis: str, eps=None) -> np.ndarray:
    from .operators import build_epsilon_generic

    x = np.arange(trunc.L + 1)
    ev = monic_basis(weight, 2 * N, trunc, basis)
    V = ev(x) * np.exp(0.5 * weight.log_table(trunc.L))
    E = build_epsilon_generic(weight, trunc).matrix if eps is None else eps
    G = V @ E @ V.T
    return 0.5 * (G - G.T)


def partition_function_orth(weight: DiscreteWeight, N: int, trunc: Truncation, basis: str = "orthogonal",
                            eps=None) -> float:
    """``(-1)^N Pf[sum eps(x,y) pi_j(x) w^{1/2}(x) pi_k(y) w^{1/2}(y)]``.

    This equals the orthogonal-ensemble normalisation
    ``sum prod W(x_i) prod (x_j - x_i)`` over admissible configurations.
    """
    return (-1) ** N * pfaffian(_orth_gram(weight, N, trunc, basis, eps), check=False)


def partition_function_det(weight: DiscreteWeight, N: int, trunc: Truncation, basis: str = "orthogonal",
                           eps=None) -> float:
    """``(-1)^N det[...]`` over the same Gram matrix; equals ``(-1)^N`` times
    the square of :func:`partition_function_orth`."""
    return (-1) ** N * float(np.linalg.det(_orth_gram(weight, N, trunc, basis, eps)))


# -- de Bruijn identities ---------------------------------------------------------------


def debruijn_pair_sides(phi: np.ndarray, psi: np.ndarray) -> tuple[float, float]:
    """Both sides of ``sum_{x_1<..<x_N} det[phi(x1), psi(x1), ...] = Pf A``.

    ``phi`` and ``psi`` have shape ``(2N, S)`` over ``S`` support sites.
    """
    n2, S = phi.shape
    N = n2 // 2
    lhs = 0.0
    for xs in itertools.combinations(range(S), N):
        cols = []
        for x in xs:
            cols.append(phi[:, x])
            cols.append(psi[:, x])
        lhs += float(np.linalg.det(np.column_stack(cols)))
    A = phi @ psi.T - psi @ phi.T
    return lhs, pfaffian(A, check=False)


def debruijn_eps_sides(phi: np.ndarray, eps: np.ndarray) -> tuple[float, float]:
    """Both sides of ``sum det(phi_j(x_k)) Pf[eps(x_i, x_j)] = Pf[phi eps phi^T]``."""
    n2, S = phi.shape
    lhs = 0.0
    for xs in itertools.combinations(range(S), n2):
        ix = list(xs)
        lhs += float(np.linalg.det(phi[:, ix])) * pfaffian(eps[np.ix_(ix, ix)], check=False)
    G = phi @ eps @ phi.T
    return lhs, pfaffian(0.5 * (G - G.T), check=False)


def shifted_vandermonde_sides(points, coeffs, dps: int = 50) -> tuple[float, float]:
    """Both sides of ``prod_{i<j} (x_i-x_j)^2 ((x_i-x_j)^2 - 1) =
    det[pi(x_1), pi(x_1+1), ..., pi(x_N), pi(x_N+1)]`` for monic ``pi``.

    ``coeffs[k]`` holds the ascending coefficients of ``pi_k`` (monic of
    degree ``k``).  The determinant is badly conditioned in double
    precision, so it is evaluated with ``dps`` significant digits.
    """
    with mpmath.workdps(dps):
        xs = [mpmath.mpf(int(p)) for p in points]
        N = len(xs)
        lhs = mpmath.mpf(1)
        for i in range(N):
            for j in range(i + 1, N):
                d = xs[i] - xs[j]
                lhs *= d * d * (d * d - 1)
        polys = [[mpmath.mpf(float(v)) for v in c[::-1]] for c in coeffs]
        M = mpmath.matrix(2 * N, 2 * N)
        for col, x in enumerate(xs):
            for k, c in enumerate(polys):
                M[k, 2 * col] = mpmath.polyval(c, x)
                M[k, 2 * col + 1] = mpmath.polyval(c, x + 1)
        cols = [tuple(M[:, c]) for c in range(2 * N)]
        if len(set(cols)) < len(cols):
            # x_i + 1 = x_j repeats a column exactly
            return float(lhs), 0.0
        rhs = mpmath.det(M)
        return float(lhs), float(rhs)


@dataclass(frozen=True)
class DeBruijnReport:
    pair_rel: float
    eps_rel: float
    vandermonde_rel: float
    cases: int


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def de_bruijn_checks(seed: int = 0, trials: int = 5, max_support: int = 12, max_N: int = 3) -> DeBruijnReport:
    """Random instances of the three identities, worst relative residuals."""
    rng = np.random.default_rng(seed)
    pr = er = vr = 0.0
    cases = 0
    for N in range(1, max_N + 1):
        for _ in range(trials):
            S = int(rng.integers(2 * N, max_support + 1))
            phi = rng.normal(size=(2 * N, S))
            psi = rng.normal(size=(2 * N, S))
            pr = max(pr, _rel(*debruijn_pair_sides(phi, psi)))
            E = rng.normal(size=(S, S))
            E = E - E.T
            er = max(er, _rel(*debruijn_eps_sides(phi, E)))
            pts = np.sort(rng.choice(30, size=N, replace=False))
            coeffs = [np.concatenate([rng.normal(size=k), [1.0]]) for k in range(2 * N)]
            lhs, rhs = shifted_vandermonde_sides(pts, coeffs)
            vr = max(vr, _rel(rhs, lhs) if lhs != 0 else abs(rhs))
            cases += 1
    return DeBruijnReport(pr, er, vr, cases)


def orthogonal_pf_weight_check(weight: DiscreteWeight, config, eps=None) -> float:
    """``prod w^{1/2}(x_i) Pf[eps(x_i, x_j)] - (-1)^N prod W(x_i)`` on admissible
    configurations and ``prod w^{1/2} Pf[eps]`` (which must vanish) otherwise."""
    from .operators import build_epsilon_generic, upsilon_pfaffian

    pts = sorted(int(p) for p in config)
    if len(pts) % 2:
        raise ValueError("configuration must have even cardinality")
    L = max(pts) + 1
    tr = Truncation(L)
    E = build_epsilon_generic(weight, tr).matrix if eps is None else eps
    lw = weight.log_table(L)
    lW = companion_log_table(weight, L)
    lhs = math.exp(0.5 * float(np.sum(lw[pts]))) * pfaffian(E[np.ix_(pts, pts)], check=False)
    u = upsilon_pfaffian(pts)
    rhs = u * math.exp(float(np.sum(lW[pts])))
    return abs(lhs - rhs) / max(abs(rhs), abs(lhs), 1e-300) if rhs != 0 else abs(lhs)
