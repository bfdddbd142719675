"""Dense lattice realisations of the difference operators, the epsilon
operator and the projection kernel ``K_N`` on ``{0, ..., L}``.

The epsilon operator is the antisymmetric inverse of ``D = D+ - D-``:

    eps(2m, 2k+1) = -sqrt(w(2m)/w(2k+1)) * w(2m+1) w(2m+3) ... w(2k+1)
                                         / (w(2m) w(2m+2) ... w(2k)),   k >= m

with ``eps(2k+1, 2m) = -eps(2m, 2k+1)`` and zeros between equal parities.
It factors as ``F U F`` with ``F`` diagonal and ``U`` a 0/+-1 matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .orthofam import OrthonormalTable
from .weights import Charlier, DiscreteWeight, Meixner, Truncation


class OperatorError(ArithmeticError):
    """An internal consistency check on a constructed operator failed."""


@dataclass(frozen=True)
class LatticeOperator:
    matrix: np.ndarray
    label: str
    source: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, LatticeOperator):
            return LatticeOperator(self.matrix @ other.matrix, "composite", self.source)
        return self.matrix @ other


# -- difference operators -----------------------------------------------------


def _half_ratios(weight: DiscreteWeight, L: int) -> np.ndarray:
    """``sqrt(w(x)/w(x+1))`` for ``x = 0..L``."""
    lw = weight.log_table(L + 1)
    return np.exp(0.5 * (lw[:-1] - lw[1:]))


def build_difference_ops(weight: DiscreteWeight, trunc: Truncation,
                         nabla_minus: str = "adjoint") -> dict[str, LatticeOperator]:
    """``D_+``, ``D_-``, ``D = D_+ - D_-`` and the two nabla operators.

    ``(nabla_+ f)(x) = r(x) (f(x+1) - f(x))`` with ``r(x) = sqrt(w(x)/w(x+1))``.
    ``nabla_-`` defaults to the adjoint of ``nabla_+``, ``D_- - diag(r)``, which
    is what the nabla form of the symplectic kernel needs.
    ``nabla_minus="backward"`` gives ``r(x-1) (f(x) - f(x-1))`` instead; it
    does not yield an equivalent kernel.
    """
    L = trunc.L
    r = _half_ratios(weight, L)
    n = L + 1
    idx = np.arange(L)
    Dp = np.zeros((n, n))
    Dp[idx, idx + 1] = r[:L]
    Dm = np.zeros((n, n))
    Dm[idx + 1, idx] = r[:L]
    Np = Dp - np.diag(r)
    if nabla_minus == "adjoint":
        Nm = Dm - np.diag(r)
    elif nabla_minus == "backward":
        rm = np.concatenate([[0.0], r[:L]])
        Nm = np.diag(rm) - Dm
    else:
        raise ValueError(f"unknown nabla_minus variant {nabla_minus!r}")
    src = weight.label()
    return {
        "Dplus": LatticeOperator(Dp, "Dplus", src),
        "Dminus": LatticeOperator(Dm, "Dminus", src),
        "D": LatticeOperator(Dp - Dm, "D", src),
        "NablaPlus": LatticeOperator(Np, "NablaPlus", src),
        "NablaMinus": LatticeOperator(Nm, "NablaMinus", src),
    }


def apply_D(weight: DiscreteWeight, g: np.ndarray) -> np.ndarray:
    """``D g`` without forming a matrix (the value past the cutoff is taken as 0)."""
    L = len(g) - 1
    r = _half_ratios(weight, L)
    out = np.zeros_like(g, dtype=float)
    out[:-1] += r[:-1] * g[1:]
    out[1:] -= r[:-1] * g[:-1]
    return out


def apply_right_nabla_minus(weight: DiscreteWeight, g: np.ndarray) -> np.ndarray:
    """``(g nabla_-)(y) = sum_z g(z) nabla_-(z, y) = r(y) (g(y+1) - g(y))`` for the
    adjoint ``nabla_-``; the value past the cutoff is taken as 0."""
    L = len(g) - 1
    r = _half_ratios(weight, L)
    out = -r * g
    out[:-1] += r[:-1] * g[1:]
    return out


def apply_nabla_plus(weight: DiscreteWeight, g: np.ndarray) -> np.ndarray:
    L = len(g) - 1
    r = _half_ratios(weight, L)
    out = -r * g
    out[:-1] += r[:-1] * g[1:]
    return out


# -- epsilon --------------------------------------------------------------------


def epsilon_log_factors(weight: DiscreteWeight, L: int) -> np.ndarray:
    """``log f(x)`` with ``eps = F U F``.

    ``f(2k) = w(2k)^{-1/2} w(2) w(4)...w(2k) / (w(1) w(3)...w(2k-1))`` and
    ``f(2k+1) = w(2k+1)^{-1/2} w(1) w(3)...w(2k+1) / (w(2) w(4)...w(2k))``.
    """
    lw = weight.log_table(L)
    x = np.arange(L + 1)
    even = np.where(x % 2 == 0, lw, 0.0)
    odd = np.where(x % 2 == 1, lw, 0.0)
    even[0] = 0.0
    ce = np.cumsum(even)
    co = np.cumsum(odd)
    # for x = 2k: evens up to 2k minus odds up to 2k-1 (= up to 2k)
    # for x = 2k+1: odds up to 2k+1 minus evens up to 2k (= up to 2k+1)
    return -0.5 * lw + np.where(x % 2 == 0, ce - co, co - ce)


def upsilon_matrix(n: int) -> np.ndarray:
    """Antisymmetric 0/+-1 matrix with ``U(2i, 2j+1) = -1`` for ``i <= j``."""
    x = np.arange(n)
    row_even = (x[:, None] % 2 == 0) & (x[None, :] % 2 == 1) & (x[:, None] < x[None, :])
    U = np.where(row_even, -1.0, 0.0)
    return U - U.T


def build_epsilon_generic(weight: DiscreteWeight, trunc: Truncation, check: bool = True) -> LatticeOperator:
    """Dense epsilon on ``{0..L}``; the rows' infinite sums are cut at ``L``."""
    L = trunc.L
    lf = epsilon_log_factors(weight, L)
    U = upsilon_matrix(L + 1)
    mask = U != 0
    S = np.where(mask, lf[:, None] + lf[None, :], -np.inf)
    E = U * np.exp(S)
    if check:
        asym = float(np.max(np.abs(E + E.T))) if E.size else 0.0
        if asym > 1e-10:
            raise OperatorError(f"epsilon antisymmetry violated by {asym:.3g}")
    return LatticeOperator(E, "Epsilon", weight.label(), {"margin": trunc.margin})


def build_epsilon_literal(weight: DiscreteWeight, trunc: Truncation) -> LatticeOperator:
    """Epsilon with the square root taken over the whole product ratio.

    Kept for comparison: this variant is not an inverse of ``D`` unless the
    weight is constant on consecutive pairs.
    """
    L = trunc.L
    lw = weight.log_table(L)
    lf = epsilon_log_factors(weight, L)
    # generic log|eps(2m,2k+1)| = log f(2m) + log f(2k+1); the literal variant
    # halves the product part: 0.5*(lw(2m) - lw(2k+1) + P) with
    # P = log|eps| - 0.5*(lw(2m) - lw(2k+1))
    U = upsilon_matrix(L + 1)
    mask = U != 0
    S = lf[:, None] + lf[None, :]
    half = 0.5 * (lw[:, None] - lw[None, :])
    # orient so that "row" is the even index
    x = np.arange(L + 1)
    even_row = (x[:, None] % 2 == 0)
    half = np.where(even_row, half, -half)
    P = S - half
    lit = np.where(mask, half + 0.5 * P, -np.inf)
    return LatticeOperator(U * np.exp(lit), "Epsilon", weight.label() + " literal")


def apply_epsilon(weight: DiscreteWeight, g: np.ndarray) -> np.ndarray:
    """``eps g`` in O(L) by two running recursions.

    Even rows accumulate from the top (``eps(2m, .)`` couples to odd sites
    ``>= 2m+1``), odd rows from the bottom; the recursion coefficients are
    ratios of neighbouring weights, so nothing overflows at large ``L``.
    """
    g = np.asarray(g, dtype=float)
    L = len(g) - 1
    lf = epsilon_log_factors(weight, L)
    out = np.zeros(L + 1)
    evens = np.arange(0, L + 1, 2)
    # even rows: U(m) = -f(2m) sum_{k>=m} f(2k+1) g(2k+1)
    acc = 0.0
    for e in evens[::-1]:
        if e + 2 <= L:
            acc *= math.exp(lf[e] - lf[e + 2])
        if e + 1 <= L:
            acc += math.exp(lf[e] + lf[e + 1]) * g[e + 1]
        out[e] = -acc
    # odd rows: V(m) = f(2m+1) sum_{k<=m} f(2k) g(2k)
    acc = 0.0
    for o in range(1, L + 1, 2):
        if o >= 3:
            acc *= math.exp(lf[o] - lf[o - 2])
        acc += math.exp(lf[o] + lf[o - 1]) * g[o - 1]
        out[o] = acc
    return out


def _closed_row_coeffs(kind, m: int, n_terms: int, variant: str) -> np.ndarray:
    """Coefficients of ``phi(2m + 2l + 1)``, ``l = 0..n_terms-1``, in the
    closed-form even-row expansion (including the leading sign)."""
    l = np.arange(n_terms, dtype=float)
    if isinstance(kind, Meixner):
        b, c = kind.beta, kind.c
        r0 = (b / 2 + m) / (m + 0.5)
        step = (b / 2 + m + l[1:]) * (m + l[1:]) / (((b + 1) / 2 + m + l[1:] - 1) * (m + 0.5 + l[1:]))
        R = r0 * np.concatenate([[1.0], np.cumprod(step)])
        return -math.sqrt(c) * np.sqrt(R)
    a = kind.a
    step = (m + l[1:]) / (m + 0.5 + l[1:])
    R = (1.0 / (m + 0.5)) * np.concatenate([[1.0], np.cumprod(step)])
    if variant == "sqrt":
        R = np.sqrt(R)
    return -math.sqrt(a / 2) * R


def _closed_odd_coeffs(kind, m: int, variant: str) -> np.ndarray:
    """Coefficients of ``phi(2m - 2l)``, ``l = 0..m``, in the closed-form
    odd-row expansion."""
    l = np.arange(m + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if isinstance(kind, Meixner):
            b, c = kind.beta, kind.c
            q0 = (-b / 2 - m) / (-m - 0.5)
            step = (-b / 2 - m + l[1:]) * (-m + l[1:] - 1) / ((-(b - 1) / 2 - m + l[1:] - 1) * (-m - 0.5 + l[1:]))
            Q = q0 * np.concatenate([[1.0], np.cumprod(step)])
            return math.sqrt(c) * np.sqrt(Q)
        a = kind.a
        step = (-m + l[1:] - 1) / (-m - 0.5 + l[1:])
        Q = (1.0 / (-m - 0.5)) * np.concatenate([[1.0], np.cumprod(step)])
        if variant == "sqrt":
            # the square root of the nominal ratio, signed so that the
            # expansion stays antisymmetric
            Q = np.sqrt(np.abs(Q))
        return math.sqrt(a / 2) * Q


def build_epsilon_closed(kind, trunc: Truncation, variant: str = "printed") -> LatticeOperator:
    """Epsilon assembled from the Pochhammer-ratio expansions for Meixner and
    Charlier weights, evaluated by running products.

    ``variant="printed"`` follows the expansions term by term;
    ``variant="sqrt"`` (Charlier only) takes the square root of the Charlier
    ratio, which is what the Meixner expansion reduces to as
    ``beta -> inf``, ``c = a/(beta + a)``.
    """
    if not isinstance(kind, (Meixner, Charlier)):
        raise TypeError("closed-form epsilon exists only for Meixner and Charlier weights")
    if variant not in ("printed", "sqrt"):
        raise ValueError(f"unknown variant {variant!r}")
    L = trunc.L
    E = np.zeros((L + 1, L + 1))
    for e in range(0, L + 1, 2):
        m = e // 2
        cols = np.arange(e + 1, L + 1, 2)
        if cols.size:
            E[e, cols] = _closed_row_coeffs(kind, m, cols.size, variant)
        if e + 1 <= L:
            E[e + 1, e - 2 * np.arange(m + 1)] = _closed_odd_coeffs(kind, m, variant)
    return LatticeOperator(E, "Epsilon", f"closed:{variant}")


@dataclass(frozen=True)
class ClosedEpsilonReport:
    variant: str
    max_abs_diff: float
    max_rel_diff: float
    antisymmetry: float
    residual_map: np.ndarray
    row_scale_fit: np.ndarray
    row_scale_residual: float


def compare_epsilon_closed(weight: DiscreteWeight, trunc: Truncation, variant: str = "printed") -> ClosedEpsilonReport:
    """Entrywise comparison of the closed-form epsilon with the generic one,
    plus a search for a diagonal rescaling ``diag(s) E_closed`` that
    reconciles them (one least-squares scale per row)."""
    G = build_epsilon_generic(weight, trunc).matrix
    C = build_epsilon_closed(weight.kind, trunc, variant).matrix
    R = C - G
    W = trunc.window
    Rw = R[W, W]
    Gw = G[W, W]
    finite = np.isfinite(Rw)
    max_abs = float(np.max(np.abs(np.where(finite, Rw, np.inf)))) if Rw.size else 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where((Gw != 0) & finite, np.abs(Rw) / np.abs(Gw), np.where(finite, 0.0, np.inf))
    anti = C + C.T
    anti_val = float(np.nanmax(np.abs(anti[W, W]))) if anti.size else 0.0
    Cw = np.nan_to_num(C[W, W], nan=0.0, posinf=0.0, neginf=0.0)
    num = np.sum(Cw * Gw, axis=1)
    den = np.sum(Cw * Cw, axis=1)
    s = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
    fit = float(np.max(np.abs(s[:, None] * Cw - Gw))) if Cw.size else 0.0
    return ClosedEpsilonReport(variant, max_abs, float(np.max(rel)) if rel.size else 0.0,
                               anti_val, R, s, fit)


def epsilon_factorization_check(weight: DiscreteWeight, trunc: Truncation) -> float:
    """``max |eps - F U F|`` over the truncated lattice."""
    L = trunc.L
    E = build_epsilon_generic(weight, trunc).matrix
    f = np.exp(epsilon_log_factors(weight, L))
    U = upsilon_matrix(L + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        FUF = f[:, None] * U * f[None, :]
    FUF = np.where(U == 0, 0.0, FUF)
    return float(np.max(np.abs(E - FUF)))


def upsilon_pfaffian(config) -> int:
    """Pfaffian of ``U`` restricted to the points of ``config``."""
    from .pfaffian import pfaffian

    pts = np.asarray(sorted(config), dtype=int)
    if len(pts) % 2:
        raise ValueError("configuration must have even cardinality")
    if len(pts) == 0:
        return 1
    ev = pts[:, None] % 2 == 0
    od = pts[None, :] % 2 == 1
    up = pts[:, None] < pts[None, :]
    A = np.where(ev & od & up, -1.0, 0.0)
    A = A - A.T
    return int(round(pfaffian(A)))


# -- projection kernel ------------------------------------------------------------


def cd_coefficient(table: OrthonormalTable, N: int) -> float:
    """Coefficient ``a_{2N}`` of the Christoffel-Darboux form in the
    ``phi_n(0) > 0`` convention.

    Closed values for Meixner and Charlier; ``-sqrt(beta_{2N})`` from the
    recurrence otherwise.
    """
    kind = table.weight.kind
    if isinstance(kind, Meixner):
        return -math.sqrt(2 * N * kind.c * (2 * N + kind.beta - 1)) / (1 - kind.c)
    if isinstance(kind, Charlier):
        return -math.sqrt(2 * N * kind.a)
    return -math.sqrt(table.rec.beta[2 * N])


def christoffel_darboux(table: OrthonormalTable, N: int, coeff: float | None = None) -> np.ndarray:
    """Off-diagonal CD quotient; the diagonal is left as NaN (0/0)."""
    t = table.with_sign("origin")
    a = cd_coefficient(t, N) if coeff is None else coeff
    p, q = t.phi[2 * N], t.phi[2 * N - 1]
    x = t.x.astype(float)
    num = np.outer(p, q) - np.outer(q, p)
    den = x[:, None] - x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        K = a * num / den
    np.fill_diagonal(K, np.nan)
    return K


@dataclass(frozen=True)
class KNReport:
    trace_err: float
    idempotency: float
    symmetry: float
    cd_rel: float


def build_KN(table: OrthonormalTable, N: int, check_cd: bool = True, cd_tol: float = 1e-8):
    """Projection onto ``span(phi_0..phi_{2N-1})`` from the direct sum.

    Returns the operator and a report; a CD mismatch above ``cd_tol``
    (relative to ``max |K_N|``) raises.
    """
    if 2 * N > table.n_max:
        raise ValueError(f"2N={2 * N} must not exceed n_max={table.n_max}")
    B = table.basis(N)
    K = B.T @ B
    cd_rel = float("nan")
    if check_cd:
        C = christoffel_darboux(table, N)
        off = ~np.eye(len(K), dtype=bool)
        scale = float(np.max(np.abs(K)))
        cd_rel = float(np.max(np.abs(C[off] - K[off]))) / scale
        if cd_rel > cd_tol:
            raise OperatorError(f"Christoffel-Darboux mismatch {cd_rel:.3g} exceeds {cd_tol:g}")
    rep = KNReport(
        trace_err=abs(float(np.trace(K)) - 2 * N),
        idempotency=float(np.max(np.abs(K @ K - K))),
        symmetry=float(np.max(np.abs(K - K.T))),
        cd_rel=cd_rel,
    )
    return LatticeOperator(K, "KN", table.weight.label(), {"N": N}), rep


def mutual_inverse_check(D: np.ndarray, E: np.ndarray, trunc: Truncation, probes) -> tuple[float, float]:
    """``max |(D eps - I) f|`` and ``max |(eps D - I) f|`` over the rows
    ``[0, L - margin]`` for probes supported in ``[2, L - 2 margin]``.

    Probe values outside that window are zeroed first.
    """
    L, mg = trunc.L, trunc.margin
    rows = slice(0, L + 1 - mg)
    r1 = r2 = 0.0
    for f in probes:
        f = np.array(f, dtype=float)
        f[:2] = 0.0
        f[L + 1 - 2 * mg :] = 0.0
        r1 = max(r1, float(np.max(np.abs((D @ (E @ f) - f)[rows]))))
        r2 = max(r2, float(np.max(np.abs((E @ (D @ f) - f)[rows]))))
    return r1, r2
