"""Orthonormal functions ``phi_n = p_n sqrt(w)`` on a truncated lattice.

Recurrence coefficients come from a discrete Stieltjes procedure run in
orthonormal (Lanczos) form, so the same code serves every weight family.
Rows are accurate in absolute terms; far in the tail, where ``phi_n`` is
below rounding level, relative accuracy is not maintained.
Closed-form Meixner and Charlier coefficients are kept for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gammaln, logsumexp

from .weights import Charlier, DiscreteWeight, DomainError, Meixner, Truncation


class DegeneracyError(ArithmeticError):
    """The inner product induced by the weight is degenerate at some degree."""


class ConditioningError(ArithmeticError):
    """Numerical loss of orthonormality or invertibility."""


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Monic recurrence ``P_{k+1} = (x - alpha_k) P_k - beta_k P_{k-1}``.

    ``log_norms[k]`` is ``log (P_k, P_k)_w``.  ``beta[0]`` is unused and set
    to zero.
    """

    alpha: np.ndarray
    beta: np.ndarray
    log_norms: np.ndarray

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def norms(self) -> np.ndarray:
        return np.exp(self.log_norms)

    @property
    def b(self) -> np.ndarray:
        """Off-diagonal of the orthonormal recurrence, ``sqrt(beta_k)``."""
        return np.sqrt(self.beta)


def _stieltjes(lw: np.ndarray, n_max: int):
    """Run the orthonormal Stieltjes procedure; returns coefficients and rows."""
    L = len(lw) - 1
    x = np.arange(L + 1, dtype=float)
    shift = float(lw.max())
    s = np.exp(0.5 * (lw - shift))
    q = np.zeros((n_max + 1, L + 1))
    a = np.zeros(n_max + 1)
    b = np.zeros(n_max + 1)
    nrm = math.sqrt(float(np.dot(s, s)))
    q[0] = s / nrm
    for k in range(n_max + 1):
        a[k] = float(np.dot(x * q[k], q[k]))
        if k == n_max:
            break
        r = (x - a[k]) * q[k]
        if k > 0:
            r -= b[k] * q[k - 1]
        # full reorthogonalisation (twice) against drift when the effective
        # support is short; costs relative accuracy only in the far tail
        for _ in range(2):
            r -= q[: k + 1].T @ (q[: k + 1] @ r)
        bk = math.sqrt(float(np.dot(r, r)))
        if not bk * bk > 1e-300:
            raise DegeneracyError(f"recurrence coefficient beta_{k + 1} = {bk * bk:g} is not positive")
        b[k + 1] = bk
        q[k + 1] = r / bk
    log_p0 = shift + 2.0 * math.log(nrm)
    return a, b, q, log_p0


def build_recurrence(weight: DiscreteWeight, n_max: int, trunc: Truncation) -> RecurrenceCoeffs:
    """Monic recurrence coefficients for ``w`` restricted to ``[0, L]``."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max > trunc.L / 4:
        raise ConditioningError(f"n_max={n_max} exceeds L/4={trunc.L / 4:g}; enlarge the cutoff")
    a, b, _, log_p0 = _stieltjes(weight.log_table(trunc.L), n_max)
    beta = b**2
    log_norms = log_p0 + np.concatenate([[0.0], np.cumsum(np.log(beta[1:]))])
    return RecurrenceCoeffs(a, beta, log_norms)


def meixner_recurrence(beta: float, c: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact monic ``(alpha_k, beta_k)`` for ``k < n``, Meixner weight."""
    k = np.arange(n, dtype=float)
    alpha = (k + (k + beta) * c) / (1 - c)
    b = k * (k + beta - 1) * c / (1 - c) ** 2
    return alpha, b


def charlier_recurrence(a: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact monic ``(alpha_k, beta_k)`` for ``k < n``, Charlier weight."""
    k = np.arange(n, dtype=float)
    return k + a, k * a


@dataclass(frozen=True)
class OrthonormalTable:
    """Rows ``phi[n, x]`` for ``n = 0..n_max`` and ``x = 0..L``.

    ``sign`` is ``"leading"`` (positive leading coefficient of ``p_n``) or
    ``"origin"`` (``phi_n(0) > 0``).  ``signs[n]`` is the factor relating the
    stored row to the positive-leading-coefficient row.
    """

    weight: DiscreteWeight
    trunc: Truncation
    rec: RecurrenceCoeffs
    phi: np.ndarray
    signs: np.ndarray
    sign: str = "leading"

    @property
    def n_max(self) -> int:
        return self.phi.shape[0] - 1

    @property
    def L(self) -> int:
        return self.trunc.L

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.L + 1)

    def basis(self, N: int) -> np.ndarray:
        """Rows spanning ``H_N``, i.e. ``phi_0 .. phi_{2N-1}``."""
        if 2 * N > self.n_max + 1:
            raise ValueError(f"2N={2 * N} exceeds the table size {self.n_max + 1}")
        return self.phi[: 2 * N]

    def poly_values(self, z, n_derivs: int = 0) -> np.ndarray:
        """Derivatives ``p_j^{(d)}(z)`` of the orthonormal polynomials.

        Returns an array of shape ``(n_derivs + 1, n_max + 1)``; ``z`` may be
        complex.  Value/derivative tuples are pushed through the recurrence,
        which avoids forming monomial coefficients.
        """
        a = self.rec.alpha
        b = self.rec.b
        n = self.n_max
        out = np.zeros((n_derivs + 1, n + 1), dtype=complex if np.iscomplexobj(z) else float)
        out[0, 0] = math.exp(-0.5 * self.rec.log_norms[0])
        for j in range(n):
            for d in range(n_derivs + 1):
                v = (z - a[j]) * out[d, j]
                if d > 0:
                    v += d * out[d - 1, j]
                if j > 0:
                    v -= b[j] * out[d, j - 1]
                out[d, j + 1] = v / b[j + 1]
        return out * self.signs[None, :]

    def with_sign(self, sign: str) -> "OrthonormalTable":
        if sign == self.sign:
            return self
        new = _sign_vector(self.rec, sign)
        flip = new * self.signs
        return OrthonormalTable(self.weight, self.trunc, self.rec, self.phi * flip[:, None], new, sign)


def _sign_vector(rec: RecurrenceCoeffs, sign: str) -> np.ndarray:
    if sign == "leading":
        return np.ones(rec.n)
    if sign != "origin":
        raise ValueError(f"unknown sign convention {sign!r}")
    # sign of p_n(0) from the monic recurrence
    p = np.zeros(rec.n)
    p[0] = 1.0
    prev, cur = 0.0, 1.0
    for k in range(rec.n - 1):
        nxt = -rec.alpha[k] * cur - (rec.beta[k] * prev if k > 0 else 0.0)
        prev, cur = cur, nxt
        p[k + 1] = cur
    s = np.sign(p)
    s[s == 0] = 1.0
    return s


def orthonormality_residual(phi: np.ndarray) -> tuple[float, tuple[int, int]]:
    G = phi @ phi.T
    R = np.abs(G - np.eye(len(G)))
    idx = np.unravel_index(int(np.argmax(R)), R.shape)
    return float(R[idx]), (int(idx[0]), int(idx[1]))


def build_table(weight: DiscreteWeight, n_max: int, trunc: Truncation, sign: str = "leading") -> OrthonormalTable:
    """Tabulate ``phi_n(x)`` for ``n <= n_max`` on ``[0, L]``."""
    if n_max > trunc.L / 4:
        raise ConditioningError(f"n_max={n_max} exceeds L/4={trunc.L / 4:g}; enlarge the cutoff")
    lw = weight.log_table(trunc.L)
    a, b, q, log_p0 = _stieltjes(lw, n_max)
    beta = b**2
    log_norms = log_p0 + np.concatenate([[0.0], np.cumsum(np.log(beta[1:]))])
    rec = RecurrenceCoeffs(a, beta, log_norms)
    res, pair = orthonormality_residual(q)
    if res > 1e-6:
        raise ConditioningError(f"orthonormality residual {res:.3g} at (m, n) = {pair}")
    signs = _sign_vector(rec, sign)
    phi = q * signs[:, None]
    phi.setflags(write=False)
    return OrthonormalTable(weight, trunc, rec, phi, signs, sign)


def recurrence_residual(table: OrthonormalTable, xs) -> float:
    """Residual of ``P_{n+1} - (x - alpha_n) P_n + beta_n P_{n-1}`` with the
    monic ``P_n`` recovered from the table, relative to the size of the
    individual terms."""
    rec = table.rec
    ix = np.asarray(xs, dtype=int)
    xf = ix.astype(float)
    lw = table.weight.log_table(table.L)
    P = table.phi[:, ix] * table.signs[:, None] * np.exp(0.5 * (rec.log_norms[:, None] - lw[ix][None, :]))
    worst = 0.0
    for n in range(1, rec.n - 1):
        t1 = (xf - rec.alpha[n]) * P[n]
        t2 = rec.beta[n] * P[n - 1]
        scale = np.abs(P[n + 1]) + np.abs(t1) + np.abs(t2)
        worst = max(worst, float(np.max(np.abs(P[n + 1] - t1 + t2) / scale)))
    return worst


# -- difference systems --------------------------------------------------------


def difference_residual(table: OrthonormalTable, n: int, x) -> tuple[np.ndarray, np.ndarray]:
    """Residuals (LHS - RHS) of the two first-order difference equations that
    tie ``phi_n`` and ``phi_{n-1}`` at ``x`` to their values at ``x - 1``.

    Evaluated with ``phi_n(0) > 0``; only Meixner and Charlier weights have
    such a closed system.
    """
    kind = table.weight.kind
    if not isinstance(kind, (Meixner, Charlier)):
        raise NotImplementedError("difference systems exist only for Meixner and Charlier weights")
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside [1, {table.n_max}]")
    phi = table.with_sign("origin").phi
    xs = np.atleast_1d(np.asarray(x, dtype=int))
    if np.any(xs < 0) or np.any(xs > table.L):
        raise DomainError("x outside the truncated lattice")
    xf = xs.astype(float)
    fn, fm = phi[n, xs], phi[n - 1, xs]
    prev_n = np.where(xs > 0, phi[n, np.maximum(xs - 1, 0)], 0.0)
    prev_m = np.where(xs > 0, phi[n - 1, np.maximum(xs - 1, 0)], 0.0)
    if isinstance(kind, Meixner):
        bt, c = kind.beta, kind.c
        g = np.sqrt(c * xf * (xf + bt - 1))
        h = math.sqrt(c * n * (n + bt - 1))
        r1 = g * prev_n - ((xf - n) * fn + h * fm)
        r2 = g * prev_m - (c * (xf + n + bt - 1) * fm - h * fn)
    else:
        a = kind.a
        g = np.sqrt(a * xf)
        h = math.sqrt(a * n)
        r1 = g * prev_n - ((xf - n) * fn + h * fm)
        r2 = g * prev_m - (-h * fn + a * fm)
    if np.ndim(x) == 0:
        return r1[0], r2[0]
    return r1, r2


# -- Laguerre reference functions ----------------------------------------------


def _laguerre_poly(alpha: float, n: int, x: np.ndarray) -> np.ndarray:
    """``L_k^{(alpha)}(x)`` for ``k = 0..n`` via the three-term recurrence."""
    out = np.zeros((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def _check_laguerre_domain(alpha: float, x: np.ndarray):
    if not alpha > -1:
        raise DomainError("alpha must exceed -1")
    if np.any(x < 0) or (alpha < 0 and np.any(x == 0)):
        raise DomainError("Laguerre functions need x > 0 (x >= 0 when alpha >= 0)")


def laguerre_phi(alpha: float, n: int, x):
    """``sqrt(n!/Gamma(alpha+n+1)) L_n^{(alpha)}(x) x^{alpha/2} e^{-x/2}``."""
    xa = np.asarray(x, dtype=float)
    _check_laguerre_domain(alpha, xa)
    Ln = _laguerre_poly(alpha, n, xa)[n]
    with np.errstate(divide="ignore"):
        lg = 0.5 * (gammaln(n + 1) - gammaln(alpha + n + 1)) + 0.5 * alpha * np.log(xa) - 0.5 * xa
    out = Ln * np.exp(lg)
    return float(out) if np.ndim(x) == 0 else out


def laguerre_phi_deriv(alpha: float, n: int, x):
    """Derivative of :func:`laguerre_phi` in ``x`` (``x > 0``)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("derivative requires x > 0")
    Ln = _laguerre_poly(alpha, n, xa)[n]
    dLn = -_laguerre_poly(alpha + 1, n - 1, xa)[n - 1] if n > 0 else np.zeros_like(xa)
    lg = 0.5 * (gammaln(n + 1) - gammaln(alpha + n + 1)) + 0.5 * alpha * np.log(xa) - 0.5 * xa
    out = (dLn + Ln * (0.5 * alpha / xa - 0.5)) * np.exp(lg)
    return float(out) if np.ndim(x) == 0 else out


def laguerre_upper(alpha: float, n: int, tol: float = 1e-16) -> float:
    """A point ``X`` with ``e^{-X/2} X^{n + alpha/2} < tol``."""
    X = 10.0 + 4.0 * n
    while -0.5 * X + (n + 0.5 * alpha) * math.log(X) > math.log(tol):
        X *= 1.25
    return X


@dataclass(frozen=True)
class LaguerreTable:
    alpha: float
    n_max: int

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError("alpha must exceed -1")

    def phi(self, n: int, x):
        if n > self.n_max:
            raise ValueError(f"n={n} exceeds n_max={self.n_max}")
        return laguerre_phi(self.alpha, n, x)

    def dphi(self, n: int, x):
        return laguerre_phi_deriv(self.alpha, n, x)

    def inner(self, m: int, n: int) -> float:
        """``int_0^inf phi_m phi_n dx`` by adaptive quadrature."""
        X = laguerre_upper(self.alpha, max(m, n))
        f = lambda t: laguerre_phi(self.alpha, m, t) * laguerre_phi(self.alpha, n, t)  # noqa: E731
        val, _ = integrate.quad(f, 0.0, X, limit=400, epsabs=1e-12, epsrel=1e-12)
        return val

    def gram(self) -> np.ndarray:
        n = self.n_max + 1
        G = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                G[i, j] = G[j, i] = self.inner(i, j)
        return G


def table_to_csv(table: OrthonormalTable, path) -> None:
    """Write ``phi`` as CSV: one row per ``n``, one column per ``x``."""
    header = f"rows={table.n_max + 1} cols={table.L + 1} weight={table.weight.label()} sign={table.sign}"
    np.savetxt(path, table.phi, delimiter=",", header=header, fmt="%.17g")


def log_total_mass(weight: DiscreteWeight, L: int) -> float:
    return float(logsumexp(weight.log_table(L)))
