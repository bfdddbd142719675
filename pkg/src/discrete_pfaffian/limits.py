"""Numerical checks of two limit transitions of the Meixner ensembles.

* Charlier: ``beta -> inf`` with ``c = a/(beta+a)``.
* Laguerre: ``c -> 1-`` with ``beta = alpha + 1`` and lattice points
  ``X = round(x/(1-c))``.

The Laguerre side lives on ``(0, inf)``; its integrals use adaptive
quadrature with the algebraic endpoint weight ``t^{alpha/2 + p}`` so the
``x^{alpha/2 - 1}`` behaviour of ``phi/x`` near zero is integrated exactly.
Discrete kernels are evaluated pointwise from the basis vectors, so the
lattice can be long (``L ~ 1e5`` at ``c = 0.999``) without dense matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .operators import apply_D, apply_right_nabla_minus, apply_epsilon, apply_nabla_plus
from .orthofam import _laguerre_poly, build_table, laguerre_phi, laguerre_phi_deriv
from .weights import Charlier, Meixner, Truncation, choose_cutoff, make_weight


class LimitError(ArithmeticError):
    """Quadrature or lattice setup for a limit check failed."""


@dataclass(frozen=True)
class LimitSchedule:
    values: tuple
    kind: str

    def __post_init__(self):
        v = tuple(float(t) for t in self.values)
        if len(v) < 2 or not (all(b > a for a, b in zip(v, v[1:])) or all(b < a for a, b in zip(v, v[1:]))):
            raise ValueError("a schedule must be strictly monotone with at least two entries")
        object.__setattr__(self, "values", v)


def is_decreasing(seq, strict: bool = True) -> bool:
    s = list(seq)
    return all((b < a) if strict else (b <= a) for a, b in zip(s, s[1:]))


# -- Meixner -> Charlier --------------------------------------------------------------


@dataclass
class CharlierRow:
    beta: float
    c: float
    phi_diff: float
    S4_diff: float
    S1_diff: float


def charlier_limit_check(a: float, n: int, betas, X: int = 30, N: int = 1,
                         kernels: bool = True) -> list[CharlierRow]:
    """``sup_{x <= X} |phi_n^Meixner(x; beta, a/(beta+a)) - phi_n^Charlier(x; a)|``
    along ``betas``, plus the same for the inversion-route ``S`` kernels."""
    from .kernels import build_S_inversion, prepare

    sched = LimitSchedule(tuple(betas), "beta")
    n_max = max(n, 2 * N + 2)
    ch = make_weight(Charlier(a))
    rows = []
    for beta in sched.values:
        c = a / (beta + a)
        me = make_weight(Meixner(beta, c))
        L = max(choose_cutoff(w, n_max, tail_tol=1e-30, relative=True, L_min=max(4 * n_max, X + 20)).L
                for w in (ch, me))
        trunc = Truncation(L, margin=8)
        tm = build_table(me, n_max, trunc, sign="origin")
        tc = build_table(ch, n_max, trunc, sign="origin")
        phi_diff = float(np.max(np.abs(tm.phi[n, : X + 1] - tc.phi[n, : X + 1])))
        s4 = s1 = float("nan")
        if kernels:
            sm, sc = prepare(me, N, L=L), prepare(ch, N, L=L)
            box = slice(0, X + 1)
            s4 = float(np.max(np.abs(build_S_inversion("SN4", sm).matrix[box, box]
                                     - build_S_inversion("SN4", sc).matrix[box, box])))
            s1 = float(np.max(np.abs(build_S_inversion("SN1", sm).matrix[box, box]
                                     - build_S_inversion("SN1", sc).matrix[box, box])))
        rows.append(CharlierRow(beta, c, phi_diff, s4, s1))
    return rows


# -- Laguerre reference ------------------------------------------------------------------


def _norm_const(alpha: float, k: int) -> float:
    return math.exp(0.5 * (gammaln(k + 1) - gammaln(alpha + k + 1)))


class LaguerreReference:
    """Continuous-side kernels for the symplectic Laguerre ensemble.

    ``psi1 = sqrt(2N) zeta_2N - sqrt(2N+alpha) zeta_{2N-1}``,
    ``psi2 = sqrt(2N+alpha) zeta_2N - sqrt(2N) zeta_{2N-1}`` with
    ``zeta_k = phi_k / x``;
    ``DS(x,y) = K_N2(x,y) + (lam/2) psi2(x) (E psi1)(y)`` with
    ``lam = sqrt(2N(2N+alpha))`` and ``E f(x) = 1/2 int_0^x f - 1/2 int_x^inf f``.
    """

    def __init__(self, alpha: float, N: int, epsabs: float = 1e-11):
        if not alpha > -1:
            raise LimitError("alpha must exceed -1")
        self.alpha = float(alpha)
        self.N = int(N)
        self.epsabs = epsabs
        n = 2 * N
        self.lam = math.sqrt(n * (n + alpha))
        # (coefficients on phi_{2N}, phi_{2N-1}) for psi1 and psi2, both divided by x
        self.c1 = (math.sqrt(n), -math.sqrt(n + alpha))
        self.c2 = (math.sqrt(n + alpha), -math.sqrt(n))
        self._cache: dict = {}

    # pointwise functions
    def phi(self, k: int, x):
        return laguerre_phi(self.alpha, k, x)

    def dphi(self, k: int, x):
        return laguerre_phi_deriv(self.alpha, k, x)

    def K(self, x: float, y: float) -> float:
        return float(sum(self.phi(k, x) * self.phi(k, y) for k in range(2 * self.N)))

    def dK_dy(self, x: float, y: float) -> float:
        return float(sum(self.phi(k, x) * self.dphi(k, y) for k in range(2 * self.N)))

    def _psi(self, coef, x):
        n = 2 * self.N
        return (coef[0] * self.phi(n, x) + coef[1] * self.phi(n - 1, x)) / x

    def psi1(self, x):
        return self._psi(self.c1, x)

    def psi2(self, x):
        return self._psi(self.c2, x)

    # integrals
    def _smooth(self, terms):
        """``g`` with ``f(t) = t^{alpha/2 + p} g(t)`` for ``terms = [(k, coef)]``."""
        a = self.alpha

        def g(t):
            t = np.asarray(t, dtype=float)
            Ls = _laguerre_poly(a, max(k for k, _ in terms), t)
            return sum(cf * _norm_const(a, k) * Ls[k] for k, cf in terms) * np.exp(-0.5 * t)

        return g

    def _integral(self, terms, p: int, lo: float, hi: float) -> float:
        """``int_lo^hi t^{alpha/2+p} g(t) dt``; ``hi`` may be ``inf``."""
        key = (tuple(terms), p, lo, hi)
        if key in self._cache:
            return self._cache[key]
        g = self._smooth(terms)
        ex = 0.5 * self.alpha + p
        if ex <= -1 and lo == 0.0:
            raise LimitError("integrand is not integrable at 0")
        tot = 0.0
        err = 0.0
        split = 1.0
        if lo == 0.0:
            top = min(hi, split)
            v, e = integrate.quad(g, 0.0, top, weight="alg", wvar=(ex, 0.0), limit=200, epsabs=self.epsabs)
            tot += v
            err += e
            lo = top
        if hi > lo:
            f = lambda t: t**ex * g(t)  # noqa: E731
            v, e = integrate.quad(f, lo, hi, limit=400, epsabs=self.epsabs, epsrel=1e-12)
            tot += v
            err += e
        if err > 1e-6:
            raise LimitError(f"quadrature error estimate {err:.3g} too large")
        self._cache[key] = tot
        return tot

    def _terms(self, which) -> tuple[list, int]:
        n = 2 * self.N
        if which == "psi1":
            return [(n, self.c1[0]), (n - 1, self.c1[1])], -1
        if which == "psi2":
            return [(n, self.c2[0]), (n - 1, self.c2[1])], -1
        return [(int(which), 1.0)], 0

    def integral_0(self, which, y: float) -> float:
        terms, p = self._terms(which)
        return self._integral(terms, p, 0.0, float(y))

    def integral_total(self, which) -> float:
        terms, p = self._terms(which)
        return self._integral(terms, p, 0.0, math.inf)

    def E(self, which, x: float) -> float:
        """``(E f)(x) = 1/2 int_0^x f - 1/2 int_x^inf f``."""
        return self.integral_0(which, x) - 0.5 * self.integral_total(which)

    def E_even(self, which, x: float) -> float:
        """``-1/2 int_x^inf f``."""
        return -0.5 * (self.integral_total(which) - self.integral_0(which, x))

    def E_odd(self, which, x: float) -> float:
        """``1/2 int_0^x f``."""
        return 0.5 * self.integral_0(which, x)

    # kernels
    def DS(self, x: float, y: float) -> float:
        return self.K(x, y) + 0.5 * self.lam * self.psi2(x) * self.E("psi1", y)

    def S(self, x: float, y: float, side: str = "full") -> float:
        """``(E DS)(x, y)``; ``side`` selects ``E``, ``E^e`` or ``E^o`` in ``x``."""
        Ex = {"full": self.E, "even": self.E_even, "odd": self.E_odd}[side]
        n = 2 * self.N
        val = sum(Ex(k, x) * self.phi(k, y) for k in range(n))
        return float(val + 0.5 * self.lam * Ex("psi2", x) * self.E("psi1", y))

    def DSD(self, x: float, y: float) -> float:
        """``(DS D)(x, y) = -d/dy DS(x, y)``."""
        return -(self.dK_dy(x, y) + 0.5 * self.lam * self.psi2(x) * self.psi1(y))

    def SD(self, x: float, y: float) -> float:
        """``(S D)(x, y) = -d/dy S(x, y)``."""
        n = 2 * self.N
        val = sum(self.E(k, x) * self.dphi(k, y) for k in range(n))
        return -float(val + 0.5 * self.lam * self.E("psi2", x) * self.psi1(y))


def laguerre_reference(alpha: float, N: int) -> LaguerreReference:
    return LaguerreReference(alpha, N)


def psi1_integral(alpha: float, N: int = 1) -> float:
    """``int_0^inf psi1`` (expected to vanish)."""
    return LaguerreReference(alpha, N).integral_total("psi1")


# -- discrete side at one c --------------------------------------------------------------


class MeixnerScaled:
    """Pointwise Meixner quantities with ``beta = alpha + 1`` at one ``c``."""

    def __init__(self, alpha: float, N: int, c: float, tail_tol: float = 1e-20, n_extra: int = 1):
        self.alpha, self.N, self.c = float(alpha), int(N), float(c)
        self.s = 1.0 - c
        self.weight = make_weight(Meixner(alpha + 1.0, c))
        n_max = 2 * N + n_extra
        self.trunc = choose_cutoff(self.weight, n_max, tail_tol=tail_tol, relative=True, L_min=8 * n_max)
        self.table = build_table(self.weight, n_max, self.trunc, sign="origin")
        w = self.weight
        self.Phi = self.table.phi[: 2 * N]
        self.DPhi = np.array([apply_D(w, f) for f in self.Phi])
        self.NpPhi = np.array([apply_nabla_plus(w, f) for f in self.Phi])
        self.PhiNm = np.array([apply_right_nabla_minus(w, f) for f in self.Phi])
        M = self.Phi @ self.DPhi.T
        M = 0.5 * (M - M.T)
        self.mu = np.linalg.inv(M)
        self.mu = 0.5 * (self.mu - self.mu.T)
        n = 2 * N
        b = alpha + 1.0
        x = self.table.x.astype(float)
        p2, p1 = self.table.phi[n], self.table.phi[n - 1]
        self.psi1 = (math.sqrt(n * c) * p2 - math.sqrt(n + b - 1) * p1) / (x + b)
        self.psi2 = (math.sqrt(n + b - 1) * p2 - math.sqrt(n * c) * p1) / (x + b - 1)
        self.eps_psi1 = apply_epsilon(w, self.psi1)
        self.eps_psi2 = apply_epsilon(w, self.psi2)

    @property
    def L(self) -> int:
        return self.trunc.L

    def lattice(self, x: float, parity: str | None = None) -> int:
        X = int(round(x / self.s))
        if parity == "even" and X % 2:
            X += 1
        elif parity == "odd" and X % 2 == 0:
            X += 1
        if X > self.L - self.trunc.margin:
            raise LimitError(f"lattice point {X} beyond the cutoff {self.L}")
        return X

    def _bil(self, A, B, X, Y) -> float:
        return float(A[:, X] @ self.mu @ B[:, Y])

    def S(self, X, Y):
        return self._bil(self.Phi, self.Phi, X, Y)

    def DS(self, X, Y):
        return self._bil(self.DPhi, self.Phi, X, Y)

    def NpS(self, X, Y):
        return self._bil(self.NpPhi, self.Phi, X, Y)

    def SNm(self, X, Y):
        return self._bil(self.Phi, self.PhiNm, X, Y)

    def NpSNm(self, X, Y):
        return self._bil(self.NpPhi, self.PhiNm, X, Y)

    def KN(self, X, Y):
        return float(self.Phi[:, X] @ self.Phi[:, Y])


# -- Laguerre limit table -------------------------------------------------------------------

RELATIONS = ("phi", "KN", "psi1", "psi2", "eps_psi1", "DS", "S", "NpS", "SNm", "NpSNm")


@dataclass
class LaguerreRow:
    c: float
    L: int
    diffs: dict
    parity: dict = field(default_factory=dict)


def laguerre_row(alpha: float, N: int, c: float, pairs, ref: LaguerreReference | None = None,
                 n_phi: int | None = None, kernel_level: bool = True) -> LaguerreRow:
    """Differences between the scaled discrete quantities and their limits at one ``c``.

    Keys of ``diffs``: ``phi`` (scaled ``phi_n``), ``KN``, ``psi1``, ``psi2``,
    ``eps_psi1`` (limit ``1/2 E psi1``), and the kernel relations ``DS``,
    ``S`` (limit ``1/2 S``), ``NpS`` (``1/2 DS``), ``SNm`` (``1/2 DS(y,x)``),
    ``NpSNm`` (``1/2 DS D``); the last two carry a leading minus on the
    discrete side.  ``parity`` holds the ``S`` and ``eps psi2``
    differences with the lattice point forced even or odd, measured against
    the one-sided integrals.
    """
    ref = LaguerreReference(alpha, N) if ref is None else ref
    m = MeixnerScaled(alpha, N, c)
    s = m.s
    n_phi = 2 * N if n_phi is None else n_phi
    xs = sorted({v for p in pairs for v in p})
    d = {k: 0.0 for k in ("phi", "psi1", "psi2", "eps_psi1")}
    for x in xs:
        X = m.lattice(x)
        for n in range(n_phi + 1):
            d["phi"] = max(d["phi"], abs(m.table.phi[n, X] / math.sqrt(s) - ref.phi(n, x)))
        d["psi1"] = max(d["psi1"], abs(m.psi1[X] / s**1.5 - ref.psi1(x)))
        d["psi2"] = max(d["psi2"], abs(m.psi2[X] / s**1.5 - ref.psi2(x)))
        d["eps_psi1"] = max(d["eps_psi1"], abs(m.eps_psi1[X] / math.sqrt(s) - 0.5 * ref.E("psi1", x)))
    par = {}
    if kernel_level:
        for k in ("KN", "DS", "S", "NpS", "SNm", "NpSNm"):
            d[k] = 0.0
        for key in ("S_even", "S_odd", "eps_psi2_even", "eps_psi2_odd"):
            par[key] = 0.0
        for x, y in pairs:
            X, Y = m.lattice(x), m.lattice(y)
            d["KN"] = max(d["KN"], abs(m.KN(X, Y) / s - ref.K(x, y)))
            DSa = ref.DS(x, y)
            d["DS"] = max(d["DS"], abs(m.DS(X, Y) / s - DSa))
            d["S"] = max(d["S"], abs(m.S(X, Y) - 0.5 * ref.S(x, y)))
            d["NpS"] = max(d["NpS"], abs(m.NpS(X, Y) / s - 0.5 * DSa))
            sn, nsn = m.SNm(X, Y) / s, m.NpSNm(X, Y) / s**2
            DSt, DSD = ref.DS(y, x), ref.DSD(x, y)
            d["SNm"] = max(d["SNm"], abs(-sn - 0.5 * DSt))
            d["NpSNm"] = max(d["NpSNm"], abs(-nsn - 0.5 * DSD))
            for side in ("even", "odd"):
                Xp = m.lattice(x, side)
                par[f"S_{side}"] = max(par[f"S_{side}"], abs(m.S(Xp, Y) - ref.S(x, y, side)))
                Ep = ref.E_even if side == "even" else ref.E_odd
                par[f"eps_psi2_{side}"] = max(par[f"eps_psi2_{side}"],
                                              abs(m.eps_psi2[Xp] / math.sqrt(s) - Ep("psi2", x)))
    return LaguerreRow(c, m.L, d, par)


def laguerre_limit_check(alpha: float, N: int, cs=(0.9, 0.99, 0.999), pairs=((1.0, 2.0), (2.0, 1.0), (1.0, 3.0)),
                         kernel_cs=None) -> list[LaguerreRow]:
    """Rows of :func:`laguerre_row` along ``cs``; kernel-level relations only
    for ``c`` in ``kernel_cs`` (default: all)."""
    sched = LimitSchedule(tuple(cs), "c")
    ref = LaguerreReference(alpha, N)
    kernel_cs = sched.values if kernel_cs is None else tuple(kernel_cs)
    return [laguerre_row(alpha, N, c, pairs, ref, kernel_level=c in kernel_cs) for c in sched.values]
